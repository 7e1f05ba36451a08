// ghelab: command-line front end.
//
//   ghelab ghe <csv>            GHE of one price series (+ shuffles)
//   ghelab simulate <config>    one path from the configured generator
//   ghelab ensemble <config>    Monte Carlo ensemble -> result CSV
//   ghelab table <T2..T9>       regenerate a reference table
//   ghelab plotdata <config>    structure-function / scaling-function data

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghelab/ghelab.hpp"

namespace fs = std::filesystem;
using namespace ghelab;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  fs::path out = ".";
  unsigned threads = 0;
};

std::ofstream open_output(const Globals& g, const std::string& file) {
  fs::create_directories(g.out);
  const auto path = g.out / file;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  std::cerr << "wrote " << path.string() << '\n';
  return os;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

io::RunConfig load_config(const std::string& path, const Globals& g) {
  auto cfg = io::parse_config(path);
  if (g.seed) cfg.seed = g.seed;
  return cfg;
}

unsigned threads_of(const io::RunConfig& cfg, const Globals& g) {
  return g.threads != 0 ? g.threads : cfg.threads.value_or(0);
}

struct GheArgs {
  std::string csv;
  std::string column = "price";
  std::string return_kind;
  std::string variable = "price";
  std::string name;
  std::size_t shuffles = 33;
  bool demean = true;
};

int cmd_ghe(const GheArgs& a, const Globals& g) {
  io::RunConfig cfg;
  cfg.generator = io::GeneratorKind::empirical;
  cfg.input = a.csv;
  cfg.column = a.column;
  cfg.n_shuffles = a.shuffles;
  cfg.demean = a.demean;
  io::detail::apply_key(cfg, "variable", a.variable);
  if (!a.return_kind.empty()) io::detail::apply_key(cfg, "return_kind", a.return_kind);
  if (!a.name.empty()) cfg.name = a.name;
  cfg.seed = g.seed;

  const auto spec = io::to_ensemble_spec(cfg);
  const auto report = run_ensemble(spec, g.threads);
  print_warnings(report.warnings);
  const auto rows = report_rows("ghe", io::param_label(spec.generator), spec.variable_kind, report);
  auto os = open_output(g, "ghe.csv");
  io::write_result_csv(os, rows);
  io::write_result_csv(std::cout, rows);
  return 0;
}

int cmd_simulate(const std::string& config, const Globals& g) {
  const auto cfg = load_config(config, g);
  const auto spec = io::to_ensemble_spec(cfg);
  spec.validate();
  // Path 0 of the matching ensemble.
  Rng rng(derive_seed(spec.master_seed, 0, 0));
  const auto returns = simulate_returns(spec.generator, spec.path_length, rng);
  const auto path = build_variable(returns, spec.variable_kind);

  auto os = open_output(g, cfg.output.value_or("path.csv"));
  os << "t,return," << to_string(spec.variable_kind) << '\n';
  for (std::size_t t = 0; t < path.size(); ++t) {
    // A price path carries one more point than there are returns.
    const bool shifted = spec.variable_kind == VariableKind::price;
    std::string r;
    if (!shifted) r = io::format_double(returns.values[t]);
    else if (t > 0) r = io::format_double(returns.values[t - 1]);
    os << t << ',' << r << ',' << io::format_double(path.values[t]) << '\n';
  }
  return 0;
}

int cmd_ensemble(const std::string& config, const Globals& g) {
  const auto cfg = load_config(config, g);
  const auto spec = io::to_ensemble_spec(cfg);
  const auto report = run_ensemble(spec, threads_of(cfg, g));
  print_warnings(report.warnings);
  if (report.scaling_warnings > 0) {
    std::cerr << "warning: " << report.scaling_warnings
              << " paths had a log-log fit with R^2 < " << kScalingR2Threshold << '\n';
  }
  const auto label = cfg.name.value_or(io::param_label(spec.generator));
  const auto rows = report_rows("ensemble", label, spec.variable_kind, report);
  auto os = open_output(g, cfg.output.value_or("ensemble.csv"));
  io::write_result_csv(os, rows);
  return 0;
}

struct TableArgs {
  std::string id;
  bool desk = false;
  std::string data_dir;
  std::size_t paths = 0;
  std::size_t shuffles = 33;
};

int cmd_table(const TableArgs& a, const Globals& g) {
  const auto id = parse_table_id(a.id);
  if (!id) throw Error(ErrorCode::InvalidConfig, "unknown table '" + a.id + "' (expected T2..T9)");
  TableOptions opt;
  if (!a.data_dir.empty()) opt.data_dir = a.data_dir;
  opt.threads = g.threads;
  opt.n_shuffles = a.shuffles;
  if (a.paths > 0) opt.n_paths = a.paths;
  const auto result = reproduce_table(*id, a.desk ? Scale::desk : Scale::full, g.seed.value_or(0), opt);
  print_warnings(result.warnings);
  auto os = open_output(g, a.id + ".csv");
  io::write_result_csv(os, result.rows);
  return 0;
}

int cmd_plotdata(const std::string& config, const Globals& g) {
  const auto cfg = load_config(config, g);
  if (!cfg.plot) throw Error(ErrorCode::MissingKey, "missing key 'plot'");
  const auto spec = io::to_ensemble_spec(cfg);
  spec.validate();
  Rng rng(derive_seed(spec.master_seed, 0, 0));
  const auto returns = simulate_returns(spec.generator, spec.path_length, rng);

  auto os = open_output(g, cfg.output.value_or(*cfg.plot + ".csv"));
  if (*cfg.plot == "structure_functions") {
    io::write_structure_csv(os, structure_points(build_variable(returns, spec.variable_kind), spec.ghe));
  } else {
    io::write_scaling_csv(os, scaling_points(returns, spec.variable_kind, cfg.q_grid, spec.ghe,
                                             spec.n_shuffles, spec.master_seed));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Hurst exponent laboratory"};
  app.require_subcommand(1);

  Globals g;
  std::uint64_t seed = 0;
  std::string out = ".";
  auto* seed_opt = app.add_option("--seed", seed, "master seed (u64)");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", g.threads, "worker threads; 0 = all cores");

  GheArgs ghe_args;
  auto* ghe = app.add_subcommand("ghe", "analyse one price series");
  ghe->add_option("csv", ghe_args.csv, "price CSV")->required();
  ghe->add_option("--column", ghe_args.column, "price column name");
  ghe->add_option("--return-kind", ghe_args.return_kind, "log_return or difference");
  ghe->add_option("--variable", ghe_args.variable, "price, cum_abs_return or cum_sq_return");
  ghe->add_option("--name", ghe_args.name, "series label");
  ghe->add_option("--shuffles", ghe_args.shuffles, "number of shuffles (0 disables)");
  ghe->add_flag("!--no-demean", ghe_args.demean, "keep the sample mean in the returns");

  std::string config;
  auto* sim = app.add_subcommand("simulate", "emit one simulated path");
  sim->add_option("config", config, "run config")->required();
  auto* ens = app.add_subcommand("ensemble", "Monte Carlo ensemble");
  ens->add_option("config", config, "run config")->required();
  auto* plot = app.add_subcommand("plotdata", "figure data");
  plot->add_option("config", config, "run config")->required();

  TableArgs table_args;
  auto* table = app.add_subcommand("table", "regenerate a reference table");
  table->add_option("id", table_args.id, "T2..T9")->required();
  table->add_flag("--desk", table_args.desk, "200 paths instead of 1000");
  table->add_option("--data-dir", table_args.data_dir, "directory of empirical price CSVs");
  table->add_option("--paths", table_args.paths, "override the path count");
  table->add_option("--shuffles", table_args.shuffles, "shuffles per path");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) g.seed = seed;
  g.out = out;

  try {
    if (ghe->parsed()) return cmd_ghe(ghe_args, g);
    if (sim->parsed()) return cmd_simulate(config, g);
    if (ens->parsed()) return cmd_ensemble(config, g);
    if (table->parsed()) return cmd_table(table_args, g);
    if (plot->parsed()) return cmd_plotdata(config, g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
