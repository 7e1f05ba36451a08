#pragma once

// Drives the ensemble harness over the reference parameter grids and flattens
// reports into result-CSV rows.
//
// Rows per (param_set, variable):
//   stat=paths     per q; stds across paths; test_z compares with the
//                  empirical series when one is supplied
//   stat=tau_max   per q; stds are mean dispersion over the tau_max grid
//   stat=shuffles  per q; shuffled_std is the mean std across the shuffles of
//                  one path; test_z compares shuffled panels
//   stat=delta_h   q empty; ensemble means/stds of delta H and delta H_shuff,
//                  test_z is their two-sample statistic

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghelab/error.hpp"
#include "ghelab/generators.hpp"
#include "ghelab/harness.hpp"
#include "ghelab/io.hpp"
#include "ghelab/msm.hpp"
#include "ghelab/random.hpp"
#include "ghelab/series.hpp"

namespace ghelab {

enum class TableId { T2, T3, T4, T5, T6, T7, T8, T9 };
enum class Scale { full, desk };

inline std::string to_string(TableId t) {
  constexpr std::string_view names[] = {"T2", "T3", "T4", "T5", "T6", "T7", "T8", "T9"};
  return std::string(names[static_cast<int>(t)]);
}

inline std::optional<TableId> parse_table_id(std::string_view s) {
  constexpr TableId ids[] = {TableId::T2, TableId::T3, TableId::T4, TableId::T5,
                             TableId::T6, TableId::T7, TableId::T8, TableId::T9};
  for (auto id : ids) {
    if (to_string(id) == s) return id;
  }
  return std::nullopt;
}

inline std::size_t paths_for(Scale s) { return s == Scale::full ? 1000 : 200; }

struct TableOptions {
  /// Directory holding `<asset>.csv` price files ('/' in names becomes '_').
  std::optional<std::filesystem::path> data_dir;
  unsigned threads = 0;
  std::size_t n_shuffles = 33;
  /// Overrides the scale's path count when set.
  std::optional<std::size_t> n_paths;
};

struct TableResult {
  std::vector<io::ResultRow> rows;
  std::vector<std::string> warnings;
};

/// Flattens one report into result rows. `empirical` (a one-path report on
/// the observed series) fills test_z and reject95.
inline std::vector<io::ResultRow> report_rows(const std::string& table, const std::string& param_set,
                                              VariableKind variable, const EnsembleReport& report,
                                              const EnsembleReport* empirical = nullptr) {
  std::vector<io::ResultRow> rows;
  const bool multi = report.n_paths > 1;
  auto base = [&] {
    io::ResultRow r;
    r.table = table;
    r.generator = report.generator;
    r.param_set = param_set;
    r.variable = to_string(variable);
    r.delta_h = report.original.delta_h_mean;
    if (report.shuffled) r.delta_h_shuff = report.shuffled->delta_h_mean;
    return r;
  };
  auto fill_test = [](io::ResultRow& r, double em, double es, double sm, double ss) {
    if (es == 0.0 && ss == 0.0) return;
    const auto t = identity_test(em, es, sm, ss);
    r.test_z = t.statistic;
    r.reject95 = t.reject_at_95;
  };

  for (std::size_t i = 0; i < report.original.per_q.size(); ++i) {
    const auto& o = report.original.per_q[i];
    const QStats* s = report.shuffled ? &report.shuffled->per_q[i] : nullptr;

    auto paths = base();
    paths.q = o.q;
    paths.stat = "paths";
    paths.original_mean = o.mean;
    if (multi) paths.original_std = o.std;
    if (s) {
      paths.shuffled_mean = s->mean;
      if (multi) paths.shuffled_std = s->std;
    }
    if (empirical) {
      const QStats* e = empirical->original.find(o.q);
      if (e) fill_test(paths, e->mean, e->tau_std, o.mean, o.std);
    }
    rows.push_back(paths);

    auto tau = base();
    tau.q = o.q;
    tau.stat = "tau_max";
    tau.original_mean = o.mean;
    tau.original_std = o.tau_std;
    if (s) {
      tau.shuffled_mean = s->mean;
      tau.shuffled_std = s->tau_std;
    }
    rows.push_back(tau);

    if (s) {
      auto sh = base();
      sh.q = o.q;
      sh.stat = "shuffles";
      sh.shuffled_mean = s->mean;
      sh.shuffled_std = s->shuffle_std;
      if (empirical && empirical->shuffled) {
        const QStats* e = empirical->shuffled->find(o.q);
        if (e) fill_test(sh, e->mean, e->shuffle_std, s->mean, s->std);
      }
      rows.push_back(sh);
    }
  }

  if (report.original.delta_h_mean) {
    auto dh = base();
    dh.stat = "delta_h";
    dh.original_mean = report.original.delta_h_mean;
    if (multi) dh.original_std = report.original.delta_h_std;
    if (report.shuffled && report.shuffled->delta_h_mean) {
      dh.shuffled_mean = report.shuffled->delta_h_mean;
      if (multi) dh.shuffled_std = report.shuffled->delta_h_std;
      const auto c = delta_h_comparison(report);
      if (c.test) {
        dh.test_z = c.test->statistic;
        dh.reject95 = c.test->reject_at_95;
      }
    }
    rows.push_back(dh);
  }
  return rows;
}

namespace detail {

inline std::string fmt_param(std::string_view name, double v) {
  return std::string(name) + "=" + io::format_double(v);
}

inline std::filesystem::path empirical_file(const std::filesystem::path& dir, std::string_view asset) {
  std::string file(asset);
  for (char& c : file) {
    if (c == '/') c = '_';
  }
  return dir / (file + ".csv");
}

/// Loads, differences and demeans an observed price series.
inline std::optional<ReturnSeries> load_empirical(const TableOptions& opt, std::string_view asset,
                                                  std::vector<std::string>& warnings) {
  if (!opt.data_dir) {
    warnings.push_back("MissingEmpiricalData: no data directory; empirical columns for " +
                       std::string(asset) + " skipped");
    return std::nullopt;
  }
  const auto file = empirical_file(*opt.data_dir, asset);
  if (!std::filesystem::exists(file)) {
    warnings.push_back("MissingEmpiricalData: " + file.string() + " not found; empirical columns for " +
                       std::string(asset) + " skipped");
    return std::nullopt;
  }
  const auto prices = io::prices_of(io::load_price_csv(file));
  return demean(make_returns(prices, default_return_kind(asset)));
}

struct SimulatedCell {
  std::string param_set;
  Generator generator;
};

inline void run_simulated(TableResult& out, const std::string& table, std::size_t n_paths,
                          std::size_t length, std::uint64_t family_seed,
                          const std::vector<SimulatedCell>& cells, const TableOptions& opt) {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    EnsembleSpec spec;
    spec.generator = cells[c].generator;
    spec.n_paths = n_paths;
    spec.path_length = length;
    spec.variable_kind = VariableKind::price;
    spec.n_shuffles = opt.n_shuffles;
    spec.master_seed = derive_seed(family_seed, c, 0);
    const auto report = run_ensemble(spec, opt.threads);
    const auto rows = report_rows(table, cells[c].param_set, spec.variable_kind, report);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    if (report.scaling_warnings > 0) {
      out.warnings.push_back(table + " " + cells[c].param_set + ": " +
                             std::to_string(report.scaling_warnings) + " paths with scaling R^2 < 0.95");
    }
  }
}

inline std::vector<SimulatedCell> arfima_cells(const std::vector<double>& ar, const std::string& table,
                                               std::vector<std::string>& warnings) {
  std::vector<SimulatedCell> cells;
  for (double alpha : {1.2, 1.4, 1.6, 1.8, 2.0}) {
    for (double d : {-0.2, -0.1, 0.0, 0.1, 0.2}) {
      ArfimaParams p;
      p.ar_coeffs = ar;
      p.d = d;
      p.stable = standard_stable(alpha);
      const std::string name = fmt_param("alpha", alpha) + ";" + fmt_param("d", d);
      try {
        p.validate();
      } catch (const Error& e) {
        warnings.push_back(table + " " + name + " skipped: " + e.what());
        continue;
      }
      cells.push_back({name, p});
    }
  }
  return cells;
}

inline VariableKind variable_for(TableId t) {
  switch (t) {
    case TableId::T3: return VariableKind::cum_abs_return;
    case TableId::T4: return VariableKind::cum_sq_return;
    default: return VariableKind::price;
  }
}

/// MSM grid (asset x cascade depth), with the empirical series per asset.
inline void run_msm_tables(TableResult& out, const std::string& table,
                           const std::vector<VariableKind>& variables, std::size_t n_paths,
                           std::uint64_t family_seed, const TableOptions& opt) {
  constexpr std::size_t kLength = 8700;
  std::size_t cell = 0;
  for (std::string_view asset : kMsmAssets) {
    const auto observed = load_empirical(opt, asset, out.warnings);
    for (VariableKind v : variables) {
      std::optional<EnsembleReport> emp;
      if (observed) {
        EnsembleSpec es;
        es.generator = EmpiricalSource{std::string(asset), *observed};
        es.n_paths = 1;
        es.path_length = observed->size();
        es.variable_kind = v;
        es.n_shuffles = opt.n_shuffles;
        es.master_seed = derive_seed(family_seed, 1000 + cell, 0);
        emp = run_ensemble(es, opt.threads);
        const auto rows = report_rows(table, std::string(asset), v, *emp);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
      }
      for (std::size_t j = 0; j < kMsmCascadeDepths.size(); ++j) {
        const int k = kMsmCascadeDepths[j];
        EnsembleSpec spec;
        spec.generator = *fixture_params(asset, k);
        spec.n_paths = n_paths;
        spec.path_length = kLength;
        spec.variable_kind = v;
        spec.n_shuffles = opt.n_shuffles;
        // Same seed for every variable so the three panels share paths.
        spec.master_seed = derive_seed(family_seed, cell, static_cast<std::uint64_t>(j));
        const auto report = run_ensemble(spec, opt.threads);
        const auto rows = report_rows(table, std::string(asset) + ":k=" + std::to_string(k), v, report,
                                      emp ? &*emp : nullptr);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
      }
    }
    ++cell;
  }
}

inline std::vector<io::ResultRow> only_delta_h(std::vector<io::ResultRow> rows) {
  std::erase_if(rows, [](const io::ResultRow& r) { return r.stat != "delta_h"; });
  return rows;
}

}  // namespace detail

inline TableResult reproduce_table(TableId id, Scale scale, std::uint64_t master_seed,
                                   const TableOptions& opt = {}) {
  const std::size_t n_paths = opt.n_paths.value_or(paths_for(scale));
  const std::string name = to_string(id);
  TableResult out;
  // MSM-based tables share one seed family so T9 reuses T2-T4 paths.
  const std::uint64_t msm_family = derive_seed(master_seed, 2, 0);

  switch (id) {
    case TableId::T2:
    case TableId::T3:
    case TableId::T4:
      detail::run_msm_tables(out, name, {detail::variable_for(id)}, n_paths, msm_family, opt);
      break;
    case TableId::T9: {
      TableResult full;
      detail::run_msm_tables(full, name,
                             {VariableKind::price, VariableKind::cum_abs_return,
                              VariableKind::cum_sq_return},
                             n_paths, msm_family, opt);
      out.rows = detail::only_delta_h(std::move(full.rows));
      out.warnings = std::move(full.warnings);
      break;
    }
    case TableId::T5: {
      std::vector<detail::SimulatedCell> cells;
      for (double alpha : {1.2, 1.4, 1.6, 1.8, 2.0}) {
        cells.push_back({detail::fmt_param("alpha", alpha), standard_stable(alpha)});
      }
      detail::run_simulated(out, name, n_paths, 8192, derive_seed(master_seed, 5, 0), cells, opt);
      break;
    }
    case TableId::T6: {
      std::vector<detail::SimulatedCell> cells;
      for (double h : {0.3, 0.4, 0.5, 0.6, 0.7}) {
        FbmParams p;
        p.hurst = h;
        cells.push_back({detail::fmt_param("H", h), p});
      }
      detail::run_simulated(out, name, n_paths, 8192, derive_seed(master_seed, 6, 0), cells, opt);
      break;
    }
    case TableId::T7:
    case TableId::T8: {
      const bool ar = id == TableId::T8;
      const auto cells = detail::arfima_cells(ar ? std::vector<double>{0.4} : std::vector<double>{},
                                              name, out.warnings);
      detail::run_simulated(out, name, n_paths, 8192,
                            derive_seed(master_seed, ar ? 8 : 7, 0), cells, opt);
      break;
    }
  }
  return out;
}

}  // namespace ghelab
