#pragma once

// File formats: price CSV input, `key = value` run configs, the result CSV
// schema shared by every report, and the plot-data tables.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <variant>
#include <vector>

#include "ghelab/error.hpp"
#include "ghelab/generators.hpp"
#include "ghelab/ghe.hpp"
#include "ghelab/harness.hpp"
#include "ghelab/msm.hpp"
#include "ghelab/series.hpp"

namespace ghelab::io {

// ---------------------------------------------------------------------------
// Text helpers

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = trim(s.substr(1, s.size() - 2));
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> parse_integer(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Price CSV

struct PriceRecord {
  std::size_t ordinal = 0;
  double price = 0.0;
};

/// Reads a header row plus data rows; `column` selects the price column by
/// header name. Row numbers in errors count data rows from 1.
inline std::vector<PriceRecord> load_price_csv(std::istream& in, std::string_view column = "price") {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::EmptySeries, "file has no header row");
  }
  std::string_view header = line;
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  const auto names = split(trim(header), ',');
  std::optional<std::size_t> col;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto name = trim(names[i]);
    if (name.size() >= 2 && name.front() == '"' && name.back() == '"') {
      name = name.substr(1, name.size() - 2);
    }
    if (name == column) col = i;
  }
  if (!col) {
    throw Error::parse(0, "header has no column named '" + std::string(column) + "'");
  }

  std::vector<PriceRecord> records;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split(trim(line), ',');
    if (*col >= cells.size() || trim(cells[*col]).empty()) {
      throw Error::parse(row, "empty price cell");
    }
    const auto v = parse_double(cells[*col]);
    if (!v || !std::isfinite(*v)) {
      throw Error::parse(row, "cannot parse '" + std::string(trim(cells[*col])) + "' as a number");
    }
    records.push_back({row, *v});
  }
  if (records.empty()) throw Error(ErrorCode::EmptySeries, "file has no data rows");
  return records;
}

inline std::vector<PriceRecord> load_price_csv(const std::filesystem::path& path,
                                               std::string_view column = "price") {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  return load_price_csv(in, column);
}

inline std::vector<double> prices_of(const std::vector<PriceRecord>& records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.price);
  return out;
}

// ---------------------------------------------------------------------------
// Run configuration

enum class GeneratorKind { msm, stable, fbm, arfima, empirical };

/// Typed view of a `key = value` config file with defaults applied.
struct RunConfig {
  std::optional<GeneratorKind> generator;
  std::optional<std::string> asset;
  std::size_t n_paths = 1000;
  std::size_t path_length = 8700;
  VariableKind variable = VariableKind::price;
  GheConfig ghe;
  std::size_t n_shuffles = 33;
  std::optional<std::uint64_t> seed;

  // msm
  std::optional<double> m0;
  std::optional<double> sigma;
  std::optional<int> k;
  double b = 2.0;
  double gamma_k = 0.5;

  // stable / arfima innovations
  std::optional<double> alpha;
  double beta = 0.0;
  double gamma = std::numbers::sqrt2 / 2.0;
  double delta = 0.0;

  // fbm
  std::optional<double> hurst;

  // arfima
  std::optional<double> d;
  std::vector<double> ar;
  std::size_t ma_truncation = 1000;

  // empirical input
  std::optional<std::string> input;
  std::string column = "price";
  std::optional<ReturnKind> return_kind;
  bool demean = true;
  std::optional<std::string> name;

  // plot data
  std::optional<std::string> plot;
  std::vector<double> q_grid{0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 3.5, 4.0};

  std::optional<std::string> output;
  std::optional<unsigned> threads;

  /// Keys that appeared in the file.
  std::set<std::string> keys;

  bool has(const std::string& key) const { return keys.count(key) > 0; }
};

namespace detail {

[[noreturn]] inline void type_error(std::string_view key, std::string_view value,
                                    std::string_view expected) {
  throw Error(ErrorCode::TypeError, "key '" + std::string(key) + "': '" + std::string(value) +
                                        "' is not " + std::string(expected));
}

inline double as_double(std::string_view key, std::string_view v) {
  const auto x = parse_double(v);
  if (!x || !std::isfinite(*x)) type_error(key, v, "a real number");
  return *x;
}

template <class Int>
Int as_integer(std::string_view key, std::string_view v) {
  const auto x = parse_integer<Int>(v);
  if (!x) type_error(key, v, "an integer");
  return *x;
}

inline std::vector<double> as_double_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  for (auto item : split(v, ',')) out.push_back(as_double(key, item));
  return out;
}

inline bool as_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  type_error(key, v, "a boolean");
}

inline void apply_key(RunConfig& cfg, std::string_view key, std::string_view v) {
  if (key == "generator") {
    if (v == "msm") cfg.generator = GeneratorKind::msm;
    else if (v == "stable") cfg.generator = GeneratorKind::stable;
    else if (v == "fbm" || v == "fgn") cfg.generator = GeneratorKind::fbm;
    else if (v == "arfima") cfg.generator = GeneratorKind::arfima;
    else if (v == "empirical") cfg.generator = GeneratorKind::empirical;
    else type_error(key, v, "one of msm, stable, fbm, arfima, empirical");
  } else if (key == "asset") {
    cfg.asset = std::string(v);
  } else if (key == "n_paths") {
    cfg.n_paths = as_integer<std::size_t>(key, v);
  } else if (key == "path_length") {
    cfg.path_length = as_integer<std::size_t>(key, v);
  } else if (key == "variable") {
    if (v == "price") cfg.variable = VariableKind::price;
    else if (v == "cum_abs_return") cfg.variable = VariableKind::cum_abs_return;
    else if (v == "cum_sq_return") cfg.variable = VariableKind::cum_sq_return;
    else type_error(key, v, "one of price, cum_abs_return, cum_sq_return");
  } else if (key == "q_values") {
    cfg.ghe.q_values = as_double_list(key, v);
  } else if (key == "tau_max") {
    const auto dots = v.find("..");
    if (dots == std::string_view::npos) {
      const int t = as_integer<int>(key, v);
      cfg.ghe.tau_max_lo = cfg.ghe.tau_max_hi = t;
    } else {
      cfg.ghe.tau_max_lo = as_integer<int>(key, v.substr(0, dots));
      cfg.ghe.tau_max_hi = as_integer<int>(key, v.substr(dots + 2));
    }
  } else if (key == "detrend") {
    cfg.ghe.detrend = as_bool(key, v);
  } else if (key == "n_shuffles") {
    cfg.n_shuffles = as_integer<std::size_t>(key, v);
  } else if (key == "seed") {
    cfg.seed = as_integer<std::uint64_t>(key, v);
  } else if (key == "m0") {
    cfg.m0 = as_double(key, v);
  } else if (key == "sigma") {
    cfg.sigma = as_double(key, v);
  } else if (key == "k") {
    cfg.k = as_integer<int>(key, v);
  } else if (key == "b") {
    cfg.b = as_double(key, v);
  } else if (key == "gamma_k") {
    cfg.gamma_k = as_double(key, v);
  } else if (key == "alpha") {
    cfg.alpha = as_double(key, v);
  } else if (key == "beta") {
    cfg.beta = as_double(key, v);
  } else if (key == "gamma") {
    cfg.gamma = as_double(key, v);
  } else if (key == "delta") {
    cfg.delta = as_double(key, v);
  } else if (key == "hurst") {
    cfg.hurst = as_double(key, v);
  } else if (key == "d") {
    cfg.d = as_double(key, v);
  } else if (key == "ar1") {
    cfg.ar = {as_double(key, v)};
  } else if (key == "ar") {
    cfg.ar = as_double_list(key, v);
  } else if (key == "ma_truncation") {
    cfg.ma_truncation = as_integer<std::size_t>(key, v);
  } else if (key == "input") {
    cfg.input = std::string(v);
  } else if (key == "column") {
    cfg.column = std::string(v);
  } else if (key == "return_kind") {
    if (v == "log_return" || v == "log") cfg.return_kind = ReturnKind::log_return;
    else if (v == "difference" || v == "diff") cfg.return_kind = ReturnKind::difference;
    else type_error(key, v, "log_return or difference");
  } else if (key == "demean") {
    cfg.demean = as_bool(key, v);
  } else if (key == "name") {
    cfg.name = std::string(v);
  } else if (key == "plot") {
    if (v != "structure_functions" && v != "scaling_function") {
      type_error(key, v, "structure_functions or scaling_function");
    }
    cfg.plot = std::string(v);
  } else if (key == "q_grid") {
    cfg.q_grid = as_double_list(key, v);
  } else if (key == "output") {
    cfg.output = std::string(v);
  } else if (key == "threads") {
    cfg.threads = as_integer<unsigned>(key, v);
  } else {
    throw Error(ErrorCode::UnknownKey, "unknown config key '" + std::string(key) + "'");
  }
}

}  // namespace detail

/// Parses `key = value` statements; `#` starts a comment and `;` separates
/// statements on one line.
inline RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  for (auto line : split(text, '\n')) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    for (auto stmt : split(line, ';')) {
      stmt = trim(stmt);
      if (stmt.empty()) continue;
      const auto eq = stmt.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::TypeError, "expected 'key = value', got '" + std::string(stmt) + "'");
      }
      const auto key = trim(stmt.substr(0, eq));
      const auto value = trim(stmt.substr(eq + 1));
      detail::apply_key(cfg, key, value);
      cfg.keys.insert(std::string(key));
    }
  }
  return cfg;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Result CSV

inline constexpr std::string_view kResultHeader =
    "table,generator,param_set,variable,q,stat,original_mean,original_std,shuffled_mean,"
    "shuffled_std,delta_h,delta_h_shuff,test_z,reject95";

/// One line of the result schema. Unset optionals are written as empty cells.
struct ResultRow {
  std::string table;
  std::string generator;
  std::string param_set;
  std::string variable;
  std::optional<double> q;
  std::string stat;
  std::optional<double> original_mean;
  std::optional<double> original_std;
  std::optional<double> shuffled_mean;
  std::optional<double> shuffled_std;
  std::optional<double> delta_h;
  std::optional<double> delta_h_shuff;
  std::optional<double> test_z;
  std::optional<bool> reject95;

  bool operator==(const ResultRow&) const = default;
};

namespace detail {
inline std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

inline std::optional<double> read_cell(std::string_view s, std::size_t row) {
  if (trim(s).empty()) return std::nullopt;
  const auto v = parse_double(s);
  if (!v) throw Error::parse(row, "bad numeric cell '" + std::string(s) + "'");
  return v;
}
}  // namespace detail

inline void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    out << r.table << ',' << r.generator << ',' << r.param_set << ',' << r.variable << ','
        << detail::cell(r.q) << ',' << r.stat << ',' << detail::cell(r.original_mean) << ','
        << detail::cell(r.original_std) << ',' << detail::cell(r.shuffled_mean) << ','
        << detail::cell(r.shuffled_std) << ',' << detail::cell(r.delta_h) << ','
        << detail::cell(r.delta_h_shuff) << ',' << detail::cell(r.test_z) << ','
        << (r.reject95 ? (*r.reject95 ? "true" : "false") : "") << '\n';
  }
}

inline std::vector<ResultRow> read_result_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultHeader) {
    throw Error::parse(0, "missing or unexpected result header");
  }
  std::vector<ResultRow> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto c = split(trim(line), ',');
    if (c.size() != 14) throw Error::parse(row, "expected 14 cells");
    ResultRow r;
    r.table = c[0];
    r.generator = c[1];
    r.param_set = c[2];
    r.variable = c[3];
    r.q = detail::read_cell(c[4], row);
    r.stat = c[5];
    r.original_mean = detail::read_cell(c[6], row);
    r.original_std = detail::read_cell(c[7], row);
    r.shuffled_mean = detail::read_cell(c[8], row);
    r.shuffled_std = detail::read_cell(c[9], row);
    r.delta_h = detail::read_cell(c[10], row);
    r.delta_h_shuff = detail::read_cell(c[11], row);
    r.test_z = detail::read_cell(c[12], row);
    if (c[13] == "true") r.reject95 = true;
    else if (c[13] == "false") r.reject95 = false;
    else if (!trim(c[13]).empty()) throw Error::parse(row, "bad reject95 cell");
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Plot data

struct StructurePoint {
  double q = 0.0;
  std::size_t tau = 0;
  double log_tau = 0.0;
  double log_kq = 0.0;
};

struct ScalingPoint {
  double q = 0.0;
  double qhq = 0.0;
  std::optional<double> qhq_shuffled;
};

inline void write_structure_csv(std::ostream& out, const std::vector<StructurePoint>& pts) {
  out << "q,tau,log_tau,log_Kq\n";
  for (const auto& p : pts) {
    out << format_double(p.q) << ',' << p.tau << ',' << format_double(p.log_tau) << ','
        << format_double(p.log_kq) << '\n';
  }
}

inline void write_scaling_csv(std::ostream& out, const std::vector<ScalingPoint>& pts) {
  out << "q,qHq,qHq_shuffled\n";
  for (const auto& p : pts) {
    out << format_double(p.q) << ',' << format_double(p.qhq) << ','
        << (p.qhq_shuffled ? format_double(*p.qhq_shuffled) : "") << '\n';
  }
}

// ---------------------------------------------------------------------------
// Config to harness types

namespace detail {
[[noreturn]] inline void missing(std::string_view key, std::string_view why) {
  throw Error(ErrorCode::MissingKey, "missing key '" + std::string(key) + "' (" + std::string(why) + ")");
}
}  // namespace detail

/// Observed returns named by `input`; the return kind follows the asset
/// class unless `return_kind` is given.
inline EmpiricalSource load_empirical_source(const RunConfig& cfg) {
  if (!cfg.input) detail::missing("input", "empirical data");
  const std::string name = cfg.name.value_or(cfg.asset.value_or(cfg.input.value()));
  const ReturnKind kind =
      cfg.return_kind.value_or(cfg.asset ? default_return_kind(*cfg.asset) : ReturnKind::log_return);
  auto returns = make_returns(prices_of(load_price_csv(*cfg.input, cfg.column)), kind);
  if (cfg.demean) returns = demean(returns);
  return {name, std::move(returns)};
}

inline Generator make_generator(const RunConfig& cfg) {
  if (!cfg.generator) detail::missing("generator", "required");
  switch (*cfg.generator) {
    case GeneratorKind::msm: {
      if (!cfg.k) detail::missing("k", "msm cascade depth");
      MsmParams p;
      if (cfg.m0 && cfg.sigma) {
        p.m0 = *cfg.m0;
        p.sigma = *cfg.sigma;
        p.k = *cfg.k;
      } else if (cfg.asset) {
        const auto f = fixture_params(*cfg.asset, *cfg.k);
        if (!f) {
          throw Error(ErrorCode::InvalidConfig,
                      "no fixture for asset '" + *cfg.asset + "' at k = " + std::to_string(*cfg.k));
        }
        p = *f;
        if (cfg.m0) p.m0 = *cfg.m0;
        if (cfg.sigma) p.sigma = *cfg.sigma;
      } else {
        detail::missing(cfg.m0 ? "sigma" : "m0", "msm needs m0 and sigma, or a fixture asset");
      }
      p.b = cfg.b;
      p.gamma_k = cfg.gamma_k;
      return p;
    }
    case GeneratorKind::stable: {
      if (!cfg.alpha) detail::missing("alpha", "stable tail index");
      return StableParams{*cfg.alpha, cfg.beta, cfg.gamma, cfg.delta};
    }
    case GeneratorKind::fbm: {
      if (!cfg.hurst) detail::missing("hurst", "fbm exponent");
      FbmParams p;
      p.hurst = *cfg.hurst;
      p.length = cfg.path_length;
      return p;
    }
    case GeneratorKind::arfima: {
      if (!cfg.alpha) detail::missing("alpha", "arfima innovations");
      if (!cfg.d) detail::missing("d", "arfima memory");
      ArfimaParams p;
      p.ar_coeffs = cfg.ar;
      p.d = *cfg.d;
      p.stable = StableParams{*cfg.alpha, cfg.beta, cfg.gamma, cfg.delta};
      p.ma_truncation = cfg.ma_truncation;
      return p;
    }
    case GeneratorKind::empirical:
      return load_empirical_source(cfg);
  }
  detail::missing("generator", "unrecognised");
}

inline EnsembleSpec to_ensemble_spec(const RunConfig& cfg) {
  EnsembleSpec spec;
  spec.generator = make_generator(cfg);
  spec.n_paths = cfg.n_paths;
  spec.path_length = cfg.path_length;
  if (const auto* e = std::get_if<EmpiricalSource>(&spec.generator)) {
    spec.n_paths = 1;
    spec.path_length = e->returns.size();
  }
  spec.variable_kind = cfg.variable;
  spec.ghe = cfg.ghe;
  spec.n_shuffles = cfg.n_shuffles;
  spec.master_seed = cfg.seed.value_or(0);
  return spec;
}

/// Short `key=value;...` label for result rows.
inline std::string param_label(const Generator& g) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MsmParams>) {
          return "m0=" + format_double(p.m0) + ";sigma=" + format_double(p.sigma) +
                 ";k=" + std::to_string(p.k);
        } else if constexpr (std::is_same_v<T, StableParams>) {
          return "alpha=" + format_double(p.alpha) + ";beta=" + format_double(p.beta);
        } else if constexpr (std::is_same_v<T, FbmParams>) {
          return "H=" + format_double(p.hurst);
        } else if constexpr (std::is_same_v<T, ArfimaParams>) {
          std::string s = "alpha=" + format_double(p.stable.alpha) + ";d=" + format_double(p.d);
          for (double a : p.ar_coeffs) s += ";ar=" + format_double(a);
          return s;
        } else {
          return p.name;
        }
      },
      g);
}

}  // namespace ghelab::io
