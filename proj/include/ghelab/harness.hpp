#pragma once

// Monte Carlo ensembles of generalized Hurst exponents, with shuffle
// surrogates and the two-sample identity test used to compare an empirical
// series with a simulated ensemble.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "ghelab/error.hpp"
#include "ghelab/generators.hpp"
#include "ghelab/ghe.hpp"
#include "ghelab/msm.hpp"
#include "ghelab/random.hpp"
#include "ghelab/series.hpp"

namespace ghelab {

/// A fixed, already-observed return series (one "path").
struct EmpiricalSource {
  std::string name;
  ReturnSeries returns;
};

using Generator = std::variant<MsmParams, StableParams, FbmParams, ArfimaParams, EmpiricalSource>;

inline std::string generator_name(const Generator& g) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MsmParams>) return "msm";
        else if constexpr (std::is_same_v<T, StableParams>) return "stable";
        else if constexpr (std::is_same_v<T, FbmParams>) return "fbm";
        else if constexpr (std::is_same_v<T, ArfimaParams>) return "arfima";
        else return "empirical";
      },
      g);
}

struct EnsembleSpec {
  Generator generator = MsmParams{};
  std::size_t n_paths = 1000;
  std::size_t path_length = 8700;
  VariableKind variable_kind = VariableKind::price;
  GheConfig ghe;
  /// Zero skips the shuffle study (no shuffled block in the report).
  std::size_t n_shuffles = 33;
  std::uint64_t master_seed = 0;

  void validate() const {
    if (n_paths < 1) throw Error(ErrorCode::InvalidParams, "n_paths must be at least 1");
    const bool empirical = std::holds_alternative<EmpiricalSource>(generator);
    if (empirical && n_paths != 1) {
      throw Error(ErrorCode::InvalidParams, "an empirical ensemble has exactly one path");
    }
    if (!empirical && path_length < 4 * static_cast<std::size_t>(ghe.tau_max_hi)) {
      throw Error(ErrorCode::InvalidParams, "path_length must be at least 4 * tau_max");
    }
    std::visit(
        [](const auto& p) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(p)>, EmpiricalSource>) {
            p.validate();
          }
        },
        generator);
  }
};

/// Draws one return series of `length` increments from the generator.
inline ReturnSeries simulate_returns(const Generator& g, std::size_t length, Rng& rng) {
  return std::visit(
      [&](const auto& p) -> ReturnSeries {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MsmParams>) {
          return simulate_msm(p, length, rng);
        } else if constexpr (std::is_same_v<T, StableParams>) {
          return simulate_stable_iid(p, length, rng);
        } else if constexpr (std::is_same_v<T, FbmParams>) {
          FbmParams sized = p;
          sized.length = length;
          return simulate_fbm(sized, rng).increments;
        } else if constexpr (std::is_same_v<T, ArfimaParams>) {
          return simulate_arfima(p, length, rng);
        } else {
          return p.returns;
        }
      },
      g);
}

/// Everything measured on one path: the original estimate and the
/// shuffle-averaged surrogate estimates, aligned with cfg.q_values.
struct PathOutcome {
  GheResult original;
  std::vector<double> shuffled_h;
  std::vector<double> shuffled_spread;
  std::vector<double> shuffled_tau_std;
  std::optional<double> delta_h_shuff;
  double min_scaling_r2 = 1.0;
};

namespace detail {

inline std::optional<std::size_t> index_of_q(const std::vector<double>& qs, double q) {
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (qs[i] == q) return i;
  }
  return std::nullopt;
}

inline PathOutcome analyze_path(const ReturnSeries& returns, const EnsembleSpec& spec,
                                std::size_t path_index) {
  PathOutcome out;
  out.original = generalized_hurst(build_variable(returns, spec.variable_kind), spec.ghe);
  for (const auto& e : out.original.per_q) {
    out.min_scaling_r2 = std::min(out.min_scaling_r2, e.scaling_r2);
  }
  if (spec.n_shuffles == 0) return out;

  const std::size_t nq = spec.ghe.q_values.size();
  std::vector<std::vector<double>> by_q(nq);
  out.shuffled_tau_std.assign(nq, 0.0);
  for (std::size_t s = 1; s <= spec.n_shuffles; ++s) {
    Rng rng(derive_seed(spec.master_seed, path_index, s));
    const auto shuffled = shuffle(returns, rng);
    const auto res = generalized_hurst(build_variable(shuffled, spec.variable_kind), spec.ghe);
    for (std::size_t i = 0; i < nq; ++i) {
      by_q[i].push_back(res.per_q[i].h_mean);
      out.shuffled_tau_std[i] += res.per_q[i].h_std;
      out.min_scaling_r2 = std::min(out.min_scaling_r2, res.per_q[i].scaling_r2);
    }
  }
  for (std::size_t i = 0; i < nq; ++i) {
    out.shuffled_h.push_back(mean_of(by_q[i]));
    out.shuffled_spread.push_back(sample_std(by_q[i]));
    out.shuffled_tau_std[i] /= static_cast<double>(spec.n_shuffles);
  }
  const auto i1 = index_of_q(spec.ghe.q_values, 1.0);
  const auto i3 = index_of_q(spec.ghe.q_values, 3.0);
  if (i1 && i3) out.delta_h_shuff = out.shuffled_h[*i1] - out.shuffled_h[*i3];
  return out;
}

/// Runs f(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Results must be written to per-index slots by f. The error
/// of the lowest failing index is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        f(i);
      } catch (const Error& e) {
        errors[i] = std::make_exception_ptr(Error::at_path(e, i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

struct QStats {
  double q = 0.0;
  double mean = 0.0;
  /// Sample std of the per-path exponent across paths (0 for one path).
  double std = 0.0;
  /// Mean over paths of the dispersion across the tau_max grid.
  double tau_std = 0.0;
  /// Shuffled block only: mean over paths of the std across shuffles.
  double shuffle_std = 0.0;
};

struct EnsembleBlock {
  std::vector<QStats> per_q;
  std::optional<double> delta_h_mean;
  double delta_h_std = 0.0;

  const QStats* find(double q) const {
    for (const auto& s : per_q) {
      if (s.q == q) return &s;
    }
    return nullptr;
  }
};

struct EnsembleReport {
  std::string generator;
  std::size_t n_paths = 0;
  std::size_t n_shuffles = 0;
  EnsembleBlock original;
  std::optional<EnsembleBlock> shuffled;
  /// Paths where some log-log fit had R^2 below 0.95.
  std::size_t scaling_warnings = 0;
  double min_scaling_r2 = 1.0;
  std::vector<std::string> warnings;
  std::vector<PathOutcome> paths;
};

inline constexpr double kScalingR2Threshold = 0.95;

inline EnsembleReport run_ensemble(const EnsembleSpec& spec, unsigned threads = 0) {
  spec.validate();
  std::vector<PathOutcome> outcomes(spec.n_paths);
  detail::parallel_for(spec.n_paths, threads, [&](std::size_t i) {
    Rng rng(derive_seed(spec.master_seed, i, 0));
    const auto returns = simulate_returns(spec.generator, spec.path_length, rng);
    outcomes[i] = detail::analyze_path(returns, spec, i);
  });

  EnsembleReport report;
  report.generator = generator_name(spec.generator);
  report.n_paths = spec.n_paths;
  report.n_shuffles = spec.n_shuffles;
  report.warnings = outcomes.front().original.warnings;

  const auto& qs = spec.ghe.q_values;
  std::vector<double> buf(spec.n_paths);
  auto stats_of = [&](auto&& value_of) {
    for (std::size_t p = 0; p < spec.n_paths; ++p) buf[p] = value_of(outcomes[p]);
    return std::pair{mean_of(buf), detail::sample_std(buf)};
  };

  for (std::size_t i = 0; i < qs.size(); ++i) {
    QStats s;
    s.q = qs[i];
    std::tie(s.mean, s.std) = stats_of([&](const PathOutcome& o) { return o.original.per_q[i].h_mean; });
    s.tau_std = stats_of([&](const PathOutcome& o) { return o.original.per_q[i].h_std; }).first;
    report.original.per_q.push_back(s);
  }
  if (outcomes.front().original.delta_h) {
    auto [m, sd] = stats_of([](const PathOutcome& o) { return *o.original.delta_h; });
    report.original.delta_h_mean = m;
    report.original.delta_h_std = sd;
  }

  if (spec.n_shuffles > 0) {
    EnsembleBlock block;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      QStats s;
      s.q = qs[i];
      std::tie(s.mean, s.std) = stats_of([&](const PathOutcome& o) { return o.shuffled_h[i]; });
      s.tau_std = stats_of([&](const PathOutcome& o) { return o.shuffled_tau_std[i]; }).first;
      s.shuffle_std = stats_of([&](const PathOutcome& o) { return o.shuffled_spread[i]; }).first;
      block.per_q.push_back(s);
    }
    if (outcomes.front().delta_h_shuff) {
      auto [m, sd] = stats_of([](const PathOutcome& o) { return *o.delta_h_shuff; });
      block.delta_h_mean = m;
      block.delta_h_std = sd;
    }
    report.shuffled = std::move(block);
  }

  for (const auto& o : outcomes) {
    report.min_scaling_r2 = std::min(report.min_scaling_r2, o.min_scaling_r2);
    if (o.min_scaling_r2 < kScalingR2Threshold) ++report.scaling_warnings;
  }
  report.paths = std::move(outcomes);
  return report;
}

struct IdentityTest {
  double statistic = 0.0;
  bool reject_at_95 = false;
};

/// Two-sample z statistic with combined variance; rejects at |z| > 1.96.
inline IdentityTest identity_test(double emp_mean, double emp_std, double sim_mean,
                                  double sim_std) {
  if (!(emp_std >= 0.0) || !(sim_std >= 0.0)) {
    throw Error(ErrorCode::DegenerateVariance, "standard deviations must be non-negative");
  }
  const double combined = std::sqrt(emp_std * emp_std + sim_std * sim_std);
  if (!(combined > 0.0)) {
    throw Error(ErrorCode::DegenerateVariance, "both standard deviations are zero");
  }
  IdentityTest t;
  t.statistic = (emp_mean - sim_mean) / combined;
  t.reject_at_95 = std::abs(t.statistic) > 1.96;
  return t;
}

struct DeltaHComparison {
  double delta_h = 0.0;
  double delta_h_std = 0.0;
  double delta_h_shuff = 0.0;
  double delta_h_shuff_std = 0.0;
  /// delta_h - delta_h_shuff, with its propagated std.
  double difference = 0.0;
  double difference_std = 0.0;
  std::optional<IdentityTest> test;
};

inline DeltaHComparison delta_h_comparison(const EnsembleReport& report) {
  if (!report.shuffled) {
    throw Error(ErrorCode::MissingShuffledBlock, "report has no shuffled block");
  }
  if (!report.original.delta_h_mean || !report.shuffled->delta_h_mean) {
    throw Error(ErrorCode::InvalidParams, "delta H needs both q = 1 and q = 3");
  }
  DeltaHComparison c;
  c.delta_h = *report.original.delta_h_mean;
  c.delta_h_std = report.original.delta_h_std;
  c.delta_h_shuff = *report.shuffled->delta_h_mean;
  c.delta_h_shuff_std = report.shuffled->delta_h_std;
  c.difference = c.delta_h - c.delta_h_shuff;
  c.difference_std = std::hypot(c.delta_h_std, c.delta_h_shuff_std);
  if (c.difference_std > 0.0) {
    c.test = identity_test(c.delta_h, c.delta_h_std, c.delta_h_shuff, c.delta_h_shuff_std);
  }
  return c;
}

}  // namespace ghelab
