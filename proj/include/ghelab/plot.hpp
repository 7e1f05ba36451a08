#pragma once

// Figure data: log-log structure functions and q H(q) scaling curves.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ghelab/ghe.hpp"
#include "ghelab/io.hpp"
#include "ghelab/random.hpp"
#include "ghelab/series.hpp"

namespace ghelab {

/// log K_q(tau) against log tau for tau = 1..cfg.tau_max_hi, one block per q.
inline std::vector<io::StructurePoint> structure_points(const SeriesPath& path, const GheConfig& cfg) {
  cfg.validate(path.size());
  const SeriesPath working = cfg.detrend ? detrend_linear(path, estimate_drift(path)) : path;
  const auto hi = static_cast<std::size_t>(cfg.tau_max_hi);
  std::vector<io::StructurePoint> out;
  for (double q : cfg.q_values) {
    const auto k = structure_functions(working, q, hi);
    for (std::size_t tau = 1; tau <= hi; ++tau) {
      out.push_back({q, tau, std::log(static_cast<double>(tau)), std::log(k[tau - 1])});
    }
  }
  return out;
}

/// q H(q) of the series, and of its shuffles (averaged over n_shuffles) when
/// n_shuffles > 0. Shuffle s uses derive_seed(seed, 0, s).
inline std::vector<io::ScalingPoint> scaling_points(const ReturnSeries& returns, VariableKind variable,
                                                    std::span<const double> q_grid,
                                                    const GheConfig& cfg, std::size_t n_shuffles,
                                                    std::uint64_t seed) {
  const auto original = scaling_function(build_variable(returns, variable), q_grid, cfg);
  std::vector<io::ScalingPoint> out;
  for (const auto& [q, qhq] : original) out.push_back({q, qhq, std::nullopt});
  if (n_shuffles == 0) return out;

  std::vector<double> acc(out.size(), 0.0);
  for (std::size_t s = 1; s <= n_shuffles; ++s) {
    Rng rng(derive_seed(seed, 0, s));
    const auto shuffled = scaling_function(build_variable(shuffle(returns, rng), variable), q_grid, cfg);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += shuffled[i].second;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].qhq_shuffled = acc[i] / static_cast<double>(n_shuffles);
  }
  return out;
}

}  // namespace ghelab
