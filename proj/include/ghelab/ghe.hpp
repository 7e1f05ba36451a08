#pragma once

// Generalized Hurst exponent estimation.
//
// K_q(tau) = <|X(t+tau) - X(t)|^q> / <|X(t)|^q> is computed over every
// overlapping increment at lag tau and every level of the (optionally
// detrended) path. H(q) is the slope of log K_q(tau) against log tau over
// tau = 1..tau_max, divided by q. The reported exponent averages the fits over
// every integer tau_max in a range (5..19 by default).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ghelab/error.hpp"
#include "ghelab/series.hpp"

namespace ghelab {

struct GheConfig {
  std::vector<double> q_values{1.0, 2.0, 3.0};
  int tau_max_lo = 5;
  int tau_max_hi = 19;
  bool detrend = true;

  /// Throws on an unusable configuration; returns non-fatal warnings
  /// (moments above q = 3, where scaling is known to break down).
  std::vector<std::string> validate(std::size_t length) const {
    if (q_values.empty()) {
      throw Error(ErrorCode::InvalidConfig, "q_values is empty");
    }
    std::vector<std::string> warnings;
    for (double q : q_values) {
      if (!(q > 0.0) || !std::isfinite(q)) {
        throw Error(ErrorCode::InvalidConfig, "every q must be positive and finite");
      }
      if (q > 3.0) {
        warnings.push_back("q = " + std::to_string(q) +
                           " exceeds 3; scaling may not hold for high moments");
      }
    }
    if (tau_max_lo < 2 || tau_max_hi < tau_max_lo) {
      throw Error(ErrorCode::InvalidConfig, "tau_max range must satisfy 2 <= lo <= hi");
    }
    if (4 * static_cast<std::size_t>(tau_max_hi) >= length) {
      throw Error(ErrorCode::TooShort,
                  "series of length " + std::to_string(length) +
                      " is too short for tau_max " + std::to_string(tau_max_hi) +
                      " (need length > 4 * tau_max)");
    }
    return warnings;
  }
};

struct HurstEstimate {
  double q = 0.0;
  double h_mean = 0.0;
  double h_std = 0.0;
  /// Worst R^2 of the log-log fits over the tau_max grid.
  double scaling_r2 = 1.0;
  std::vector<double> h_by_tau_max;
};

struct GheResult {
  std::vector<HurstEstimate> per_q;
  std::optional<double> delta_h;
  std::vector<std::string> warnings;

  const HurstEstimate* find(double q) const {
    for (const auto& e : per_q) {
      if (e.q == q) return &e;
    }
    return nullptr;
  }

  double h(double q) const {
    if (const auto* e = find(q)) return e->h_mean;
    throw Error(ErrorCode::InvalidParams, "no estimate for q = " + std::to_string(q));
  }
};

struct DriftEstimate {
  double eta = 0.0;
};

struct ScalingFit {
  double hurst = 0.0;
  double r2 = 1.0;
};

namespace detail {

// Calls f with a callable computing |v|^q; integer moments avoid std::pow.
template <class F>
double with_abs_power(double q, F&& f) {
  if (q == 1.0) return f([](double v) { return std::abs(v); });
  if (q == 2.0) return f([](double v) { return v * v; });
  if (q == 3.0) {
    return f([](double v) {
      const double a = std::abs(v);
      return a * a * a;
    });
  }
  return f([q](double v) { return std::pow(std::abs(v), q); });
}

inline double level_moment(std::span<const double> x, double q) {
  return with_abs_power(q, [&](auto pw) {
    double s = 0.0;
    for (double v : x) s += pw(v);
    return s / static_cast<double>(x.size());
  });
}

inline double increment_moment(std::span<const double> x, double q, std::size_t tau) {
  return with_abs_power(q, [&](auto pw) {
    const std::size_t n = x.size() - tau;
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += pw(x[t + tau] - x[t]);
    return s / static_cast<double>(n);
  });
}

inline void check_q(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw Error(ErrorCode::InvalidParams, "q must be positive and finite");
  }
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline LineFit ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

inline double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

/// Mean one-step increment, (X(T) - X(1)) / (T - 1).
inline DriftEstimate estimate_drift(const SeriesPath& path) {
  if (path.size() < 2) {
    throw Error(ErrorCode::TooShort, "drift needs at least two points");
  }
  const auto& x = path.values;
  return {(x.back() - x.front()) / static_cast<double>(x.size() - 1)};
}

inline SeriesPath detrend_linear(const SeriesPath& path, DriftEstimate drift) {
  if (path.size() < 2) {
    throw Error(ErrorCode::TooShort, "detrending needs at least two points");
  }
  SeriesPath out = path;
  for (std::size_t t = 0; t < out.values.size(); ++t) {
    out.values[t] -= drift.eta * static_cast<double>(t);
  }
  return out;
}

/// K_q(tau) for tau = 1..tau_max, sharing one denominator.
inline std::vector<double> structure_functions(const SeriesPath& path, double q,
                                               std::size_t tau_max) {
  detail::check_q(q);
  if (tau_max < 1) {
    throw Error(ErrorCode::InvalidParams, "tau must be at least 1");
  }
  if (tau_max >= path.size()) {
    throw Error(ErrorCode::TauTooLarge, "tau " + std::to_string(tau_max) +
                                            " must be smaller than the path length " +
                                            std::to_string(path.size()));
  }
  const std::span<const double> x(path.values);
  const double denom = detail::level_moment(x, q);
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::DegenerateSeries, "<|X(t)|^q> is zero");
  }
  std::vector<double> k(tau_max);
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    k[tau - 1] = detail::increment_moment(x, q, tau) / denom;
  }
  return k;
}

inline double structure_function(const SeriesPath& path, double q, std::size_t tau) {
  detail::check_q(q);
  if (tau < 1) {
    throw Error(ErrorCode::InvalidParams, "tau must be at least 1");
  }
  if (tau >= path.size()) {
    throw Error(ErrorCode::TauTooLarge, "tau " + std::to_string(tau) +
                                            " must be smaller than the path length " +
                                            std::to_string(path.size()));
  }
  const std::span<const double> x(path.values);
  const double denom = detail::level_moment(x, q);
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::DegenerateSeries, "<|X(t)|^q> is zero");
  }
  return detail::increment_moment(x, q, tau) / denom;
}

/// Log-log fit of precomputed K_q(tau), tau = 1..kq.size().
inline ScalingFit fit_scaling(std::span<const double> kq, double q) {
  detail::check_q(q);
  if (kq.size() < 2) {
    throw Error(ErrorCode::InvalidParams, "a scaling fit needs tau_max >= 2");
  }
  std::vector<double> log_tau(kq.size());
  std::vector<double> log_k(kq.size());
  for (std::size_t i = 0; i < kq.size(); ++i) {
    if (!(kq[i] > 0.0) || !std::isfinite(kq[i])) {
      throw Error(ErrorCode::NonPositiveStructureFunction,
                  "K_q(" + std::to_string(i + 1) + ") is not positive");
    }
    log_tau[i] = std::log(static_cast<double>(i + 1));
    log_k[i] = std::log(kq[i]);
  }
  const auto line = detail::ols(log_tau, log_k);
  return {line.slope / q, line.r2};
}

inline double fit_hurst(const SeriesPath& path, double q, std::size_t tau_max) {
  if (tau_max < 2) {
    throw Error(ErrorCode::InvalidParams, "tau_max must be at least 2");
  }
  return fit_scaling(structure_functions(path, q, tau_max), q).hurst;
}

/// R^2 of the log-log regression behind fit_hurst.
inline double scaling_diagnostic(const SeriesPath& path, double q, std::size_t tau_max) {
  if (tau_max < 2) {
    throw Error(ErrorCode::InvalidParams, "tau_max must be at least 2");
  }
  return fit_scaling(structure_functions(path, q, tau_max), q).r2;
}

inline GheResult generalized_hurst(const SeriesPath& path, const GheConfig& cfg) {
  GheResult result;
  result.warnings = cfg.validate(path.size());

  const SeriesPath working =
      cfg.detrend ? detrend_linear(path, estimate_drift(path)) : path;
  const auto lo = static_cast<std::size_t>(cfg.tau_max_lo);
  const auto hi = static_cast<std::size_t>(cfg.tau_max_hi);

  for (double q : cfg.q_values) {
    const auto k = structure_functions(working, q, hi);
    HurstEstimate est;
    est.q = q;
    est.scaling_r2 = 1.0;
    for (std::size_t tm = lo; tm <= hi; ++tm) {
      const auto fit = fit_scaling(std::span<const double>(k).first(tm), q);
      est.h_by_tau_max.push_back(fit.hurst);
      est.scaling_r2 = std::min(est.scaling_r2, fit.r2);
    }
    est.h_mean = mean_of(est.h_by_tau_max);
    est.h_std = detail::sample_std(est.h_by_tau_max);
    result.per_q.push_back(std::move(est));
  }

  const auto* h1 = result.find(1.0);
  const auto* h3 = result.find(3.0);
  if (h1 && h3) result.delta_h = h1->h_mean - h3->h_mean;
  return result;
}

/// zeta(q) = q H(q) on a grid of moments.
inline std::vector<std::pair<double, double>> scaling_function(
    const SeriesPath& path, std::span<const double> q_grid, const GheConfig& cfg) {
  GheConfig grid_cfg = cfg;
  grid_cfg.q_values.assign(q_grid.begin(), q_grid.end());
  const auto result = generalized_hurst(path, grid_cfg);
  std::vector<std::pair<double, double>> out;
  out.reserve(result.per_q.size());
  for (const auto& e : result.per_q) out.emplace_back(e.q, e.q * e.h_mean);
  return out;
}

}  // namespace ghelab
