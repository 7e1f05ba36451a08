#pragma once

// Markov-switching multifractal returns: r_t = sigma_t u_t with
// sigma_t^2 = sigma^2 * prod_i M_t^(i). Each multiplier takes m0 or 2 - m0
// with equal probability and is renewed at rank-dependent rate gamma_i.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ghelab/error.hpp"
#include "ghelab/random.hpp"
#include "ghelab/series.hpp"

namespace ghelab {

struct MsmParams {
  double m0 = 1.0;
  double sigma = 1.0;
  int k = 1;
  double b = 2.0;
  double gamma_k = 0.5;

  double m1() const noexcept { return 2.0 - m0; }

  void validate() const {
    if (!(m0 >= 1.0 && m0 <= 2.0)) {
      throw Error(ErrorCode::InvalidParams, "m0 must lie in [1, 2]");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw Error(ErrorCode::InvalidParams, "sigma must be positive");
    }
    if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be at least 1");
    if (!(b > 1.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::InvalidParams, "b must exceed 1");
    }
    if (!(gamma_k >= 0.0 && gamma_k <= 1.0)) {
      throw Error(ErrorCode::InvalidParams, "gamma_k must lie in [0, 1]");
    }
  }
};

struct MsmState {
  std::vector<double> multipliers;

  double product() const {
    double p = 1.0;
    for (double m : multipliers) p *= m;
    return p;
  }
};

/// gamma_i = 1 - (1 - gamma_k)^(b^(i-k)), i = 1..k. The last entry is
/// gamma_k itself.
inline std::vector<double> transition_probs(int k, double b, double gamma_k) {
  MsmParams check;
  check.k = k;
  check.b = b;
  check.gamma_k = gamma_k;
  check.validate();

  std::vector<double> probs(static_cast<std::size_t>(k));
  for (int i = 1; i < k; ++i) {
    probs[static_cast<std::size_t>(i - 1)] =
        1.0 - std::pow(1.0 - gamma_k, std::pow(b, static_cast<double>(i - k)));
  }
  probs.back() = gamma_k;
  return probs;
}

namespace detail {
inline double draw_multiplier(const MsmParams& p, Rng& rng) {
  return rng.uniform() < 0.5 ? p.m0 : p.m1();
}
}  // namespace detail

/// Stationary start: every component iid uniform over {m0, 2 - m0}.
inline MsmState initial_state(const MsmParams& params, Rng& rng) {
  MsmState s;
  s.multipliers.resize(static_cast<std::size_t>(params.k));
  for (double& m : s.multipliers) m = detail::draw_multiplier(params, rng);
  return s;
}

inline MsmState step_state(const MsmState& state, std::span<const double> probs,
                           const MsmParams& params, Rng& rng) {
  if (probs.size() != state.multipliers.size()) {
    throw Error(ErrorCode::InvalidParams, "transition vector length must equal k");
  }
  MsmState next = state;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (rng.uniform() < probs[i]) {
      next.multipliers[i] = detail::draw_multiplier(params, rng);
    }
  }
  return next;
}

inline ReturnSeries simulate_msm(const MsmParams& params, std::size_t length, Rng& rng) {
  params.validate();
  if (length < 1) throw Error(ErrorCode::TooShort, "length must be at least 1");

  const auto probs = transition_probs(params.k, params.b, params.gamma_k);
  MsmState state = initial_state(params, rng);
  ReturnSeries out;
  out.kind = ReturnKind::difference;
  out.values.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    state = step_state(state, probs, params, rng);
    const double vol = params.sigma * std::sqrt(state.product());
    out.values.push_back(vol * rng.normal());
  }
  return out;
}

/// GMM estimates (b = 2, gamma_k = 0.5) for the daily series June 1976 to
/// November 2010. Shipped verbatim as data/msm_table1.csv too.
struct MsmFixture {
  std::string_view asset;
  int k;
  double m0;
  double sigma;
};

inline constexpr std::array<MsmFixture, 36> kMsmFixtures{{
    {"Dow", 5, 1.362, 0.016},   {"Dow", 10, 1.317, 0.013},
    {"Dow", 15, 1.318, 0.012},  {"Dow", 20, 1.318, 0.011},
    {"Nik", 5, 1.449, 0.014},   {"Nik", 10, 1.437, 0.012},
    {"Nik", 15, 1.434, 0.010},  {"Nik", 20, 1.434, 0.010},
    {"DM/US", 5, 1.257, 0.017}, {"DM/US", 10, 1.205, 0.015},
    {"DM/US", 15, 1.203, 0.014}, {"DM/US", 20, 1.203, 0.014},
    {"US/UK", 5, 1.417, 0.017}, {"US/UK", 10, 1.358, 0.011},
    {"US/UK", 15, 1.357, 0.011}, {"US/UK", 20, 1.357, 0.010},
    {"TB1", 5, 1.630, 0.116},   {"TB1", 10, 1.596, 0.118},
    {"TB1", 15, 1.595, 0.119},  {"TB1", 20, 1.595, 0.119},
    {"TB2", 5, 1.707, 0.098},   {"TB2", 10, 1.671, 0.101},
    {"TB2", 15, 1.669, 0.101},  {"TB2", 20, 1.669, 0.102},
    {"TB3", 5, 1.616, 0.097},   {"TB3", 10, 1.588, 0.098},
    {"TB3", 15, 1.586, 0.098},  {"TB3", 20, 1.586, 0.099},
    {"TB5", 5, 1.655, 0.088},   {"TB5", 10, 1.620, 0.090},
    {"TB5", 15, 1.619, 0.091},  {"TB5", 20, 1.618, 0.091},
    {"TB10", 5, 1.690, 0.076},  {"TB10", 10, 1.664, 0.078},
    {"TB10", 15, 1.662, 0.079}, {"TB10", 20, 1.662, 0.078},
}};

inline constexpr std::array<std::string_view, 9> kMsmAssets{
    "Dow", "Nik", "DM/US", "US/UK", "TB1", "TB2", "TB3", "TB5", "TB10"};

inline constexpr std::array<int, 4> kMsmCascadeDepths{5, 10, 15, 20};

inline std::optional<MsmParams> fixture_params(std::string_view asset, int k) {
  for (const auto& f : kMsmFixtures) {
    if (f.asset == asset && f.k == k) {
      MsmParams p;
      p.m0 = f.m0;
      p.sigma = f.sigma;
      p.k = f.k;
      return p;
    }
  }
  return std::nullopt;
}

/// Interest-rate series use plain differences, equities and FX log returns.
inline ReturnKind default_return_kind(std::string_view asset) {
  return asset.starts_with("TB") ? ReturnKind::difference : ReturnKind::log_return;
}

}  // namespace ghelab
