#pragma once

// Reference processes for robustness checks: alpha-stable variates,
// fractional Gaussian noise / fractional Brownian motion, and ARFIMA(p, d, 0)
// driven by symmetric stable innovations.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "ghelab/error.hpp"
#include "ghelab/fft.hpp"
#include "ghelab/random.hpp"
#include "ghelab/series.hpp"

namespace ghelab {

// ---------------------------------------------------------------------------
// Stable laws

/// Stable law in Nolan's S0 parameterization: characteristic function
/// exp(-gamma^alpha |u|^alpha [1 + i beta tan(pi alpha / 2) sign(u)
/// (|gamma u|^(1 - alpha) - 1)] + i delta u) for alpha != 1.
struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;
  double gamma = std::numbers::sqrt2 / 2.0;
  double delta = 0.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
      throw Error(ErrorCode::InvalidParams, "alpha must lie in (0, 2]");
    }
    if (!(beta >= -1.0 && beta <= 1.0)) {
      throw Error(ErrorCode::InvalidParams, "beta must lie in [-1, 1]");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw Error(ErrorCode::InvalidParams, "gamma must be positive");
    }
    if (!std::isfinite(delta)) {
      throw Error(ErrorCode::InvalidParams, "delta must be finite");
    }
  }
};

/// The symmetric law with scale sqrt(2)/2; unit-variance Gaussian at alpha = 2.
inline StableParams standard_stable(double alpha) {
  StableParams p;
  p.alpha = alpha;
  return p;
}

inline std::complex<double> stable_cf(const StableParams& p, double u) {
  if (u == 0.0) return {1.0, 0.0};
  using std::numbers::pi;
  const double au = std::abs(u);
  const double sgn = u > 0.0 ? 1.0 : -1.0;
  double re;
  double im;
  if (p.alpha != 1.0) {
    // beta = 0 (or alpha = 2, where tan vanishes) drops the skew term; this
    // also avoids 0 * inf for tiny |gamma u| when alpha > 1.
    const double skew = p.beta * std::tan(pi * p.alpha / 2.0);
    const double scale = std::pow(p.gamma * au, p.alpha);
    re = -scale;
    im = skew == 0.0 ? 0.0
                     : -scale * skew * sgn * (std::pow(p.gamma * au, 1.0 - p.alpha) - 1.0);
  } else {
    re = -p.gamma * au;
    im = p.beta == 0.0 ? 0.0
                       : -p.gamma * au * p.beta * (2.0 / pi) * sgn * std::log(p.gamma * au);
  }
  im += p.delta * u;
  return std::exp(std::complex<double>(re, im));
}

/// Chambers-Mallows-Stuck draw. The core variate Z has characteristic
/// function exp(-|u|^a (1 - i b sign(u) tan(pi a / 2))) (alpha != 1) and is
/// shifted into S0 as gamma (Z - beta tan(pi alpha / 2)) + delta.
inline double sample_stable(const StableParams& p, Rng& rng) {
  using std::numbers::pi;
  const double v = pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  const double a = p.alpha;
  if (a != 1.0) {
    const double t = p.beta * std::tan(pi * a / 2.0);
    const double b_shift = std::atan(t) / a;
    const double s_scale = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
    const double z = s_scale * std::sin(a * (v + b_shift)) / std::pow(std::cos(v), 1.0 / a) *
                     std::pow(std::cos(v - a * (v + b_shift)) / w, (1.0 - a) / a);
    return p.gamma * (z - t) + p.delta;
  }
  const double half_pi = pi / 2.0;
  const double bv = half_pi + p.beta * v;
  const double z =
      (2.0 / pi) * (bv * std::tan(v) - p.beta * std::log(half_pi * w * std::cos(v) / bv));
  return p.gamma * z + p.delta;
}

inline ReturnSeries simulate_stable_iid(const StableParams& p, std::size_t length, Rng& rng) {
  p.validate();
  ReturnSeries out;
  out.kind = ReturnKind::difference;
  out.values.resize(length);
  for (double& x : out.values) x = sample_stable(p, rng);
  return out;
}

// ---------------------------------------------------------------------------
// Fractional Gaussian noise

struct FbmParams {
  double hurst = 0.5;
  std::size_t length = 8192;

  void validate() const {
    if (!(hurst > 0.0 && hurst < 1.0)) {
      throw Error(ErrorCode::InvalidParams, "hurst must lie in (0, 1)");
    }
    if (length < 2) throw Error(ErrorCode::InvalidParams, "fBm length must be at least 2");
  }
};

/// Autocovariance of unit-variance fGn at lag k.
inline double fgn_autocovariance(double hurst, double k) {
  const double h2 = 2.0 * hurst;
  k = std::abs(k);
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

struct FbmSample {
  ReturnSeries increments;
  SeriesPath path;
};

/// Exact fGn by circulant embedding (Davies-Harte): embed the Toeplitz
/// covariance of size n' = bit_ceil(n) in a circulant of size 2n', take its
/// eigenvalues by FFT, and colour complex white noise with their square roots.
inline FbmSample simulate_fbm(const FbmParams& p, Rng& rng) {
  p.validate();
  const std::size_t half = std::bit_ceil(p.length);
  const std::size_t m = 2 * half;

  std::vector<std::complex<double>> row(m);
  for (std::size_t j = 0; j <= half; ++j) {
    row[j] = fgn_autocovariance(p.hurst, static_cast<double>(j));
  }
  for (std::size_t j = 1; j < half; ++j) row[m - j] = row[j];
  const auto eig = fft::forward(std::move(row));

  double max_eig = 0.0;
  for (const auto& e : eig) max_eig = std::max(max_eig, e.real());
  std::vector<std::complex<double>> noise(m);
  for (std::size_t k = 0; k < m; ++k) {
    double lambda = eig[k].real();
    if (lambda < 0.0) {
      if (lambda < -1e-8 * max_eig) {
        throw Error(ErrorCode::EmbeddingFailure, "circulant embedding is not non-negative definite");
      }
      lambda = 0.0;
    }
    const double scale = std::sqrt(lambda / static_cast<double>(m));
    const double re = rng.normal();
    const double im = rng.normal();
    noise[k] = {scale * re, scale * im};
  }
  const auto colored = fft::forward(std::move(noise));

  FbmSample out;
  out.increments.kind = ReturnKind::difference;
  out.increments.values.resize(p.length);
  for (std::size_t t = 0; t < p.length; ++t) out.increments.values[t] = colored[t].real();
  out.path = build_variable(out.increments, VariableKind::price);
  return out;
}

// ---------------------------------------------------------------------------
// ARFIMA(p, d, 0) with stable innovations

/// Coefficients psi_0..psi_n of (1 - z)^(-d).
inline std::vector<double> fractional_ma_coeffs(double d, std::size_t n) {
  if (!(std::abs(d) < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "fractional order d must satisfy |d| < 1");
  }
  std::vector<double> psi(n + 1);
  psi[0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const auto jd = static_cast<double>(j);
    psi[j] = psi[j - 1] * (jd - 1.0 + d) / jd;
  }
  return psi;
}

/// True when 1 - phi_1 z - ... - phi_p z^p has every root outside the unit
/// disk (step-down recursion: all reflection coefficients below one).
inline bool ar_is_stationary(std::vector<double> phi) {
  while (!phi.empty()) {
    const double kappa = phi.back();
    if (!(std::abs(kappa) < 1.0)) return false;
    const std::size_t p = phi.size();
    std::vector<double> next(p - 1);
    const double denom = 1.0 - kappa * kappa;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      next[i] = (phi[i] + kappa * phi[p - 2 - i]) / denom;
    }
    phi = std::move(next);
  }
  return true;
}

struct ArfimaParams {
  std::vector<double> ar_coeffs;
  double d = 0.0;
  StableParams stable = standard_stable(2.0);
  std::size_t ma_truncation = 1000;

  void validate() const {
    stable.validate();
    if (!ar_is_stationary(ar_coeffs)) {
      throw Error(ErrorCode::NonStationaryAR, "AR polynomial has a root inside the unit disk");
    }
    const double upper = 1.0 - 1.0 / stable.alpha;
    if (!(d > -0.5 && d < upper)) {
      throw Error(ErrorCode::InvalidParams,
                  "d must satisfy -0.5 < d < 1 - 1/alpha = " + std::to_string(upper));
    }
    if (ma_truncation < 100) {
      throw Error(ErrorCode::InvalidParams, "ma_truncation must be at least 100");
    }
  }

  std::size_t warmup() const noexcept { return ma_truncation + 100; }
};

/// Truncated MA(inf) filter of iid stable noise followed by the AR recursion;
/// the first ma_truncation + 100 samples are discarded.
inline ReturnSeries simulate_arfima(const ArfimaParams& p, std::size_t length, Rng& rng) {
  p.validate();
  if (length < 1) throw Error(ErrorCode::TooShort, "length must be at least 1");

  const std::size_t total = length + p.warmup();
  const auto psi = fractional_ma_coeffs(p.d, p.ma_truncation);
  std::vector<double> z(total);
  for (double& x : z) x = sample_stable(p.stable, rng);

  std::vector<double> y(total);
  const std::size_t order = p.ar_coeffs.size();
  for (std::size_t t = 0; t < total; ++t) {
    const std::size_t reach = std::min(t, p.ma_truncation);
    double fn = 0.0;
    for (std::size_t j = 0; j <= reach; ++j) fn += psi[j] * z[t - j];
    double ar = 0.0;
    for (std::size_t i = 0; i < order && i < t; ++i) ar += p.ar_coeffs[i] * y[t - 1 - i];
    y[t] = ar + fn;
  }

  ReturnSeries out;
  out.kind = ReturnKind::difference;
  out.values.assign(y.begin() + static_cast<std::ptrdiff_t>(p.warmup()), y.end());
  return out;
}

}  // namespace ghelab
