#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace ghelab::fft {

namespace detail {
// FFTW planning is not thread-safe; execution on a private plan is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
}  // namespace detail

/// Unnormalized forward DFT, X_k = sum_j x_j exp(-2 pi i jk / n).
inline std::vector<std::complex<double>> forward(std::vector<std::complex<double>> data) {
  const int n = static_cast<int>(data.size());
  if (n == 0) return data;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  std::unique_ptr<fftw_plan_s, detail::PlanDeleter> plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan.reset(fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  return data;
}

}  // namespace ghelab::fft
