// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ghelab/ghelab.hpp"
#include "../support/naive.hpp"

using namespace ghelab;

namespace {

constexpr std::size_t kPaths = 200;
constexpr std::size_t kShuffles = 33;

struct Check {
  bool ok = true;
  std::ostringstream notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [" << what << "]";
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

EnsembleReport ensemble(Generator g, std::size_t length, std::uint64_t seed,
                        VariableKind v = VariableKind::price) {
  EnsembleSpec spec;
  spec.generator = std::move(g);
  spec.n_paths = kPaths;
  spec.path_length = length;
  spec.variable_kind = v;
  spec.n_shuffles = kShuffles;
  spec.master_seed = seed;
  return run_ensemble(spec);
}

bool within_combined(double a, double sa, double b, double sb, double k) {
  return std::abs(a - b) <= k * std::hypot(sa, sb);
}

void report(int id, const std::string& title, const Check& c, double seconds) {
  std::printf("criterion %d: %s  %s (%.1fs)%s\n", id, c.ok ? "PASS" : "FAIL", title.c_str(), seconds,
              c.notes.str().c_str());
  std::fflush(stdout);
}

template <class F>
bool run(int id, const std::string& title, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.notes << " [exception: " << e.what() << "]";
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, title, c, s);
  return c.ok;
}

// Reference stable rows: alpha -> {H(1), sd, H(3), sd}.
const std::map<double, std::array<double, 4>> kStableRows{
    {1.2, {0.811, 0.059, 0.333, 0.007}},
    {1.6, {0.626, 0.040, 0.340, 0.013}},
    {2.0, {0.499, 0.007, 0.499, 0.008}},
};

void stable_law(Check& c) {
  for (const auto& [alpha, row] : kStableRows) {
    const auto r = ensemble(standard_stable(alpha), 8192, 100 + static_cast<std::uint64_t>(alpha * 10));
    const auto* h1 = r.original.find(1.0);
    const auto* h3 = r.original.find(3.0);
    const auto cmp = delta_h_comparison(r);
    const std::string tag = "alpha=" + fmt(alpha);
    c.notes << " " << tag << " H1=" << fmt(h1->mean) << " H3=" << fmt(h3->mean) << " dH=" << fmt(cmp.delta_h)
            << " dHs=" << fmt(cmp.delta_h_shuff) << ";";
    c.expect(within_combined(h1->mean, h1->std, row[0], row[1], 2.0), tag + " H(1)");
    c.expect(within_combined(h3->mean, h3->std, row[2], row[3], 2.0), tag + " H(3)");
    c.expect(std::abs(cmp.delta_h - cmp.delta_h_shuff) <= 0.02, tag + " dH vs dH_shuff");
  }
}

void fbm_unifractal(Check& c) {
  for (double h : {0.3, 0.5, 0.7}) {
    const auto r = ensemble(FbmParams{h, 8192}, 8192, 200 + static_cast<std::uint64_t>(h * 10));
    const std::string tag = "H=" + fmt(h);
    for (const auto& s : r.original.per_q) c.expect(std::abs(s.mean - h) <= 0.02, tag + " original q=" + fmt(s.q));
    for (const auto& s : r.shuffled->per_q) c.expect(std::abs(s.mean - 0.5) <= 0.02, tag + " shuffled q=" + fmt(s.q));
    const auto cmp = delta_h_comparison(r);
    c.expect(std::abs(cmp.delta_h) <= 0.01, tag + " dH");
    c.expect(std::abs(cmp.delta_h_shuff) <= 0.01, tag + " dH_shuff");
    c.notes << " " << tag << " H2=" << fmt(r.original.find(2.0)->mean) << " H2s=" << fmt(r.shuffled->find(2.0)->mean)
            << " dH=" << fmt(cmp.delta_h) << ";";
  }
}

ArfimaParams arfima(double alpha, double d, std::vector<double> ar = {}) {
  ArfimaParams p;
  p.stable = standard_stable(alpha);
  p.d = d;
  p.ar_coeffs = std::move(ar);
  return p;
}

std::map<double, EnsembleReport> g_stable_cache;

const EnsembleReport& stable_reference(double alpha) {
  auto it = g_stable_cache.find(alpha);
  if (it == g_stable_cache.end()) {
    it = g_stable_cache.emplace(alpha, ensemble(standard_stable(alpha), 8192, 300 + static_cast<std::uint64_t>(alpha * 10)))
             .first;
  }
  return it->second;
}

void shuffled_matches_stable(Check& c, const EnsembleReport& r, double alpha, const std::string& tag) {
  const auto& ref = stable_reference(alpha);
  for (std::size_t i = 0; i < r.shuffled->per_q.size(); ++i) {
    const auto& s = r.shuffled->per_q[i];
    const auto& o = ref.original.per_q[i];
    c.expect(within_combined(s.mean, s.std, o.mean, o.std, 2.0), tag + " shuffled q=" + fmt(s.q));
  }
}

void arfima_law(Check& c) {
  const std::array<std::pair<double, double>, 3> cells{{{1.4, 0.1}, {1.8, -0.1}, {1.8, 0.2}}};
  std::uint64_t seed = 400;
  for (const auto& [alpha, d] : cells) {
    const auto r = ensemble(arfima(alpha, d), 8192, seed++);
    const auto* h1 = r.original.find(1.0);
    const double target = d + 1.0 / alpha;
    const std::string tag = "alpha=" + fmt(alpha) + ",d=" + fmt(d);
    c.notes << " " << tag << " H1=" << fmt(h1->mean) << "+-" << fmt(h1->std) << " target=" << fmt(target) << ";";
    c.expect(std::abs(h1->mean - target) <= 3.0 * h1->std, tag + " H(1)");
    shuffled_matches_stable(c, r, alpha, tag);
  }
}

void short_memory(Check& c) {
  const auto with_ar = ensemble(arfima(1.8, 0.1, {0.4}), 8192, 500);
  const auto without = ensemble(arfima(1.8, 0.1), 8192, 501);
  const auto* h2 = with_ar.original.find(2.0);
  const double dh_ar = std::abs(*with_ar.original.delta_h_mean);
  const double dh_plain = std::abs(*without.original.delta_h_mean);
  c.notes << " H2=" << fmt(h2->mean) << " |dH| ar=" << fmt(dh_ar) << " plain=" << fmt(dh_plain) << ";";
  c.expect(std::abs(h2->mean - 0.719) <= 2.0 * 0.010, "H(2)");
  c.expect(dh_ar < dh_plain, "|dH| ordering");
  shuffled_matches_stable(c, with_ar, 1.8, "ar");
}

void msm_scaling(Check& c) {
  const auto nik = *fixture_params("Nik", 10);
  c.expect(nik.m0 == 1.437 && nik.sigma == 0.012, "fixture");
  const auto abs_r = ensemble(nik, 8700, 600, VariableKind::cum_abs_return);
  const auto price = ensemble(nik, 8700, 600, VariableKind::price);
  const double ha = abs_r.original.find(2.0)->mean;
  const double hp = price.original.find(2.0)->mean;
  c.notes << " sum|r| H2=" << fmt(ha) << " price H2=" << fmt(hp) << ";";
  c.expect(std::abs(ha - 0.784) <= 2.0 * 0.015, "sum|r| H(2)");
  c.expect(std::abs(hp - 0.499) <= 2.0 * 0.016, "price H(2)");
}

void property_suite(Check& c) {
  // Shuffle keeps the multiset, exhaustively over small sizes and seeds.
  for (std::size_t n = 1; n <= 24; ++n) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      ReturnSeries r;
      for (std::size_t i = 0; i < n; ++i) r.values.push_back(static_cast<double>((i * 7) % 5));
      Rng rng(seed);
      auto s = shuffle(r, rng).values;
      auto o = r.values;
      std::sort(s.begin(), s.end());
      std::sort(o.begin(), o.end());
      if (s != o) c.expect(false, "shuffle multiset n=" + std::to_string(n));
    }
  }
  // Shuffle uniformity on 3 elements.
  {
    std::map<std::vector<double>, int> counts;
    Rng rng(9);
    constexpr int kDraws = 60000;
    for (int i = 0; i < kDraws; ++i) counts[shuffle(ReturnSeries{{1, 2, 3}}, rng).values]++;
    double chi2 = 0.0;
    for (const auto& [perm, k] : counts) chi2 += std::pow(k - kDraws / 6.0, 2) / (kDraws / 6.0);
    c.expect(counts.size() == 6 && chi2 < 20.515, "shuffle uniformity");
  }
  // Structure functions are invariant under X -> cX.
  {
    Rng rng(11);
    std::vector<double> x(300);
    double acc = 0.0;
    for (auto& v : x) v = acc += rng.normal();
    for (double q : {0.5, 1.0, 2.0, 3.0}) {
      for (double scale : {1e-3, -2.5, 7e4}) {
        std::vector<double> y(x);
        for (auto& v : y) v *= scale;
        const auto a = structure_functions(SeriesPath{x}, q, 19);
        const auto b = structure_functions(SeriesPath{y}, q, 19);
        for (std::size_t t = 0; t < a.size(); ++t) {
          if (std::abs(a[t] - b[t]) > 1e-12 * a[t]) c.expect(false, "scale invariance q=" + fmt(q));
        }
      }
    }
  }
  // Fractional MA coefficients obey j psi_j = (j - 1 + d) psi_{j-1}.
  for (double d = -0.45; d < 0.5; d += 0.05) {
    const auto psi = fractional_ma_coeffs(d, 1000);
    if (psi[0] != 1.0) c.expect(false, "psi_0");
    for (std::size_t j = 1; j < psi.size(); ++j) {
      const double lhs = static_cast<double>(j) * psi[j];
      const double rhs = (static_cast<double>(j) - 1.0 + d) * psi[j - 1];
      if (std::abs(lhs - rhs) > 1e-15 * std::max(std::abs(rhs), 1e-300) * 4) c.expect(false, "ma recurrence");
    }
  }
  // Transition probabilities increase with rank and end exactly at gamma_k.
  for (int k = 1; k <= 20; ++k) {
    for (double gk : {0.05, 0.5, 0.95}) {
      const auto g = transition_probs(k, 2.0, gk);
      if (g.back() != gk) c.expect(false, "gamma endpoint");
      for (std::size_t i = 1; i < g.size(); ++i) {
        if (!(g[i - 1] < g[i])) c.expect(false, "gamma monotone");
      }
    }
  }
  // Characteristic function: phi(0) = 1, |phi| <= 1, and the empirical
  // characteristic function of sampled draws agrees within 0.01.
  const std::array<StableParams, 4> laws{{{1.5, 0.0, 1.0, 0.0}, {1.2, 0.5, 1.0, 0.3}, {1.0, -0.3, 0.7, 0.0},
                                          {2.0, 0.0, std::sqrt(0.5), 0.0}}};
  std::uint64_t seed = 21;
  for (const auto& p : laws) {
    c.expect(std::abs(stable_cf(p, 0.0) - std::complex<double>(1.0, 0.0)) < 1e-15, "phi(0)");
    for (double u = -10.0; u <= 10.0; u += 0.25) {
      if (std::abs(stable_cf(p, u)) > 1.0 + 1e-15) c.expect(false, "|phi| <= 1");
    }
    Rng rng(seed++);
    constexpr int kDraws = 200000;
    std::vector<double> xs(kDraws);
    for (auto& x : xs) x = sample_stable(p, rng);
    for (double u : {0.25, 0.5, 1.0, 2.0}) {
      std::complex<double> ecf{0.0, 0.0};
      for (double x : xs) ecf += std::polar(1.0, u * x);
      ecf /= static_cast<double>(kDraws);
      if (std::abs(ecf - stable_cf(p, u)) > 0.01) c.expect(false, "ECF alpha=" + fmt(p.alpha) + " u=" + fmt(u));
    }
  }
  // Ensemble results do not depend on the worker count.
  {
    EnsembleSpec spec;
    spec.generator = *fixture_params("Nik", 10);
    spec.n_paths = 12;
    spec.path_length = 2000;
    spec.n_shuffles = 3;
    spec.master_seed = 5;
    spec.variable_kind = VariableKind::cum_abs_return;
    const auto a = run_ensemble(spec, 1);
    const auto b = run_ensemble(spec, 4);
    bool same = a.original.delta_h_mean == b.original.delta_h_mean &&
                a.shuffled->delta_h_mean == b.shuffled->delta_h_mean;
    for (std::size_t i = 0; i < a.original.per_q.size(); ++i) {
      same = same && a.original.per_q[i].mean == b.original.per_q[i].mean &&
             a.original.per_q[i].std == b.original.per_q[i].std &&
             a.shuffled->per_q[i].mean == b.shuffled->per_q[i].mean &&
             a.shuffled->per_q[i].shuffle_std == b.shuffled->per_q[i].shuffle_std;
    }
    c.expect(same, "threads 1 vs 4");
  }
}

void oracle(Check& c) {
  Rng rng(20240601);
  double worst_k = 0.0;
  double worst_h = 0.0;
  for (int s = 0; s < 50; ++s) {
    const auto n = static_cast<std::size_t>(20 + rng.below(45));
    std::vector<double> x(n);
    double acc = rng.normal();
    for (auto& v : x) {
      v = acc;
      acc += rng.normal() * (0.2 + rng.uniform());
    }
    const SeriesPath path{x};
    for (double q : {0.5, 1.0, 2.0, 3.0}) {
      for (std::size_t tau_max : {5u, 10u, 19u}) {
        for (std::size_t tau = 1; tau <= tau_max; ++tau) {
          const double ref = naive::structure_function(x, q, tau);
          worst_k = std::max(worst_k, std::abs(structure_function(path, q, tau) - ref) / std::abs(ref));
        }
        worst_h = std::max(worst_h, std::abs(fit_hurst(path, q, tau_max) - naive::fit_hurst(x, q, tau_max)));
      }
    }
  }
  c.notes << " max rel dK=" << worst_k << " max dH=" << worst_h << ";";
  c.expect(worst_k <= 1e-12, "structure_function");
  c.expect(worst_h <= 1e-12, "fit_hurst");
}

}  // namespace

int main() {
  bool all = true;
  all &= run(1, "stable-law multifractality, 200 x 8192", stable_law);
  all &= run(2, "fBm uni-fractality, 200 x 8192", fbm_unifractal);
  all &= run(3, "ARFIMA long-memory law, 200 x 8192", arfima_law);
  all &= run(4, "short-memory bias, AR(1)=0.4", short_memory);
  all &= run(5, "MSM volatility scaling, Nik k=10, 200 x 8700", msm_scaling);
  all &= run(6, "property suite", property_suite);
  all &= run(7, "brute-force oracle equivalence", oracle);
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
