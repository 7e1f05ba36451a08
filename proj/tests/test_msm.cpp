#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "ghelab/ghe.hpp"
#include "ghelab/msm.hpp"

using namespace ghelab;

namespace {

MsmParams params(double m0, double sigma, int k) {
  MsmParams p;
  p.m0 = m0;
  p.sigma = sigma;
  p.k = k;
  return p;
}

double mean_h(const MsmParams& p, VariableKind v, double q, int paths, std::uint64_t seed) {
  double acc = 0.0;
  for (int i = 0; i < paths; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i), 0));
    const auto r = simulate_msm(p, 8700, rng);
    acc += generalized_hurst(build_variable(r, v), {}).h(q) / paths;
  }
  return acc;
}

}  // namespace

TEST(TransitionProbs, Examples) {
  EXPECT_EQ(transition_probs(1, 3.0, 0.5), std::vector<double>{0.5});
  const auto g = transition_probs(5, 2.0, 0.5);
  ASSERT_EQ(g.size(), 5u);
  // 1 - 0.5^(2^(i-5)) via exp/log, i = 1..5.
  for (int i = 1; i <= 5; ++i) {
    const double oracle = 1.0 - std::exp(std::log(0.5) * std::exp2(i - 5));
    EXPECT_NEAR(g[static_cast<std::size_t>(i - 1)], oracle, 1e-15);
  }
  EXPECT_NEAR(g[0], 0.04239, 1e-5);
  EXPECT_NEAR(g[1], 0.08299, 1e-5);
  EXPECT_NEAR(g[2], 0.15910, 1e-5);
  EXPECT_NEAR(g[3], 0.29289, 1e-5);
  EXPECT_EQ(g[4], 0.5);
  EXPECT_EQ(transition_probs(4, 2.0, 0.0), std::vector<double>(4, 0.0));
}

TEST(TransitionProbs, MonotoneAndExactAtTop) {
  for (int k = 1; k <= 25; ++k) {
    for (double b : {1.5, 2.0, 3.7}) {
      for (double gk : {0.01, 0.3, 0.5, 0.99}) {
        const auto g = transition_probs(k, b, gk);
        EXPECT_EQ(g.back(), gk);
        for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
      }
    }
  }
}

TEST(TransitionProbs, InvalidParams) {
  for (auto [k, b, gk] : {std::tuple{0, 2.0, 0.5}, {3, 1.0, 0.5}, {3, 2.0, -0.1}, {3, 2.0, 1.2}}) {
    try {
      transition_probs(k, b, gk);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
    }
  }
}

TEST(StepState, NoRenewalKeepsState) {
  Rng rng(1);
  const auto p = params(1.4, 1.0, 6);
  const auto s0 = initial_state(p, rng);
  const std::vector<double> zero(6, 0.0);
  auto s = s0;
  for (int i = 0; i < 100; ++i) s = step_state(s, zero, p, rng);
  EXPECT_EQ(s.multipliers, s0.multipliers);
}

TEST(StepState, FullRenewalIsFairCoin) {
  Rng rng(2);
  const auto p = params(2.0, 1.0, 1);
  const std::vector<double> one{1.0};
  auto s = initial_state(p, rng);
  int twos = 0;
  constexpr int kSteps = 10000;
  for (int i = 0; i < kSteps; ++i) {
    s = step_state(s, one, p, rng);
    const double m = s.multipliers[0];
    EXPECT_TRUE(m == 2.0 || m == 0.0);
    twos += m == 2.0;
  }
  EXPECT_NEAR(twos / static_cast<double>(kSteps), 0.5, 0.01);
}

TEST(StepState, UnitMultipliersStayOne) {
  Rng rng(3);
  const auto p = params(1.0, 1.0, 8);
  const auto g = transition_probs(8, 2.0, 0.5);
  auto s = initial_state(p, rng);
  for (int i = 0; i < 500; ++i) {
    s = step_state(s, g, p, rng);
    for (double m : s.multipliers) EXPECT_EQ(m, 1.0);
  }
}

TEST(StepState, LengthMismatch) {
  Rng rng(4);
  const auto p = params(1.5, 1.0, 3);
  const auto s = initial_state(p, rng);
  EXPECT_THROW(step_state(s, std::vector<double>{0.5}, p, rng), Error);
}

TEST(Msm, MultiplierMeanIsOne) {
  Rng rng(5);
  const auto p = params(1.6, 1.0, 1);
  constexpr int kDraws = 200000;
  double sum = 0.0;
  std::set<double> seen;
  for (int i = 0; i < kDraws; ++i) {
    const auto s = initial_state(p, rng);
    sum += s.multipliers[0];
    seen.insert(s.multipliers[0]);
  }
  EXPECT_EQ(seen, (std::set<double>{1.6, 2.0 - 1.6}));
  // Multiplier std is m0 - 1 = 0.6.
  EXPECT_NEAR(sum / kDraws, 1.0, 3.0 * 0.6 / std::sqrt(kDraws));
}

TEST(Msm, UnconditionalMoments) {
  Rng rng(6);
  const auto p = params(1.4, 0.02, 8);
  constexpr std::size_t kN = 1000000;
  const auto r = simulate_msm(p, kN, rng);
  ASSERT_EQ(r.size(), kN);
  EXPECT_EQ(r.kind, ReturnKind::difference);
  EXPECT_FALSE(r.demeaned);
  double s1 = 0.0, s2 = 0.0;
  for (double x : r.values) {
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / kN;
  const double m2 = s2 / kN;
  EXPECT_LE(std::abs(mean), 4.0 * std::sqrt(m2 / kN));
  EXPECT_NEAR(m2, p.sigma * p.sigma, 0.05 * p.sigma * p.sigma);
}

TEST(Msm, ReproducibleForSeed) {
  const auto p = params(1.45, 0.01, 10);
  Rng a(99), b(99);
  EXPECT_EQ(simulate_msm(p, 2000, a).values, simulate_msm(p, 2000, b).values);
}

TEST(Msm, InvalidParams) {
  Rng rng(1);
  for (const auto& p : {params(0.9, 1, 3), params(2.1, 1, 3), params(1.5, 0, 3), params(1.5, 1, 0)}) {
    try {
      simulate_msm(p, 10, rng);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
    }
  }
  EXPECT_THROW(simulate_msm(params(1.5, 1, 3), 0, rng), Error);
}

TEST(Msm, DegenerateCascadeIsGaussian) {
  const auto p = params(1.0, 0.01, 5);
  for (double q : {1.0, 2.0, 3.0}) EXPECT_NEAR(mean_h(p, VariableKind::price, q, 10, 7), 0.5, 0.01);
}

TEST(Msm, NikkeiPriceIsUnscaled) {
  EXPECT_NEAR(mean_h(*fixture_params("Nik", 10), VariableKind::price, 2.0, 40, 8), 0.499, 0.016);
}

TEST(Msm, DowAbsoluteReturnsPersist) {
  EXPECT_NEAR(mean_h(*fixture_params("Dow", 20), VariableKind::cum_abs_return, 1.0, 40, 9), 0.789, 0.026);
}

TEST(Fixtures, MatchBundledFile) {
  std::ifstream in(std::string(GHELAB_DATA_DIR) + "/msm_table1.csv");
  ASSERT_TRUE(in);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "asset,k,m0,sigma");
  std::size_t n = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string asset, k, m0, sigma;
    std::getline(ss, asset, ',');
    std::getline(ss, k, ',');
    std::getline(ss, m0, ',');
    std::getline(ss, sigma, ',');
    const auto p = fixture_params(asset, std::stoi(k));
    ASSERT_TRUE(p) << asset << " " << k;
    EXPECT_EQ(p->m0, std::stod(m0));
    EXPECT_EQ(p->sigma, std::stod(sigma));
    EXPECT_EQ(p->b, 2.0);
    EXPECT_EQ(p->gamma_k, 0.5);
    ++n;
  }
  EXPECT_EQ(n, 36u);
  EXPECT_FALSE(fixture_params("Dow", 7));
  EXPECT_EQ(fixture_params("Nik", 10)->m0, 1.437);
  EXPECT_EQ(fixture_params("Nik", 10)->sigma, 0.012);
}

TEST(Fixtures, ReturnKindByAssetClass) {
  EXPECT_EQ(default_return_kind("TB3"), ReturnKind::difference);
  EXPECT_EQ(default_return_kind("Dow"), ReturnKind::log_return);
  EXPECT_EQ(default_return_kind("DM/US"), ReturnKind::log_return);
}
