#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "covert/analytic.hpp"
#include "oracles.hpp"

using covert::DelayModel;
using covert::ParameterError;
using covert::SystemParams;
namespace analytic = covert::analytic;

namespace {

SystemParams fig_params(std::int64_t k, std::int64_t n, double w = 50.0, std::int64_t r = 10) {
  return SystemParams::make(50, r, 10.0, k, n, 1.0, w);
}

}  // namespace

TEST(SystemParams, RejectsEachViolatedConstraint) {
  EXPECT_THROW(SystemParams::make(50, 10, 10, 0, 5, 1, 50), ParameterError);
  EXPECT_THROW(SystemParams::make(50, 10, 10, 6, 5, 1, 50), ParameterError);
  EXPECT_THROW(SystemParams::make(50, 10, 10, 3, 11, 1, 50), ParameterError);
  EXPECT_THROW(SystemParams::make(9, 10, 10, 3, 5, 1, 50), ParameterError);
  EXPECT_THROW(SystemParams::make(50, 10, 10, 3, 5, 0, 50), ParameterError);
  EXPECT_THROW(SystemParams::make(50, 10, 10, 3, 5, 1, -1), ParameterError);
  EXPECT_THROW(SystemParams::make(50, 10, 0, 3, 5, 1, 50), ParameterError);
  try {
    SystemParams::make(50, 10, 10, 3, 11, 1, 50);
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("n <= r"), std::string::npos);
  }
  const auto p = SystemParams::make(50, 10, 10, 3, 5, 1, 50);
  EXPECT_DOUBLE_EQ(p.chunk_length(), 10.0 / 3.0);
}

TEST(Harmonic, SmallValues) {
  EXPECT_EQ(analytic::harmonic(0), 0.0);
  EXPECT_EQ(analytic::harmonic(1), 1.0);
  EXPECT_NEAR(analytic::harmonic(3), 11.0 / 6.0, 1e-15);
  EXPECT_THROW(analytic::harmonic(-1), ParameterError);
}

TEST(DetectionProbability, WindowShorterThanPayloadIsCertainDetection) {
  EXPECT_EQ(analytic::detection_probability(SystemParams::make(50, 10, 10, 1, 1, 1, 8)), 1.0);
}

TEST(DetectionProbability, ContinuousAtWindowEqualPayload) {
  const auto p = SystemParams::make(50, 10, 10, 2, 2, 1, 5);
  EXPECT_NEAR(analytic::detection_probability(p), 1.0, 1e-15);
  // just above the boundary the smooth branch is still ~1
  const auto q = SystemParams::make(50, 10, 10, 2, 2, 1, 5 + 1e-9);
  EXPECT_NEAR(analytic::detection_probability(q), 1.0, 1e-8);
}

TEST(DetectionProbability, MatchesSamplingOracle) {
  // P(l + Exp(1) >= U(0, 50)) with l = 5; oracle estimate frozen at 0.12.
  const auto p = SystemParams::make(50, 10, 10, 2, 2, 1, 50);
  EXPECT_NEAR(analytic::detection_probability(p), 0.12, 1e-12);
  const auto est = oracle::detection_by_sampling(1.0, 5.0, 50.0, 10'000'000, 11);
  EXPECT_LE(std::abs(est.mean - analytic::detection_probability(p)), 3 * est.stderr_);
}

TEST(DetectionProbability, WideWindowAsymptote) {
  const auto p = SystemParams::make(50, 10, 10, 10, 10, 1, 1e6);
  EXPECT_NEAR(analytic::detection_probability(p), 2e-6, 1e-12);
  const auto est = oracle::detection_by_sampling(1.0, 1.0, 1e6, 10'000'000, 12);
  EXPECT_LE(std::abs(est.mean - 2e-6), 3 * est.stderr_ + 1e-12);
}

TEST(DetectionProbability, InUnitIntervalAndMonotone) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> lam(0.05, 5.0), m(0.1, 100.0), w(0.1, 200.0);
  std::uniform_int_distribution<int> k(1, 30);
  for (int i = 0; i < 2000; ++i) {
    const double l = lam(gen), mm = m(gen), ww = w(gen);
    const int kk = k(gen);
    const double pd = analytic::detection_probability(l, mm, kk, ww);
    ASSERT_GE(pd, 0.0);
    ASSERT_LE(pd, 1.0);
    EXPECT_LE(analytic::detection_probability(l, mm, kk, ww * 1.1), pd + 1e-15);
    EXPECT_LE(analytic::detection_probability(l, mm, kk + 1, ww), pd + 1e-15);
  }
}

TEST(CovertnessProbability, Examples) {
  EXPECT_EQ(analytic::covertness_probability(SystemParams::make(50, 10, 10, 1, 3, 1, 8)), 0.0);
  // W -> infinity drives P_d to 0
  EXPECT_NEAR(analytic::covertness_probability(SystemParams::make(50, 10, 10, 1, 1, 1, 1e12)), 1.0, 1e-10);
  EXPECT_NEAR(analytic::covertness_probability(fig_params(2, 3)), std::pow(0.88, 5), 1e-12);
  EXPECT_NEAR(analytic::covertness_probability(fig_params(2, 3)), 0.5277319168, 1e-9);
}

TEST(CovertnessProbability, StrictlyDecreasingInRedundancy) {
  for (std::int64_t k = 1; k <= 10; ++k) {
    double prev = 2.0;
    for (std::int64_t n = k; n <= 10; ++n) {
      const double pc = analytic::covertness_probability(fig_params(k, n));
      EXPECT_LT(pc, prev);
      prev = pc;
    }
  }
}

TEST(ChunkTimeModel1, Examples) {
  const auto p = SystemParams::make(50, 10, 10, 3, 10, 1, 50);
  EXPECT_NEAR(analytic::expected_chunk_time_m1(p, 1), 1 + 10.0 / 3 + 5, 1e-12);
  EXPECT_NEAR(analytic::expected_chunk_time_m1(p, 10), 1 + 10.0 / 3 + 50, 1e-12);
  // s = r: every visit is a fresh relay for the first chunk
  const auto q = SystemParams::make(10, 10, 10, 2, 2, 1e12, 50);
  EXPECT_NEAR(analytic::expected_chunk_time_m1(q, 1), 5 + 1, 1e-9);
  EXPECT_THROW(analytic::expected_chunk_time_m1(p, 0), std::out_of_range);
  EXPECT_THROW(analytic::expected_chunk_time_m1(p, 11), std::out_of_range);
}

TEST(ChunkTimeModel1, MatchesGeometricSampling) {
  const auto p = SystemParams::make(50, 10, 10, 3, 10, 1, 50);
  for (std::int64_t i : {1, 5, 10}) {
    const auto est = oracle::chunk_time_by_sampling(p, i, 200'000, 40 + static_cast<unsigned>(i));
    EXPECT_LE(std::abs(est.mean - analytic::expected_chunk_time_m1(p, i)), 3 * est.stderr_) << i;
  }
}

TEST(Dissemination, ClosedForms) {
  const auto p = fig_params(3, 5);
  EXPECT_NEAR(analytic::expected_dissemination(p, DelayModel::Model1), 53.948412698412696, 1e-10);
  EXPECT_NEAR(analytic::expected_dissemination(p, DelayModel::Model2), 172.16931216931218, 1e-10);
  // n = r: last term is s H_r
  const auto full = fig_params(3, 10);
  EXPECT_NEAR(analytic::expected_dissemination(full, DelayModel::Model1),
              10 + 100.0 / 3 + 50 * analytic::harmonic(10), 1e-10);
}

TEST(Collection, ClosedForms) {
  const auto p = fig_params(3, 5);
  EXPECT_NEAR(analytic::expected_collection(p, DelayModel::Model1), 52.166666666666664, 1e-10);
  EXPECT_NEAR(analytic::expected_collection(p, DelayModel::Model2), 208.88888888888889, 1e-10);
  const auto all = fig_params(4, 4);
  EXPECT_NEAR(analytic::expected_collection(all, DelayModel::Model1),
              4 + 10 + 50 * analytic::harmonic(4), 1e-10);
}

TEST(Total, ClosedForms) {
  EXPECT_NEAR(analytic::expected_total(fig_params(3, 5), DelayModel::Model1), 106.11507936507937, 1e-10);
  EXPECT_NEAR(analytic::expected_total(fig_params(1, 2), DelayModel::Model1), 68.55555555555556, 1e-10);
  EXPECT_NEAR(analytic::expected_total(fig_params(3, 5), DelayModel::Model2), 381.05820105820106, 1e-10);
}

TEST(Total, EqualsSumOfPhasesAcrossRandomParams) {
  std::mt19937_64 gen(9);
  for (int i = 0; i < 500; ++i) {
    const auto p = oracle::random_params(gen, 200);
    for (auto model : {DelayModel::Model1, DelayModel::Model2}) {
      const double sum = analytic::expected_dissemination(p, model) + analytic::expected_collection(p, model);
      EXPECT_NEAR(analytic::expected_total(p, model), sum, 1e-12 * sum);
    }
  }
}

TEST(Total, TelescopingHarmonicDifference) {
  for (std::int64_t r = 1; r <= 80; ++r)
    for (std::int64_t n = 1; n <= r; ++n) {
      double direct = 0.0;
      for (std::int64_t i = 1; i <= n; ++i) direct += 50.0 / static_cast<double>(r - i + 1);
      const double closed = 50.0 * (analytic::harmonic(r) - analytic::harmonic(r - n));
      ASSERT_NEAR(closed, direct, 1e-12 * direct) << r << ' ' << n;
    }
}

TEST(Model1, PhaseMonotonicityInRedundancy) {
  for (std::int64_t k = 1; k <= 10; ++k)
    for (std::int64_t n = k; n < 10; ++n) {
      EXPECT_LT(analytic::expected_dissemination(fig_params(k, n), DelayModel::Model1),
                analytic::expected_dissemination(fig_params(k, n + 1), DelayModel::Model1));
      EXPECT_GT(analytic::expected_collection(fig_params(k, n), DelayModel::Model1),
                analytic::expected_collection(fig_params(k, n + 1), DelayModel::Model1));
    }
}

TEST(OptimalN, Examples) {
  EXPECT_EQ(analytic::optimal_n_m2(10, 3), 5);
  EXPECT_EQ(analytic::optimal_n_m2(3, 1), 1);
  for (std::int64_t k = 1; k <= 20; ++k) EXPECT_EQ(analytic::optimal_n_m2(k, k), k);
  EXPECT_THROW(analytic::optimal_n_m2(3, 4), ParameterError);
}

TEST(OptimalN, TieAtThreeRelaysIsExact) {
  // n = 1 and n = 2 have identical Model 2 totals; the smaller n is returned
  const auto one = SystemParams::make(50, 3, 10, 1, 1, 1, 50);
  const auto two = SystemParams::make(50, 3, 10, 1, 2, 1, 50);
  const auto three = SystemParams::make(50, 3, 10, 1, 3, 1, 50);
  const double t1 = analytic::expected_total(one, DelayModel::Model2);
  const double t2 = analytic::expected_total(two, DelayModel::Model2);
  EXPECT_TRUE(analytic::nearly_equal(t1, t2));
  EXPECT_LT(t1, analytic::expected_total(three, DelayModel::Model2));
}

TEST(OptimalN, AgreesWithExhaustiveSearch) {
  for (std::int64_t r = 1; r <= 60; ++r)
    for (std::int64_t k = 1; k <= r; ++k) {
      const auto got = analytic::optimal_n_m2(r, k);
      ASSERT_GE(got, k);
      ASSERT_LE(got, r);
      double best = INFINITY;
      for (std::int64_t n = k; n <= r; ++n)
        best = std::min(best, analytic::expected_total(SystemParams::make(60, r, 10, k, n, 1, 50), DelayModel::Model2));
      const double mine = analytic::expected_total(SystemParams::make(60, r, 10, k, got, 1, 50), DelayModel::Model2);
      ASSERT_TRUE(analytic::nearly_equal(mine, best)) << "r=" << r << " k=" << k;
    }
}
