#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "covert/analytic.hpp"
#include "covert/simcore.hpp"

using covert::DelayModel;
using covert::ParameterError;
using covert::StreamRng;
using covert::SystemParams;
namespace analytic = covert::analytic;
namespace sim = covert::sim;

namespace {

constexpr auto kIid = sim::WalkModel::IidUniform;

SystemParams fig_params(std::int64_t k, std::int64_t n, double w = 50.0) {
  return SystemParams::make(50, 10, 10.0, k, n, 1.0, w);
}

struct Sample {
  double mean = 0, var = 0, se = 0;
};

template <class F>
Sample moments(int count, F draw) {
  sim::Moments m;
  for (int i = 0; i < count; ++i) m.add(draw());
  return {m.mean, m.variance(), m.stderr_of_mean()};
}

}  // namespace

TEST(Rng, StreamsAreKeyedBySeedAndIndex) {
  StreamRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
  StreamRng e(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto v = e.below(7);
    ASSERT_LT(v, 7u);
    const double u = e.uniform_open01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Sampling, TransmissionTimeMeanAndSupport) {
  StreamRng rng(1, 0);
  double min = INFINITY;
  const auto s = moments(1'000'000, [&] {
    const double t = sim::sample_transmission_time(rng, 5.0, 1.0);
    min = std::min(min, t);
    return t;
  });
  EXPECT_LE(std::abs(s.mean - 6.0), 3 * s.se);
  EXPECT_GT(min, 5.0);
}

TEST(Sampling, TransmissionTimeVariance) {
  StreamRng rng(2, 0);
  const auto s = moments(1'000'000, [&] { return sim::sample_transmission_time(rng, 1.0, 2.0); });
  // standard error of the sample variance of Exp(2): sqrt((mu4 - sigma^4)/N) = sqrt(8/16/N)
  const double se_var = std::sqrt(8.0 / 16.0 / 1e6);
  EXPECT_LE(std::abs(s.var - 0.25), 3 * se_var);
}

TEST(Sampling, WardenArrival) {
  StreamRng rng(3, 0);
  int below5 = 0;
  const int n = 1'000'000;
  const auto s = moments(n, [&] {
    const double a = sim::sample_warden_arrival(rng, 50.0);
    EXPECT_GE(a, 0.0);
    EXPECT_LT(a, 50.0);
    if (a <= 5.0) ++below5;
    return a;
  });
  EXPECT_LE(std::abs(s.mean - 25.0), 3 * s.se);
  const double frac = static_cast<double>(below5) / n;
  EXPECT_LE(std::abs(frac - 0.1), 3 * std::sqrt(0.09 / n));
}

TEST(Dissemination, EveryVertexARelay) {
  const auto p = SystemParams::make(10, 10, 10, 1, 1, 1, 50);
  for (std::uint64_t i = 0; i < 200; ++i) {
    StreamRng rng(4, i);
    sim::RelayField<sim::ChunkIndex> field;
    const auto r = sim::simulate_dissemination(rng, p, DelayModel::Model1, kIid, field);
    EXPECT_EQ(r.steps, 1);
    EXPECT_EQ(r.transmissions, 1);
    EXPECT_GT(r.time, 1.0 + p.chunk_length());
  }
}

TEST(Dissemination, OneChunkPerRelay) {
  const auto p = SystemParams::make(20, 8, 10, 3, 8, 1, 50);
  StreamRng rng(5, 0);
  sim::RelayField<sim::ChunkIndex> field;
  sim::simulate_dissemination(rng, p, DelayModel::Model1, kIid, field);
  std::map<sim::ChunkIndex, int> seen;
  for (const auto& slot : field.slots()) {
    ASSERT_TRUE(slot.payload.has_value());
    ++seen[*slot.payload];
  }
  EXPECT_EQ(seen.size(), 8u);
}

TEST(Collection, NothingWantedIsFree) {
  const auto p = fig_params(3, 5);
  StreamRng rng(6, 0);
  auto field = sim::RelayField<sim::ChunkIndex>::place(rng, 50, 10);
  std::vector<sim::ChunkIndex> got;
  const auto r = sim::collect<sim::ChunkIndex>(rng, p, DelayModel::Model1, kIid, field, 0, got);
  EXPECT_EQ(r.time, 0.0);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.detections, 0);
}

TEST(Collection, CouponCollectorOverAllVertices) {
  // s = r = n = k: every vertex is a loaded relay, Bob needs n H_n visits
  const std::int64_t n = 6;
  const auto p = SystemParams::make(n, n, 10, n, n, 1, 50);
  sim::Moments steps;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    StreamRng rng(7, i);
    steps.add(static_cast<double>(sim::run_trial(rng, p, DelayModel::Model1, kIid).collection_steps));
  }
  EXPECT_LE(std::abs(steps.mean - n * analytic::harmonic(n)), 3 * steps.stderr_of_mean());
}

TEST(MonteCarlo, PhaseMeansMatchClosedFormsModel1) {
  const auto p = fig_params(3, 5);
  const auto mc = sim::run_monte_carlo(p, DelayModel::Model1, kIid, 100000, 1);
  EXPECT_LE(std::abs(mc.dissemination_mean - 53.948412698412696), 3 * mc.dissemination_stderr);
  EXPECT_LE(std::abs(mc.collection_mean - 52.166666666666664), 3 * mc.collection_stderr);
  EXPECT_LE(std::abs(mc.total_mean - 106.11507936507937), 0.02 * 106.11507936507937);
}

TEST(MonteCarlo, PhaseMeansMatchClosedFormsModel2) {
  const auto p = fig_params(3, 5);
  const auto mc = sim::run_monte_carlo(p, DelayModel::Model2, kIid, 100000, 2);
  EXPECT_LE(std::abs(mc.dissemination_mean - 172.16931216931218), 3 * mc.dissemination_stderr);
  EXPECT_LE(std::abs(mc.collection_mean - 208.88888888888889), 3 * mc.collection_stderr);
}

TEST(Trial, FieldsAreConsistent) {
  const auto p = fig_params(3, 5);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    StreamRng rng(8, i);
    const auto t = sim::run_trial(rng, p, i % 2 ? DelayModel::Model1 : DelayModel::Model2, kIid);
    ASSERT_EQ(t.total_time, t.dissemination_time + t.collection_time);
    ASSERT_EQ(t.transmissions, 8);
    ASSERT_EQ(t.detected, t.detections > 0);
    ASSERT_GE(t.dissemination_steps, 5);
    ASSERT_GE(t.collection_steps, 3);
  }
}

TEST(Trial, ShortWindowAlwaysDetected) {
  const auto p = SystemParams::make(50, 10, 10, 1, 2, 1, 8);
  for (auto model : {DelayModel::Model1, DelayModel::Model2}) {
    const auto mc = sim::run_monte_carlo(p, model, kIid, 5000, 3);
    EXPECT_EQ(mc.undetected_trials, 0u);
    EXPECT_EQ(mc.detections, mc.transmissions);
  }
}

TEST(Trial, CovertnessMatchesConjunction) {
  const auto p = fig_params(3, 5);
  const auto mc = sim::run_monte_carlo(p, DelayModel::Model1, kIid, 100000, 4);
  const double pc = analytic::covertness_probability(p);
  const double se = std::sqrt(pc * (1 - pc) / 1e5);
  EXPECT_LE(std::abs(mc.empirical_covertness() - pc), 3 * se);

  const double pd = analytic::detection_probability(p);
  const double se_d = std::sqrt(pd * (1 - pd) / static_cast<double>(mc.transmissions));
  EXPECT_LE(std::abs(mc.detection_frequency() - pd), 3 * se_d);
}

TEST(MonteCarlo, DeterministicAndThreadCountInvariant) {
  const auto p = fig_params(2, 4);
  const auto a = sim::run_monte_carlo(p, DelayModel::Model1, kIid, 20000, 9, 1);
  const auto b = sim::run_monte_carlo(p, DelayModel::Model1, kIid, 20000, 9, 1);
  const auto c = sim::run_monte_carlo(p, DelayModel::Model1, kIid, 20000, 9, 4);
  const auto d = sim::run_monte_carlo(p, DelayModel::Model1, kIid, 20000, 10, 1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_NE(a.total_mean, d.total_mean);
}

TEST(MonteCarlo, RejectsZeroTrials) {
  EXPECT_THROW(sim::run_monte_carlo(fig_params(3, 5), DelayModel::Model1, kIid, 0, 0), ParameterError);
}

TEST(MonteCarlo, StandardErrorShrinksAsRootTrials) {
  const auto p = fig_params(3, 5);
  const auto small = sim::run_monte_carlo(p, DelayModel::Model1, kIid, 1000, 11);
  const auto large = sim::run_monte_carlo(p, DelayModel::Model1, kIid, 100000, 11);
  const double ratio = small.total_stderr / large.total_stderr;
  EXPECT_GT(ratio, 10.0 / 1.5);
  EXPECT_LT(ratio, 10.0 * 1.5);
}

TEST(MonteCarlo, NoSelfLoopNeedsFewerSteps) {
  const auto p = SystemParams::make(8, 5, 10, 2, 4, 1, 50);
  const auto mc = sim::run_monte_carlo(p, DelayModel::Model1, sim::WalkModel::NoSelfLoop, 50000, 12);
  const double expected = analytic::expected_total(p, DelayModel::Model1);
  EXPECT_LT(mc.total_mean + 3 * mc.total_stderr, expected);
}

TEST(Transcript, ReplayMatchesTrialAndLogsEveryTransmission) {
  const auto p = fig_params(3, 5);
  std::vector<sim::Event> events;
  const sim::EventSink sink = [&](const sim::Event& e) { events.push_back(e); };
  const auto replayed = sim::replay_trial(p, DelayModel::Model1, kIid, 21, 17, sink);
  StreamRng rng(21, 17);
  const auto direct = sim::run_trial(rng, p, DelayModel::Model1, kIid);
  EXPECT_EQ(replayed.total_time, direct.total_time);

  int visits = 0, deposits = 0, retrieves = 0, detects = 0;
  for (const auto& e : events) {
    EXPECT_EQ(e.trial_index, 17u);
    visits += e.type == sim::EventType::Visit;
    deposits += e.type == sim::EventType::Deposit;
    retrieves += e.type == sim::EventType::Retrieve;
    detects += e.type == sim::EventType::Detect;
  }
  EXPECT_EQ(visits, direct.dissemination_steps + direct.collection_steps);
  EXPECT_EQ(deposits, 5);
  EXPECT_EQ(retrieves, 3);
  EXPECT_EQ(detects, direct.detections);
}

TEST(WalkModel, Parsing) {
  EXPECT_EQ(sim::parse_walk_model("iid"), sim::WalkModel::IidUniform);
  EXPECT_EQ(sim::parse_walk_model("noselfloop"), sim::WalkModel::NoSelfLoop);
  EXPECT_THROW(sim::parse_walk_model("lazy"), ParameterError);
}
