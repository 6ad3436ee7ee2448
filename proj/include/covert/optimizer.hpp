#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "covert/analytic.hpp"
#include "covert/params.hpp"

namespace covert::opt {

/// Raised when a grid or range holds no admissible point.
class EmptyResultError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inclusive integer range [lo, hi].
struct IntRange {
  std::int64_t lo = 1;
  std::int64_t hi = 1;

  bool empty() const { return hi < lo; }
};

struct TradeoffPoint {
  std::int64_t k = 0;
  std::int64_t n = 0;
  double p_c = 0.0;
  double total_model1 = 0.0;
  double total_model2 = 0.0;
  DelayModel model = DelayModel::Model1;
  std::optional<double> simulated_total;

  /// Expected total delay under the point's selected model.
  double delay() const { return model == DelayModel::Model1 ? total_model1 : total_model2; }

  friend bool operator==(const TradeoffPoint&, const TradeoffPoint&) = default;
};

inline TradeoffPoint evaluate_point(const SystemParams& p, DelayModel model) {
  TradeoffPoint pt;
  pt.k = p.k();
  pt.n = p.n();
  pt.p_c = analytic::covertness_probability(p);
  pt.total_model1 = analytic::expected_total(p, DelayModel::Model1);
  pt.total_model2 = analytic::expected_total(p, DelayModel::Model2);
  pt.model = model;
  return pt;
}

/// Analytic covertness and delay at every (k, n) with k <= n, k-major.
inline std::vector<TradeoffPoint> grid_evaluate(const SystemParams& base, IntRange k_range,
                                                IntRange n_range, DelayModel model) {
  auto within = [&](IntRange r, const char* name) {
    if (!r.empty() && (r.lo < 1 || r.hi > base.r()))
      throw ParameterError(std::string(name) + " range must lie within [1, r=" +
                           std::to_string(base.r()) + "]");
  };
  within(k_range, "k");
  within(n_range, "n");

  std::vector<TradeoffPoint> points;
  for (std::int64_t k = k_range.lo; k <= k_range.hi; ++k)
    for (std::int64_t n = std::max(n_range.lo, k); n <= n_range.hi; ++n)
      points.push_back(evaluate_point(base.with_kn(k, n), model));
  if (points.empty()) throw EmptyResultError("grid has no point with k <= n");
  return points;
}

struct CovertnessPeak {
  std::int64_t k = 0;
  double p_c = 0.0;
};

/// k in `k_range` maximising (1 - P_d)^(n + k) at fixed n, ties to smaller k.
/// Only lambda, m and w are taken from `base`; k may exceed n here because
/// the covertness expression does not involve the code structure.
inline CovertnessPeak argmax_covertness(const SystemParams& base, IntRange k_range, std::int64_t n) {
  if (k_range.empty() || k_range.lo < 1) throw EmptyResultError("empty k range");
  CovertnessPeak best{0, -1.0};
  for (std::int64_t k = k_range.lo; k <= k_range.hi; ++k) {
    const double pc = analytic::covertness_probability(base.lambda(), base.m(), k, n, base.w());
    if (pc > best.p_c) best = {k, pc};
  }
  return best;
}

inline bool dominates(const TradeoffPoint& a, const TradeoffPoint& b) {
  return a.p_c >= b.p_c && a.delay() <= b.delay() && (a.p_c > b.p_c || a.delay() < b.delay());
}

/// Points not dominated in (higher P_c, lower delay), ascending in delay.
/// Along the result both delay and P_c strictly increase. Points equal in
/// both objectives collapse onto the lexicographically smallest (k, n).
inline std::vector<TradeoffPoint> pareto_frontier(std::vector<TradeoffPoint> points) {
  if (points.empty()) throw EmptyResultError("pareto frontier of an empty set");
  std::sort(points.begin(), points.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
    if (a.delay() != b.delay()) return a.delay() < b.delay();
    if (a.p_c != b.p_c) return a.p_c > b.p_c;
    if (a.k != b.k) return a.k < b.k;
    return a.n < b.n;
  });
  std::vector<TradeoffPoint> frontier;
  for (auto& pt : points)
    if (frontier.empty() || pt.p_c > frontier.back().p_c) frontier.push_back(std::move(pt));
  return frontier;
}

struct OptimalNMismatch {
  std::int64_t r = 0;
  std::int64_t k = 0;
  std::int64_t closed_form = 0;
  std::int64_t exhaustive = 0;
};

struct OptimalNReport {
  std::int64_t r_max = 0;
  std::int64_t cases = 0;
  std::int64_t ties = 0;  // cases where the two answers differ but their totals tie
  std::vector<OptimalNMismatch> mismatches;
};

/// Smallest n in [k, r] attaining the minimum Model 2 total, by scanning.
inline std::int64_t exhaustive_optimal_n_m2(std::int64_t r, std::int64_t k) {
  std::int64_t best = k;
  double best_span = analytic::model2_span(r, k, k);
  for (std::int64_t n = k + 1; n <= r; ++n) {
    const double span = analytic::model2_span(r, k, n);
    if (span < best_span && !analytic::nearly_equal(span, best_span)) {
      best = n;
      best_span = span;
    }
  }
  return best;
}

/// Checks the closed-form Model 2 redundancy against a full scan for every
/// 1 <= k <= r <= r_max.
inline OptimalNReport verify_optimal_n(std::int64_t r_max) {
  if (r_max < 1) throw ParameterError("r_max must be >= 1");
  OptimalNReport report;
  report.r_max = r_max;
  for (std::int64_t r = 1; r <= r_max; ++r)
    for (std::int64_t k = 1; k <= r; ++k) {
      ++report.cases;
      const auto closed = analytic::optimal_n_m2(r, k);
      const auto scanned = exhaustive_optimal_n_m2(r, k);
      if (closed == scanned) continue;
      if (analytic::nearly_equal(analytic::model2_span(r, k, closed),
                                 analytic::model2_span(r, k, scanned))) {
        ++report.ties;
        continue;
      }
      report.mismatches.push_back({r, k, closed, scanned});
    }
  return report;
}

}  // namespace covert::opt
