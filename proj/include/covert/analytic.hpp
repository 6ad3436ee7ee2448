#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "covert/params.hpp"

namespace covert::analytic {

/// H_j = sum_{i=1..j} 1/i by forward summation; H_0 = 0.
inline double harmonic(std::int64_t j) {
  if (j < 0) throw ParameterError("harmonic number of a negative index");
  double sum = 0.0;
  for (std::int64_t i = 1; i <= j; ++i) sum += 1.0 / static_cast<double>(i);
  return sum;
}

/// Per-transmission detection probability P(t_tr >= t_ar) with
/// t_tr ~ m/k + Exp(lambda) and t_ar ~ U(0, w). Equals 1 whenever the
/// window is shorter than the deterministic payload time m/k.
///
/// This overload does not require k <= n; covertness only depends on
/// (lambda, m, k, w).
inline double detection_probability(double lambda, double m, std::int64_t k, double w) {
  if (!(lambda > 0.0) || !(m > 0.0) || !(w > 0.0) || k < 1)
    throw ParameterError("detection probability needs lambda, m, w > 0 and k >= 1");
  const double ell = m / static_cast<double>(k);
  if (w < ell) return 1.0;
  const double lw = lambda * w;
  const double p = 1.0 / lw + m / (static_cast<double>(k) * w) - std::exp(-lambda * (w - ell)) / lw;
  return std::clamp(p, 0.0, 1.0);
}

inline double detection_probability(const SystemParams& p) {
  return detection_probability(p.lambda(), p.m(), p.k(), p.w());
}

/// Probability that none of the n + k chunk transmissions is detected.
inline double covertness_probability(double lambda, double m, std::int64_t k, std::int64_t n,
                                     double w) {
  if (n < 1) throw ParameterError("covertness probability needs n >= 1");
  const double pd = detection_probability(lambda, m, k, w);
  return std::pow(1.0 - pd, static_cast<double>(n + k));
}

inline double covertness_probability(const SystemParams& p) {
  return covertness_probability(p.lambda(), p.m(), p.k(), p.n(), p.w());
}

/// Model 1 expected time to place the i-th chunk (1-based): a geometric
/// search with success probability (r - i + 1)/s plus one transmission.
inline double expected_chunk_time_m1(const SystemParams& p, std::int64_t i) {
  if (i < 1 || i > p.n())
    throw std::out_of_range("chunk index " + std::to_string(i) + " outside [1, n]");
  const double success = static_cast<double>(p.r() - i + 1) / static_cast<double>(p.s());
  return 1.0 / p.lambda() + p.chunk_length() + 1.0 / success;
}

/// Expected cost of one visited vertex under Model 2: 1 + 1/lambda + m/k.
inline double model2_vertex_budget(const SystemParams& p) {
  return 1.0 / p.lambda() + p.chunk_length() + 1.0;
}

// Expected number of vertex visits needed to hit `want` distinct targets out
// of `pool` targets on an s-vertex complete graph: s (H_pool - H_{pool-want}).
inline double expected_visits(std::int64_t s, std::int64_t pool, std::int64_t want) {
  return static_cast<double>(s) * (harmonic(pool) - harmonic(pool - want));
}

inline double expected_dissemination(const SystemParams& p, DelayModel model) {
  const double visits = expected_visits(p.s(), p.r(), p.n());
  const double n = static_cast<double>(p.n());
  if (model == DelayModel::Model1)
    return n / p.lambda() + n * p.m() / static_cast<double>(p.k()) + visits;
  return model2_vertex_budget(p) * visits;
}

inline double expected_collection(const SystemParams& p, DelayModel model) {
  const double visits = expected_visits(p.s(), p.n(), p.k());
  if (model == DelayModel::Model1)
    return static_cast<double>(p.k()) / p.lambda() + p.m() + visits;
  return model2_vertex_budget(p) * visits;
}

/// Joint dissemination plus collection time, written in the combined closed
/// form rather than as a sum of the two phase functions.
inline double expected_total(const SystemParams& p, DelayModel model) {
  const double span =
      harmonic(p.r()) + harmonic(p.n()) - harmonic(p.r() - p.n()) - harmonic(p.n() - p.k());
  const double s = static_cast<double>(p.s());
  if (model == DelayModel::Model1) {
    const double n = static_cast<double>(p.n());
    const double k = static_cast<double>(p.k());
    return (n + k) / p.lambda() + (n / k + 1.0) * p.m() + s * span;
  }
  return model2_vertex_budget(p) * s * span;
}

/// Relative tolerance under which two expected totals count as tied.
inline constexpr double kTieTolerance = 1e-9;

inline bool nearly_equal(double a, double b, double rel = kTieTolerance) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// Model 2 total delay divided by the positive factor s (1/lambda + m/k + 1);
// for fixed (r, k) its argmin over n is the argmin of E[T_tot].
inline double model2_span(std::int64_t r, std::int64_t k, std::int64_t n) {
  return harmonic(r) + harmonic(n) - harmonic(r - n) - harmonic(n - k);
}

/// Redundancy n in [k, r] minimising Model 2 expected total delay, from the
/// floor/ceil of sqrt(rk + k) - 1. Candidates are clamped into [k, r]; ties
/// go to the smaller n.
inline std::int64_t optimal_n_m2(std::int64_t r, std::int64_t k) {
  if (k < 1 || r < 1) throw ParameterError("optimal_n_m2 needs r >= 1 and k >= 1");
  if (k > r)
    throw ParameterError("constraint k <= r violated (k=" + std::to_string(k) +
                         ", r=" + std::to_string(r) + ")");
  const double x = std::sqrt(static_cast<double>(r * k + k)) - 1.0;
  const auto raw_lo = static_cast<std::int64_t>(std::floor(x));
  const auto raw_hi = static_cast<std::int64_t>(std::ceil(x));
  const auto lo = std::clamp(raw_lo, k, r);
  const auto hi = std::clamp(raw_hi, k, r);

  auto better = [&](std::int64_t a, std::int64_t b) {
    // smaller span wins, ties to smaller n
    const double sa = model2_span(r, k, a);
    const double sb = model2_span(r, k, b);
    if (nearly_equal(sa, sb)) return std::min(a, b);
    return sa < sb ? a : b;
  };

  if (lo == hi && (lo != raw_lo || hi != raw_hi)) {
    // both candidates were pushed onto the same boundary; search the range
    std::int64_t best = k;
    for (std::int64_t n = k + 1; n <= r; ++n) best = better(best, n);
    return best;
  }
  return better(lo, hi);
}

}  // namespace covert::analytic
