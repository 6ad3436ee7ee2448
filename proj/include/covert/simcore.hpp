#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "covert/analytic.hpp"
#include "covert/params.hpp"
#include "covert/rng.hpp"

namespace covert::sim {

enum class WalkModel {
  IidUniform,  // every step is an independent uniform draw over all s vertices
  NoSelfLoop,  // every step moves to one of the s - 1 other vertices
};

inline std::string_view to_string(WalkModel walk) {
  return walk == WalkModel::IidUniform ? "iid" : "noselfloop";
}

inline WalkModel parse_walk_model(std::string_view text) {
  if (text == "iid") return WalkModel::IidUniform;
  if (text == "noselfloop") return WalkModel::NoSelfLoop;
  throw ParameterError("walk must be iid or noselfloop, got '" + std::string(text) + "'");
}

/// Shifted-exponential chunk transfer time: ell + Exp(lambda), always > ell.
inline double sample_transmission_time(StreamRng& rng, double ell, double lambda) {
  return ell + rng.exponential(lambda);
}

/// Warden monitoring arrival, uniform on [0, w).
inline double sample_warden_arrival(StreamRng& rng, double w) { return w * rng.uniform01(); }

// ---------------------------------------------------------------------------
// transcript

enum class EventType { Visit, Deposit, Retrieve, Detect };

inline std::string_view to_string(EventType type) {
  switch (type) {
    case EventType::Visit: return "visit";
    case EventType::Deposit: return "deposit";
    case EventType::Retrieve: return "retrieve";
    case EventType::Detect: return "detect";
  }
  return "?";
}

struct Event {
  std::uint64_t trial_index = 0;
  EventType type = EventType::Visit;
  double time = 0.0;
  std::int64_t vertex = -1;
  std::int64_t chunk_index = -1;  // -1 for plain visits
};

/// Optional per-event callback. Null means no transcript.
using EventSink = std::function<void(const Event&)>;

struct Transcript {
  std::uint64_t trial_index = 0;
  const EventSink* sink = nullptr;

  void emit(EventType type, double time, std::int64_t vertex, std::int64_t chunk) const {
    if (sink != nullptr && *sink) (*sink)(Event{trial_index, type, time, vertex, chunk});
  }
};

// ---------------------------------------------------------------------------
// relay state

/// Relays pinned to r distinct vertices of the complete graph. Each relay
/// stores at most one chunk payload.
template <class Payload>
class RelayField {
public:
  struct Slot {
    std::int64_t vertex = -1;
    std::optional<Payload> payload;
    bool harvested = false;
  };

  /// Places r relays on r distinct vertices chosen uniformly at random.
  static RelayField place(StreamRng& rng, std::int64_t s, std::int64_t r) {
    RelayField field;
    field.slot_of_vertex_.assign(static_cast<std::size_t>(s), -1);
    std::vector<std::int64_t> vertices(static_cast<std::size_t>(s));
    for (std::int64_t v = 0; v < s; ++v) vertices[static_cast<std::size_t>(v)] = v;
    // partial Fisher-Yates
    for (std::int64_t i = 0; i < r; ++i) {
      const auto j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(s - i)));
      std::swap(vertices[static_cast<std::size_t>(i)], vertices[static_cast<std::size_t>(j)]);
      field.slot_of_vertex_[static_cast<std::size_t>(vertices[static_cast<std::size_t>(i)])] =
          static_cast<std::int32_t>(i);
      field.slots_.push_back(Slot{vertices[static_cast<std::size_t>(i)], std::nullopt, false});
    }
    return field;
  }

  std::int64_t vertex_count() const { return static_cast<std::int64_t>(slot_of_vertex_.size()); }
  std::size_t relay_count() const { return slots_.size(); }

  /// Relay at vertex v, or nullptr.
  Slot* at(std::int64_t v) {
    const auto idx = slot_of_vertex_[static_cast<std::size_t>(v)];
    return idx < 0 ? nullptr : &slots_[static_cast<std::size_t>(idx)];
  }

  std::span<const Slot> slots() const { return slots_; }

  std::int64_t holding_count() const {
    return std::count_if(slots_.begin(), slots_.end(),
                         [](const Slot& s) { return s.payload.has_value() && !s.harvested; });
  }

private:
  std::vector<std::int32_t> slot_of_vertex_;
  std::vector<Slot> slots_;
};

class Walker {
public:
  Walker(std::int64_t s, WalkModel walk) : s_(s), walk_(walk) {}

  /// Next visited vertex. The first call is the uniformly drawn start vertex.
  std::int64_t step(StreamRng& rng) {
    const auto s = static_cast<std::uint64_t>(s_);
    if (current_ < 0 || walk_ == WalkModel::IidUniform || s_ == 1) {
      current_ = static_cast<std::int64_t>(rng.below(s));
    } else {
      auto next = static_cast<std::int64_t>(rng.below(s - 1));
      if (next >= current_) ++next;
      current_ = next;
    }
    return current_;
  }

private:
  std::int64_t s_;
  WalkModel walk_;
  std::int64_t current_ = -1;
};

// ---------------------------------------------------------------------------
// phases

struct PhaseResult {
  double time = 0.0;
  std::int64_t steps = 0;
  std::int64_t detections = 0;
  std::int64_t transmissions = 0;
};

namespace detail {

// Charges one visit and, if `transmit`, one real chunk transmission together
// with its warden draw. Returns whether the warden caught that transmission.
inline bool charge_visit(StreamRng& rng, const SystemParams& p, DelayModel model, bool transmit,
                         std::int64_t vertex, std::int64_t chunk, EventType action,
                         PhaseResult& out, const Transcript* transcript) {
  if (transcript) transcript->emit(EventType::Visit, out.time, vertex, -1);
  ++out.steps;
  const double start = out.time;
  if (model == DelayModel::Model2) {
    out.time += analytic::model2_vertex_budget(p);
  } else {
    out.time += 1.0;
  }
  if (!transmit) return false;

  const double duration = sample_transmission_time(rng, p.chunk_length(), p.lambda());
  const double arrival = sample_warden_arrival(rng, p.w());
  if (model == DelayModel::Model1) out.time += duration;
  ++out.transmissions;
  if (transcript) transcript->emit(action, start + 1.0, vertex, chunk);
  const bool caught = arrival <= duration;
  if (caught) {
    ++out.detections;
    if (transcript) transcript->emit(EventType::Detect, start + 1.0 + arrival, vertex, chunk);
  }
  return caught;
}

}  // namespace detail

/// Alice walks until every payload in `chunks` sits on its own relay. A
/// relay that already holds a chunk costs the same as an empty vertex.
///
/// Model 1 charges 1 per visit plus the sampled transfer time at a fresh
/// relay. Model 2 charges the flat budget 1 + 1/lambda + m/k at every visit;
/// the sampled transfer time is still drawn for each real deposit and is
/// compared against the warden arrival.
template <class Payload>
PhaseResult disseminate(StreamRng& rng, const SystemParams& p, DelayModel model, WalkModel walk,
                        RelayField<Payload>& field, std::span<const Payload> chunks,
                        const Transcript* transcript = nullptr) {
  if (static_cast<std::int64_t>(chunks.size()) > static_cast<std::int64_t>(field.relay_count()))
    throw ParameterError("more chunks than relays");
  PhaseResult out;
  Walker walker(p.s(), walk);
  std::size_t placed = 0;
  while (placed < chunks.size()) {
    const auto v = walker.step(rng);
    auto* slot = field.at(v);
    const bool fresh = slot != nullptr && !slot->payload.has_value();
    detail::charge_visit(rng, p, model, fresh, v, static_cast<std::int64_t>(placed),
                         EventType::Deposit, out, transcript);
    if (fresh) slot->payload = chunks[placed++];
  }
  return out;
}

/// Bob walks until he has harvested `want` chunks from distinct relays,
/// appending the payloads in collection order to `collected`.
template <class Payload>
PhaseResult collect(StreamRng& rng, const SystemParams& p, DelayModel model, WalkModel walk,
                    RelayField<Payload>& field, std::int64_t want, std::vector<Payload>& collected,
                    const Transcript* transcript = nullptr) {
  PhaseResult out;
  if (want <= 0) return out;
  if (want > field.holding_count()) throw ParameterError("fewer loaded relays than chunks wanted");
  Walker walker(p.s(), walk);
  std::int64_t got = 0;
  while (got < want) {
    const auto v = walker.step(rng);
    auto* slot = field.at(v);
    const bool loaded = slot != nullptr && slot->payload.has_value() && !slot->harvested;
    detail::charge_visit(rng, p, model, loaded, v, got, EventType::Retrieve, out, transcript);
    if (loaded) {
      slot->harvested = true;
      collected.push_back(*slot->payload);
      ++got;
    }
  }
  return out;
}

using ChunkIndex = std::uint32_t;

/// Places relays and deposits chunk indices 0..n-1. The field is left in the
/// state Bob's collection walk starts from.
inline PhaseResult simulate_dissemination(StreamRng& rng, const SystemParams& p, DelayModel model,
                                          WalkModel walk, RelayField<ChunkIndex>& field,
                                          const Transcript* transcript = nullptr) {
  field = RelayField<ChunkIndex>::place(rng, p.s(), p.r());
  std::vector<ChunkIndex> chunks(static_cast<std::size_t>(p.n()));
  for (std::size_t i = 0; i < chunks.size(); ++i) chunks[i] = static_cast<ChunkIndex>(i);
  return disseminate<ChunkIndex>(rng, p, model, walk, field, chunks, transcript);
}

inline PhaseResult simulate_collection(StreamRng& rng, const SystemParams& p, DelayModel model,
                                       WalkModel walk, RelayField<ChunkIndex>& field,
                                       const Transcript* transcript = nullptr) {
  std::vector<ChunkIndex> collected;
  collected.reserve(static_cast<std::size_t>(p.k()));
  return collect<ChunkIndex>(rng, p, model, walk, field, p.k(), collected, transcript);
}

// ---------------------------------------------------------------------------
// trials

struct TrialOutcome {
  double dissemination_time = 0.0;
  double collection_time = 0.0;
  double total_time = 0.0;
  std::int64_t dissemination_steps = 0;
  std::int64_t collection_steps = 0;
  std::int64_t transmissions = 0;
  std::int64_t detections = 0;
  bool detected = false;
};

inline TrialOutcome combine(const PhaseResult& dis, const PhaseResult& col) {
  TrialOutcome t;
  t.dissemination_time = dis.time;
  t.collection_time = col.time;
  t.total_time = dis.time + col.time;
  t.dissemination_steps = dis.steps;
  t.collection_steps = col.steps;
  t.transmissions = dis.transmissions + col.transmissions;
  t.detections = dis.detections + col.detections;
  t.detected = t.detections > 0;
  return t;
}

/// Alice's dissemination followed by Bob's collection on the same relays.
inline TrialOutcome run_trial(StreamRng& rng, const SystemParams& p, DelayModel model,
                              WalkModel walk, const Transcript* transcript = nullptr) {
  RelayField<ChunkIndex> field;
  const auto dis = simulate_dissemination(rng, p, model, walk, field, transcript);
  const auto col = simulate_collection(rng, p, model, walk, field, transcript);
  return combine(dis, col);
}

/// Re-runs trial `index` of a Monte Carlo run, emitting its transcript.
inline TrialOutcome replay_trial(const SystemParams& p, DelayModel model, WalkModel walk,
                                 std::uint64_t seed, std::uint64_t index, const EventSink& sink) {
  StreamRng rng(seed, index);
  Transcript transcript{index, &sink};
  return run_trial(rng, p, model, walk, &transcript);
}

// ---------------------------------------------------------------------------
// aggregation

/// Running mean and sum of squared deviations; merged with Chan's update.
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(count + other.count);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.count) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(other.count) / total;
    count += other.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double stderr_of_mean() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

struct MonteCarloSummary {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  DelayModel model = DelayModel::Model1;
  WalkModel walk = WalkModel::IidUniform;

  double dissemination_mean = 0.0;
  double dissemination_stderr = 0.0;
  double collection_mean = 0.0;
  double collection_stderr = 0.0;
  double total_mean = 0.0;
  double total_stderr = 0.0;
  double dissemination_steps_mean = 0.0;
  double collection_steps_mean = 0.0;

  std::uint64_t undetected_trials = 0;
  std::uint64_t transmissions = 0;
  std::uint64_t detections = 0;

  double empirical_covertness() const {
    return trials ? static_cast<double>(undetected_trials) / static_cast<double>(trials) : 0.0;
  }
  /// Half-width of the 95% normal-approximation interval on covertness.
  double covertness_half_width() const {
    const double p = empirical_covertness();
    return trials ? 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
  }
  double detection_frequency() const {
    return transmissions ? static_cast<double>(detections) / static_cast<double>(transmissions)
                         : 0.0;
  }

  friend bool operator==(const MonteCarloSummary&, const MonteCarloSummary&) = default;
};

namespace detail {

struct BlockStats {
  Moments dis, col, tot, dis_steps, col_steps;
  std::uint64_t undetected = 0, transmissions = 0, detections = 0;

  void add(const TrialOutcome& t) {
    dis.add(t.dissemination_time);
    col.add(t.collection_time);
    tot.add(t.total_time);
    dis_steps.add(static_cast<double>(t.dissemination_steps));
    col_steps.add(static_cast<double>(t.collection_steps));
    if (!t.detected) ++undetected;
    transmissions += static_cast<std::uint64_t>(t.transmissions);
    detections += static_cast<std::uint64_t>(t.detections);
  }

  void merge(const BlockStats& o) {
    dis.merge(o.dis);
    col.merge(o.col);
    tot.merge(o.tot);
    dis_steps.merge(o.dis_steps);
    col_steps.merge(o.col_steps);
    undetected += o.undetected;
    transmissions += o.transmissions;
    detections += o.detections;
  }
};

// Fixed block size; block boundaries and merge order do not depend on the
// worker count, which keeps summaries bit-identical across thread counts.
inline constexpr std::uint64_t kBlockSize = 1024;

}  // namespace detail

/// Runs `trials` independent trials. Trial i draws from StreamRng(seed, i).
/// threads = 0 uses the hardware concurrency.
inline MonteCarloSummary run_monte_carlo(const SystemParams& p, DelayModel model, WalkModel walk,
                                         std::uint64_t trials, std::uint64_t seed,
                                         unsigned threads = 0) {
  if (trials == 0) throw ParameterError("trials must be >= 1");
  const std::uint64_t blocks = (trials + detail::kBlockSize - 1) / detail::kBlockSize;
  std::vector<detail::BlockStats> stats(static_cast<std::size_t>(blocks));

  std::atomic<std::uint64_t> next_block{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next_block.fetch_add(1, std::memory_order_relaxed);
      if (b >= blocks) return;
      auto& block = stats[static_cast<std::size_t>(b)];
      const std::uint64_t end = std::min(trials, (b + 1) * detail::kBlockSize);
      for (std::uint64_t i = b * detail::kBlockSize; i < end; ++i) {
        StreamRng rng(seed, i);
        block.add(run_trial(rng, p, model, walk));
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  detail::BlockStats all;
  for (const auto& block : stats) all.merge(block);

  MonteCarloSummary summary;
  summary.trials = trials;
  summary.seed = seed;
  summary.model = model;
  summary.walk = walk;
  summary.dissemination_mean = all.dis.mean;
  summary.dissemination_stderr = all.dis.stderr_of_mean();
  summary.collection_mean = all.col.mean;
  summary.collection_stderr = all.col.stderr_of_mean();
  summary.total_mean = all.tot.mean;
  summary.total_stderr = all.tot.stderr_of_mean();
  summary.dissemination_steps_mean = all.dis_steps.mean;
  summary.collection_steps_mean = all.col_steps.mean;
  summary.undetected_trials = all.undetected;
  summary.transmissions = all.transmissions;
  summary.detections = all.detections;
  return summary;
}

}  // namespace covert::sim
