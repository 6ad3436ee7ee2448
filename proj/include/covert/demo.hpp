#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "covert/codec.hpp"
#include "covert/params.hpp"
#include "covert/simcore.hpp"

namespace covert::demo {

struct DemoResult {
  codec::ChunkSet encoded;
  std::vector<codec::Chunk> collected;
  codec::Bytes recovered;
  sim::TrialOutcome outcome;
  std::vector<sim::Event> events;
};

/// One seeded end-to-end transfer: encode, carry the real chunk payloads
/// through the relays, collect k of them and decode.
inline DemoResult run(std::span<const std::uint8_t> message, const SystemParams& p,
                      DelayModel model, sim::WalkModel walk, std::uint64_t seed) {
  DemoResult result;
  result.encoded = codec::encode(message, static_cast<int>(p.k()), static_cast<int>(p.n()));

  sim::EventSink sink = [&](const sim::Event& e) { result.events.push_back(e); };
  const sim::Transcript transcript{0, &sink};
  StreamRng rng(seed, 0);

  auto field = sim::RelayField<codec::Chunk>::place(rng, p.s(), p.r());
  const auto dis = sim::disseminate<codec::Chunk>(rng, p, model, walk, field,
                                                  result.encoded.chunks, &transcript);
  const auto col = sim::collect<codec::Chunk>(rng, p, model, walk, field, p.k(), result.collected,
                                              &transcript);
  result.outcome = sim::combine(dis, col);

  result.recovered = codec::decode(result.collected, result.encoded.k, result.encoded.n,
                                   result.encoded.message_length);
  if (!std::equal(result.recovered.begin(), result.recovered.end(), message.begin(), message.end()))
    throw std::logic_error("demo decode mismatch");
  return result;
}

}  // namespace covert::demo
