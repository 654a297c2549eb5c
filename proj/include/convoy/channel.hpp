// Lossy channel emulation: i.i.d. Bernoulli drops per (message, receiver).
//
// Drop decisions are hashed from (seed, sender, seq, receiver) rather than
// drawn from a shared stream, so the delivered set for a given message does
// not depend on how many vehicles exist or in which order they are polled.
#pragma once

#include <cstdint>
#include <vector>

#include "convoy/bsm.hpp"

namespace convoy {

struct ChannelModel {
  double drop_probability = 0.0;  // [0, 1]
  std::uint64_t rng_seed = 0;
};

namespace detail {
// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Uniform [0, 1) draw for one (message, receiver) trial.
inline double channel_draw(const ChannelModel& ch, int sender, std::uint64_t seq, int receiver) {
  std::uint64_t h = detail::mix64(ch.rng_seed);
  h = detail::mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(sender)));
  h = detail::mix64(h ^ seq);
  h = detail::mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(receiver)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Deterministic drop decision; drop_probability 0 always delivers and 1
/// never does.
inline bool should_deliver(const ChannelModel& ch, int sender, std::uint64_t seq, int receiver) {
  return channel_draw(ch, sender, seq, receiver) >= ch.drop_probability;
}

/// Subset of `receivers` the message reaches, in the order given.
inline std::vector<int> transmit(const ChannelModel& ch, const BasicSafetyMessage& msg,
                                 const std::vector<int>& receivers) {
  std::vector<int> delivered;
  delivered.reserve(receivers.size());
  for (int receiver : receivers)
    if (should_deliver(ch, msg.car, msg.seq, receiver)) delivered.push_back(receiver);
  return delivered;
}

}  // namespace convoy
