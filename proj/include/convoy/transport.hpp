// Deterministic in-process transport used by the simulator.
//
// Broadcasts run the full pipeline: encode, per-receiver channel drop,
// decode, reception-policy filter, buffer insert. Deliveries are staged and
// applied in a separate flush step so that every transmission of a tick is
// complete before any buffer changes.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "convoy/buffer.hpp"
#include "convoy/channel.hpp"
#include "convoy/policy.hpp"

namespace convoy {

struct MessageStats {
  std::uint64_t sent = 0;       // broadcasts initiated
  std::uint64_t delivered = 0;  // (message, receiver) deliveries
  std::uint64_t dropped = 0;    // (message, receiver) channel drops
  std::uint64_t discarded_stale = 0;
  std::uint64_t discarded_out_of_order = 0;
};

class InProcessBus {
 public:
  InProcessBus(ChannelModel channel, ReceptionPolicy policy)
      : channel_(channel), policy_(std::move(policy)) {}

  void attach(int id, HistoryBuffer* buffer) { buffers_[id] = buffer; }

  /// Stage one broadcast to every attached vehicle except the sender.
  void broadcast(const BasicSafetyMessage& msg) {
    ++stats_.sent;
    const std::string datagram = encode_bsm(msg);
    for (const auto& [id, buffer] : buffers_) {
      if (id == msg.car) continue;
      if (should_deliver(channel_, msg.car, msg.seq, id)) {
        ++stats_.delivered;
        pending_.emplace_back(id, datagram);
      } else {
        ++stats_.dropped;
      }
    }
  }

  /// Apply staged deliveries. Returns the number of messages accepted into
  /// each receiver's buffer (policy-filtered, in-order).
  std::map<int, int> flush() {
    std::map<int, int> accepted;
    for (const auto& [receiver, datagram] : pending_) {
      const BasicSafetyMessage msg = decode_bsm(datagram);
      if (!policy_.accept(receiver, msg.car)) continue;
      if (buffers_.at(receiver)->insert(msg)) ++accepted[receiver];
    }
    pending_.clear();
    return accepted;
  }

  /// Channel counters merged with the attached buffers' discard counters.
  MessageStats stats() const {
    MessageStats s = stats_;
    for (const auto& [id, buffer] : buffers_) {
      s.discarded_stale += buffer->stats().discarded_stale;
      s.discarded_out_of_order += buffer->stats().discarded_out_of_order;
    }
    return s;
  }

  const ReceptionPolicy& policy() const { return policy_; }

 private:
  ChannelModel channel_;
  ReceptionPolicy policy_;
  std::map<int, HistoryBuffer*> buffers_;
  std::vector<std::pair<int, std::string>> pending_;
  MessageStats stats_;
};

}  // namespace convoy
