// Per-vehicle message history: a bounded, per-sender window of received
// state samples. Entries are strictly increasing in sequence number and
// entries older than the staleness horizon are never returned by queries.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "convoy/bsm.hpp"

namespace convoy {

struct BufferStats {
  std::uint64_t inserted = 0;
  std::uint64_t discarded_out_of_order = 0;
  std::uint64_t discarded_stale = 0;
};

class HistoryBuffer {
 public:
  HistoryBuffer(std::size_t window, double staleness_horizon)
      : window_(window), staleness_(staleness_horizon) {}

  /// Appends `msg` to its sender's window. Messages whose sequence number
  /// does not advance past the newest stored one are discarded silently
  /// (counted in stats). Returns whether the message was stored.
  bool insert(const BasicSafetyMessage& msg) {
    auto& window = by_sender_[msg.car];
    if (!window.empty() && msg.seq <= window.back().seq) {
      ++stats_.discarded_out_of_order;
      return false;
    }
    window.push_back(msg);
    if (window.size() > window_) window.pop_front();
    ++stats_.inserted;
    return true;
  }

  /// Newest non-stale message from `sender`, or nullopt. Stale entries are
  /// pruned as a side effect.
  std::optional<BasicSafetyMessage> latest_record(int sender, double now) {
    auto it = by_sender_.find(sender);
    if (it == by_sender_.end()) return std::nullopt;
    prune(it->second, now);
    if (it->second.empty() || stale(it->second.back(), now)) return std::nullopt;
    return it->second.back();
  }

  /// Non-stale history for `sender`, oldest first.
  std::vector<BasicSafetyMessage> history(int sender, double now) {
    auto it = by_sender_.find(sender);
    if (it == by_sender_.end()) return {};
    prune(it->second, now);
    std::vector<BasicSafetyMessage> out;
    out.reserve(it->second.size());
    for (const auto& msg : it->second)
      if (!stale(msg, now)) out.push_back(msg);
    return out;
  }

  /// Sender ids with at least one stored message, ascending.
  std::vector<int> senders() const {
    std::vector<int> ids;
    ids.reserve(by_sender_.size());
    for (const auto& [id, window] : by_sender_)
      if (!window.empty()) ids.push_back(id);
    return ids;
  }

  std::size_t window_size() const { return window_; }
  double staleness_horizon() const { return staleness_; }
  const BufferStats& stats() const { return stats_; }

 private:
  bool stale(const BasicSafetyMessage& msg, double now) const {
    return now - msg.t > staleness_;
  }

  void prune(std::deque<BasicSafetyMessage>& window, double now) {
    while (!window.empty() && stale(window.front(), now)) {
      window.pop_front();
      ++stats_.discarded_stale;
    }
  }

  std::size_t window_;
  double staleness_;
  std::map<int, std::deque<BasicSafetyMessage>> by_sender_;
  BufferStats stats_;
};

}  // namespace convoy
