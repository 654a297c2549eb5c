// Reception policies and broadcast gates.
//
// A reception policy rho(receiver, sender) -> {0,1} decides whether a vehicle
// stores another vehicle's messages; a broadcast gate tau(buffer, now) -> {0,1}
// decides whether a vehicle transmits at a given instant.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "convoy/buffer.hpp"

namespace convoy {

class ReceptionPolicy {
 public:
  /// rho = 1 for every (receiver, sender) pair.
  static ReceptionPolicy all_broadcast() {
    return ReceptionPolicy("all-broadcast", [](int, int) { return true; });
  }

  /// rho = 1 iff the sender is the leader.
  static ReceptionPolicy leader_only() {
    return ReceptionPolicy("leader-only", [](int, int sender) { return sender == 0; });
  }

  /// rho = 1 iff the sender is an upstream neighbour (smaller convoy index).
  static ReceptionPolicy all_predecessor() {
    return ReceptionPolicy("all-predecessor",
                           [](int receiver, int sender) { return sender < receiver; });
  }

  static ReceptionPolicy custom(std::string name, std::function<bool(int, int)> fn) {
    return ReceptionPolicy(std::move(name), std::move(fn));
  }

  /// Lookup by config name; throws std::invalid_argument on unknown names.
  static ReceptionPolicy from_name(std::string_view name) {
    if (name == "all-broadcast") return all_broadcast();
    if (name == "leader-only") return leader_only();
    if (name == "all-predecessor") return all_predecessor();
    throw std::invalid_argument("unknown reception policy '" + std::string(name) +
                                "' (expected all-broadcast, leader-only or all-predecessor)");
  }

  bool accept(int receiver, int sender) const { return fn_(receiver, sender); }
  const std::string& name() const { return name_; }

 private:
  ReceptionPolicy(std::string name, std::function<bool(int, int)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}

  std::string name_;
  std::function<bool(int, int)> fn_;
};

/// Time-triggered by default: accepts when at least `interval` seconds have
/// elapsed since the last accepted broadcast, so consecutive accepted
/// broadcasts are >= interval apart. A custom predicate over the local
/// buffer may replace the built-in rule; the accept time is tracked either way.
class BroadcastGate {
 public:
  explicit BroadcastGate(double interval) : interval_(interval) {}

  static BroadcastGate custom(double interval,
                              std::function<bool(const HistoryBuffer&, double)> fn) {
    BroadcastGate gate(interval);
    gate.custom_ = std::move(fn);
    return gate;
  }

  bool should_broadcast(const HistoryBuffer& local, double now) {
    const bool accept = custom_ ? custom_(local, now) : now - last_accepted_ >= interval_;
    if (accept) last_accepted_ = now;
    return accept;
  }

  double interval() const { return interval_; }
  double last_accepted() const { return last_accepted_; }

 private:
  double interval_;
  double last_accepted_ = -std::numeric_limits<double>::infinity();
  std::function<bool(const HistoryBuffer&, double)> custom_;
};

}  // namespace convoy
