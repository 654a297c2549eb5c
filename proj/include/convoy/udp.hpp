// UDP datagram transport for multi-process demos: one socket per vehicle at
// port_base + index, one encoded message per packet. Received datagrams land
// in a thread-safe queue drained by the owning agent; the same hash-based
// loss model as the in-process bus is applied on the receive side.
#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "convoy/bsm.hpp"
#include "convoy/channel.hpp"

namespace convoy {

struct UdpConfig {
  int port_base = 47000;
  std::string broadcast_address = "127.0.0.1";
};

class UdpTransport {
 public:
  UdpTransport(int vehicle_id, const UdpConfig& cfg) : id_(vehicle_id), cfg_(cfg) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw std::runtime_error("socket: " + std::string(std::strerror(errno)));
    int reuse = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof reuse);
    if (cfg.broadcast_address.ends_with(".255")) {
      int bcast = 1;
      ::setsockopt(fd_, SOL_SOCKET, SO_BROADCAST, &bcast, sizeof bcast);
    }
    timeval tv{0, 100000};  // 100 ms poll so the thread can observe stop_
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(cfg.port_base + vehicle_id));
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      ::close(fd_);
      throw std::runtime_error("bind port " + std::to_string(cfg.port_base + vehicle_id) + ": " +
                               std::strerror(errno));
    }
    rx_thread_ = std::thread([this] { rx_loop(); });
  }

  UdpTransport(const UdpTransport&) = delete;
  UdpTransport& operator=(const UdpTransport&) = delete;

  ~UdpTransport() {
    stop_ = true;
    if (rx_thread_.joinable()) rx_thread_.join();
    if (fd_ >= 0) ::close(fd_);
  }

  /// Send one encoded message to every peer id in [0, n_vehicles) except our own.
  void broadcast(const BasicSafetyMessage& msg, int n_vehicles) {
    const std::string datagram = encode_bsm(msg);
    sockaddr_in peer{};
    peer.sin_family = AF_INET;
    if (::inet_pton(AF_INET, cfg_.broadcast_address.c_str(), &peer.sin_addr) != 1)
      throw std::runtime_error("bad broadcast address " + cfg_.broadcast_address);
    for (int other = 0; other < n_vehicles; ++other) {
      if (other == id_) continue;
      peer.sin_port = htons(static_cast<std::uint16_t>(cfg_.port_base + other));
      ::sendto(fd_, datagram.data(), datagram.size(), 0, reinterpret_cast<sockaddr*>(&peer),
               sizeof peer);
      ++sent_datagrams_;
    }
  }

  /// Decode queued datagrams and apply the loss model for this receiver.
  /// Malformed packets are counted and skipped.
  std::vector<BasicSafetyMessage> drain(const ChannelModel& channel) {
    std::vector<std::string> raw;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      raw.swap(rx_queue_);
    }
    std::vector<BasicSafetyMessage> out;
    out.reserve(raw.size());
    for (const auto& datagram : raw) {
      BasicSafetyMessage msg;
      try {
        msg = decode_bsm(datagram);
      } catch (const DecodeError&) {
        ++decode_errors_;
        continue;
      }
      if (should_deliver(channel, msg.car, msg.seq, id_)) out.push_back(msg);
    }
    return out;
  }

  int id() const { return id_; }
  std::uint64_t sent_datagrams() const { return sent_datagrams_; }
  std::uint64_t decode_errors() const { return decode_errors_; }

 private:
  void rx_loop() {
    char buf[2048];
    while (!stop_) {
      const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
      if (n <= 0) continue;  // timeout or spurious wakeup
      std::lock_guard<std::mutex> lock(mutex_);
      rx_queue_.emplace_back(buf, static_cast<std::size_t>(n));
    }
  }

  int id_;
  UdpConfig cfg_;
  int fd_ = -1;
  std::atomic<bool> stop_{false};
  std::thread rx_thread_;
  std::mutex mutex_;
  std::vector<std::string> rx_queue_;
  std::atomic<std::uint64_t> sent_datagrams_{0};
  std::atomic<std::uint64_t> decode_errors_{0};
};

}  // namespace convoy
