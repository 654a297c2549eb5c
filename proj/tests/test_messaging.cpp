#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "convoy/bsm.hpp"
#include "convoy/buffer.hpp"
#include "convoy/channel.hpp"
#include "convoy/policy.hpp"
#include "convoy/transport.hpp"

namespace convoy {
namespace {

BasicSafetyMessage make_msg(int car, std::uint64_t seq, double t) {
  BasicSafetyMessage m;
  m.car = car;
  m.seq = seq;
  m.t = t;
  m.lat = 28.6;
  m.lon = -81.2;
  m.heading = 90.0;
  m.speed = 1.5;
  m.event_flags = {{"car", car}};
  return m;
}

BasicSafetyMessage random_msg(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> car(0, 7);
  std::uniform_real_distribution<double> lat(-90.0, 90.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  std::uniform_real_distribution<double> heading(0.0, 359.999999);
  std::uniform_real_distribution<double> speed(0.0, 30.0);
  std::uniform_real_distribution<double> t(0.0, 1e6);
  BasicSafetyMessage m;
  m.car = car(rng);
  m.seq = rng();
  m.t = t(rng);
  m.lat = lat(rng);
  m.lon = lon(rng);
  m.heading = heading(rng);
  m.speed = speed(rng);
  m.event_flags = {{"car", m.car}, {"brake", static_cast<int>(rng() % 2)}};
  return m;
}

TEST(Codec, RoundTripPreservesEveryField) {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 2000; ++i) {
    const auto msg = random_msg(rng);
    const auto back = decode_bsm(encode_bsm(msg));
    ASSERT_EQ(back, msg);
  }
}

TEST(Codec, RejectsTruncatedDatagram) {
  const auto wire = encode_bsm(make_msg(1, 7, 2.5));
  EXPECT_THROW(decode_bsm(wire.substr(0, wire.size() / 2)), DecodeError);
}

TEST(Codec, RejectsHeadingAtFullCircle) {
  auto msg = make_msg(1, 7, 2.5);
  auto wire = encode_bsm(msg);
  const auto pos = wire.find("\"heading\":90.0");
  ASSERT_NE(pos, std::string::npos);
  wire.replace(pos, std::string("\"heading\":90.0").size(), "\"heading\":360.0");
  try {
    decode_bsm(wire);
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_NE(std::string(e.what()).find("heading"), std::string::npos);
  }
}

TEST(Codec, RejectsMismatchedCarFlag) {
  auto msg = make_msg(1, 7, 2.5);
  msg.event_flags["car"] = 2;
  EXPECT_THROW(encode_bsm(msg), EncodeError);
}

TEST(Codec, MalformedDatagramsAllRejectedWithReasons) {
  const std::vector<std::string> malformed = {
      "",
      "not json at all",
      "42",
      "[1,2,3]",
      "{",
      R"({"car":1})",
      R"({"seq":1,"t":0,"lat":0,"lon":0,"heading":0,"speed":0,"event_flags":{"car":1}})",
      R"({"car":"one","seq":1,"t":0,"lat":0,"lon":0,"heading":0,"speed":0,"event_flags":{"car":1}})",
      R"({"car":1,"seq":-4,"t":0,"lat":0,"lon":0,"heading":0,"speed":0,"event_flags":{"car":1}})",
      R"({"car":1,"seq":1,"t":"x","lat":0,"lon":0,"heading":0,"speed":0,"event_flags":{"car":1}})",
      R"({"car":1,"seq":1,"t":0,"lat":91.0,"lon":0,"heading":0,"speed":0,"event_flags":{"car":1}})",
      R"({"car":1,"seq":1,"t":0,"lat":0,"lon":-181.0,"heading":0,"speed":0,"event_flags":{"car":1}})",
      R"({"car":1,"seq":1,"t":0,"lat":0,"lon":0,"heading":360.0,"speed":0,"event_flags":{"car":1}})",
      R"({"car":1,"seq":1,"t":0,"lat":0,"lon":0,"heading":-0.1,"speed":0,"event_flags":{"car":1}})",
      R"({"car":1,"seq":1,"t":0,"lat":0,"lon":0,"heading":0,"speed":-2,"event_flags":{"car":1}})",
      R"({"car":1,"seq":1,"t":0,"lat":0,"lon":0,"heading":0,"speed":0})",
      R"({"car":1,"seq":1,"t":0,"lat":0,"lon":0,"heading":0,"speed":0,"event_flags":[]})",
      R"({"car":1,"seq":1,"t":0,"lat":0,"lon":0,"heading":0,"speed":0,"event_flags":{"car":2}})",
      R"({"car":1,"seq":1,"t":0,"lat":0,"lon":0,"heading":0,"speed":0,"event_flags":{"brake":1}})",
      R"({"car":1,"seq":1,"t":0,"lat":0,"lon":0,"heading":0,"speed":0,"event_flags":{"car":1.5}})",
  };
  for (const auto& wire : malformed) {
    try {
      decode_bsm(wire);
      FAIL() << "accepted malformed datagram: " << wire;
    } catch (const DecodeError& e) {
      ASSERT_FALSE(std::string(e.what()).empty());
    }
  }
}

TEST(Buffer, WindowEvictsOldest) {
  HistoryBuffer buf(5, 100.0);
  for (std::uint64_t s = 0; s < 6; ++s) buf.insert(make_msg(1, s, 0.1 * s));
  const auto history = buf.history(1, 1.0);
  ASSERT_EQ(history.size(), 5u);
  EXPECT_EQ(history.front().seq, 1u);
  EXPECT_EQ(history.back().seq, 5u);
}

TEST(Buffer, OutOfOrderDiscardedSilently) {
  HistoryBuffer buf(5, 100.0);
  EXPECT_TRUE(buf.insert(make_msg(1, 5, 0.5)));
  EXPECT_FALSE(buf.insert(make_msg(1, 3, 0.6)));
  EXPECT_FALSE(buf.insert(make_msg(1, 5, 0.7)));
  EXPECT_EQ(buf.history(1, 1.0).size(), 1u);
  EXPECT_EQ(buf.stats().discarded_out_of_order, 2u);
}

TEST(Buffer, SingleInsertIsQueryable) {
  HistoryBuffer buf(5, 100.0);
  buf.insert(make_msg(2, 0, 0.0));
  const auto rec = buf.latest_record(2, 0.5);
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->seq, 0u);
}

TEST(Buffer, LatestPicksNewest) {
  HistoryBuffer buf(5, 100.0);
  buf.insert(make_msg(1, 0, 1.0));
  buf.insert(make_msg(1, 1, 1.1));
  const auto rec = buf.latest_record(1, 1.2);
  ASSERT_TRUE(rec.has_value());
  EXPECT_DOUBLE_EQ(rec->t, 1.1);
}

TEST(Buffer, StaleRecordsNeverReturned) {
  HistoryBuffer buf(5, 1.0);
  buf.insert(make_msg(1, 0, 0.0));
  EXPECT_TRUE(buf.latest_record(1, 0.9).has_value());
  EXPECT_FALSE(buf.latest_record(1, 1.5).has_value());
  EXPECT_GE(buf.stats().discarded_stale, 1u);
}

TEST(Buffer, UnknownSenderIsAbsent) {
  HistoryBuffer buf(5, 1.0);
  EXPECT_FALSE(buf.latest_record(9, 0.0).has_value());
}

TEST(Buffer, ReturnedSeqNeverDecreases) {
  std::mt19937_64 rng(5);
  HistoryBuffer buf(8, 100.0);
  std::uint64_t last_returned = 0;
  std::uint64_t seq = 0;
  for (int i = 0; i < 500; ++i) {
    // random mix of in-order and duplicate/out-of-order inserts
    if (rng() % 3 == 0 && seq > 0)
      buf.insert(make_msg(1, rng() % seq, i * 0.01));
    else
      buf.insert(make_msg(1, seq++, i * 0.01));
    if (const auto rec = buf.latest_record(1, i * 0.01)) {
      ASSERT_GE(rec->seq, last_returned);
      last_returned = rec->seq;
    }
  }
}

TEST(Policies, BuiltInsMatchTheirDefinitions) {
  const auto all = ReceptionPolicy::all_broadcast();
  const auto leader = ReceptionPolicy::leader_only();
  const auto pred = ReceptionPolicy::all_predecessor();
  EXPECT_TRUE(pred.accept(2, 1));
  EXPECT_FALSE(pred.accept(1, 2));
  EXPECT_FALSE(pred.accept(1, 1));
  EXPECT_TRUE(leader.accept(3, 0));
  EXPECT_FALSE(leader.accept(3, 2));
  EXPECT_TRUE(all.accept(0, 5));
}

TEST(Policies, LookupByNameAndUnknownRejected) {
  EXPECT_EQ(ReceptionPolicy::from_name("all-predecessor").name(), "all-predecessor");
  EXPECT_THROW(ReceptionPolicy::from_name("nearest-neighbour"), std::invalid_argument);
}

TEST(Gate, TimeTriggeredRespectsInterval) {
  HistoryBuffer buf(5, 1.0);
  BroadcastGate gate(0.1);
  EXPECT_TRUE(gate.should_broadcast(buf, 0.0));
  EXPECT_FALSE(gate.should_broadcast(buf, 0.05));
  EXPECT_TRUE(gate.should_broadcast(buf, 0.1));
}

TEST(Gate, ZeroIntervalAlwaysFires) {
  HistoryBuffer buf(5, 1.0);
  BroadcastGate gate(0.0);
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(gate.should_broadcast(buf, 0.01 * i));
}

TEST(Gate, AcceptedBroadcastsAreAtLeastIntervalApart) {
  HistoryBuffer buf(5, 1.0);
  BroadcastGate gate(0.1);
  double last = -1e9;
  for (int i = 0; i < 1000; ++i) {
    const double now = 0.02 * i;
    if (gate.should_broadcast(buf, now)) {
      ASSERT_GE(now - last, 0.1 - 1e-12);
      last = now;
    }
  }
}

TEST(Channel, ZeroDropDeliversAll) {
  const ChannelModel ch{0.0, 99};
  const auto delivered = transmit(ch, make_msg(0, 1, 0.0), {1, 2, 3});
  EXPECT_EQ(delivered, (std::vector<int>{1, 2, 3}));
}

TEST(Channel, FullDropDeliversNone) {
  const ChannelModel ch{1.0, 99};
  EXPECT_TRUE(transmit(ch, make_msg(0, 1, 0.0), {1, 2, 3}).empty());
}

TEST(Channel, EmpiricalRateWithinThreeSigma) {
  const int n = 10000;
  for (double p : {0.1, 0.4, 0.5}) {
    const ChannelModel ch{p, 2024};
    int delivered = 0;
    for (int i = 0; i < n; ++i)
      if (should_deliver(ch, 0, static_cast<std::uint64_t>(i), 1)) ++delivered;
    const double rate = static_cast<double>(delivered) / n;
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    EXPECT_LE(std::abs(rate - (1.0 - p)), 3.0 * sigma) << "p=" << p << " rate=" << rate;
  }
}

TEST(Channel, DeterministicPerSeedAndSensitiveToIt) {
  const ChannelModel a{0.4, 7};
  const ChannelModel b{0.4, 7};
  const ChannelModel c{0.4, 8};
  std::vector<int> receivers{1, 2, 3, 4, 5};
  bool any_diff = false;
  for (std::uint64_t seq = 0; seq < 200; ++seq) {
    const auto msg = make_msg(0, seq, 0.0);
    const auto da = transmit(a, msg, receivers);
    ASSERT_EQ(da, transmit(b, msg, receivers));
    if (da != transmit(c, msg, receivers)) any_diff = true;
  }
  EXPECT_TRUE(any_diff);
}

TEST(Channel, DeliveredSetsNestAcrossDropRates) {
  // identical seeds share the per-trial draw, so a delivery surviving a high
  // drop rate also survives every lower one
  const ChannelModel lo{0.1, 3};
  const ChannelModel hi{0.5, 3};
  for (std::uint64_t seq = 0; seq < 500; ++seq) {
    for (int receiver : {1, 2, 3}) {
      if (should_deliver(hi, 0, seq, receiver)) {
        ASSERT_TRUE(should_deliver(lo, 0, seq, receiver));
      }
    }
  }
}

TEST(Bus, LosslessBroadcastReachesEveryAllowedReceiverOnceInOrder) {
  HistoryBuffer b0(32, 100.0), b1(32, 100.0), b2(32, 100.0);
  InProcessBus bus(ChannelModel{0.0, 1}, ReceptionPolicy::all_predecessor());
  bus.attach(0, &b0);
  bus.attach(1, &b1);
  bus.attach(2, &b2);
  for (std::uint64_t s = 0; s < 10; ++s) {
    bus.broadcast(make_msg(0, s, 0.1 * s));
    bus.broadcast(make_msg(1, s, 0.1 * s));
    bus.broadcast(make_msg(2, s, 0.1 * s));
  }
  bus.flush();
  // receiver 2 accepts senders 0 and 1; receiver 1 accepts only 0; leader none
  EXPECT_EQ(b2.history(0, 1.0).size(), 10u);
  EXPECT_EQ(b2.history(1, 1.0).size(), 10u);
  EXPECT_EQ(b1.history(0, 1.0).size(), 10u);
  EXPECT_TRUE(b1.history(2, 1.0).empty());
  EXPECT_TRUE(b0.history(1, 1.0).empty());
  for (std::uint64_t s = 0; s < 10; ++s) {
    EXPECT_EQ(b2.history(0, 1.0)[s].seq, s);  // send order preserved
  }
  const auto stats = bus.stats();
  EXPECT_EQ(stats.sent, 30u);
  EXPECT_EQ(stats.delivered, 60u);  // every broadcast reaches both other vehicles
  EXPECT_EQ(stats.dropped, 0u);
  EXPECT_EQ(stats.discarded_out_of_order, 0u);
}

TEST(Bus, FlushReportsAcceptedCounts) {
  HistoryBuffer b0(32, 100.0), b1(32, 100.0);
  InProcessBus bus(ChannelModel{0.0, 1}, ReceptionPolicy::all_predecessor());
  bus.attach(0, &b0);
  bus.attach(1, &b1);
  bus.broadcast(make_msg(0, 0, 0.0));
  const auto accepted = bus.flush();
  ASSERT_EQ(accepted.size(), 1u);
  EXPECT_EQ(accepted.at(1), 1);
}

}  // namespace
}  // namespace convoy
