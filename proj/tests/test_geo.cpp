#include "convoy/geo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace convoy {
namespace {

constexpr double kRefLat = deg2rad(28.602);
constexpr double kRefLon = deg2rad(-81.200);

FrameConfig frame_at(double rotation) {
  return FrameConfig{GeoCoordinate{kRefLat, kRefLon}, rotation, kEarthMeanRadius};
}

TEST(Project, ReferenceMapsToOrigin) {
  const auto frame = frame_at(0.3);
  const auto en = project(frame.ref, frame);
  EXPECT_DOUBLE_EQ(en.x, 0.0);
  EXPECT_DOUBLE_EQ(en.y, 0.0);
}

TEST(Project, NorthOffsetScalesByEarthRadius) {
  // 1e-5 rad of latitude is 6371000 * 1e-5 = 63.71 m due north
  const auto frame = frame_at(0.0);
  const auto en = project(GeoCoordinate{kRefLat + 1e-5, kRefLon}, frame);
  EXPECT_DOUBLE_EQ(en.x, 0.0);
  EXPECT_NEAR(en.y, 63.71, 1e-9);
}

TEST(Project, EastOffsetAtEquatorUsesUnitCosine) {
  FrameConfig frame;
  frame.ref = GeoCoordinate{0.0, 0.0};
  const auto en = project(GeoCoordinate{0.0, 1e-5}, frame);
  EXPECT_NEAR(en.x, 63.71, 1e-9);
  EXPECT_DOUBLE_EQ(en.y, 0.0);
}

TEST(Project, LinearInLatitudeAtFixedLongitude) {
  const auto frame = frame_at(0.0);
  const double base = project(GeoCoordinate{kRefLat + 1e-6, kRefLon}, frame).y;
  for (int k = 2; k <= 5; ++k) {
    const double y = project(GeoCoordinate{kRefLat + k * 1e-6, kRefLon}, frame).y;
    EXPECT_NEAR(y, k * base, 1e-8) << "k=" << k;
  }
}

TEST(Project, RejectsNonFiniteInput) {
  const auto frame = frame_at(0.0);
  EXPECT_THROW(project(GeoCoordinate{std::nan(""), 0.0}, frame), std::domain_error);
  EXPECT_THROW(project(GeoCoordinate{0.0, std::numeric_limits<double>::infinity()}, frame),
               std::domain_error);
}

TEST(Rotate, IdentityAtZero) {
  const auto p = rotate(EastNorth{1.0, 0.0}, 0.0);
  EXPECT_DOUBLE_EQ(p.qx, 1.0);
  EXPECT_DOUBLE_EQ(p.qy, 0.0);
}

TEST(Rotate, QuarterTurn) {
  const auto p = rotate(EastNorth{1.0, 0.0}, kPi / 2.0);
  EXPECT_NEAR(p.qx, 0.0, 1e-15);
  EXPECT_NEAR(p.qy, 1.0, 1e-15);
}

TEST(Rotate, HalfTurnNegates) {
  const auto p = rotate(EastNorth{3.0, 4.0}, kPi);
  EXPECT_NEAR(p.qx, -3.0, 1e-14);
  EXPECT_NEAR(p.qy, -4.0, 1e-14);
}

TEST(Rotate, PreservesNorm) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-1e4, 1e4);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const EastNorth p{coord(rng), coord(rng)};
    const double theta = angle(rng);
    const auto q = rotate(p, theta);
    const double before = std::hypot(p.x, p.y);
    const double after = std::hypot(q.qx, q.qy);
    ASSERT_LE(std::abs(after - before), 1e-12 * std::max(before, 1.0));
  }
}

TEST(ToLocal, ZeroRotationEqualsProject) {
  const auto frame = frame_at(0.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1e-3, 1e-3);
  for (int i = 0; i < 200; ++i) {
    const GeoCoordinate geo{kRefLat + d(rng), kRefLon + d(rng)};
    const auto en = project(geo, frame);
    const auto lp = to_local(geo, frame);
    ASSERT_EQ(lp.qx, en.x);
    ASSERT_EQ(lp.qy, en.y);
  }
}

TEST(ToLocal, ReferenceIsOriginUnderAnyRotation) {
  for (double rot : {-3.0, -1.0, 0.0, 0.4, 2.2, kPi}) {
    const auto lp = to_local(GeoCoordinate{kRefLat, kRefLon}, frame_at(rot));
    EXPECT_DOUBLE_EQ(lp.qx, 0.0);
    EXPECT_DOUBLE_EQ(lp.qy, 0.0);
  }
}

TEST(ToLocal, ComposesProjectionAndRotation) {
  const auto frame = frame_at(kPi / 2.0);
  const auto lp = to_local(GeoCoordinate{kRefLat + 1e-5, kRefLon}, frame);
  // (0, 63.71) rotated by +90 degrees lands on (-63.71, 0)
  EXPECT_NEAR(lp.qx, -63.71, 1e-8);
  EXPECT_NEAR(lp.qy, 0.0, 1e-8);
}

TEST(FromLocal, OriginMapsToReference) {
  const auto frame = frame_at(1.1);
  const auto geo = from_local(LocalPoint{0.0, 0.0}, frame);
  EXPECT_DOUBLE_EQ(geo.lat, kRefLat);
  EXPECT_DOUBLE_EQ(geo.lon, kRefLon);
}

TEST(FromLocal, RoundTripSmallOffsets) {
  const auto frame = frame_at(0.0);
  const auto geo = from_local(LocalPoint{10.0, 5.0}, frame);
  const auto back = to_local(geo, frame);
  EXPECT_NEAR(back.qx, 10.0, 1e-6);
  EXPECT_NEAR(back.qy, 5.0, 1e-6);
}

TEST(FromLocal, RoundTripModerateOffsets) {
  const auto frame = frame_at(0.7);
  const auto geo = from_local(LocalPoint{-50.0, 120.0}, frame);
  const auto back = to_local(geo, frame);
  EXPECT_NEAR(back.qx, -50.0, 1e-5);
  EXPECT_NEAR(back.qy, 120.0, 1e-5);
}

TEST(FromLocal, RoundTripRandomWithinTenKilometers) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coord(-1e4, 1e4);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const FrameConfig frame = frame_at(angle(rng));
    const LocalPoint p{coord(rng), coord(rng)};
    const auto back = to_local(from_local(p, frame), frame);
    ASSERT_LE(std::hypot(back.qx - p.qx, back.qy - p.qy), 1e-5)
        << "p=(" << p.qx << "," << p.qy << ")";
  }
}

TEST(FromLocal, RejectsFarPointsAndPolarLatitudes) {
  EXPECT_THROW(from_local(LocalPoint{2e5, 0.0}, frame_at(0.0)), std::domain_error);
  FrameConfig near_pole;
  near_pole.ref = GeoCoordinate{deg2rad(89.9995), 0.0};
  EXPECT_THROW(from_local(LocalPoint{0.0, 9e4}, near_pole), std::domain_error);
}

TEST(Headings, FrameGlobalRoundTrip) {
  const auto frame = frame_at(0.6);
  for (double h : {-3.0, -1.2, 0.0, 0.5, 2.9}) {
    EXPECT_NEAR(heading_to_frame(heading_to_global(h, frame), frame), wrap_pi(h), 1e-12);
  }
}

TEST(Headings, DegreesStayBelowFullCircle) {
  // values within rounding distance of a full turn must not emit 360.0
  for (double h : {2.0 * kPi - 1e-15, 2.0 * kPi, -1e-17, 4.0 * kPi - 1e-16}) {
    const double deg = heading_to_degrees(h);
    ASSERT_GE(deg, 0.0) << "h=" << h;
    ASSERT_LT(deg, 360.0) << "h=" << h;
  }
  EXPECT_NEAR(heading_to_degrees(kPi / 2.0), 90.0, 1e-12);
}

TEST(Angles, WrapConventions) {
  EXPECT_DOUBLE_EQ(wrap_pi(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_pi(-kPi), kPi);
  EXPECT_NEAR(wrap_pi(3.0 * kPi / 2.0), -kPi / 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(wrap_2pi(0.0), 0.0);
  EXPECT_NEAR(wrap_2pi(-kPi / 2.0), 3.0 * kPi / 2.0, 1e-12);
  EXPECT_LT(wrap_2pi(2.0 * kPi), 2.0 * kPi);
}

}  // namespace
}  // namespace convoy
