// The leader's reference circuit: a stadium inscribed in an 8 m x 4 m box
// (two 4 m straights joined by radius-2 semicircles), arc-length
// parameterized, traversed counterclockwise starting from the bottom
// straight heading east. The two-speed lap schedule switches at half the
// lap length.
#pragma once

#include <algorithm>
#include <cmath>

#include "convoy/geo.hpp"

namespace convoy {

class OvalTrack {
 public:
  struct Sample {
    LocalPoint point;
    double heading = 0.0;  // travel tangent, radians clockwise from frame north
  };

  double straight_length() const { return straight_; }
  double radius() const { return radius_; }
  double lap_length() const { return 2.0 * straight_ + 2.0 * kPi * radius_; }

  /// Point and tangent at arc length s (wrapped modulo the lap length).
  Sample at(double s) const {
    const double lap = lap_length();
    s = std::fmod(s, lap);
    if (s < 0.0) s += lap;

    const double half_w = straight_ / 2.0;  // straights span x in [-2, 2]
    if (s < straight_) {
      // bottom straight, heading east
      return Sample{LocalPoint{-half_w + s, -radius_}, kPi / 2.0};
    }
    s -= straight_;
    if (s < kPi * radius_) {
      // right semicircle, centered (half_w, 0), from angle -pi/2 upward
      const double phi = -kPi / 2.0 + s / radius_;
      const LocalPoint p{half_w + radius_ * std::cos(phi), radius_ * std::sin(phi)};
      return Sample{p, std::atan2(-std::sin(phi), std::cos(phi))};
    }
    s -= kPi * radius_;
    if (s < straight_) {
      // top straight, heading west
      return Sample{LocalPoint{half_w - s, radius_}, -kPi / 2.0};
    }
    s -= straight_;
    // left semicircle, centered (-half_w, 0), from angle pi/2 downward
    const double phi = kPi / 2.0 + s / radius_;
    const LocalPoint p{-half_w + radius_ * std::cos(phi), radius_ * std::sin(phi)};
    return Sample{p, std::atan2(-std::sin(phi), std::cos(phi))};
  }

  /// Arc length of the nearest point on the circuit to `p`.
  double project(const LocalPoint& p) const {
    const double half_w = straight_ / 2.0;
    double best_s = 0.0;
    double best_d2 = 1e300;
    auto consider = [&](double s, double x, double y) {
      const double dx = p.qx - x;
      const double dy = p.qy - y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best_s = s;
      }
    };

    // bottom straight
    {
      const double u = std::clamp(p.qx + half_w, 0.0, straight_);
      consider(u, -half_w + u, -radius_);
    }
    // right semicircle: angles in [-pi/2, pi/2]
    {
      const double ang = std::atan2(p.qy, p.qx - half_w);
      const double phi = std::clamp(ang, -kPi / 2.0, kPi / 2.0);
      consider(straight_ + (phi + kPi / 2.0) * radius_, half_w + radius_ * std::cos(phi),
               radius_ * std::sin(phi));
    }
    // top straight
    {
      const double u = std::clamp(half_w - p.qx, 0.0, straight_);
      consider(straight_ + kPi * radius_ + u, half_w - u, radius_);
    }
    // left semicircle: angles in [pi/2, 3pi/2]
    {
      double ang = std::atan2(p.qy, p.qx + half_w);
      if (ang < 0.0) ang += 2.0 * kPi;  // into [0, 2pi) so the clamp is contiguous
      const double phi = std::clamp(ang, kPi / 2.0, 3.0 * kPi / 2.0);
      consider(2.0 * straight_ + kPi * radius_ + (phi - kPi / 2.0) * radius_,
               -half_w + radius_ * std::cos(phi), radius_ * std::sin(phi));
    }
    return best_s;
  }

 private:
  double straight_ = 4.0;
  double radius_ = 2.0;
};

/// Piecewise-constant leader speed: v_first_half on the first half of each
/// lap, v_second_half on the rest.
struct LeaderSchedule {
  double v_first_half = 1.0;
  double v_second_half = 2.0;

  double speed_at(double s, double lap_length) const {
    s = std::fmod(s, lap_length);
    if (s < 0.0) s += lap_length;
    return s < lap_length / 2.0 ? v_first_half : v_second_half;
  }
};

struct LeaderRef {
  LocalPoint point;
  double heading = 0.0;
  double speed = 0.0;
};

inline LeaderRef leader_reference(const OvalTrack& track, const LeaderSchedule& schedule,
                                  double s) {
  const auto sample = track.at(s);
  return LeaderRef{sample.point, sample.heading, schedule.speed_at(s, track.lap_length())};
}

}  // namespace convoy
