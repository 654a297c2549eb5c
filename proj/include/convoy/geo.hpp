// Geodetic <-> local Cartesian frame conversions.
//
// Positions arrive as latitude/longitude pairs and are mapped into a local
// metric frame via an equirectangular projection about a reference point,
// followed by a frame rotation that aligns the grid with the track.
//
// Conventions used throughout the library:
//   * internal angles are radians; degrees appear only at message
//     encode/decode boundaries
//   * vehicle headings are radians clockwise from the +qy axis of the frame
//     they are expressed in ("north" of that frame); global headings are
//     clockwise from true north
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace convoy {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEarthMeanRadius = 6371000.0;  // meters

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wrap an angle to (-pi, pi].
inline double wrap_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

/// Wrap an angle to [0, 2*pi).
inline double wrap_2pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;  // fmod can land exactly on 2*pi after the add
  return a;
}

/// Geodetic position, radians.
struct GeoCoordinate {
  double lat = 0.0;  // |lat| <= pi/2
  double lon = 0.0;  // |lon| <= pi
};

/// Point in the rotated local Cartesian frame, meters.
struct LocalPoint {
  double qx = 0.0;
  double qy = 0.0;
};

/// Unrotated metric offsets from the reference point, meters.
struct EastNorth {
  double x = 0.0;  // east
  double y = 0.0;  // north
};

/// Definition of the local frame: reference point, rotation (radians,
/// clockwise from due east) and the sphere radius used by the projection.
struct FrameConfig {
  GeoCoordinate ref;
  double rotation = 0.0;  // in (-pi, pi]
  double earth_radius = kEarthMeanRadius;
};

namespace detail {
inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(std::string("non-finite ") + what);
}
}  // namespace detail

/// Equirectangular projection of `geo` about `frame.ref`:
///   x = R * cos((lat + ref.lat)/2) * (lon - ref.lon)
///   y = R * (lat - ref.lat)
inline EastNorth project(const GeoCoordinate& geo, const FrameConfig& frame) {
  detail::require_finite(geo.lat, "latitude");
  detail::require_finite(geo.lon, "longitude");
  if (std::abs(geo.lat) > kPi / 2.0 + 1e-12) throw std::domain_error("latitude out of range");
  const double mid = 0.5 * (geo.lat + frame.ref.lat);
  return EastNorth{frame.earth_radius * std::cos(mid) * (geo.lon - frame.ref.lon),
                   frame.earth_radius * (geo.lat - frame.ref.lat)};
}

/// Rotate east-north offsets by `theta`:
///   qx = cos(theta) * x - sin(theta) * y
///   qy = sin(theta) * x + cos(theta) * y
inline LocalPoint rotate(const EastNorth& p, double theta) {
  detail::require_finite(p.x, "x");
  detail::require_finite(p.y, "y");
  detail::require_finite(theta, "rotation");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return LocalPoint{c * p.x - s * p.y, s * p.x + c * p.y};
}

inline LocalPoint to_local(const GeoCoordinate& geo, const FrameConfig& frame) {
  return rotate(project(geo, frame), frame.rotation);
}

/// Inverse of to_local. The forward map fixes lat from qy alone, so the
/// midpoint cosine is known exactly once lat is recovered; valid while the
/// offsets stay small against the Earth radius (< 100 km).
inline GeoCoordinate from_local(const LocalPoint& p, const FrameConfig& frame) {
  detail::require_finite(p.qx, "qx");
  detail::require_finite(p.qy, "qy");
  if (std::hypot(p.qx, p.qy) > 100e3) throw std::domain_error("local point too far from reference");
  const double c = std::cos(frame.rotation);
  const double s = std::sin(frame.rotation);
  // transpose of the rotation matrix
  const double x = c * p.qx + s * p.qy;
  const double y = -s * p.qx + c * p.qy;
  const double lat = frame.ref.lat + y / frame.earth_radius;
  if (std::abs(lat) > kPi / 2.0) throw std::domain_error("latitude out of range");
  const double mid_cos = std::cos(0.5 * (lat + frame.ref.lat));
  if (std::abs(mid_cos) < 1e-9) throw std::domain_error("projection undefined near the poles");
  return GeoCoordinate{lat, frame.ref.lon + x / (frame.earth_radius * mid_cos)};
}

/// Heading conversions between true-north and frame-north references.
/// A velocity (sin h, cos h) in east-north coordinates maps through the
/// frame rotation to (sin(h - rotation), cos(h - rotation)).
inline double heading_to_frame(double global_heading, const FrameConfig& frame) {
  return wrap_pi(global_heading - frame.rotation);
}

inline double heading_to_global(double frame_heading, const FrameConfig& frame) {
  return wrap_pi(frame_heading + frame.rotation);
}

/// Heading in degrees, guaranteed inside [0, 360) even when the wrapped
/// radian value sits within rounding distance of a full turn.
inline double heading_to_degrees(double heading_rad) {
  double deg = rad2deg(wrap_2pi(heading_rad));
  if (deg >= 360.0) deg = 0.0;
  return deg;
}

}  // namespace convoy
