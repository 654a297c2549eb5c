// Predecessor trajectory modelling and path-error computation.
//
// A trajectory model is a short-horizon parametric prediction of the
// immediately preceding vehicle, fit over its buffered local positions.
// The straight kind fits x(s), y(s) linearly against cumulative chord
// length. The quadratic kind fits y as a quadratic in x, which is exact for
// parabolic tracks that progress along x and degenerates (by reported error)
// when the path doubles back.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "convoy/geo.hpp"
#include "convoy/optimize.hpp"

namespace convoy {

enum class TrajectoryKind { kStraight, kQuadratic };

struct DegenerateFitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Desired spacing behind the predecessor: either a fixed geometric
/// distance or a time gap converted via d = v * headway.
struct GapPolicy {
  enum class Mode { kDistanceGap, kTimeGap };
  Mode mode = Mode::kDistanceGap;
  double distance = 0.0;  // meters (distance-gap)
  double headway = 0.0;   // seconds (time-gap)
};

struct PathError {
  double cross_track = 0.0;  // signed meters, positive left of travel
  LocalPoint preview_point;
  double preview_speed = 0.0;  // m/s
};

class TrajectoryModel {
 public:
  TrajectoryModel() = default;

  bool valid() const { return valid_; }
  TrajectoryKind kind() const { return kind_; }
  double residual() const { return residual_; }      // least-squares SSE
  double arc_length() const { return arc_length_; }  // path start -> newest sample

  /// Speed at the newest sample; callers that know the sender's reported
  /// speed set it so time-gap policies can convert headway to distance.
  double end_speed() const { return end_speed_; }
  void set_end_speed(double v) { end_speed_ = v; }

  /// Quadratic coefficients (c2, c1, c0) of y = c2 x^2 + c1 x + c0.
  std::array<double, 3> quad_coefficients() const {
    if (kind_ != TrajectoryKind::kQuadratic) throw std::logic_error("not a quadratic model");
    return {c2_, c1_, c0_};
  }

  /// Point at signed arc length `s` from the path start, measured along the
  /// direction of travel. Values beyond [0, arc_length] extrapolate.
  LocalPoint point_at_arc(double s) const {
    require_valid();
    if (kind_ == TrajectoryKind::kStraight) {
      const double u = s / tangent_norm_;
      return LocalPoint{ax0_ + ax1_ * u, ay0_ + ay1_ * u};
    }
    const double x = solve_x_at_arc(s);
    return LocalPoint{x, quad_eval(x)};
  }

  /// Tangent heading atan2(dy, dx) at arc length `s`, oriented with travel.
  double heading_at_arc(double s) const {
    require_valid();
    if (kind_ == TrajectoryKind::kStraight) return std::atan2(ay1_, ax1_);
    const double x = solve_x_at_arc(s);
    return std::atan2(dir_ * quad_slope(x), dir_);
  }

  /// Signed cross-track error of `ego` against the fitted path: magnitude is
  /// the distance to the foot point on the curve (domain-clamped), sign is
  /// positive when ego lies left of the travel direction.
  double cross_track(const LocalPoint& ego) const {
    require_valid();
    if (kind_ == TrajectoryKind::kStraight) {
      const double relx = ego.qx - ax0_;
      const double rely = ego.qy - ay0_;
      const double t2 = ax1_ * ax1_ + ay1_ * ay1_;
      double u = (relx * ax1_ + rely * ay1_) / t2;
      u = std::clamp(u, 0.0, domain_end_);
      const double dx = ego.qx - (ax0_ + ax1_ * u);
      const double dy = ego.qy - (ay0_ + ay1_ * u);
      const double dist = std::hypot(dx, dy);
      const double cross = ax1_ * dy - ay1_ * dx;
      return cross >= 0.0 ? dist : -dist;
    }
    // coarse scan over the x domain, then golden-section refinement
    const double x_lo = std::min(x_begin_, x_end_);
    const double x_hi = std::max(x_begin_, x_end_);
    auto dist2 = [&](double x) {
      const double dx = x - ego.qx;
      const double dy = quad_eval(x) - ego.qy;
      return dx * dx + dy * dy;
    };
    constexpr int kScan = 64;
    double best_x = x_lo;
    double best = dist2(x_lo);
    for (int i = 1; i <= kScan; ++i) {
      const double x = x_lo + (x_hi - x_lo) * i / kScan;
      if (const double d2 = dist2(x); d2 < best) {
        best = d2;
        best_x = x;
      }
    }
    const double step = (x_hi - x_lo) / kScan;
    auto [foot_x, foot_d2] = golden_section_min(dist2, std::max(x_lo, best_x - step),
                                                std::min(x_hi, best_x + step), 40);
    if (best < foot_d2) foot_x = best_x;
    const double dx = ego.qx - foot_x;
    const double dy = ego.qy - quad_eval(foot_x);
    const double tx = dir_;
    const double ty = dir_ * quad_slope(foot_x);
    const double dist = std::hypot(dx, dy);
    const double cross = tx * dy - ty * dx;
    return cross >= 0.0 ? dist : -dist;
  }

  static TrajectoryModel fit(const std::vector<LocalPoint>& samples, TrajectoryKind kind) {
    TrajectoryModel m;
    m.kind_ = kind;
    if (kind == TrajectoryKind::kStraight)
      m.fit_straight(samples);
    else
      m.fit_quadratic(samples);
    m.valid_ = true;
    return m;
  }

 private:
  void require_valid() const {
    if (!valid_) throw std::invalid_argument("trajectory model is empty");
  }

  void fit_straight(const std::vector<LocalPoint>& pts) {
    if (pts.size() < 2) throw std::invalid_argument("straight fit needs at least 2 samples");
    const std::size_t n = pts.size();
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
      s[i] = s[i - 1] + std::hypot(pts[i].qx - pts[i - 1].qx, pts[i].qy - pts[i - 1].qy);
    if (s.back() <= 0.0) throw DegenerateFitError("all samples coincident");

    double sum_s = 0, sum_ss = 0, sum_x = 0, sum_y = 0, sum_sx = 0, sum_sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sum_s += s[i];
      sum_ss += s[i] * s[i];
      sum_x += pts[i].qx;
      sum_y += pts[i].qy;
      sum_sx += s[i] * pts[i].qx;
      sum_sy += s[i] * pts[i].qy;
    }
    const double denom = n * sum_ss - sum_s * sum_s;
    if (std::abs(denom) < 1e-15) throw DegenerateFitError("chord parameterization collapsed");
    ax1_ = (n * sum_sx - sum_s * sum_x) / denom;
    ay1_ = (n * sum_sy - sum_s * sum_y) / denom;
    ax0_ = (sum_x - ax1_ * sum_s) / n;
    ay0_ = (sum_y - ay1_ * sum_s) / n;
    tangent_norm_ = std::hypot(ax1_, ay1_);
    if (tangent_norm_ <= 0.0) throw DegenerateFitError("zero tangent");
    domain_end_ = s.back();
    arc_length_ = tangent_norm_ * domain_end_;
    residual_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double rx = pts[i].qx - (ax0_ + ax1_ * s[i]);
      const double ry = pts[i].qy - (ay0_ + ay1_ * s[i]);
      residual_ += rx * rx + ry * ry;
    }
  }

  void fit_quadratic(const std::vector<LocalPoint>& pts) {
    if (pts.size() < 3) throw std::invalid_argument("quadratic fit needs at least 3 samples");
    const std::size_t n = pts.size();
    double mean_x = 0;
    for (const auto& p : pts) mean_x += p.qx;
    mean_x /= static_cast<double>(n);

    // normal equations on centered abscissa u = x - mean_x
    double m[3][3] = {};
    double rhs[3] = {};
    for (const auto& p : pts) {
      const double u = p.qx - mean_x;
      const double pw[5] = {1.0, u, u * u, u * u * u, u * u * u * u};
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m[r][c] += pw[r + c];
        rhs[r] += pw[r] * p.qy;
      }
    }
    double b[3];
    if (!solve3(m, rhs, b)) throw DegenerateFitError("quadratic fit is singular (no x spread)");
    // expand back to y = c2 x^2 + c1 x + c0
    c2_ = b[2];
    c1_ = b[1] - 2.0 * b[2] * mean_x;
    c0_ = b[0] - b[1] * mean_x + b[2] * mean_x * mean_x;

    x_begin_ = pts.front().qx;
    x_end_ = pts.back().qx;
    dir_ = x_end_ >= x_begin_ ? 1.0 : -1.0;
    arc_length_ = quad_arc_between(x_begin_, x_end_);
    residual_ = 0.0;
    for (const auto& p : pts) {
      const double r = p.qy - quad_eval(p.qx);
      residual_ += r * r;
    }
  }

  static bool solve3(double m[3][3], const double rhs[3], double out[3]) {
    double a[3][4];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] = m[r][c];
      a[r][3] = rhs[r];
    }
    for (int col = 0; col < 3; ++col) {
      int pivot = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
      if (std::abs(a[pivot][col]) < 1e-12) return false;
      if (pivot != col)
        for (int c = 0; c < 4; ++c) std::swap(a[pivot][c], a[col][c]);
      for (int r = 0; r < 3; ++r) {
        if (r == col) continue;
        const double factor = a[r][col] / a[col][col];
        for (int c = col; c < 4; ++c) a[r][c] -= factor * a[col][c];
      }
    }
    for (int r = 0; r < 3; ++r) out[r] = a[r][3] / a[r][r];
    return true;
  }

  double quad_eval(double x) const { return (c2_ * x + c1_) * x + c0_; }
  double quad_slope(double x) const { return 2.0 * c2_ * x + c1_; }

  // antiderivative of sqrt(1 + q'(x)^2)
  double quad_arc_antideriv(double x) const {
    const double u = quad_slope(x);
    return (u * std::sqrt(1.0 + u * u) + std::asinh(u)) / (4.0 * c2_);
  }

  double quad_arc_between(double xa, double xb) const {
    if (std::abs(c2_) < 1e-12) return std::abs(xb - xa) * std::sqrt(1.0 + c1_ * c1_);
    return std::abs(quad_arc_antideriv(xb) - quad_arc_antideriv(xa));
  }

  /// Newton solve for the abscissa at signed arc length `s` from the path
  /// start, measured along the travel direction (f' = speed >= 1).
  double solve_x_at_arc(double s) const {
    double x = x_begin_ + dir_ * s / std::sqrt(1.0 + quad_slope(x_begin_) * quad_slope(x_begin_));
    for (int i = 0; i < 40; ++i) {
      const double f = dir_ * signed_arc_from_begin(x) - s;
      if (std::abs(f) < 1e-12) break;
      x -= f / (dir_ * dir_sign_arc(x));
    }
    return x;
  }

  double signed_arc_from_begin(double x) const {
    if (std::abs(c2_) < 1e-12)
      return (x - x_begin_) * std::sqrt(1.0 + c1_ * c1_);
    return quad_arc_antideriv(x) - quad_arc_antideriv(x_begin_);
  }

  double dir_sign_arc(double x) const {
    const double u = quad_slope(x);
    return std::sqrt(1.0 + u * u);
  }

  bool valid_ = false;
  TrajectoryKind kind_ = TrajectoryKind::kStraight;
  double residual_ = 0.0;
  double arc_length_ = 0.0;
  double end_speed_ = 0.0;

  // straight: p(u) = (ax0 + ax1 u, ay0 + ay1 u), u in [0, domain_end]
  double ax0_ = 0, ax1_ = 0, ay0_ = 0, ay1_ = 0;
  double tangent_norm_ = 1.0;
  double domain_end_ = 0.0;

  // quadratic: y = c2 x^2 + c1 x + c0, x from x_begin to x_end
  double c2_ = 0, c1_ = 0, c0_ = 0;
  double x_begin_ = 0, x_end_ = 0;
  double dir_ = 1.0;
};

inline TrajectoryModel fit_trajectory(const std::vector<LocalPoint>& samples,
                                      TrajectoryKind kind) {
  return TrajectoryModel::fit(samples, kind);
}

/// Cross-track error plus the preview point at arc length d beyond the
/// predecessor's newest sample, with d taken from the gap policy.
inline PathError path_error(const TrajectoryModel& model, const LocalPoint& ego,
                            const GapPolicy& policy) {
  if (!model.valid()) throw std::invalid_argument("trajectory model is empty");
  double d = 0.0;
  switch (policy.mode) {
    case GapPolicy::Mode::kDistanceGap:
      d = policy.distance;
      break;
    case GapPolicy::Mode::kTimeGap:
      d = model.end_speed() * policy.headway;
      break;
  }
  if (d < 0.0) throw std::invalid_argument("gap policy produced a negative distance");
  PathError err;
  err.cross_track = model.cross_track(ego);
  err.preview_point = model.point_at_arc(model.arc_length() + d);
  err.preview_speed = model.end_speed();
  return err;
}

}  // namespace convoy
