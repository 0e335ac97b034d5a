#pragma once

// Gaze and head-pose vector math: angular parameterizations, the angular
// error metric, horizontal-flip label transforms and in-plane gaze
// rotations.
//
// Camera frame: x right, y down, z away from the camera. Gaze vectors point
// from the eye toward the target, so a gaze at the camera has negative z.
// Eye patches are handled in mirror view: patch +x corresponds to camera -x
// (selfie-style). Under this convention pitch > 0 looks up, yaw > 0 looks to
// the camera's left, and a pupil displaced toward patch +x gives positive
// yaw.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "mtgaze/common.hpp"

namespace mtgaze {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Wrap into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  Vec3 normalized() const {
    double n = norm();
    if (!(n > 0.0) || !std::isfinite(n))
      fail("geometry", "cannot normalize zero or non-finite vector");
    return {x / n, y / n, z / n};
  }
};

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}

enum class EyeSide { L, R };

inline EyeSide flip_side(EyeSide s) {
  return s == EyeSide::L ? EyeSide::R : EyeSide::L;
}

inline char side_char(EyeSide s) { return s == EyeSide::L ? 'L' : 'R'; }

inline EyeSide parse_side(const std::string& s) {
  if (s == "L" || s == "l") return EyeSide::L;
  if (s == "R" || s == "r") return EyeSide::R;
  fail("parse", "invalid eye side '" + s + "' (expected L or R)");
}

// Unit 3-vector gaze direction in the camera frame.
struct GazeVector {
  Vec3 v{0.0, 0.0, -1.0};

  GazeVector() = default;
  explicit GazeVector(const Vec3& u) : v(u) {
    if (!u.finite()) fail("geometry", "gaze vector has non-finite components");
    if (std::abs(u.norm() - 1.0) > 1e-9)
      fail("geometry", "gaze vector is not unit length");
  }

  static GazeVector unit(const Vec3& any) {
    return GazeVector(any.normalized());
  }
};

// pitch > 0 looks up, yaw > 0 looks to the camera's left (mirror view).
struct PitchYaw {
  double pitch = 0.0;  // radians, (-pi/2, pi/2)
  double yaw = 0.0;    // radians, (-pi, pi]
};

// 3 Euler rotation angles (pitch about x, yaw about y, roll about z) plus a
// translation in normalized face-box units.
struct HeadPose6D {
  Vec3 rotation;     // (pitch, yaw, roll), each in (-pi, pi]
  Vec3 translation;

  HeadPose6D wrapped() const {
    return {{wrap_angle(rotation.x), wrap_angle(rotation.y),
             wrap_angle(rotation.z)},
            translation};
  }
};

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// R = Rz(roll) * Ry(yaw) * Rx(pitch).
inline Mat3 euler_to_matrix(const Vec3& rot) {
  double cp = std::cos(rot.x), sp = std::sin(rot.x);
  double cy = std::cos(rot.y), sy = std::sin(rot.y);
  double cr = std::cos(rot.z), sr = std::sin(rot.z);
  Mat3 rx{{{1, 0, 0}, {0, cp, -sp}, {0, sp, cp}}};
  Mat3 ry{{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
  Mat3 rz{{{cr, -sr, 0}, {sr, cr, 0}, {0, 0, 1}}};
  return mat3_mul(rz, mat3_mul(ry, rx));
}

inline Mat3 mat3_transpose(const Mat3& m) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
  return t;
}

// v = (-cos(pitch)sin(yaw), -sin(pitch), -cos(pitch)cos(yaw)).
inline GazeVector pitchyaw_to_vector(const PitchYaw& py) {
  double cp = std::cos(py.pitch);
  Vec3 v{-cp * std::sin(py.yaw), -std::sin(py.pitch),
         -cp * std::cos(py.yaw)};
  return GazeVector::unit(v);
}

inline PitchYaw vector_to_pitchyaw(const GazeVector& g) {
  double vy = std::clamp(g.v.y, -1.0, 1.0);
  return {std::asin(-vy), std::atan2(-g.v.x, -g.v.z)};
}

inline double angular_error_deg(const GazeVector& a, const GazeVector& b) {
  if (!a.v.finite() || !b.v.finite())
    fail("geometry", "angular_error_deg: non-finite input");
  double d = std::clamp(a.v.dot(b.v), -1.0, 1.0);
  return rad2deg(std::acos(d));
}

// Label transform for a horizontally mirrored sample: gaze x negated; head
// yaw and roll negated, translation x negated; eye side swapped. Involution.
struct FlipLabels {
  std::optional<GazeVector> gaze;
  std::optional<HeadPose6D> head;
  EyeSide side = EyeSide::L;
};

inline FlipLabels flip_labels(const std::optional<GazeVector>& gaze,
                              const std::optional<HeadPose6D>& head,
                              EyeSide side) {
  FlipLabels out;
  if (gaze) out.gaze = GazeVector({-gaze->v.x, gaze->v.y, gaze->v.z});
  if (head) {
    HeadPose6D h = *head;
    h.rotation.y = -h.rotation.y;
    h.rotation.z = -h.rotation.z;
    h.translation.x = -h.translation.x;
    out.head = h;
  }
  out.side = flip_side(side);
  return out;
}

// Gaze change induced by rotating the eye patch in-plane by `image_rot_rad`
// (pixel offsets d map to R(a)d, x right / y down). Because patch x mirrors
// camera x, the gaze xy components rotate by -a.
inline GazeVector rotate_gaze_inplane(const GazeVector& g,
                                      double image_rot_rad) {
  double c = std::cos(image_rot_rad), s = std::sin(image_rot_rad);
  // R(-a) applied to (x, y)
  Vec3 v{c * g.v.x + s * g.v.y, -s * g.v.x + c * g.v.y, g.v.z};
  return GazeVector::unit(v);
}

// Recover the original-frame gaze from a gaze expressed in the frame of a
// patch that normalize_sample rotated by `rotation_applied`.
inline GazeVector denormalize_gaze(const GazeVector& g_norm,
                                   double rotation_applied) {
  return rotate_gaze_inplane(g_norm, -rotation_applied);
}

inline GazeVector normalize_gaze(const GazeVector& g_orig,
                                 double rotation_applied) {
  return rotate_gaze_inplane(g_orig, rotation_applied);
}

}  // namespace mtgaze
