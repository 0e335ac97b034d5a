#pragma once

// Auxiliary supervision signals: landmark-derived line-of-sight pseudo-gaze
// from an eyeball-sphere model, head pose, eye side, and controlled noise
// injection for desk-scale noisy-label experiments.
//
// Eyeball model: a sphere of radius `radius_px` centered at the 2-D midpoint
// of the eye corners at a fixed reference depth, visible hemisphere facing
// the camera. The pupil is lifted onto the near hemisphere and the gaze is
// the unit vector from the sphere center to the lifted pupil, expressed in
// the mirror-view camera frame of geometry.hpp (patch +x = camera -x).

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mtgaze/common.hpp"
#include "mtgaze/geometry.hpp"

namespace mtgaze {

struct EyeLandmarks {
  Vec2 inner, outer;          // eye corners, pixels
  std::vector<Vec2> contour;  // >= 4 points along the eyelid margins
  Vec2 pupil;

  Vec2 corner_midpoint() const {
    return {(inner.x + outer.x) * 0.5, (inner.y + outer.y) * 0.5};
  }
  double corner_distance() const { return (outer - inner).norm(); }
};

inline void validate_landmarks(const EyeLandmarks& lm, int img_w, int img_h) {
  if (lm.corner_distance() < 1e-9)
    fail("geometry", "degenerate eye landmarks: coincident corners");
  if (lm.contour.size() < 4)
    fail("geometry", "eye contour needs at least 4 points");
  auto in_bounds = [&](const Vec2& p) {
    return p.x >= 0 && p.y >= 0 && p.x <= img_w - 1 && p.y <= img_h - 1;
  };
  if (!in_bounds(lm.inner) || !in_bounds(lm.outer) || !in_bounds(lm.pupil))
    fail("geometry", "eye landmarks outside image bounds");
  for (const Vec2& p : lm.contour)
    if (!in_bounds(p)) fail("geometry", "eye contour point outside image");
}

// Whether the pupil lies inside the convex hull of contour + corners.
// Violations indicate blinks and are reported, not rejected.
inline bool pupil_in_hull(const EyeLandmarks& lm) {
  std::vector<Vec2> pts = lm.contour;
  pts.push_back(lm.inner);
  pts.push_back(lm.outer);
  // gift-wrap style containment: pupil is inside iff it is not strictly on
  // the outer side of every hull edge; for the small point sets here a
  // winding test against the centroid-sorted polygon is enough.
  Vec2 ctr{0, 0};
  for (const Vec2& p : pts) ctr = ctr + p;
  ctr = ctr * (1.0 / pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vec2& a, const Vec2& b) {
    return std::atan2(a.y - ctr.y, a.x - ctr.x) <
           std::atan2(b.y - ctr.y, b.x - ctr.x);
  });
  double sign = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    Vec2 a = pts[i], b = pts[(i + 1) % pts.size()];
    double cr =
        (b.x - a.x) * (lm.pupil.y - a.y) - (b.y - a.y) * (lm.pupil.x - a.x);
    if (std::abs(cr) < 1e-12) continue;
    if (sign == 0)
      sign = cr > 0 ? 1 : -1;
    else if ((cr > 0 ? 1 : -1) != sign)
      return false;
  }
  return true;
}

// Sphere center: 2-D corner midpoint at the reference depth z0.
inline Vec3 eyeball_center(const EyeLandmarks& lm, double radius_px,
                           double z0 = 0.0) {
  if (!(radius_px > 0)) fail("geometry", "eyeball radius must be positive");
  if (lm.corner_distance() < 1e-9)
    fail("geometry", "degenerate eye landmarks: coincident corners");
  Vec2 m = lm.corner_midpoint();
  return {m.x, m.y, z0};
}

// Line-of-sight pseudo-gaze. Pupil offsets beyond the sphere radius
// (blink/occlusion) raise Error("off_sphere").
inline GazeVector los_pseudo_gaze(const EyeLandmarks& lm, double radius_px) {
  Vec3 c = eyeball_center(lm, radius_px);
  double dx = lm.pupil.x - c.x;
  double dy = lm.pupil.y - c.y;
  double d2 = dx * dx + dy * dy;
  if (d2 >= radius_px * radius_px)
    fail("off_sphere", "pupil offset " + std::to_string(std::sqrt(d2)) +
                           "px is off the eyeball sphere (radius " +
                           std::to_string(radius_px) + "px)");
  double dz = -std::sqrt(radius_px * radius_px - d2);
  // mirror view: patch +x is camera -x
  return GazeVector::unit({-dx / radius_px, dy / radius_px, dz / radius_px});
}

enum class LabelSource { oracle, geometric, external };

inline const char* label_source_name(LabelSource s) {
  switch (s) {
    case LabelSource::oracle: return "oracle";
    case LabelSource::geometric: return "geometric";
    default: return "external";
  }
}

struct NoiseConfig {
  double gaze_sigma_deg = 0.0;    // small-angle rotation std
  double pose_sigma_rad = 0.0;    // per-component gaussian std
  double corrupt_fraction = 0.0;  // fraction rotated by large_corrupt_deg
  double large_corrupt_deg = 0.0;
};

struct NoiseRecord {
  std::string kind;  // "gaussian", "gaussian+corrupt"
  double gaze_sigma_deg = 0.0;
  double pose_sigma_rad = 0.0;
  double large_corrupt_deg = 0.0;
  bool corrupted = false;
  uint64_t seed = 0;
};

// The three auxiliary targets attached to one sample.
struct PseudoLabelSet {
  GazeVector pseudo_gaze;
  HeadPose6D head_pose;
  EyeSide side = EyeSide::L;
  LabelSource source = LabelSource::external;
  std::optional<NoiseRecord> noise;
};

namespace detail {

// Some unit vector orthogonal to v.
inline Vec3 any_orthogonal(const Vec3& v) {
  Vec3 ref = std::abs(v.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  return cross(v, ref).normalized();
}

// Rodrigues rotation of v about unit axis by angle.
inline Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return v * c + cross(axis, v) * s + axis * (axis.dot(v) * (1 - c));
}

// Rotate g about a uniformly random axis orthogonal to it.
inline GazeVector perturb_gaze(const GazeVector& g, double angle_rad,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
  double phi = uni(rng);
  Vec3 u = any_orthogonal(g.v);
  Vec3 w = cross(g.v, u);
  Vec3 axis = (u * std::cos(phi) + w * std::sin(phi)).normalized();
  return GazeVector::unit(rotate_about(g.v, axis, angle_rad));
}

}  // namespace detail

// Apply the configured corruption to one label set. Draw order is fixed:
// gaze direction angle, gaze magnitude, corruption direction, six pose
// components. Deterministic given (labels, cfg, seed, corrupt).
inline PseudoLabelSet inject_noise(const PseudoLabelSet& labels,
                                   const NoiseConfig& cfg, uint64_t seed,
                                   bool corrupt = false) {
  if (cfg.gaze_sigma_deg < 0 || cfg.pose_sigma_rad < 0)
    fail("config", "noise sigmas must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  PseudoLabelSet out = labels;
  if (cfg.gaze_sigma_deg > 0) {
    double theta = deg2rad(cfg.gaze_sigma_deg) * gauss(rng);
    out.pseudo_gaze = detail::perturb_gaze(out.pseudo_gaze, theta, rng);
  }
  if (corrupt && cfg.large_corrupt_deg != 0) {
    out.pseudo_gaze = detail::perturb_gaze(
        out.pseudo_gaze, deg2rad(cfg.large_corrupt_deg), rng);
  }
  if (cfg.pose_sigma_rad > 0) {
    Vec3& r = out.head_pose.rotation;
    Vec3& t = out.head_pose.translation;
    r.x = wrap_angle(r.x + cfg.pose_sigma_rad * gauss(rng));
    r.y = wrap_angle(r.y + cfg.pose_sigma_rad * gauss(rng));
    r.z = wrap_angle(r.z + cfg.pose_sigma_rad * gauss(rng));
    t.x += cfg.pose_sigma_rad * gauss(rng);
    t.y += cfg.pose_sigma_rad * gauss(rng);
    t.z += cfg.pose_sigma_rad * gauss(rng);
  }
  out.noise = NoiseRecord{corrupt ? "gaussian+corrupt" : "gaussian",
                          cfg.gaze_sigma_deg, cfg.pose_sigma_rad,
                          cfg.large_corrupt_deg, corrupt, seed};
  return out;
}

// Corpus-wide noise: exactly round(corrupt_fraction * n) label sets receive
// the large corruption; per-sample seeds come from a splittable counter so
// the result is independent of evaluation order.
inline std::vector<PseudoLabelSet> inject_noise_all(
    const std::vector<PseudoLabelSet>& labels, const NoiseConfig& cfg,
    uint64_t seed) {
  if (cfg.corrupt_fraction < 0 || cfg.corrupt_fraction > 1)
    fail("config", "corrupt_fraction must be in [0,1]");
  size_t n = labels.size();
  size_t m = static_cast<size_t>(std::llround(cfg.corrupt_fraction *
                                              static_cast<double>(n)));
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 pick(derive_seed(seed, 0));
  std::shuffle(order.begin(), order.end(), pick);
  std::vector<char> corrupt(n, 0);
  for (size_t i = 0; i < m; ++i) corrupt[order[i]] = 1;

  std::vector<PseudoLabelSet> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = inject_noise(labels[i], cfg, derive_seed(seed, i + 1),
                          corrupt[i] != 0);
  return out;
}

}  // namespace mtgaze
