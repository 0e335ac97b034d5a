#pragma once

// Virtual-camera sample normalization, reduced to in-plane roll removal plus
// scale: the patch is rotated so the inter-corner eye axis is horizontal,
// scaled so the corner distance matches a configured width, and cropped to
// the configured patch size. The rotation applied to the image is returned
// so labels can be counter-rotated (see denormalize_gaze in geometry.hpp).

#include <cmath>

#include "mtgaze/common.hpp"
#include "mtgaze/geometry.hpp"
#include "mtgaze/image.hpp"
#include "mtgaze/pseudolabel.hpp"

namespace mtgaze {

struct NormalizeConfig {
  int out_w = 64, out_h = 48;
  double corner_dist_px = 36.0;
};

struct NormalizedSample {
  Image image;
  EyeLandmarks landmarks;
  double rotation_applied = 0.0;  // image rotation, radians
};

inline NormalizedSample normalize_sample(const Image& image,
                                         const EyeLandmarks& lm,
                                         const HeadPose6D& head,
                                         const NormalizeConfig& cfg = {}) {
  if (!head.rotation.finite() || !head.translation.finite())
    fail("geometry", "normalize_sample: non-finite head pose");
  double dist = lm.corner_distance();
  if (dist < 1e-9)
    fail("geometry", "normalize_sample: coincident eye corners");

  // axis angle measured from inner->outer; remove it
  Vec2 axis = lm.outer - lm.inner;
  // corners may be in either order; normalize to the representative angle in
  // (-pi/2, pi/2] so the rotation never exceeds a quarter turn
  double theta = std::atan2(axis.y, axis.x);
  if (theta > kPi / 2) theta -= kPi;
  if (theta <= -kPi / 2) theta += kPi;
  double rotation = -theta;

  double scale = cfg.corner_dist_px / dist;
  Vec2 mid = lm.corner_midpoint();
  Vec2 out_center{(cfg.out_w - 1) / 2.0, (cfg.out_h - 1) / 2.0};

  Affine2 xf = Affine2::rotation_about(mid, rotation);
  xf = Affine2::scale_about(mid, scale).compose(xf);
  xf = Affine2::translation(out_center.x - mid.x, out_center.y - mid.y)
           .compose(xf);

  NormalizedSample out;
  out.image = warp_affine(image, xf, cfg.out_w, cfg.out_h);
  out.landmarks.inner = xf.apply(lm.inner);
  out.landmarks.outer = xf.apply(lm.outer);
  for (const Vec2& p : lm.contour) out.landmarks.contour.push_back(xf.apply(p));
  out.landmarks.pupil = xf.apply(lm.pupil);
  out.rotation_applied = rotation;
  return out;
}

}  // namespace mtgaze
