#pragma once

// Parametric eye-patch renderer with exact ground truth, and corpus
// generation on top of it.
//
// The iris/pupil disc is placed at the sphere projection of the gaze vector
// (the exact inverse of los_pseudo_gaze), so geometric relabeling of a clean
// render recovers the gaze used to render it up to landmark quantization.
// Head pose affects the eyelid geometry only (in-plane roll, yaw shear,
// pitch aperture modulation) plus a translation shift of the whole eye; all
// of these keep the corner midpoint on the eyeball center, which is what
// makes the closed loop exact. Landmarks are emitted in 1/16-px fixed point,
// mirroring common rasterizer subpixel precision.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mtgaze/common.hpp"
#include "mtgaze/corpus.hpp"
#include "mtgaze/geometry.hpp"
#include "mtgaze/image.hpp"
#include "mtgaze/pseudolabel.hpp"

namespace mtgaze {

struct AppearanceParams {
  double sclera_level = 0.88;
  double iris_level = 0.30;
  double pupil_level = 0.06;
  double skin_level = 0.62;
  double duct_level = 0.45;
  double illum_slope = 0.0;    // brightness ramp along the inner->outer axis
  double aperture_factor = 1.0;
};

struct AppearanceJitter {
  double iris_darkness = 0.10;
  double sclera_brightness = 0.06;
  double illumination = 0.20;
  double eyelid_aperture = 0.12;
};

struct CorpusConfig {
  int n_subjects = 10;
  int samples_per_subject = 200;
  int patch_w = 64, patch_h = 48;
  double pitch_range_deg = 16.0, yaw_range_deg = 22.0;  // gaze, symmetric
  double head_pitch_range_deg = 10.0, head_yaw_range_deg = 12.0,
         head_roll_range_deg = 12.0;
  double head_trans_range = 0.05;    // normalized face-box units, per axis
  double trans_px_per_unit = 40.0;   // rendered shift per translation unit
  double eyeball_radius_px = 12.0;
  double corner_dist_px = 36.0;
  double iris_radius_px = 5.0;
  double pupil_radius_px = 2.2;
  double aperture_px = 13.0;         // upper-lid apex height
  AppearanceJitter jitter;
  double subject_bias_deg = 3.0;     // per-subject constant gaze offset
  int zones = 9;
  uint64_t seed = 1;
};

namespace detail {

inline double quant16(double v) { return std::round(v * 16.0) / 16.0; }

// 0..1 coverage over a 1-px anti-aliasing band; d > 0 means inside.
inline double coverage(double d) { return std::clamp(d + 0.5, 0.0, 1.0); }

struct LidShape {
  double half_w;     // corner half-distance
  double a_up, a_low;
  double shear;      // x' = x - shear*y
  double parab(double xp) const {
    double t = xp / half_w;
    return 1.0 - t * t;
  }
  double upper(double xp) const { return -a_up * std::max(parab(xp), 0.0); }
  double lower(double xp) const { return a_low * std::max(parab(xp), 0.0); }
  // signed distance-like margin to the lid opening (positive inside)
  double margin(const Vec2& q) const {
    double xp = q.x - shear * q.y;
    if (std::abs(xp) >= half_w) return -(std::abs(xp) - half_w + 0.5);
    return std::min(q.y - upper(xp), lower(xp) - q.y);
  }
};

}  // namespace detail

struct RenderResult {
  Image image;
  EyeLandmarks landmarks;
};

inline RenderResult render_eye_patch(const GazeVector& gaze,
                                     const HeadPose6D& head, EyeSide side,
                                     const AppearanceParams& app,
                                     const CorpusConfig& cfg) {
  const int W = cfg.patch_w, H = cfg.patch_h;
  const double r = cfg.eyeball_radius_px;
  const double halfD = cfg.corner_dist_px / 2.0;

  if (!(gaze.v.z < 0))
    fail("render_range", "gaze does not face the camera (z >= 0)");

  // eyeball center in the patch, shifted by head translation
  Vec2 center{(W - 1) / 2.0 + head.translation.x * cfg.trans_px_per_unit,
              (H - 1) / 2.0 + head.translation.y * cfg.trans_px_per_unit};

  // camera-frame head roll appears negated in the mirror-view patch
  double rho = -head.rotation.z;
  double cr = std::cos(rho), sr = std::sin(rho);

  detail::LidShape lid;
  lid.half_w = halfD;
  lid.a_up = cfg.aperture_px * app.aperture_factor *
             (1.0 - 0.3 * std::abs(std::sin(head.rotation.x)));
  lid.a_low = 0.8 * lid.a_up;
  lid.shear = 0.6 * std::sin(head.rotation.y);

  // pupil placement: exact inverse of los_pseudo_gaze (mirror view)
  Vec2 pupil_off{-gaze.v.x * r, gaze.v.y * r};
  Vec2 pupil_pt = center + pupil_off;

  // renderable check: the pupil disc must stay on the visible sphere and
  // inside the lid opening
  {
    double off = pupil_off.norm();
    if (off + cfg.pupil_radius_px > 0.98 * r)
      fail("render_range", "pupil would leave the sclera (offset " +
                               std::to_string(off) + "px)");
    Vec2 q{cr * pupil_off.x + sr * pupil_off.y,
           -sr * pupil_off.x + cr * pupil_off.y};
    if (lid.margin(q) < 0.6 * cfg.pupil_radius_px)
      fail("render_range", "pupil would be occluded by the eyelids");
  }

  // inner corner: nasal side; +x' for a left eye in mirror view
  double inner_xp = side == EyeSide::L ? halfD : -halfD;
  auto lid_to_image = [&](const Vec2& q) -> Vec2 {
    return {center.x + cr * q.x - sr * q.y, center.y + sr * q.x + cr * q.y};
  };
  Vec2 inner_pt = lid_to_image({inner_xp, 0.0});
  Vec2 outer_pt = lid_to_image({-inner_xp, 0.0});
  Vec2 illum_dir{(outer_pt.x - inner_pt.x) / cfg.corner_dist_px,
                 (outer_pt.y - inner_pt.y) / cfg.corner_dist_px};

  Image im = Image::zeros(W, H, 1);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      Vec2 p{static_cast<double>(x), static_cast<double>(y)};
      Vec2 rel = p - center;
      Vec2 q{cr * rel.x + sr * rel.y, -sr * rel.x + cr * rel.y};

      double ramp =
          app.illum_slope * (rel.x * illum_dir.x + rel.y * illum_dir.y) /
          halfD * 0.5;
      double skin = app.skin_level * (1.0 - 0.08 * (p.y - (H - 1) / 2.0) / H) +
                    ramp * app.skin_level;

      double open = detail::coverage(lid.margin(q));
      double v = skin;
      if (open > 0) {
        double ball = detail::coverage(r - rel.norm());
        double sclera = app.sclera_level * (0.85 + 0.15 * ball) +
                        ramp * app.sclera_level;
        double inside = sclera;
        double d_pupil = (p - pupil_pt).norm();
        double iris_cov = detail::coverage(cfg.iris_radius_px - d_pupil);
        if (iris_cov > 0) {
          double ring = d_pupil / cfg.iris_radius_px;
          double iris = app.iris_level * (0.8 + 0.35 * ring * ring);
          double pupil_cov = detail::coverage(cfg.pupil_radius_px - d_pupil);
          double iris_v = iris * (1 - pupil_cov) + app.pupil_level * pupil_cov;
          inside = inside * (1 - iris_cov) + iris_v * iris_cov;
        }
        v = skin * (1 - open) + inside * open;
      }

      // tear-duct marker: disc plus a fixed-chirality dot (drawn in image
      // coordinates, so mirrored renders differ exactly here)
      double d_duct = (p - inner_pt).norm();
      double duct_cov = detail::coverage(2.0 - d_duct);
      if (duct_cov > 0)
        v = v * (1 - duct_cov) + app.duct_level * duct_cov;
      Vec2 dot_pt{inner_pt.x + 1.3, inner_pt.y + 0.9};
      double dot_cov = detail::coverage(0.9 - (p - dot_pt).norm());
      if (dot_cov > 0)
        v = v * (1 - dot_cov) + (app.duct_level * 0.5) * dot_cov;

      im.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }

  // landmarks consistent with the rendered geometry, 1/16-px fixed point
  EyeLandmarks lm;
  auto q16 = [](const Vec2& p) -> Vec2 {
    return {detail::quant16(p.x), detail::quant16(p.y)};
  };
  lm.inner = q16(inner_pt);
  lm.outer = q16(outer_pt);
  for (double xp : {-halfD / 2, 0.0, halfD / 2}) {
    double yq = lid.upper(xp);
    lm.contour.push_back(q16(lid_to_image({xp + lid.shear * yq, yq})));
  }
  for (double xp : {-halfD / 2, 0.0, halfD / 2}) {
    double yq = lid.lower(xp);
    lm.contour.push_back(q16(lid_to_image({xp + lid.shear * yq, yq})));
  }
  lm.pupil = q16(pupil_pt);
  return {std::move(im), std::move(lm)};
}

// ---------------------------------------------------------------------------
// Corpus generation

namespace detail {

struct SubjectTraits {
  double bias_pitch_deg, bias_yaw_deg;
  AppearanceParams base;
};

inline SubjectTraits subject_traits(const CorpusConfig& cfg, int subject_idx) {
  std::mt19937_64 rng(derive_seed(cfg.seed, 0x5ab7ec70000ull + subject_idx));
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  SubjectTraits t;
  double psi = angle(rng);
  t.bias_pitch_deg = cfg.subject_bias_deg * std::sin(psi);
  t.bias_yaw_deg = cfg.subject_bias_deg * std::cos(psi);
  t.base.iris_level =
      std::clamp(0.30 + cfg.jitter.iris_darkness * uni(rng), 0.12, 0.50);
  t.base.sclera_level =
      std::clamp(0.88 + cfg.jitter.sclera_brightness * uni(rng), 0.70, 0.98);
  t.base.skin_level =
      std::clamp(0.62 + 0.5 * cfg.jitter.sclera_brightness * uni(rng), 0.5,
                 0.8);
  t.base.illum_slope = cfg.jitter.illumination * uni(rng);
  return t;
}

}  // namespace detail

inline std::string subject_name(int idx) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%02d", idx + 1);
  return buf;
}

// Deterministic in-memory corpus; generate_corpus() adds the on-disk layout.
inline std::vector<EyeSample> synth_samples(const CorpusConfig& cfg) {
  if (cfg.n_subjects < 1 || cfg.samples_per_subject < 1)
    fail("config", "corpus must have at least one subject and one sample");
  std::vector<EyeSample> out;
  out.reserve(static_cast<size_t>(cfg.n_subjects) * cfg.samples_per_subject);

  for (int s = 0; s < cfg.n_subjects; ++s) {
    detail::SubjectTraits traits = detail::subject_traits(cfg, s);
    for (int i = 0; i < cfg.samples_per_subject; ++i) {
      uint64_t stream = static_cast<uint64_t>(s) * cfg.samples_per_subject + i;
      std::mt19937_64 rng(derive_seed(cfg.seed, stream));
      std::uniform_real_distribution<double> uni(-1.0, 1.0);

      double pitch_deg =
          uni(rng) * cfg.pitch_range_deg + traits.bias_pitch_deg;
      double yaw_deg = uni(rng) * cfg.yaw_range_deg + traits.bias_yaw_deg;
      GazeVector gaze =
          pitchyaw_to_vector({deg2rad(pitch_deg), deg2rad(yaw_deg)});

      HeadPose6D head;
      head.rotation.x = deg2rad(uni(rng) * cfg.head_pitch_range_deg);
      head.rotation.y = deg2rad(uni(rng) * cfg.head_yaw_range_deg);
      head.rotation.z = deg2rad(uni(rng) * cfg.head_roll_range_deg);
      head.translation.x = uni(rng) * cfg.head_trans_range;
      head.translation.y = uni(rng) * cfg.head_trans_range;
      head.translation.z = uni(rng) * cfg.head_trans_range;

      AppearanceParams app = traits.base;
      app.iris_level = std::clamp(app.iris_level + 0.02 * uni(rng), 0.1, 0.55);
      app.illum_slope += 0.05 * uni(rng);
      app.aperture_factor = 1.0 + cfg.jitter.eyelid_aperture * uni(rng);

      EyeSide side = (i % 2 == 0) ? EyeSide::L : EyeSide::R;

      EyeSample sample;
      sample.subject = subject_name(s);
      {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s_%04d", sample.subject.c_str(), i);
        sample.id = buf;
      }
      sample.side = side;
      sample.image_path = "images/" + sample.id + ".png";
      RenderResult rr = render_eye_patch(gaze, head, side, app, cfg);
      sample.image = std::move(rr.image);
      sample.landmarks = std::move(rr.landmarks);
      sample.gt_gaze = gaze;
      sample.gt_head = head;
      sample.gt_zone =
          zone_of_gaze(gaze, cfg.zones, cfg.pitch_range_deg,
                       cfg.yaw_range_deg);
      out.push_back(std::move(sample));
    }
  }
  return out;
}

// Renders the corpus to out_dir: images/<id>.png plus manifest.jsonl.
// Bit-reproducible for a fixed cfg.seed.
inline std::vector<EyeSample> generate_corpus(
    const CorpusConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) fail("io", "cannot create corpus directory: " + out_dir.string());

  std::vector<EyeSample> samples = synth_samples(cfg);
  for (const EyeSample& s : samples) write_png(out_dir / s.image_path, *s.image);
  write_manifest(out_dir / "manifest.jsonl", samples);
  return samples;
}

}  // namespace mtgaze
