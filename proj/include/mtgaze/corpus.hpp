#pragma once

// Eye-patch sample records, the line-delimited manifest format, reproducible
// split assignment and gaze-zone derivation.
//
// Manifest: UTF-8, one JSON record per line. Fields: id, subject, side,
// image_path, landmarks (flattened x,y list: inner, outer, contour...),
// pupil (x,y), gt_gaze (3 reals, optional), gt_head (6 reals, optional),
// gt_zone (int, optional), pseudo_gaze (3 reals, optional), pseudo_head
// (6 reals, optional), noise_record (object, optional). Images are 8-bit
// PNG named by sample id.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtgaze/common.hpp"
#include "mtgaze/geometry.hpp"
#include "mtgaze/image.hpp"
#include "mtgaze/pseudolabel.hpp"

namespace mtgaze {

using ojson = nlohmann::ordered_json;

struct EyeSample {
  std::string id;
  std::string subject;
  EyeSide side = EyeSide::L;
  std::string image_path;       // relative to the manifest directory
  std::optional<Image> image;   // loaded lazily
  EyeLandmarks landmarks;
  std::optional<GazeVector> gt_gaze;
  std::optional<HeadPose6D> gt_head;
  std::optional<int> gt_zone;
  std::optional<PseudoLabelSet> pseudo;
};

// Load (and cache) the sample's image relative to `root`.
inline const Image& sample_image(EyeSample& s,
                                 const std::filesystem::path& root) {
  if (!s.image) {
    std::filesystem::path p = root / s.image_path;
    if (!std::filesystem::exists(p))
      fail("io", "missing image file for sample " + s.id + ": " + p.string());
    s.image = read_png(p);
  }
  return *s.image;
}

// ---------------------------------------------------------------------------
// Splits

enum class SplitPart { train, val, test };

inline const char* split_part_name(SplitPart p) {
  switch (p) {
    case SplitPart::train: return "train";
    case SplitPart::val: return "val";
    default: return "test";
  }
}

inline SplitPart parse_split_part(const std::string& s) {
  if (s == "train") return SplitPart::train;
  if (s == "val") return SplitPart::val;
  if (s == "test") return SplitPart::test;
  fail("config", "invalid split part '" + s + "'");
}

struct SplitSpec {
  double train = 0.8, val = 0.1, test = 0.1;
  uint64_t seed = 0;
};

// Pure function of (id, seed): partitions are stable across runs and do not
// depend on manifest order.
inline SplitPart split_assign(const std::string& id, const SplitSpec& spec) {
  double total = spec.train + spec.val + spec.test;
  if (!(total > 0)) fail("config", "split fractions must sum to > 0");
  uint64_t h = fnv1a64(id, fnv1a64(&spec.seed, sizeof(spec.seed)));
  double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
  if (u < spec.train / total) return SplitPart::train;
  if (u < (spec.train + spec.val) / total) return SplitPart::val;
  return SplitPart::test;
}

// ---------------------------------------------------------------------------
// Manifest serialization

namespace detail {

inline ojson vec3_json(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }

inline Vec3 vec3_from(const ojson& j, const char* what, int line) {
  if (!j.is_array() || j.size() != 3)
    fail("parse", std::string(what) + " must be a 3-array (manifest line " +
                      std::to_string(line) + ")");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline ojson head_json(const HeadPose6D& h) {
  return ojson::array({h.rotation.x, h.rotation.y, h.rotation.z,
                       h.translation.x, h.translation.y, h.translation.z});
}

inline HeadPose6D head_from(const ojson& j, const char* what, int line) {
  if (!j.is_array() || j.size() != 6)
    fail("parse", std::string(what) + " must be a 6-array (manifest line " +
                      std::to_string(line) + ")");
  return {{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()},
          {j[3].get<double>(), j[4].get<double>(), j[5].get<double>()}};
}

}  // namespace detail

inline ojson sample_to_json(const EyeSample& s) {
  ojson j;
  j["id"] = s.id;
  j["subject"] = s.subject;
  j["side"] = std::string(1, side_char(s.side));
  j["image_path"] = s.image_path;
  ojson lms = ojson::array();
  auto push_pt = [&lms](const Vec2& p) {
    lms.push_back(p.x);
    lms.push_back(p.y);
  };
  push_pt(s.landmarks.inner);
  push_pt(s.landmarks.outer);
  for (const Vec2& p : s.landmarks.contour) push_pt(p);
  j["landmarks"] = lms;
  j["pupil"] = ojson::array({s.landmarks.pupil.x, s.landmarks.pupil.y});
  if (s.gt_gaze) j["gt_gaze"] = detail::vec3_json(s.gt_gaze->v);
  if (s.gt_head) j["gt_head"] = detail::head_json(*s.gt_head);
  if (s.gt_zone) j["gt_zone"] = *s.gt_zone;
  if (s.pseudo) {
    j["pseudo_gaze"] = detail::vec3_json(s.pseudo->pseudo_gaze.v);
    j["pseudo_head"] = detail::head_json(s.pseudo->head_pose);
    if (s.pseudo->noise) {
      const NoiseRecord& nr = *s.pseudo->noise;
      ojson n;
      n["kind"] = nr.kind;
      n["gaze_sigma_deg"] = nr.gaze_sigma_deg;
      n["pose_sigma_rad"] = nr.pose_sigma_rad;
      n["large_corrupt_deg"] = nr.large_corrupt_deg;
      n["corrupted"] = nr.corrupted;
      n["seed"] = nr.seed;
      j["noise_record"] = n;
    }
  }
  return j;
}

inline EyeSample sample_from_json(const ojson& j, int line) {
  auto require = [&](const char* key) -> const ojson& {
    if (!j.contains(key))
      fail("parse", "manifest line " + std::to_string(line) +
                        ": missing field '" + key + "'");
    return j.at(key);
  };
  EyeSample s;
  s.id = require("id").get<std::string>();
  s.subject = require("subject").get<std::string>();
  s.side = parse_side(require("side").get<std::string>());
  s.image_path = require("image_path").get<std::string>();

  const ojson& lms = require("landmarks");
  if (!lms.is_array() || lms.size() < 12 || lms.size() % 2 != 0)
    fail("parse", "manifest line " + std::to_string(line) +
                      ": landmarks must be a flattened x,y list of >= 6 "
                      "points");
  auto pt = [&lms](size_t i) -> Vec2 {
    return {lms[2 * i].get<double>(), lms[2 * i + 1].get<double>()};
  };
  s.landmarks.inner = pt(0);
  s.landmarks.outer = pt(1);
  for (size_t i = 2; i < lms.size() / 2; ++i)
    s.landmarks.contour.push_back(pt(i));

  const ojson& pupil = require("pupil");
  if (!pupil.is_array() || pupil.size() != 2)
    fail("parse", "manifest line " + std::to_string(line) +
                      ": pupil must be an [x,y] pair");
  s.landmarks.pupil = {pupil[0].get<double>(), pupil[1].get<double>()};

  if (j.contains("gt_gaze"))
    s.gt_gaze = GazeVector::unit(detail::vec3_from(j["gt_gaze"], "gt_gaze",
                                                   line));
  if (j.contains("gt_head"))
    s.gt_head = detail::head_from(j["gt_head"], "gt_head", line);
  if (j.contains("gt_zone")) s.gt_zone = j["gt_zone"].get<int>();

  if (j.contains("pseudo_gaze") || j.contains("pseudo_head")) {
    PseudoLabelSet p;
    p.side = s.side;
    p.source = LabelSource::external;
    if (j.contains("pseudo_gaze"))
      p.pseudo_gaze =
          GazeVector::unit(detail::vec3_from(j["pseudo_gaze"], "pseudo_gaze",
                                             line));
    else
      fail("parse", "manifest line " + std::to_string(line) +
                        ": pseudo_head present without pseudo_gaze");
    if (j.contains("pseudo_head"))
      p.head_pose = detail::head_from(j["pseudo_head"], "pseudo_head", line);
    else
      fail("parse", "manifest line " + std::to_string(line) +
                        ": pseudo_gaze present without pseudo_head");
    if (j.contains("noise_record")) {
      const ojson& n = j["noise_record"];
      NoiseRecord nr;
      nr.kind = n.value("kind", std::string("gaussian"));
      nr.gaze_sigma_deg = n.value("gaze_sigma_deg", 0.0);
      nr.pose_sigma_rad = n.value("pose_sigma_rad", 0.0);
      nr.large_corrupt_deg = n.value("large_corrupt_deg", 0.0);
      nr.corrupted = n.value("corrupted", false);
      nr.seed = n.value("seed", uint64_t{0});
      p.noise = nr;
    }
    s.pseudo = p;
  }
  return s;
}

inline void write_manifest(const std::filesystem::path& path,
                           const std::vector<EyeSample>& samples) {
  std::ofstream out(path);
  if (!out) fail("io", "cannot write manifest: " + path.string());
  std::set<std::string> seen;
  for (const EyeSample& s : samples) {
    if (!seen.insert(s.id).second)
      fail("io", "duplicate sample id in manifest: " + s.id);
    out << sample_to_json(s).dump() << "\n";
  }
  if (!out) fail("io", "write failed: " + path.string());
}

struct SplitSelect {
  SplitSpec spec;
  SplitPart part = SplitPart::train;
};

struct ManifestFilters {
  std::optional<std::set<std::string>> subjects;
  std::optional<EyeSide> side;
  std::optional<SplitSelect> split;
};

// Rows are returned in manifest order; images stay on disk until accessed
// through sample_image().
inline std::vector<EyeSample> load_manifest(
    const std::filesystem::path& path, const ManifestFilters& filters = {}) {
  std::ifstream in(path);
  if (!in) fail("io", "cannot open manifest: " + path.string());
  std::vector<EyeSample> out;
  std::set<std::string> seen;
  std::string linebuf;
  int line = 0;
  while (std::getline(in, linebuf)) {
    ++line;
    if (linebuf.empty()) continue;
    ojson j = ojson::parse(linebuf, nullptr, false);
    if (j.is_discarded())
      fail("parse",
           "manifest line " + std::to_string(line) + ": invalid JSON record");
    EyeSample s = sample_from_json(j, line);
    if (!seen.insert(s.id).second)
      fail("parse", "manifest line " + std::to_string(line) +
                        ": duplicate id " + s.id);
    if (filters.subjects && !filters.subjects->count(s.subject)) continue;
    if (filters.side && s.side != *filters.side) continue;
    if (filters.split &&
        split_assign(s.id, filters.split->spec) != filters.split->part)
      continue;
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gaze zones

// Tile (pitch, yaw) over the given symmetric corpus ranges into a
// sqrt(Z) x sqrt(Z) grid, row-major (row = pitch bin from lowest pitch,
// col = yaw bin from lowest yaw).
inline int zone_of_gaze(const GazeVector& g, int zones, double pitch_range_deg,
                        double yaw_range_deg) {
  int m = static_cast<int>(std::lround(std::sqrt(double(zones))));
  if (m * m != zones || zones < 1)
    fail("config", "zone count must be a perfect square, got " +
                       std::to_string(zones));
  PitchYaw py = vector_to_pitchyaw(g);
  auto bin = [m](double v, double range) {
    double t = (v + range) / (2.0 * range);
    int b = static_cast<int>(std::floor(t * m));
    return std::clamp(b, 0, m - 1);
  };
  int row = bin(rad2deg(py.pitch), pitch_range_deg);
  int col = bin(rad2deg(py.yaw), yaw_range_deg);
  return row * m + col;
}

// Mirror of a zone label under horizontal flip (yaw column reversed).
inline int flip_zone(int zone, int zones) {
  int m = static_cast<int>(std::lround(std::sqrt(double(zones))));
  int row = zone / m, col = zone % m;
  return row * m + (m - 1 - col);
}

inline void derive_zone_labels(std::vector<EyeSample>& samples, int zones,
                               double pitch_range_deg, double yaw_range_deg) {
  for (EyeSample& s : samples) {
    if (!s.gt_gaze)
      fail("config", "derive_zone_labels: sample " + s.id + " has no gt_gaze");
    s.gt_zone = zone_of_gaze(*s.gt_gaze, zones, pitch_range_deg,
                             yaw_range_deg);
  }
}

}  // namespace mtgaze
