#pragma once

// Pluggable pseudo-labelers. The oracle reads synthetic ground truth, the
// geometric labeler derives the line-of-sight gaze from stored landmarks,
// and the external labeler consumes precomputed columns from the manifest
// (the slot where real teacher-model outputs plug in).

#include <memory>
#include <string>
#include <vector>

#include "mtgaze/common.hpp"
#include "mtgaze/corpus.hpp"
#include "mtgaze/pseudolabel.hpp"

namespace mtgaze {

class PseudoLabeler {
 public:
  virtual ~PseudoLabeler() = default;
  virtual const char* name() const = 0;
  virtual PseudoLabelSet label(const EyeSample& sample) const = 0;
};

class OracleLabeler : public PseudoLabeler {
 public:
  const char* name() const override { return "oracle"; }

  PseudoLabelSet label(const EyeSample& s) const override {
    if (!s.gt_gaze)
      fail("labeler", "oracle labeler: sample " + s.id + " has no gt_gaze");
    if (!s.gt_head)
      fail("labeler", "oracle labeler: sample " + s.id + " has no gt_head");
    PseudoLabelSet p;
    p.pseudo_gaze = *s.gt_gaze;
    p.head_pose = *s.gt_head;
    p.side = s.side;
    p.source = LabelSource::oracle;
    return p;
  }
};

// Applies los_pseudo_gaze to the stored landmarks. Head pose is taken from
// gt_head when present, otherwise from previously attached pseudo labels;
// at desk scale there is no head-pose estimator to stand in for.
class GeometricLabeler : public PseudoLabeler {
 public:
  explicit GeometricLabeler(double radius_px = 12.0) : radius_px_(radius_px) {}

  const char* name() const override { return "geometric"; }

  PseudoLabelSet label(const EyeSample& s) const override {
    if (s.landmarks.corner_distance() < 1e-9)
      fail("labeler",
           "geometric labeler: sample " + s.id + " has missing or degenerate "
           "landmarks");
    PseudoLabelSet p;
    p.pseudo_gaze = los_pseudo_gaze(s.landmarks, radius_px_);
    if (s.gt_head)
      p.head_pose = *s.gt_head;
    else if (s.pseudo)
      p.head_pose = s.pseudo->head_pose;
    else
      fail("labeler",
           "geometric labeler: sample " + s.id + " has no head-pose source");
    p.side = s.side;
    p.source = LabelSource::geometric;
    return p;
  }

 private:
  double radius_px_;
};

class ExternalLabeler : public PseudoLabeler {
 public:
  const char* name() const override { return "external"; }

  PseudoLabelSet label(const EyeSample& s) const override {
    if (!s.pseudo)
      fail("labeler", "external labeler: sample " + s.id +
                          " has no pseudo_gaze/pseudo_head columns");
    PseudoLabelSet p = *s.pseudo;
    p.side = s.side;
    p.source = LabelSource::external;
    return p;
  }
};

inline std::unique_ptr<PseudoLabeler> make_labeler(const std::string& kind,
                                                   double radius_px = 12.0) {
  if (kind == "oracle") return std::make_unique<OracleLabeler>();
  if (kind == "geometric")
    return std::make_unique<GeometricLabeler>(radius_px);
  if (kind == "external") return std::make_unique<ExternalLabeler>();
  fail("config", "unknown labeler '" + kind +
                     "' (expected oracle, geometric or external)");
}

inline PseudoLabelSet label_sample(const PseudoLabeler& labeler,
                                   const EyeSample& sample) {
  return labeler.label(sample);
}

struct LabelAllResult {
  int labeled = 0;
  std::vector<std::string> dropped_ids;  // blink/off-sphere samples
};

// Attach pseudo labels to every sample. Off-sphere (blink) samples are
// dropped from the collection rather than clamped; hard labeler errors
// propagate.
inline LabelAllResult label_all(const PseudoLabeler& labeler,
                                std::vector<EyeSample>& samples) {
  LabelAllResult res;
  std::vector<EyeSample> kept;
  kept.reserve(samples.size());
  for (EyeSample& s : samples) {
    try {
      s.pseudo = labeler.label(s);
    } catch (const Error& e) {
      if (e.code() == "off_sphere") {
        res.dropped_ids.push_back(s.id);
        continue;
      }
      throw;
    }
    ++res.labeled;
    kept.push_back(std::move(s));
  }
  samples = std::move(kept);
  if (!res.dropped_ids.empty())
    warn("dropped " + std::to_string(res.dropped_ids.size()) +
         " off-sphere (blink) samples during pseudo-labeling");
  return res;
}

}  // namespace mtgaze
