#pragma once

#include <vector>

#include "proptrack/config.hpp"
#include "proptrack/types.hpp"

namespace proptrack {

/// A chain of detections in strictly consecutive frames, built by
/// frame-to-frame linking. Tracklets are the basic units everything
/// downstream reasons about; gap spanning is the proposal generator's job.
struct Tracklet {
  int tracklet_id = 0;
  std::vector<Detection> detections;
  std::vector<double> mean_embedding;  // arithmetic mean over members

  int size() const { return static_cast<int>(detections.size()); }
  int start_frame() const { return detections.front().frame; }
  int end_frame() const { return detections.back().frame; }
  const BoundingBox& start_box() const { return detections.front().box; }
  const BoundingBox& end_box() const { return detections.back().box; }
};

/// Singleton-span affinity: mean of appearance, temporal and positional
/// similarity; -infinity for a same-frame pair.
double detection_affinity(const Detection& a, const Detection& b, const Config& config);

/// Frame-by-frame linking with the dual-threshold rule: an assignment-chosen
/// link is accepted only if its affinity reaches theta1 and beats every rival
/// in its row and column by at least theta2. Unlinked detections start new
/// tracklets; a tracklet whose link fails is closed for good.
std::vector<Tracklet> build_tracklets(const std::vector<Detection>& detections,
                                      const Config& config);

}  // namespace proptrack
