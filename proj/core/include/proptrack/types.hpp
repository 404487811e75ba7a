#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace proptrack {

/// Axis-aligned box, (x, y) is the top-left corner in image coordinates.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }

  bool valid() const {
    return w > 0.0 && h > 0.0 && std::isfinite(x) && std::isfinite(y) &&
           std::isfinite(w) && std::isfinite(h);
  }
};

/// One bounding-box observation at one frame. The appearance embedding is
/// attached from a sidecar table after parsing; `indexed` detections within a
/// frame are ranked canonically (see io.hpp).
struct Detection {
  int sequence_id = 0;
  int frame = 0;  // 1-based
  int index_in_frame = 0;
  BoundingBox box;
  double confidence = 1.0;
  std::vector<double> embedding;
  bool interpolated = false;
};

struct GroundTruthEntry {
  int frame = 0;
  int identity = 0;  // >= 1
  BoundingBox box;
  double visibility = 1.0;
};

/// Final tracking unit: detections strictly increasing in frame.
struct Trajectory {
  int track_id = 0;
  std::vector<Detection> detections;

  int start_frame() const { return detections.empty() ? 0 : detections.front().frame; }
  int end_frame() const { return detections.empty() ? 0 : detections.back().frame; }
};

/// Cosine similarity; 0 when either vector has zero norm.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace proptrack
