#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "proptrack/types.hpp"

namespace proptrack {

/// Intersection over union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

struct ClearMotResult {
  int false_positives = 0;
  int false_negatives = 0;
  int id_switches = 0;
  int total_gt = 0;
  int mostly_tracked = 0;  // coverage >= 80%
  int mostly_lost = 0;     // coverage <= 20%
  int gt_tracks = 0;
  double mota = 0.0;
};

/// Frame-by-frame CLEAR protocol: previous matches persist while still above
/// the threshold; the remainder is matched by maximum cardinality, then
/// maximum total IoU. Throws when the ground truth is empty (MOTA undefined).
ClearMotResult compute_clear_mot(const std::vector<Trajectory>& ground_truth,
                                 const std::vector<Trajectory>& predictions,
                                 double iou_threshold = 0.5);

struct IdMetricsResult {
  double idf1 = 1.0;  // vacuous 1.0 for empty-vs-empty, by convention
  long idtp = 0;
  long idfp = 0;
  long idfn = 0;
};

/// Identity metrics under a global one-to-one track matching that maximizes
/// per-frame agreement.
IdMetricsResult compute_idf1(const std::vector<Trajectory>& ground_truth,
                             const std::vector<Trajectory>& predictions,
                             double iou_threshold = 0.5);

struct SequenceMetrics {
  std::string name;
  ClearMotResult clear;
  IdMetricsResult id;
};

struct MetricsReport {
  std::vector<SequenceMetrics> sequences;
  ClearMotResult overall_clear;
  IdMetricsResult overall_id;
};

MetricsReport evaluate_sequences(
    const std::vector<std::pair<std::string, std::pair<std::vector<Trajectory>,
                                                       std::vector<Trajectory>>>>& sequences,
    double iou_threshold = 0.5);

std::vector<Trajectory> gt_to_trajectories(const std::vector<GroundTruthEntry>& entries);

std::string format_report(const MetricsReport& report);
void write_report_kv(const MetricsReport& report, std::ostream& out);

}  // namespace proptrack
