#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "proptrack/config.hpp"
#include "proptrack/gcn.hpp"
#include "proptrack/proposals.hpp"
#include "proptrack/tracklet.hpp"
#include "proptrack/types.hpp"

namespace proptrack {

/// Per-detection ground-truth identities from greedy per-frame IoU matching;
/// detections absent from the map are unmatched (NONE).
struct GtLabeling {
  std::map<std::pair<int, int>, int> detection_identity;  // (frame, index) -> identity
  std::map<int, int> gt_detection_counts;                 // identity -> #GT boxes
};
GtLabeling match_detections_to_gt(const std::vector<Detection>& detections,
                                  const std::vector<GroundTruthEntry>& ground_truth,
                                  double iou_threshold = 0.5);

struct ProposalLabel {
  bool pure = false;
  double recall = 0.0;
  double precision = 0.0;  // 1 iff exactly one identity is present
};

ProposalLabel label_proposal(const Proposal& proposal, const std::vector<Tracklet>& tracklets,
                             const GtLabeling& labeling);
/// Convenience overload matching the batch interface; builds the labeling on
/// the fly.
ProposalLabel label_proposal(const Proposal& proposal,
                             const std::vector<GroundTruthEntry>& ground_truth,
                             const std::vector<Detection>& detections,
                             const std::vector<Tracklet>& tracklets);

/// size/C + w * purity; strictly increasing in both arguments.
double quality_score(const Proposal& proposal, double purity_estimate, const Config& config);

/// Quality with the ground-truth binary precision as the purity estimate.
double oracle_score(const Proposal& proposal, const std::vector<Tracklet>& tracklets,
                    const GtLabeling& labeling, const Config& config);

/// Scoring interface used by trajectory inference. Calls are counted so the
/// one-pass and O(N^2) complexity claims are checkable.
class ProposalScorer {
 public:
  virtual ~ProposalScorer() = default;
  double score(const Proposal& proposal) const {
    ++calls_;
    return score_impl(proposal);
  }
  std::size_t call_count() const { return calls_; }
  void reset_call_count() const { calls_ = 0; }

 private:
  virtual double score_impl(const Proposal& proposal) const = 0;
  mutable std::size_t calls_ = 0;
};

class OracleScorer : public ProposalScorer {
 public:
  OracleScorer(GtLabeling labeling, const std::vector<Tracklet>& tracklets, const Config& config)
      : labeling_(std::move(labeling)), tracklets_(tracklets), config_(config) {}

 private:
  double score_impl(const Proposal& proposal) const override {
    return oracle_score(proposal, tracklets_, labeling_, config_);
  }
  GtLabeling labeling_;
  const std::vector<Tracklet>& tracklets_;
  Config config_;
};

class GcnScorer : public ProposalScorer {
 public:
  GcnScorer(GcnModel model, const std::vector<Tracklet>& tracklets, const Config& config)
      : model_(std::move(model)), tracklets_(tracklets), config_(config) {}

  double purity(const Proposal& proposal) const;

 private:
  double score_impl(const Proposal& proposal) const override {
    return quality_score(proposal, purity(proposal), config_);
  }
  GcnModel model_;
  const std::vector<Tracklet>& tracklets_;
  Config config_;
};

TrainingSample make_training_sample(const Proposal& proposal,
                                    const std::vector<Tracklet>& tracklets,
                                    const GtLabeling& labeling, const Config& config);

/// Missed-detection augmentation: drops each detection independently with
/// probability p_drop, rebuilds the surviving sub-tracklets, and recomputes
/// features, affinity and label. Empty results are signalled, not fatal.
std::optional<TrainingSample> augment_sample(const Proposal& proposal,
                                             const std::vector<Tracklet>& tracklets,
                                             const GtLabeling& labeling, const Config& config,
                                             double p_drop, Rng& rng);

}  // namespace proptrack
