#include "proptrack/scoring.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "proptrack/metrics.hpp"

namespace proptrack {

GtLabeling match_detections_to_gt(const std::vector<Detection>& detections,
                                  const std::vector<GroundTruthEntry>& ground_truth,
                                  double iou_threshold) {
  GtLabeling labeling;
  std::map<int, std::vector<const GroundTruthEntry*>> gt_by_frame;
  for (const auto& e : ground_truth) {
    gt_by_frame[e.frame].push_back(&e);
    ++labeling.gt_detection_counts[e.identity];
  }
  std::map<int, std::vector<const Detection*>> det_by_frame;
  for (const auto& d : detections) det_by_frame[d.frame].push_back(&d);

  for (const auto& [frame, dets] : det_by_frame) {
    const auto git = gt_by_frame.find(frame);
    if (git == gt_by_frame.end()) continue;
    const auto& gts = git->second;

    struct Candidate {
      double overlap;
      int det_index;
      int identity;
      const Detection* det;
    };
    std::vector<Candidate> candidates;
    for (const auto* d : dets)
      for (const auto* g : gts) {
        const double o = iou(d->box, g->box);
        if (o >= iou_threshold) candidates.push_back({o, d->index_in_frame, g->identity, d});
      }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.overlap != b.overlap) return a.overlap > b.overlap;
      if (a.det_index != b.det_index) return a.det_index < b.det_index;
      return a.identity < b.identity;
    });

    std::set<int> used_dets;
    std::set<int> used_identities;
    for (const auto& c : candidates) {
      if (used_dets.count(c.det_index) || used_identities.count(c.identity)) continue;
      used_dets.insert(c.det_index);
      used_identities.insert(c.identity);
      labeling.detection_identity[{frame, c.det_index}] = c.identity;
    }
  }
  return labeling;
}

namespace {

// Shared by label_proposal and the augmentation path: labels for an explicit
// detection set.
ProposalLabel label_detection_set(const std::vector<const Detection*>& detections,
                                  const GtLabeling& labeling) {
  std::map<int, int> counts;  // identity -> hits; 0 stands for NONE
  for (const auto* d : detections) {
    const auto it = labeling.detection_identity.find({d->frame, d->index_in_frame});
    ++counts[it == labeling.detection_identity.end() ? 0 : it->second];
  }

  int matched_total = 0;
  for (const auto& [id, n] : counts)
    if (id > 0) matched_total += n;
  if (matched_total == 0) return {false, 0.0, 0.0};

  const bool single_identity = counts.size() == 1;  // implies the one label is real
  int major = 0, major_count = 0;
  for (const auto& [id, n] : counts)
    if (id > 0 && n > major_count) {  // ties resolve to the smaller id (map order)
      major = id;
      major_count = n;
    }
  const auto total_it = labeling.gt_detection_counts.find(major);
  const double gt_total =
      total_it == labeling.gt_detection_counts.end() ? 0.0 : total_it->second;

  ProposalLabel label;
  label.precision = single_identity ? 1.0 : 0.0;
  label.pure = single_identity;
  label.recall = gt_total > 0.0 ? static_cast<double>(major_count) / gt_total : 0.0;
  return label;
}

std::vector<const Detection*> proposal_detections(const Proposal& proposal,
                                                  const std::vector<Tracklet>& tracklets) {
  std::vector<const Detection*> out;
  for (int id : proposal.base_tracklets) {
    if (id < 0 || id >= static_cast<int>(tracklets.size()))
      throw std::out_of_range("label_proposal: unknown tracklet id");
    for (const auto& d : tracklets[id].detections) out.push_back(&d);
  }
  return out;
}

}  // namespace

ProposalLabel label_proposal(const Proposal& proposal, const std::vector<Tracklet>& tracklets,
                             const GtLabeling& labeling) {
  return label_detection_set(proposal_detections(proposal, tracklets), labeling);
}

ProposalLabel label_proposal(const Proposal& proposal,
                             const std::vector<GroundTruthEntry>& ground_truth,
                             const std::vector<Detection>& detections,
                             const std::vector<Tracklet>& tracklets) {
  return label_proposal(proposal, tracklets, match_detections_to_gt(detections, ground_truth));
}

double quality_score(const Proposal& proposal, double purity_estimate, const Config& config) {
  return static_cast<double>(proposal.size_in_detections) / config.recall_normalizer +
         config.quality_weight * purity_estimate;
}

double oracle_score(const Proposal& proposal, const std::vector<Tracklet>& tracklets,
                    const GtLabeling& labeling, const Config& config) {
  return quality_score(proposal, label_proposal(proposal, tracklets, labeling).precision, config);
}

double GcnScorer::purity(const Proposal& proposal) const {
  const auto members = proposal_members(proposal, tracklets_);
  const double p = gcn_forward(model_, build_features(members),
                               proposal_affinity_matrix(members, config_));
  if (config_.binarize_purity) return p > 0.5 ? 1.0 : 0.0;
  return p;
}

TrainingSample make_training_sample(const Proposal& proposal,
                                    const std::vector<Tracklet>& tracklets,
                                    const GtLabeling& labeling, const Config& config) {
  const auto members = proposal_members(proposal, tracklets);
  TrainingSample sample;
  sample.features = build_features(members);
  sample.affinity = proposal_affinity_matrix(members, config);
  sample.label = label_proposal(proposal, tracklets, labeling).pure ? 1.0 : 0.0;
  return sample;
}

std::optional<TrainingSample> augment_sample(const Proposal& proposal,
                                             const std::vector<Tracklet>& tracklets,
                                             const GtLabeling& labeling, const Config& config,
                                             double p_drop, Rng& rng) {
  if (p_drop < 0.0 || p_drop >= 1.0)
    throw std::invalid_argument("augment_sample: p_drop must be in [0,1)");

  std::vector<Vertex> members;
  std::vector<const Detection*> survivors;
  for (int id : proposal.base_tracklets) {
    const Tracklet& t = tracklets.at(id);
    std::vector<const Detection*> kept;
    for (const auto& d : t.detections)
      if (rng.uniform() >= p_drop) kept.push_back(&d);
    if (kept.empty()) continue;  // tracklet vanished entirely

    Vertex v;
    v.vertex_id = static_cast<int>(members.size());
    v.member_tracklets = {t.tracklet_id};
    v.detection_count = static_cast<int>(kept.size());
    v.start_frame = kept.front()->frame;
    v.end_frame = kept.back()->frame;
    v.start_box = kept.front()->box;
    v.end_box = kept.back()->box;
    v.embedding.assign(kept.front()->embedding.size(), 0.0);
    for (const auto* d : kept)
      for (std::size_t k = 0; k < v.embedding.size(); ++k) v.embedding[k] += d->embedding[k];
    for (double& x : v.embedding) x /= static_cast<double>(kept.size());
    members.push_back(std::move(v));
    survivors.insert(survivors.end(), kept.begin(), kept.end());
  }
  if (members.empty()) return std::nullopt;

  std::sort(members.begin(), members.end(),
            [](const Vertex& a, const Vertex& b) { return a.start_frame < b.start_frame; });
  for (std::size_t i = 0; i < members.size(); ++i) members[i].vertex_id = static_cast<int>(i);

  TrainingSample sample;
  sample.features = build_features(members);
  sample.affinity = proposal_affinity_matrix(members, config);
  sample.label = label_detection_set(survivors, labeling).pure ? 1.0 : 0.0;
  return sample;
}

}  // namespace proptrack
