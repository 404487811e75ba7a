#include "proptrack/inference.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace proptrack {

namespace {

bool rank_order(const ScoredProposal& a, const ScoredProposal& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.proposal.size_in_detections != b.proposal.size_in_detections)
    return a.proposal.size_in_detections > b.proposal.size_in_detections;
  return a.proposal.proposal_id < b.proposal.proposal_id;
}

}  // namespace

std::vector<ScoredProposal> rank_proposals(const ProposalSet& set, const ProposalScorer& scorer) {
  std::vector<ScoredProposal> ranked;
  ranked.reserve(set.proposals.size());
  for (const Proposal& p : set.proposals) ranked.push_back({p, scorer.score(p)});
  std::sort(ranked.begin(), ranked.end(), rank_order);
  return ranked;
}

std::map<int, int> deoverlap(const std::vector<ScoredProposal>& ranked) {
  std::map<int, int> assignment;
  int next_track = 1;
  for (const ScoredProposal& sp : ranked) {
    bool claimed = false;
    for (int id : sp.proposal.base_tracklets) {
      if (assignment.count(id)) continue;
      assignment[id] = next_track;
      claimed = true;
    }
    if (claimed) ++next_track;
  }
  return assignment;
}

std::map<int, int> greedy_inference(const ProposalSet& set, const ProposalScorer& scorer,
                                    const std::vector<Tracklet>& tracklets) {
  std::vector<Proposal> remaining = set.proposals;
  std::map<int, int> assignment;
  int next_track = 1;

  while (!remaining.empty()) {
    int best = 0;
    double best_score = scorer.score(remaining[0]);
    for (std::size_t i = 1; i < remaining.size(); ++i) {
      const double s = scorer.score(remaining[i]);
      const ScoredProposal a{remaining[i], s};
      const ScoredProposal b{remaining[best], best_score};
      if (rank_order(a, b)) {
        best = static_cast<int>(i);
        best_score = s;
      }
    }

    const std::vector<int> claimed = remaining[best].base_tracklets;
    for (int id : claimed) assignment[id] = next_track;
    ++next_track;

    std::vector<Proposal> next;
    next.reserve(remaining.size());
    const std::set<int> claimed_set(claimed.begin(), claimed.end());
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (i == static_cast<std::size_t>(best)) continue;
      Proposal p = std::move(remaining[i]);
      std::vector<int> kept;
      for (int id : p.base_tracklets)
        if (!claimed_set.count(id)) kept.push_back(id);
      if (kept.empty()) continue;
      if (kept.size() != p.base_tracklets.size()) {
        p.base_tracklets = std::move(kept);
        p.size_in_detections = 0;
        for (int id : p.base_tracklets) p.size_in_detections += tracklets.at(id).size();
      }
      next.push_back(std::move(p));
    }
    remaining = std::move(next);
  }
  return assignment;
}

std::vector<Trajectory> assemble_trajectories(const std::map<int, int>& track_of_tracklet,
                                              const std::vector<Tracklet>& tracklets) {
  std::map<int, std::vector<const Tracklet*>> groups;
  for (const auto& [tracklet_id, track_id] : track_of_tracklet) {
    if (tracklet_id < 0 || tracklet_id >= static_cast<int>(tracklets.size()))
      throw std::out_of_range("assemble_trajectories: unknown tracklet id");
    groups[track_id].push_back(&tracklets[tracklet_id]);
  }

  std::vector<Trajectory> out;
  out.reserve(groups.size());
  for (auto& [track_id, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const Tracklet* a, const Tracklet* b) { return a->start_frame() < b->start_frame(); });
    Trajectory t;
    t.track_id = track_id;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i > 0 && members[i]->start_frame() <= members[i - 1]->end_frame())
        throw std::runtime_error("assemble_trajectories: temporally conflicting tracklets in track " +
                                 std::to_string(track_id));
      t.detections.insert(t.detections.end(), members[i]->detections.begin(),
                          members[i]->detections.end());
    }
    out.push_back(std::move(t));
  }
  return out;
}

Trajectory interpolate_gaps(const Trajectory& trajectory) {
  Trajectory out;
  out.track_id = trajectory.track_id;
  const auto& dets = trajectory.detections;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (i > 0) {
      const Detection& a = dets[i - 1];
      const Detection& b = dets[i];
      for (int frame = a.frame + 1; frame < b.frame; ++frame) {
        const double t = static_cast<double>(frame - a.frame) /
                         static_cast<double>(b.frame - a.frame);
        Detection d;
        d.sequence_id = a.sequence_id;
        d.frame = frame;
        d.box.x = a.box.x + t * (b.box.x - a.box.x);
        d.box.y = a.box.y + t * (b.box.y - a.box.y);
        d.box.w = a.box.w + t * (b.box.w - a.box.w);
        d.box.h = a.box.h + t * (b.box.h - a.box.h);
        d.confidence = a.confidence + t * (b.confidence - a.confidence);
        d.interpolated = true;
        out.detections.push_back(d);
      }
    }
    out.detections.push_back(dets[i]);
  }
  return out;
}

std::vector<Trajectory> drop_short_tracks(std::vector<Trajectory> trajectories, int min_length) {
  if (min_length <= 1) return trajectories;
  std::vector<Trajectory> out;
  out.reserve(trajectories.size());
  for (auto& t : trajectories)
    if (static_cast<int>(t.detections.size()) >= min_length) out.push_back(std::move(t));
  return out;
}

}  // namespace proptrack
