#pragma once

#include <map>
#include <vector>

#include "proptrack/proposals.hpp"
#include "proptrack/scoring.hpp"
#include "proptrack/tracklet.hpp"
#include "proptrack/types.hpp"

namespace proptrack {

struct ScoredProposal {
  Proposal proposal;
  double score = 0.0;
};

/// One scoring pass over the set, sorted by descending score; ties break
/// toward the larger proposal, then the smaller proposal id.
std::vector<ScoredProposal> rank_proposals(const ProposalSet& set, const ProposalScorer& scorer);

/// Single-pass de-overlapping: each proposal in rank order claims its
/// not-yet-assigned tracklets under the next track id; empty remainders
/// consume no id. The scorer is never consulted here.
std::map<int, int> deoverlap(const std::vector<ScoredProposal>& ranked);

/// O(N^2) baseline: re-score all remaining proposals each round, assign the
/// best, subtract its tracklets from the rest, drop empties. Tracklets are
/// needed to keep size_in_detections truthful on modified proposals.
std::map<int, int> greedy_inference(const ProposalSet& set, const ProposalScorer& scorer,
                                    const std::vector<Tracklet>& tracklets);

/// Groups tracklets by track id and concatenates detections in time order;
/// rejects temporally conflicting tracklets within one track.
std::vector<Trajectory> assemble_trajectories(const std::map<int, int>& track_of_tracklet,
                                              const std::vector<Tracklet>& tracklets);

/// Linear interpolation of every missing frame strictly inside the span;
/// inserted detections are flagged, originals are untouched.
Trajectory interpolate_gaps(const Trajectory& trajectory);

/// Benchmark-hygiene filter, disabled by min_length <= 1.
std::vector<Trajectory> drop_short_tracks(std::vector<Trajectory> trajectories, int min_length);

}  // namespace proptrack
