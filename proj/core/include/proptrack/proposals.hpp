#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "proptrack/graph.hpp"

namespace proptrack {

struct Cluster {
  std::vector<int> member_vertex_ids;  // sorted
  int iteration = 0;
};

/// A candidate trajectory flattened to its base tracklet ids, so scoring and
/// inference never reason about iteration-local vertex ids.
struct Proposal {
  int proposal_id = 0;
  std::vector<int> base_tracklets;  // sorted unique
  int created_iteration = 0;
  int size_in_detections = 0;
};

struct ProposalSet {
  std::vector<Proposal> proposals;  // deduplicated by tracklet set
};

/// True iff every member pair has a positive time gap (no overlap).
bool compatible(const std::vector<int>& member_vertex_ids, const std::vector<Vertex>& vertices);

/// One threshold round: drop edges below tau, split into connected
/// components, and accept the components that are small enough and
/// temporally compatible. Accepted and remainder together partition the
/// graph's vertices.
struct ClusterSplit {
  std::vector<std::vector<int>> accepted;
  std::vector<std::vector<int>> remainder;
};
ClusterSplit find_clusters(const AffinityGraph& graph, double tau, int max_cluster_size,
                           bool strict_size);

/// Raises tau by threshold_step on the remainder subgraph until everything is
/// accepted; terminates once tau exceeds the largest affinity because
/// singleton components always pass.
std::vector<Cluster> cluster_nodes(const AffinityGraph& graph, const Config& config,
                                   int iteration);

/// Merges each cluster into one vertex: tracklet union, detection-weighted
/// mean embedding, covering time span, endpoint boxes from the earliest and
/// latest members. Singletons pass through with fresh ids.
std::vector<Vertex> update_nodes(const std::vector<Cluster>& clusters,
                                 const std::vector<Vertex>& vertices);

struct GenerationStats {
  std::vector<int> clusters_per_iteration;
  std::vector<int> new_proposals_per_iteration;
  int iterations_run = 0;
};

/// Iterative proposal generation: build graph, cluster, accumulate flattened
/// clusters, merge, repeat. Every tracklet is seeded as a singleton proposal,
/// and the loop stops early only when an iteration merges nothing after the
/// gating schedule is fully relaxed. The observer, when set, sees each
/// iteration's graph (debug dumps).
using GraphObserver = std::function<void(int iteration, const AffinityGraph&)>;
ProposalSet generate_proposals(const std::vector<Tracklet>& tracklets, const Config& config,
                               GenerationStats* stats = nullptr,
                               const GraphObserver& observer = {});

/// Debug dump, `proposal_id: tracklet ids...` per line.
void dump_proposals(const ProposalSet& set, std::ostream& out);

}  // namespace proptrack
