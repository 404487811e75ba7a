#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <vector>

#include "proptrack/config.hpp"
#include "proptrack/tracklet.hpp"

namespace proptrack {

inline constexpr int kTimeOverlap = -1;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// A tracklet or a merged cluster of tracklets acting as a graph node.
/// The time span is the covering interval [start_frame, end_frame]; merged
/// vertices may have interior gaps, which still count as occupied for
/// overlap purposes.
struct Vertex {
  int vertex_id = 0;
  std::vector<int> member_tracklets;  // sorted, non-empty
  std::vector<double> embedding;      // detection-count-weighted mean
  int detection_count = 0;
  int start_frame = 0;
  int end_frame = 0;
  BoundingBox start_box;
  BoundingBox end_box;

  /// Global constant-velocity estimate from the endpoint box centers;
  /// zero for single-frame vertices.
  std::array<double, 2> velocity() const;
};

struct Edge {
  int i = 0;  // i < j by vertex id
  int j = 0;
  double affinity = 0.0;
};

struct AffinityGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;  // sorted by (i, j), one entry per unordered pair
};

/// Minimum gap between two spans: kTimeOverlap when the intervals intersect,
/// otherwise later.start - earlier.end (>= 1 for integer frames).
int time_gap(int start_a, int end_a, int start_b, int end_b);
int time_gap(const Vertex& a, const Vertex& b);

/// Last box center extrapolated to target_frame under constant velocity.
std::array<double, 2> predict_position(const Vertex& v, int target_frame);

/// Euclidean distance from `earlier`'s position predicted at `later`'s start
/// frame to `later`'s starting box center.
double spatial_distance(const Vertex& earlier, const Vertex& later);

/// Eq-style combined affinity with `vi` the earlier-ending vertex; kNegInf
/// absorbs the whole sum when the spans overlap.
double edge_affinity(const Vertex& vi, const Vertex& vj, const Config& config);

/// edge_affinity with the orientation resolved from the end frames.
double pair_affinity(const Vertex& a, const Vertex& b, const Config& config);

/// Gating radii for one iteration (1-based); early iterations are strict and
/// relax toward the configured base values.
struct Gate {
  double tau_t = 0.0;
  double tau_p = 0.0;
  double tau_a = 0.0;
};
Gate gate_for_iteration(const Config& config, int iteration);

/// Ids of vertices within the gate of v: positive time gap at most tau_t,
/// predicted-position distance at most tau_p, cosine distance at most tau_a.
std::vector<int> valid_neighbors(const Vertex& v, const std::vector<Vertex>& vertices,
                                 const Gate& gate);

/// Gated graph where each vertex contributes its top-K neighbors by affinity
/// (ties toward the smaller vertex id). Vertex ids must equal their index.
AffinityGraph build_affinity_graph(std::vector<Vertex> vertices, const Config& config,
                                   int iteration);

Vertex make_singleton_vertex(const Detection& d, int vertex_id = 0);
Vertex tracklet_to_vertex(const Tracklet& t, int vertex_id);

/// Debug edge list, `i,j,affinity` per line.
void dump_graph(const AffinityGraph& graph, std::ostream& out);

}  // namespace proptrack
