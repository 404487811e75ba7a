#include "proptrack/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "proptrack/io.hpp"

namespace proptrack {

std::array<double, 2> Vertex::velocity() const {
  if (end_frame == start_frame) return {0.0, 0.0};
  const double dt = end_frame - start_frame;
  return {(end_box.cx() - start_box.cx()) / dt, (end_box.cy() - start_box.cy()) / dt};
}

int time_gap(int start_a, int end_a, int start_b, int end_b) {
  if (start_a <= end_b && start_b <= end_a) return kTimeOverlap;
  return start_a > end_b ? start_a - end_b : start_b - end_a;
}

int time_gap(const Vertex& a, const Vertex& b) {
  return time_gap(a.start_frame, a.end_frame, b.start_frame, b.end_frame);
}

std::array<double, 2> predict_position(const Vertex& v, int target_frame) {
  const auto vel = v.velocity();
  const double dt = target_frame - v.end_frame;
  return {v.end_box.cx() + vel[0] * dt, v.end_box.cy() + vel[1] * dt};
}

double spatial_distance(const Vertex& earlier, const Vertex& later) {
  const auto pred = predict_position(earlier, later.start_frame);
  return std::hypot(pred[0] - later.start_box.cx(), pred[1] - later.start_box.cy());
}

double edge_affinity(const Vertex& vi, const Vertex& vj, const Config& config) {
  const int gap = time_gap(vi, vj);
  if (gap == kTimeOverlap) return kNegInf;
  const double s_a = cosine_similarity(vi.embedding, vj.embedding);
  const double s_t = std::exp(-static_cast<double>(gap) / config.sigma_t);
  const double s_p = std::exp(-spatial_distance(vi, vj) / config.sigma_p);
  return (s_a + s_t + s_p) / 3.0;
}

double pair_affinity(const Vertex& a, const Vertex& b, const Config& config) {
  return a.end_frame <= b.end_frame ? edge_affinity(a, b, config) : edge_affinity(b, a, config);
}

Gate gate_for_iteration(const Config& config, int iteration) {
  if (iteration < 1) throw std::invalid_argument("gate_for_iteration: iteration is 1-based");
  const auto& mults = config.gate_relaxation;
  const std::size_t idx = std::min<std::size_t>(iteration, mults.size()) - 1;
  const double m = mults[idx];
  return {config.tau_t * m, config.tau_p * m, config.tau_a * m};
}

std::vector<int> valid_neighbors(const Vertex& v, const std::vector<Vertex>& vertices,
                                 const Gate& gate) {
  std::vector<int> out;
  for (const Vertex& o : vertices) {
    if (o.vertex_id == v.vertex_id) continue;
    const int gap = time_gap(v, o);
    if (gap == kTimeOverlap || gap > gate.tau_t) continue;
    const Vertex& earlier = v.end_frame <= o.end_frame ? v : o;
    const Vertex& later = v.end_frame <= o.end_frame ? o : v;
    if (spatial_distance(earlier, later) > gate.tau_p) continue;
    if (1.0 - cosine_similarity(v.embedding, o.embedding) > gate.tau_a) continue;
    out.push_back(o.vertex_id);
  }
  return out;
}

AffinityGraph build_affinity_graph(std::vector<Vertex> vertices, const Config& config,
                                   int iteration) {
  const int n = static_cast<int>(vertices.size());
  for (int i = 0; i < n; ++i)
    if (vertices[i].vertex_id != i)
      throw std::invalid_argument("build_affinity_graph: vertex ids must equal their index");

  const Gate gate = gate_for_iteration(config, iteration);
  std::map<std::pair<int, int>, double> affinity_cache;
  auto cached_affinity = [&](int i, int j) {
    const std::pair<int, int> key{std::min(i, j), std::max(i, j)};
    const auto it = affinity_cache.find(key);
    if (it != affinity_cache.end()) return it->second;
    const double a = pair_affinity(vertices[key.first], vertices[key.second], config);
    affinity_cache.emplace(key, a);
    return a;
  };

  // Per-vertex top-K among its gated neighbors.
  std::vector<std::set<int>> chosen(n);
  for (int i = 0; i < n; ++i) {
    const auto nbrs = valid_neighbors(vertices[i], vertices, gate);
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(nbrs.size());
    for (int j : nbrs) ranked.emplace_back(cached_affinity(i, j), j);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const std::size_t k = std::min<std::size_t>(config.max_neighbors, ranked.size());
    for (std::size_t r = 0; r < k; ++r) chosen[i].insert(ranked[r].second);
  }

  std::set<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j : chosen[i]) {
      const int a = std::min(i, j), b = std::max(i, j);
      const bool keep = config.klimit_intersection ? (chosen[a].count(b) && chosen[b].count(a))
                                                   : true;  // union policy: either side suffices
      if (keep) pairs.insert({a, b});
    }
  }

  AffinityGraph graph;
  graph.vertices = std::move(vertices);
  graph.edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) graph.edges.push_back({a, b, cached_affinity(a, b)});
  return graph;
}

Vertex make_singleton_vertex(const Detection& d, int vertex_id) {
  Vertex v;
  v.vertex_id = vertex_id;
  v.member_tracklets = {0};
  v.embedding = d.embedding;
  v.detection_count = 1;
  v.start_frame = v.end_frame = d.frame;
  v.start_box = v.end_box = d.box;
  return v;
}

Vertex tracklet_to_vertex(const Tracklet& t, int vertex_id) {
  Vertex v;
  v.vertex_id = vertex_id;
  v.member_tracklets = {t.tracklet_id};
  v.embedding = t.mean_embedding;
  v.detection_count = t.size();
  v.start_frame = t.start_frame();
  v.end_frame = t.end_frame();
  v.start_box = t.start_box();
  v.end_box = t.end_box();
  return v;
}

void dump_graph(const AffinityGraph& graph, std::ostream& out) {
  for (const Edge& e : graph.edges)
    out << e.i << ',' << e.j << ',' << format_double(e.affinity) << '\n';
}

}  // namespace proptrack
