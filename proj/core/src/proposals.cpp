#include "proptrack/proposals.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

namespace proptrack {

bool compatible(const std::vector<int>& member_vertex_ids, const std::vector<Vertex>& vertices) {
  for (std::size_t a = 0; a < member_vertex_ids.size(); ++a)
    for (std::size_t b = a + 1; b < member_vertex_ids.size(); ++b)
      if (time_gap(vertices[member_vertex_ids[a]], vertices[member_vertex_ids[b]]) < 1)
        return false;
  return true;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Components as sorted member lists, ordered by smallest member id.
std::vector<std::vector<int>> connected_components(const std::vector<int>& vertex_ids,
                                                   const std::vector<Edge>& edges, double tau) {
  std::map<int, int> index_of;
  for (std::size_t i = 0; i < vertex_ids.size(); ++i) index_of[vertex_ids[i]] = static_cast<int>(i);
  UnionFind uf(static_cast<int>(vertex_ids.size()));
  for (const Edge& e : edges) {
    const auto a = index_of.find(e.i);
    const auto b = index_of.find(e.j);
    if (a == index_of.end() || b == index_of.end()) continue;
    if (e.affinity < tau) continue;  // pruned
    uf.unite(a->second, b->second);
  }
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < vertex_ids.size(); ++i)
    groups[uf.find(static_cast<int>(i))].push_back(vertex_ids[i]);
  std::vector<std::vector<int>> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

ClusterSplit split_components(const std::vector<std::vector<int>>& components,
                              const std::vector<Vertex>& vertices, int max_cluster_size,
                              bool strict_size) {
  ClusterSplit split;
  for (const auto& comp : components) {
    const int size = static_cast<int>(comp.size());
    const bool small_enough = strict_size ? size < max_cluster_size : size <= max_cluster_size;
    if (small_enough && compatible(comp, vertices))
      split.accepted.push_back(comp);
    else
      split.remainder.push_back(comp);
  }
  return split;
}

}  // namespace

ClusterSplit find_clusters(const AffinityGraph& graph, double tau, int max_cluster_size,
                           bool strict_size) {
  std::vector<int> ids(graph.vertices.size());
  std::iota(ids.begin(), ids.end(), 0);
  const auto comps = connected_components(ids, graph.edges, tau);
  return split_components(comps, graph.vertices, max_cluster_size, strict_size);
}

std::vector<Cluster> cluster_nodes(const AffinityGraph& graph, const Config& config,
                                   int iteration) {
  std::vector<Cluster> clusters;
  std::vector<int> active(graph.vertices.size());
  std::iota(active.begin(), active.end(), 0);

  double tau = 0.0;  // irrelevant when there are no edges
  if (!graph.edges.empty()) {
    tau = graph.edges.front().affinity;
    for (const Edge& e : graph.edges) tau = std::min(tau, e.affinity);
  }

  while (!active.empty()) {
    const auto comps = connected_components(active, graph.edges, tau);
    const auto split =
        split_components(comps, graph.vertices, config.max_cluster_size, config.strict_cluster_size);
    for (const auto& members : split.accepted) clusters.push_back({members, iteration});
    active.clear();
    for (const auto& members : split.remainder)
      active.insert(active.end(), members.begin(), members.end());
    std::sort(active.begin(), active.end());
    tau += config.threshold_step;
  }

  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return a.member_vertex_ids.front() < b.member_vertex_ids.front();
  });
  return clusters;
}

std::vector<Vertex> update_nodes(const std::vector<Cluster>& clusters,
                                 const std::vector<Vertex>& vertices) {
  std::vector<Vertex> out;
  out.reserve(clusters.size());
  for (const Cluster& cluster : clusters) {
    const auto& ids = cluster.member_vertex_ids;
    if (ids.empty()) throw std::invalid_argument("update_nodes: empty cluster");
    Vertex merged;
    merged.vertex_id = static_cast<int>(out.size());
    const Vertex* first = &vertices[ids.front()];
    const Vertex* last = first;
    int total = 0;
    for (int id : ids) {
      const Vertex& v = vertices[id];
      total += v.detection_count;
      if (v.start_frame < first->start_frame) first = &v;
      if (v.end_frame > last->end_frame) last = &v;
      merged.member_tracklets.insert(merged.member_tracklets.end(), v.member_tracklets.begin(),
                                     v.member_tracklets.end());
    }
    merged.detection_count = total;
    merged.start_frame = first->start_frame;
    merged.start_box = first->start_box;
    merged.end_frame = last->end_frame;
    merged.end_box = last->end_box;
    std::sort(merged.member_tracklets.begin(), merged.member_tracklets.end());
    merged.embedding.assign(vertices[ids.front()].embedding.size(), 0.0);
    for (int id : ids) {
      const Vertex& v = vertices[id];
      for (std::size_t k = 0; k < merged.embedding.size(); ++k)
        merged.embedding[k] += v.embedding[k] * static_cast<double>(v.detection_count);
    }
    for (double& x : merged.embedding) x /= static_cast<double>(total);
    out.push_back(std::move(merged));
  }
  return out;
}

ProposalSet generate_proposals(const std::vector<Tracklet>& tracklets, const Config& config,
                               GenerationStats* stats, const GraphObserver& observer) {
  config.validate();
  ProposalSet set;
  std::set<std::vector<int>> seen;
  std::map<int, int> tracklet_sizes;
  for (const auto& t : tracklets) tracklet_sizes[t.tracklet_id] = t.size();

  auto add_proposal = [&](std::vector<int> base, int iteration) {
    if (!seen.insert(base).second) return false;
    int size = 0;
    for (int id : base) size += tracklet_sizes.at(id);
    set.proposals.push_back(
        {static_cast<int>(set.proposals.size()), std::move(base), iteration, size});
    return true;
  };

  std::vector<Vertex> vertices;
  vertices.reserve(tracklets.size());
  for (const auto& t : tracklets)
    vertices.push_back(tracklet_to_vertex(t, static_cast<int>(vertices.size())));

  // Every tracklet is a proposal in its own right.
  for (const auto& t : tracklets) add_proposal({t.tracklet_id}, 1);

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    AffinityGraph graph = build_affinity_graph(std::move(vertices), config, iteration);
    if (observer) observer(iteration, graph);
    const auto clusters = cluster_nodes(graph, config, iteration);

    int fresh = 0;
    bool any_multi = false;
    for (const Cluster& cluster : clusters) {
      any_multi = any_multi || cluster.member_vertex_ids.size() > 1;
      std::vector<int> base;
      for (int id : cluster.member_vertex_ids) {
        const auto& members = graph.vertices[id].member_tracklets;
        base.insert(base.end(), members.begin(), members.end());
      }
      std::sort(base.begin(), base.end());
      if (add_proposal(std::move(base), iteration)) ++fresh;
    }

    vertices = update_nodes(clusters, graph.vertices);
    if (stats) {
      stats->clusters_per_iteration.push_back(static_cast<int>(clusters.size()));
      stats->new_proposals_per_iteration.push_back(fresh);
      stats->iterations_run = iteration;
    }
    // A merge-free iteration is a fixed point only once the gating schedule
    // has fully relaxed; before that, wider gates may still create merges.
    if (!any_multi && iteration >= static_cast<int>(config.gate_relaxation.size())) break;
  }
  return set;
}

void dump_proposals(const ProposalSet& set, std::ostream& out) {
  for (const Proposal& p : set.proposals) {
    out << p.proposal_id << ':';
    for (int id : p.base_tracklets) out << ' ' << id;
    out << '\n';
  }
}

}  // namespace proptrack
