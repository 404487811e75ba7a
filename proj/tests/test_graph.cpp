#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "proptrack/graph.hpp"

using namespace proptrack;
using helpers::make_vertex;
using helpers::random_vertex;

TEST_CASE("time gap of disjoint and overlapping spans") {
  CHECK(time_gap(1, 5, 8, 10) == 3);
  CHECK(time_gap(8, 10, 1, 5) == 3);
  CHECK(time_gap(1, 5, 4, 9) == kTimeOverlap);
  CHECK(time_gap(1, 5, 6, 7) == 1);
  CHECK(time_gap(1, 5, 5, 9) == kTimeOverlap);  // shared frame
  CHECK(time_gap(3, 3, 3, 3) == kTimeOverlap);
}

TEST_CASE("static vertices predict their last center") {
  const auto v = make_vertex(0, 1, 5, 50, 60, {1.0, 0.0});
  const auto p = predict_position(v, 42);
  CHECK(p[0] == doctest::Approx(50.0));
  CHECK(p[1] == doctest::Approx(60.0));
}

TEST_CASE("moving vertices extrapolate linearly") {
  auto v = make_vertex(0, 1, 11, 0, 0, {1.0, 0.0});
  v.end_box.x = 10.0 - v.end_box.w / 2;  // center moves to (10, 0)
  const auto p = predict_position(v, 16);
  CHECK(p[0] == doctest::Approx(15.0));
  CHECK(p[1] == doctest::Approx(0.0));
}

TEST_CASE("single-frame vertices have zero velocity") {
  const auto v = make_vertex(0, 4, 4, 7, 9, {1.0, 0.0});
  CHECK(v.velocity()[0] == 0.0);
  CHECK(v.velocity()[1] == 0.0);
  const auto p = predict_position(v, 30);
  CHECK(p[0] == doctest::Approx(7.0));
  CHECK(p[1] == doctest::Approx(9.0));
}

TEST_CASE("edge affinity hand values") {
  Config config;
  const auto a = make_vertex(0, 1, 10, 100, 100, {0.6, 0.8});
  const auto b = make_vertex(1, 50, 60, 100, 100, {0.6, 0.8});
  // gap 40, zero prediction error, identical embeddings
  const double expected = (1.0 + std::exp(-1.0) + 1.0) / 3.0;
  CHECK(edge_affinity(a, b, config) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(edge_affinity(a, b, config) == doctest::Approx(0.7893).epsilon(1e-4));

  const auto c = make_vertex(2, 5, 12, 100, 100, {0.6, 0.8});
  CHECK(edge_affinity(a, c, config) == kNegInf);  // spans overlap

  auto d = make_vertex(3, 11, 20, 200, 100, {0.6, 0.8});  // 100 px off, gap 1
  const double expected2 = (1.0 + std::exp(-1.0 / 40.0) + std::exp(-1.0)) / 3.0;
  CHECK(edge_affinity(a, d, config) == doctest::Approx(expected2).epsilon(1e-12));
  CHECK(edge_affinity(a, d, config) == doctest::Approx(0.7809).epsilon(1e-3));
}

TEST_CASE("pair affinity orients by end frame") {
  Config config;
  const auto a = make_vertex(0, 1, 10, 100, 100, {0.6, 0.8});
  const auto b = make_vertex(1, 50, 60, 100, 100, {0.6, 0.8});
  CHECK(pair_affinity(a, b, config) == pair_affinity(b, a, config));
}

TEST_CASE("gating relaxes over iterations") {
  Config config;  // tau_t 60, relaxation 0.25/0.5/0.75/1.0
  CHECK(gate_for_iteration(config, 1).tau_t == doctest::Approx(15.0));
  CHECK(gate_for_iteration(config, 2).tau_t == doctest::Approx(30.0));
  CHECK(gate_for_iteration(config, 4).tau_t == doctest::Approx(60.0));
  CHECK(gate_for_iteration(config, 9).tau_t == doctest::Approx(60.0));
  CHECK(gate_for_iteration(config, 1).tau_a == doctest::Approx(0.125));
}

TEST_CASE("infinite gates admit every non-overlapping vertex") {
  std::vector<Vertex> vertices = {make_vertex(0, 1, 5, 0, 0, {1.0, 0.0}),
                                  make_vertex(1, 7, 9, 300, 0, {0.0, 1.0}),
                                  make_vertex(2, 3, 8, 900, 900, {-1.0, 0.0})};
  const Gate wide{1e18, 1e18, 2.5};
  const auto nbrs = valid_neighbors(vertices[0], vertices, wide);
  CHECK(nbrs == std::vector<int>{1});  // 2 overlaps frames 3..5

  const Gate closed{0.0, 1e18, 2.5};
  CHECK(valid_neighbors(vertices[0], vertices, closed).empty());
}

TEST_CASE("valid_neighbors matches the brute-force predicate") {
  Rng rng(2024);
  Config config;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vertex> vertices;
    for (int i = 0; i < 5; ++i) vertices.push_back(random_vertex(rng, i));
    const Gate gate{rng.uniform(1.0, 30.0), rng.uniform(20.0, 300.0), rng.uniform(0.05, 1.0)};
    for (const auto& v : vertices) {
      std::vector<int> expected;
      for (const auto& o : vertices) {
        if (o.vertex_id == v.vertex_id) continue;
        const int gap = time_gap(v, o);
        if (gap == kTimeOverlap || gap < 1 || gap > gate.tau_t) continue;
        const Vertex& earlier = v.end_frame <= o.end_frame ? v : o;
        const Vertex& later = v.end_frame <= o.end_frame ? o : v;
        const auto pred = predict_position(earlier, later.start_frame);
        const double dist =
            std::sqrt(std::pow(pred[0] - later.start_box.cx(), 2) +
                      std::pow(pred[1] - later.start_box.cy(), 2));
        if (dist > gate.tau_p) continue;
        if (1.0 - cosine_similarity(v.embedding, o.embedding) > gate.tau_a) continue;
        expected.push_back(o.vertex_id);
      }
      CHECK(valid_neighbors(v, vertices, gate) == expected);
    }
  }
}

TEST_CASE("two compatible vertices yield one edge") {
  Config config;
  std::vector<Vertex> vertices = {make_vertex(0, 1, 5, 100, 100, {0.6, 0.8}),
                                  make_vertex(1, 7, 9, 102, 100, {0.6, 0.8})};
  const auto graph = build_affinity_graph(vertices, config, 4);
  REQUIRE(graph.edges.size() == 1);
  CHECK(graph.edges[0].i == 0);
  CHECK(graph.edges[0].j == 1);
  CHECK(std::isfinite(graph.edges[0].affinity));
}

TEST_CASE("a vertex keeps only its top-K candidates") {
  Config config;  // K = 3
  // Vertex 0 plus five later candidates at increasing distances; the
  // candidates overlap each other in time, so 0 is their only neighbor.
  std::vector<Vertex> vertices = {make_vertex(0, 1, 5, 100, 100, {0.6, 0.8})};
  for (int i = 1; i <= 5; ++i)
    vertices.push_back(make_vertex(i, 8, 10, 100.0 + 30.0 * i, 100, {0.6, 0.8}));

  // Union policy: 0's own top-3 plus the edges the far candidates contribute.
  const auto graph = build_affinity_graph(vertices, config, 4);
  std::set<int> partners;
  for (const auto& e : graph.edges) {
    CHECK(e.i == 0);
    partners.insert(e.j);
  }
  CHECK(graph.edges.size() == 5);
  CHECK(partners.count(1));
  CHECK(partners.count(2));
  CHECK(partners.count(3));

  // Intersection policy keeps exactly the mutual top-3.
  Config strict = config;
  strict.klimit_intersection = true;
  const auto strict_graph = build_affinity_graph(vertices, strict, 4);
  std::set<int> strict_partners;
  for (const auto& e : strict_graph.edges) strict_partners.insert(e.j);
  CHECK(strict_partners == std::set<int>{1, 2, 3});  // the three nearest
}

TEST_CASE("graph construction matches a naive reference") {
  Rng rng(555);
  Config config;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vertex> vertices;
    for (int i = 0; i < 10; ++i) vertices.push_back(random_vertex(rng, i));
    const int iteration = rng.uniform_int(1, 6);
    const auto graph = build_affinity_graph(vertices, config, iteration);

    // Naive reference: gate, rank, take top-K, union.
    const Gate gate = gate_for_iteration(config, iteration);
    std::set<std::pair<int, int>> expected;
    for (const auto& v : vertices) {
      std::vector<std::pair<double, int>> cands;
      for (int j : valid_neighbors(v, vertices, gate))
        cands.emplace_back(pair_affinity(v, vertices[j], config), j);
      std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      for (std::size_t k = 0; k < std::min<std::size_t>(config.max_neighbors, cands.size()); ++k)
        expected.insert({std::min(v.vertex_id, cands[k].second),
                         std::max(v.vertex_id, cands[k].second)});
    }

    std::set<std::pair<int, int>> got;
    for (const auto& e : graph.edges) {
      got.insert({e.i, e.j});
      CHECK(e.affinity == pair_affinity(vertices[e.i], vertices[e.j], config));
      // Finite, within the attainable band, and never between overlapping spans.
      CHECK(std::isfinite(e.affinity));
      CHECK(e.affinity > -1.0 / 3.0);
      CHECK(e.affinity <= 1.0);
      CHECK(time_gap(vertices[e.i], vertices[e.j]) >= 1);
    }
    CHECK(got == expected);
    CHECK(graph.edges.size() <= vertices.size() * static_cast<std::size_t>(config.max_neighbors));
  }
}

TEST_CASE("intersection policy keeps mutual choices only") {
  Config config;
  config.max_neighbors = 1;
  config.klimit_intersection = true;
  // b's best is c, c's best is b, a's best is b: edge a-b dies, b-c stays.
  std::vector<Vertex> vertices = {make_vertex(0, 1, 2, 300, 100, {0.6, 0.8}),
                                  make_vertex(1, 4, 5, 200, 100, {0.6, 0.8}),
                                  make_vertex(2, 7, 8, 201, 100, {0.6, 0.8})};
  const auto graph = build_affinity_graph(vertices, config, 4);
  REQUIRE(graph.edges.size() == 1);
  CHECK(graph.edges[0].i == 1);
  CHECK(graph.edges[0].j == 2);
}
