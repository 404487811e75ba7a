// Shared builders for test scenes.
#pragma once

#include <cmath>
#include <vector>

#include "proptrack/config.hpp"
#include "proptrack/graph.hpp"
#include "proptrack/random.hpp"
#include "proptrack/tracklet.hpp"
#include "proptrack/types.hpp"

namespace helpers {

inline proptrack::Detection make_detection(int frame, double x, double y,
                                           std::vector<double> embedding, double w = 10.0,
                                           double h = 20.0, int index = 0) {
  proptrack::Detection d;
  d.frame = frame;
  d.index_in_frame = index;
  d.box = {x, y, w, h};
  d.confidence = 1.0;
  d.embedding = std::move(embedding);
  return d;
}

// Vertex with a centered box at (cx, cy) on both endpoints unless moved.
inline proptrack::Vertex make_vertex(int id, int start, int end, double cx, double cy,
                                     std::vector<double> embedding, double w = 10.0,
                                     double h = 20.0) {
  proptrack::Vertex v;
  v.vertex_id = id;
  v.member_tracklets = {id};
  v.embedding = std::move(embedding);
  v.detection_count = end - start + 1;
  v.start_frame = start;
  v.end_frame = end;
  v.start_box = {cx - w / 2, cy - h / 2, w, h};
  v.end_box = v.start_box;
  return v;
}

inline std::vector<double> unit_vector(proptrack::Rng& rng, int dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

inline proptrack::Vertex random_vertex(proptrack::Rng& rng, int id, int max_frame = 60) {
  const int start = rng.uniform_int(1, max_frame);
  const int end = start + rng.uniform_int(0, 8);
  auto v = make_vertex(id, start, end, rng.uniform(0.0, 500.0), rng.uniform(0.0, 500.0),
                       unit_vector(rng, 8));
  v.end_box.x += rng.uniform(-20.0, 20.0);
  v.end_box.y += rng.uniform(-20.0, 20.0);
  return v;
}

}  // namespace helpers
