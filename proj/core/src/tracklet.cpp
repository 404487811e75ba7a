#include "proptrack/tracklet.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "proptrack/assignment.hpp"
#include "proptrack/graph.hpp"

namespace proptrack {

double detection_affinity(const Detection& a, const Detection& b, const Config& config) {
  return pair_affinity(make_singleton_vertex(a), make_singleton_vertex(b), config);
}

namespace {

struct OpenTracklet {
  std::vector<Detection> detections;
  std::vector<double> embedding_sum;
  int end_frame = 0;

  std::vector<double> mean_embedding() const {
    std::vector<double> m = embedding_sum;
    const double n = static_cast<double>(detections.size());
    for (double& x : m) x /= n;
    return m;
  }
};

Vertex endpoint_view(const OpenTracklet& t) {
  Vertex v;
  v.embedding = t.mean_embedding();
  v.detection_count = 1;
  v.start_frame = v.end_frame = t.end_frame;
  v.start_box = v.end_box = t.detections.back().box;
  return v;
}

}  // namespace

std::vector<Tracklet> build_tracklets(const std::vector<Detection>& detections,
                                      const Config& config) {
  config.validate();
  const std::size_t dim = detections.empty() ? 0 : detections.front().embedding.size();
  for (const auto& d : detections)
    if (d.embedding.size() != dim || dim == 0)
      throw std::invalid_argument("build_tracklets: detections need attached embeddings");

  std::map<int, std::vector<const Detection*>> by_frame;
  for (const auto& d : detections) by_frame[d.frame].push_back(&d);

  std::vector<OpenTracklet> finished;
  std::vector<OpenTracklet> active;  // all end at the previously processed frame
  int previous_frame = 0;

  auto start_tracklet = [&](const Detection& d) {
    OpenTracklet t;
    t.detections.push_back(d);
    t.embedding_sum = d.embedding;
    t.end_frame = d.frame;
    active.push_back(std::move(t));
  };

  for (const auto& [frame, frame_dets] : by_frame) {
    if (frame != previous_frame + 1 || active.empty()) {
      // A frame gap closes every active tracklet: only consecutive-frame
      // links are made here.
      for (auto& t : active) finished.push_back(std::move(t));
      active.clear();
      previous_frame = frame;
      for (const auto* d : frame_dets) start_tracklet(*d);
      continue;
    }

    const int rows = static_cast<int>(active.size());
    const int cols = static_cast<int>(frame_dets.size());
    std::vector<std::vector<double>> affinity(rows, std::vector<double>(cols));
    std::vector<Vertex> det_views;
    det_views.reserve(cols);
    for (const auto* d : frame_dets) det_views.push_back(make_singleton_vertex(*d));
    for (int r = 0; r < rows; ++r) {
      const Vertex end_view = endpoint_view(active[r]);
      for (int c = 0; c < cols; ++c) affinity[r][c] = edge_affinity(end_view, det_views[c], config);
    }

    CostMatrix costs(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        costs.at(r, c) =
            affinity[r][c] == kNegInf ? CostMatrix::forbidden() : -affinity[r][c];
    const auto matches = solve_assignment(costs);

    std::vector<char> det_linked(cols, 0);
    std::vector<char> row_linked(rows, 0);
    for (const auto& [r, c] : matches) {
      const double a = affinity[r][c];
      if (a < config.theta1) continue;
      // Dual-threshold rival rule: the best competing affinity in this row or
      // column must trail by at least theta2.
      double rival = kNegInf;
      for (int c2 = 0; c2 < cols; ++c2)
        if (c2 != c) rival = std::max(rival, affinity[r][c2]);
      for (int r2 = 0; r2 < rows; ++r2)
        if (r2 != r) rival = std::max(rival, affinity[r2][c]);
      if (rival != kNegInf && a - rival < config.theta2) continue;

      OpenTracklet& t = active[r];
      const Detection& d = *frame_dets[c];
      t.detections.push_back(d);
      for (std::size_t i = 0; i < dim; ++i) t.embedding_sum[i] += d.embedding[i];
      t.end_frame = frame;
      row_linked[r] = 1;
      det_linked[c] = 1;
    }

    std::vector<OpenTracklet> next_active;
    for (int r = 0; r < rows; ++r) {
      if (row_linked[r])
        next_active.push_back(std::move(active[r]));
      else
        finished.push_back(std::move(active[r]));
    }
    active = std::move(next_active);
    for (int c = 0; c < cols; ++c)
      if (!det_linked[c]) start_tracklet(*frame_dets[c]);
    previous_frame = frame;
  }
  for (auto& t : active) finished.push_back(std::move(t));

  // Deterministic ids by (start frame, first index) regardless of closing
  // order.
  std::sort(finished.begin(), finished.end(), [](const OpenTracklet& a, const OpenTracklet& b) {
    const Detection& da = a.detections.front();
    const Detection& db = b.detections.front();
    if (da.frame != db.frame) return da.frame < db.frame;
    return da.index_in_frame < db.index_in_frame;
  });

  std::vector<Tracklet> out;
  out.reserve(finished.size());
  for (std::size_t i = 0; i < finished.size(); ++i) {
    Tracklet t;
    t.tracklet_id = static_cast<int>(i);
    t.detections = std::move(finished[i].detections);
    t.mean_embedding.assign(dim, 0.0);
    for (const auto& d : t.detections)
      for (std::size_t k = 0; k < dim; ++k) t.mean_embedding[k] += d.embedding[k];
    for (double& x : t.mean_embedding) x /= static_cast<double>(t.detections.size());
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace proptrack
