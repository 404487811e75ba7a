#include "proptrack/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "proptrack/assignment.hpp"

namespace proptrack {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double x1 = std::max(a.x, b.x);
  const double y1 = std::max(a.y, b.y);
  const double x2 = std::min(a.x + a.w, b.x + b.w);
  const double y2 = std::min(a.y + a.h, b.y + b.h);
  const double iw = x2 - x1;
  const double ih = y2 - y1;
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

namespace {

struct FrameBox {
  int track_id;
  const BoundingBox* box;
};

// track id -> box per frame, tracks in id order within a frame.
std::map<int, std::vector<FrameBox>> boxes_by_frame(const std::vector<Trajectory>& tracks) {
  std::map<int, std::vector<FrameBox>> out;
  for (const auto& t : tracks)
    for (const auto& d : t.detections) out[d.frame].push_back({t.track_id, &d.box});
  for (auto& [frame, list] : out)
    std::sort(list.begin(), list.end(),
              [](const FrameBox& a, const FrameBox& b) { return a.track_id < b.track_id; });
  return out;
}

}  // namespace

ClearMotResult compute_clear_mot(const std::vector<Trajectory>& ground_truth,
                                 const std::vector<Trajectory>& predictions,
                                 double iou_threshold) {
  ClearMotResult res;
  auto gt_frames = boxes_by_frame(ground_truth);
  auto pred_frames = boxes_by_frame(predictions);
  if (gt_frames.empty()) throw std::invalid_argument("compute_clear_mot: empty ground truth");

  std::set<int> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : pred_frames) frames.insert(f);

  std::map<int, int> last_match;                    // gt id -> last matched pred id
  std::map<int, std::pair<int, int>> gt_coverage;   // gt id -> (matched, total)

  for (int frame : frames) {
    static const std::vector<FrameBox> kNone;
    const auto git = gt_frames.find(frame);
    const auto pit = pred_frames.find(frame);
    const auto& gts = git == gt_frames.end() ? kNone : git->second;
    const auto& preds = pit == pred_frames.end() ? kNone : pit->second;
    res.total_gt += static_cast<int>(gts.size());
    for (const auto& g : gts) ++gt_coverage[g.track_id].second;

    std::vector<char> gt_done(gts.size(), 0), pred_done(preds.size(), 0);
    std::vector<std::pair<int, int>> matches;  // indices into gts/preds

    // Persist previous pairings still above the threshold, in gt id order.
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      const auto lm = last_match.find(gts[gi].track_id);
      if (lm == last_match.end()) continue;
      for (std::size_t pi = 0; pi < preds.size(); ++pi) {
        if (pred_done[pi] || preds[pi].track_id != lm->second) continue;
        if (iou(*gts[gi].box, *preds[pi].box) >= iou_threshold) {
          gt_done[gi] = 1;
          pred_done[pi] = 1;
          matches.emplace_back(static_cast<int>(gi), static_cast<int>(pi));
        }
        break;
      }
    }

    // Remaining pairs: maximum cardinality, then maximum total IoU.
    std::vector<int> free_gt, free_pred;
    for (std::size_t gi = 0; gi < gts.size(); ++gi)
      if (!gt_done[gi]) free_gt.push_back(static_cast<int>(gi));
    for (std::size_t pi = 0; pi < preds.size(); ++pi)
      if (!pred_done[pi]) free_pred.push_back(static_cast<int>(pi));
    if (!free_gt.empty() && !free_pred.empty()) {
      CostMatrix costs(static_cast<int>(free_gt.size()), static_cast<int>(free_pred.size()));
      for (std::size_t r = 0; r < free_gt.size(); ++r)
        for (std::size_t c = 0; c < free_pred.size(); ++c) {
          const double o = iou(*gts[free_gt[r]].box, *preds[free_pred[c]].box);
          costs.at(static_cast<int>(r), static_cast<int>(c)) =
              o >= iou_threshold ? -o : CostMatrix::forbidden();
        }
      for (const auto& [r, c] : solve_assignment(costs)) {
        gt_done[free_gt[r]] = 1;
        pred_done[free_pred[c]] = 1;
        matches.emplace_back(free_gt[r], free_pred[c]);
      }
    }

    for (const auto& [gi, pi] : matches) {
      const int gt_id = gts[gi].track_id;
      const int pred_id = preds[pi].track_id;
      const auto lm = last_match.find(gt_id);
      if (lm != last_match.end() && lm->second != pred_id) ++res.id_switches;
      last_match[gt_id] = pred_id;
      ++gt_coverage[gt_id].first;
    }
    for (std::size_t gi = 0; gi < gts.size(); ++gi)
      if (!gt_done[gi]) ++res.false_negatives;
    for (std::size_t pi = 0; pi < preds.size(); ++pi)
      if (!pred_done[pi]) ++res.false_positives;
  }

  res.gt_tracks = static_cast<int>(gt_coverage.size());
  for (const auto& [id, cov] : gt_coverage) {
    const double ratio = static_cast<double>(cov.first) / static_cast<double>(cov.second);
    if (ratio >= 0.8) ++res.mostly_tracked;
    if (ratio <= 0.2) ++res.mostly_lost;
  }
  res.mota = 1.0 - static_cast<double>(res.false_positives + res.false_negatives +
                                       res.id_switches) /
                       static_cast<double>(res.total_gt);
  return res;
}

IdMetricsResult compute_idf1(const std::vector<Trajectory>& ground_truth,
                             const std::vector<Trajectory>& predictions, double iou_threshold) {
  IdMetricsResult res;
  long total_gt = 0, total_pred = 0;
  for (const auto& t : ground_truth) total_gt += static_cast<long>(t.detections.size());
  for (const auto& t : predictions) total_pred += static_cast<long>(t.detections.size());
  if (total_gt == 0 && total_pred == 0) return res;  // vacuous 1.0

  // Per-frame agreement counts for every (gt, pred) track pair.
  const int ng = static_cast<int>(ground_truth.size());
  const int np = static_cast<int>(predictions.size());
  long idtp = 0;
  if (ng > 0 && np > 0) {
    CostMatrix costs(ng, np);
    for (int g = 0; g < ng; ++g) {
      std::map<int, const BoundingBox*> gt_at;
      for (const auto& d : ground_truth[g].detections) gt_at[d.frame] = &d.box;
      for (int p = 0; p < np; ++p) {
        long agree = 0;
        for (const auto& d : predictions[p].detections) {
          const auto it = gt_at.find(d.frame);
          if (it != gt_at.end() && iou(*it->second, d.box) >= iou_threshold) ++agree;
        }
        costs.at(g, p) = -static_cast<double>(agree);
      }
    }
    for (const auto& [g, p] : solve_assignment(costs))
      idtp += -static_cast<long>(costs.at(g, p));
  }

  res.idtp = idtp;
  res.idfn = total_gt - idtp;
  res.idfp = total_pred - idtp;
  res.idf1 = 2.0 * static_cast<double>(idtp) /
             static_cast<double>(total_gt + total_pred);
  return res;
}

std::vector<Trajectory> gt_to_trajectories(const std::vector<GroundTruthEntry>& entries) {
  std::map<int, Trajectory> by_id;
  for (const auto& e : entries) {
    auto& t = by_id[e.identity];
    t.track_id = e.identity;
    Detection d;
    d.frame = e.frame;
    d.box = e.box;
    t.detections.push_back(d);
  }
  std::vector<Trajectory> out;
  out.reserve(by_id.size());
  for (auto& [id, t] : by_id) {
    std::sort(t.detections.begin(), t.detections.end(),
              [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
    for (std::size_t i = 1; i < t.detections.size(); ++i)
      if (t.detections[i].frame == t.detections[i - 1].frame)
        throw std::invalid_argument("ground truth has identity " + std::to_string(id) +
                                    " twice in frame " + std::to_string(t.detections[i].frame));
    out.push_back(std::move(t));
  }
  return out;
}

MetricsReport evaluate_sequences(
    const std::vector<std::pair<std::string, std::pair<std::vector<Trajectory>,
                                                       std::vector<Trajectory>>>>& sequences,
    double iou_threshold) {
  MetricsReport report;
  for (const auto& [name, pair] : sequences) {
    SequenceMetrics sm;
    sm.name = name;
    sm.clear = compute_clear_mot(pair.first, pair.second, iou_threshold);
    sm.id = compute_idf1(pair.first, pair.second, iou_threshold);
    report.sequences.push_back(sm);

    report.overall_clear.false_positives += sm.clear.false_positives;
    report.overall_clear.false_negatives += sm.clear.false_negatives;
    report.overall_clear.id_switches += sm.clear.id_switches;
    report.overall_clear.total_gt += sm.clear.total_gt;
    report.overall_clear.mostly_tracked += sm.clear.mostly_tracked;
    report.overall_clear.mostly_lost += sm.clear.mostly_lost;
    report.overall_clear.gt_tracks += sm.clear.gt_tracks;
    report.overall_id.idtp += sm.id.idtp;
    report.overall_id.idfp += sm.id.idfp;
    report.overall_id.idfn += sm.id.idfn;
  }
  if (report.overall_clear.total_gt > 0)
    report.overall_clear.mota =
        1.0 - static_cast<double>(report.overall_clear.false_positives +
                                  report.overall_clear.false_negatives +
                                  report.overall_clear.id_switches) /
                  static_cast<double>(report.overall_clear.total_gt);
  const long denom = 2 * report.overall_id.idtp + report.overall_id.idfp + report.overall_id.idfn;
  report.overall_id.idf1 =
      denom == 0 ? 1.0 : 2.0 * static_cast<double>(report.overall_id.idtp) / denom;
  return report;
}

std::string format_report(const MetricsReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %7s %7s %5s %5s %7s %7s %5s %5s\n", "sequence",
                "MOTA", "IDF1", "MT", "ML", "FP", "FN", "IDs", "GT");
  out << line;
  auto row = [&](const std::string& name, const ClearMotResult& c, const IdMetricsResult& i) {
    std::snprintf(line, sizeof(line), "%-14s %7.4f %7.4f %5d %5d %7d %7d %5d %5d\n",
                  name.c_str(), c.mota, i.idf1, c.mostly_tracked, c.mostly_lost,
                  c.false_positives, c.false_negatives, c.id_switches, c.gt_tracks);
    out << line;
  };
  for (const auto& s : report.sequences) row(s.name, s.clear, s.id);
  if (report.sequences.size() != 1) row("OVERALL", report.overall_clear, report.overall_id);
  return out.str();
}

void write_report_kv(const MetricsReport& report, std::ostream& out) {
  auto emit = [&](const std::string& prefix, const ClearMotResult& c, const IdMetricsResult& i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", c.mota);
    out << prefix << "mota = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", i.idf1);
    out << prefix << "idf1 = " << buf << "\n";
    out << prefix << "mt = " << c.mostly_tracked << "\n";
    out << prefix << "ml = " << c.mostly_lost << "\n";
    out << prefix << "fp = " << c.false_positives << "\n";
    out << prefix << "fn = " << c.false_negatives << "\n";
    out << prefix << "id_switches = " << c.id_switches << "\n";
    out << prefix << "gt_boxes = " << c.total_gt << "\n";
    out << prefix << "gt_tracks = " << c.gt_tracks << "\n";
    out << prefix << "idtp = " << i.idtp << "\n";
    out << prefix << "idfp = " << i.idfp << "\n";
    out << prefix << "idfn = " << i.idfn << "\n";
  };
  emit("", report.overall_clear, report.overall_id);
  for (const auto& s : report.sequences) emit(s.name + ".", s.clear, s.id);
}

}  // namespace proptrack
