#include "proptrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "proptrack/random.hpp"

namespace proptrack {

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
  if (num_identities < 0) fail("num_identities must be >= 0");
  if (frames < 1) fail("frames must be >= 1");
  if (arena_width <= 0.0 || arena_height <= 0.0) fail("arena must have positive size");
  if (speed_max < 0.0) fail("speed_max must be >= 0");
  if (jitter_sigma < 0.0 || embedding_noise < 0.0 || box_noise < 0.0)
    fail("sigma values must be >= 0");
  if (embedding_dim < 1) fail("embedding_dim must be >= 1");
  if (max_base_cosine <= -1.0) fail("max_base_cosine must be > -1");
  if (false_positive_rate < 0.0) fail("false_positive_rate must be >= 0");
  for (const auto& w : occlusions) {
    if (w.identity < 1 || w.identity > num_identities) fail("occlusion identity out of range");
    if (w.start_frame < 1 || w.end_frame > frames || w.start_frame > w.end_frame)
      fail("occlusion window outside [1, frames]");
  }
}

namespace {

std::vector<double> random_unit_vector(int dim, Rng& rng) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Scenario scenario;

  struct Target {
    std::vector<double> base_embedding;
    double box_w, box_h;
    double start_x, start_y;
    double vx, vy;
  };
  std::vector<Target> targets;

  for (int i = 0; i < spec.num_identities; ++i) {
    Target t;
    // Mutually separated appearance vectors via rejection sampling.
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000)
        throw std::runtime_error(
            "generate_scenario: cannot separate embeddings; raise embedding_dim or "
            "max_base_cosine");
      t.base_embedding = random_unit_vector(spec.embedding_dim, rng);
      bool ok = true;
      for (const auto& other : targets)
        if (cosine_similarity(t.base_embedding, other.base_embedding) >= spec.max_base_cosine) {
          ok = false;
          break;
        }
      if (ok) break;
    }

    t.box_w = rng.uniform(35.0, 55.0);
    t.box_h = rng.uniform(70.0, 110.0);
    const double margin_x = t.box_w;
    const double margin_y = t.box_h;
    t.start_x = rng.uniform(margin_x, spec.arena_width - margin_x);
    t.start_y = rng.uniform(margin_y, spec.arena_height - margin_y);
    t.vx = rng.uniform(-spec.speed_max, spec.speed_max);
    t.vy = rng.uniform(-spec.speed_max, spec.speed_max);
    if (spec.frames > 1) {
      // Clamp the endpoint into the arena and keep the velocity constant.
      const double span = static_cast<double>(spec.frames - 1);
      const double end_x =
          std::clamp(t.start_x + t.vx * span, margin_x, spec.arena_width - margin_x);
      const double end_y =
          std::clamp(t.start_y + t.vy * span, margin_y, spec.arena_height - margin_y);
      t.vx = (end_x - t.start_x) / span;
      t.vy = (end_y - t.start_y) / span;
    }
    targets.push_back(std::move(t));
  }

  auto occluded = [&](int identity, int frame) {
    for (const auto& w : spec.occlusions)
      if (w.identity == identity && frame >= w.start_frame && frame <= w.end_frame) return true;
    return false;
  };

  struct Pending {
    Detection det;
    std::vector<double> embedding;
  };

  for (int frame = 1; frame <= spec.frames; ++frame) {
    std::vector<Pending> pending;
    for (int i = 0; i < spec.num_identities; ++i) {
      const Target& t = targets[i];
      const int identity = i + 1;
      double cx = t.start_x + t.vx * static_cast<double>(frame - 1);
      double cy = t.start_y + t.vy * static_cast<double>(frame - 1);
      if (spec.jitter_sigma > 0.0) {
        cx += rng.normal(0.0, spec.jitter_sigma);
        cy += rng.normal(0.0, spec.jitter_sigma);
      }
      const BoundingBox true_box{cx - 0.5 * t.box_w, cy - 0.5 * t.box_h, t.box_w, t.box_h};

      GroundTruthEntry gt;
      gt.frame = frame;
      gt.identity = identity;
      gt.box = true_box;
      gt.visibility = occluded(identity, frame) ? 0.0 : 1.0;
      scenario.ground_truth.push_back(gt);

      if (gt.visibility == 0.0) continue;

      Pending p;
      p.det.frame = frame;
      p.det.box = true_box;
      if (spec.box_noise > 0.0) {
        p.det.box.x += rng.normal(0.0, spec.box_noise);
        p.det.box.y += rng.normal(0.0, spec.box_noise);
        p.det.box.w = std::max(2.0, p.det.box.w + rng.normal(0.0, spec.box_noise));
        p.det.box.h = std::max(2.0, p.det.box.h + rng.normal(0.0, spec.box_noise));
      }
      p.det.confidence = 1.0;
      p.embedding = t.base_embedding;
      if (spec.embedding_noise > 0.0) {
        double norm = 0.0;
        for (double& x : p.embedding) {
          x += rng.normal(0.0, spec.embedding_noise);
          norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm > 0.0)
          for (double& x : p.embedding) x /= norm;
      }
      pending.push_back(std::move(p));
    }

    // Spurious detections: fixed part plus a Bernoulli fraction.
    int fp_count = static_cast<int>(spec.false_positive_rate);
    if (rng.uniform() < spec.false_positive_rate - static_cast<double>(fp_count)) ++fp_count;
    for (int k = 0; k < fp_count; ++k) {
      Pending p;
      p.det.frame = frame;
      p.det.box.w = rng.uniform(25.0, 60.0);
      p.det.box.h = rng.uniform(50.0, 120.0);
      p.det.box.x = rng.uniform(0.0, spec.arena_width - p.det.box.w);
      p.det.box.y = rng.uniform(0.0, spec.arena_height - p.det.box.h);
      p.det.confidence = 0.5;
      p.embedding = random_unit_vector(spec.embedding_dim, rng);
      pending.push_back(std::move(p));
    }

    // index_in_frame must agree with the canonical parse ordering.
    std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
      return std::tie(a.det.box.x, a.det.box.y, a.det.box.w, a.det.box.h, a.det.confidence) <
             std::tie(b.det.box.x, b.det.box.y, b.det.box.w, b.det.box.h, b.det.confidence);
    });
    for (std::size_t k = 0; k < pending.size(); ++k) {
      pending[k].det.index_in_frame = static_cast<int>(k);
      scenario.embeddings[{frame, static_cast<int>(k)}] = pending[k].embedding;
      scenario.detections.push_back(pending[k].det);
    }
  }
  return scenario;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ScenarioSpec parse_scenario_spec(std::istream& in) {
  ScenarioSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("scenario: line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto bad = [&]() {
      return std::invalid_argument("scenario: line " + std::to_string(line_no) +
                                   ": bad value for '" + key + "'");
    };
    try {
      if (key == "num_identities") spec.num_identities = std::stoi(value);
      else if (key == "frames") spec.frames = std::stoi(value);
      else if (key == "arena_width") spec.arena_width = std::stod(value);
      else if (key == "arena_height") spec.arena_height = std::stod(value);
      else if (key == "speed_max") spec.speed_max = std::stod(value);
      else if (key == "jitter_sigma") spec.jitter_sigma = std::stod(value);
      else if (key == "embedding_dim") spec.embedding_dim = std::stoi(value);
      else if (key == "embedding_noise") spec.embedding_noise = std::stod(value);
      else if (key == "max_base_cosine") spec.max_base_cosine = std::stod(value);
      else if (key == "false_positive_rate") spec.false_positive_rate = std::stod(value);
      else if (key == "box_noise") spec.box_noise = std::stod(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "occlusions") {
        spec.occlusions.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          item = trim(item);
          if (item.empty()) continue;
          OcclusionWindow w;
          if (std::sscanf(item.c_str(), "%d:%d:%d", &w.identity, &w.start_frame, &w.end_frame) != 3)
            throw bad();
          spec.occlusions.push_back(w);
        }
      } else {
        throw std::invalid_argument("scenario: line " + std::to_string(line_no) +
                                    ": unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw bad();
    }
  }
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario spec: " + path);
  return parse_scenario_spec(in);
}

void write_scenario_spec(const ScenarioSpec& spec, std::ostream& out) {
  out << "num_identities = " << spec.num_identities << "\n";
  out << "frames = " << spec.frames << "\n";
  out << "arena_width = " << format_double(spec.arena_width) << "\n";
  out << "arena_height = " << format_double(spec.arena_height) << "\n";
  out << "speed_max = " << format_double(spec.speed_max) << "\n";
  out << "jitter_sigma = " << format_double(spec.jitter_sigma) << "\n";
  out << "embedding_dim = " << spec.embedding_dim << "\n";
  out << "embedding_noise = " << format_double(spec.embedding_noise) << "\n";
  out << "max_base_cosine = " << format_double(spec.max_base_cosine) << "\n";
  out << "false_positive_rate = " << format_double(spec.false_positive_rate) << "\n";
  out << "box_noise = " << format_double(spec.box_noise) << "\n";
  out << "seed = " << spec.seed << "\n";
  if (!spec.occlusions.empty()) {
    out << "occlusions = ";
    for (std::size_t i = 0; i < spec.occlusions.size(); ++i) {
      if (i) out << ", ";
      out << spec.occlusions[i].identity << ':' << spec.occlusions[i].start_frame << ':'
          << spec.occlusions[i].end_frame;
    }
    out << "\n";
  }
}

void write_scenario_files(const Scenario& scenario, const std::string& det_path,
                          const std::string& emb_path, const std::string& gt_path) {
  {
    std::ofstream out(det_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + det_path);
    // Full precision so re-parsing reproduces the canonical in-frame order.
    for (const auto& d : scenario.detections)
      out << d.frame << ",-1," << format_double(d.box.x) << ',' << format_double(d.box.y) << ','
          << format_double(d.box.w) << ',' << format_double(d.box.h) << ','
          << format_double(d.confidence) << '\n';
  }
  {
    std::ofstream out(emb_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + emb_path);
    write_embeddings_csv(scenario.embeddings, out);
  }
  {
    std::ofstream out(gt_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + gt_path);
    for (const auto& e : scenario.ground_truth)
      out << e.frame << ',' << e.identity << ',' << format_double(e.box.x) << ','
          << format_double(e.box.y) << ',' << format_double(e.box.w) << ','
          << format_double(e.box.h) << ",1,1," << format_double(e.visibility) << '\n';
  }
}

}  // namespace proptrack
