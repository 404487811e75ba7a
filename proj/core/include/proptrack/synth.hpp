#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "proptrack/io.hpp"
#include "proptrack/types.hpp"

namespace proptrack {

struct OcclusionWindow {
  int identity = 0;
  int start_frame = 0;
  int end_frame = 0;  // inclusive
};

/// Seeded synthetic scene: constant-velocity targets with optional position
/// jitter, per-identity unit embeddings kept mutually low-cosine by rejection
/// sampling, occlusion windows that remove detections but not ground truth,
/// measurement noise, and spurious detections.
struct ScenarioSpec {
  int num_identities = 5;
  int frames = 200;
  double arena_width = 1920.0;
  double arena_height = 1080.0;
  double speed_max = 3.0;      // px/frame per axis
  double jitter_sigma = 0.0;   // true-position jitter
  std::vector<OcclusionWindow> occlusions;
  int embedding_dim = 16;
  double embedding_noise = 0.0;   // sigma_e, per dimension before renormalizing
  double max_base_cosine = 0.2;   // identity separation bound
  double false_positive_rate = 0.0;  // expected spurious detections per frame
  double box_noise = 0.0;            // sigma_b on box coordinates
  std::uint64_t seed = 1;

  void validate() const;
};

struct Scenario {
  std::vector<Detection> detections;  // sorted by (frame, index_in_frame)
  EmbeddingTable embeddings;
  std::vector<GroundTruthEntry> ground_truth;
};

Scenario generate_scenario(const ScenarioSpec& spec);

/// Flat key-value document, same dialect as the pipeline config. Occlusions
/// are `identity:start:end` triples separated by commas.
ScenarioSpec parse_scenario_spec(std::istream& in);
ScenarioSpec load_scenario_spec(const std::string& path);
void write_scenario_spec(const ScenarioSpec& spec, std::ostream& out);

/// Emits the exact pipeline file formats (detection CSV, embedding CSV,
/// ground-truth CSV).
void write_scenario_files(const Scenario& scenario, const std::string& det_path,
                          const std::string& emb_path, const std::string& gt_path);

}  // namespace proptrack
