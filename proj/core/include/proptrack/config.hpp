#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace proptrack {

/// Pipeline parameters. Defaults follow the reference configuration; anything
/// the reference leaves open (gating radii, dual thresholds, network widths,
/// embedding dimensionality) carries a declared artifact default instead.
struct Config {
  // Affinity controls.
  double sigma_t = 40.0;  // frames
  double sigma_p = 100.0;  // pixels

  // Proposal generation.
  int max_iterations = 10;    // I
  int max_neighbors = 3;      // K
  int max_cluster_size = 2;   // s_max
  double threshold_step = 0.05;  // delta
  bool strict_cluster_size = false;  // accept |c| < s_max instead of <=
  bool klimit_intersection = false;  // keep an edge only if in both endpoints' top-K

  // Gating radii at full relaxation, and the per-iteration relaxation
  // multipliers (iteration 1 uses the first entry; iterations past the end
  // use the last entry).
  double tau_t = 60.0;   // frames
  double tau_p = 300.0;  // pixels
  double tau_a = 0.5;    // cosine distance
  std::vector<double> gate_relaxation = {0.25, 0.5, 0.75, 1.0};

  // Dual-threshold tracklet linking.
  double theta1 = 0.7;
  double theta2 = 0.05;

  // Quality score.
  double quality_weight = 1.0;      // w
  double recall_normalizer = 200.0;  // C

  // Purity network.
  int gcn_layers = 4;  // L
  std::vector<int> gcn_hidden = {64, 64, 64, 64};
  int embedding_dim = 16;  // D_a
  bool binarize_purity = false;  // threshold the predicted purity at 0.5

  // Training.
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double weight_decay = 1e-4;
  int batch_size = 2048;
  int train_iterations = 100;
  double drop_prob = 0.1;  // augmentation p_drop

  // Inference.
  bool interpolate = true;
  int min_track_length = 0;  // 0 disables the filter

  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Flat `key = value` document; `#` starts a comment. Unknown keys are an
/// error so typos do not silently fall back to defaults.
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

/// Full snapshot, one key per line, parseable by parse_config.
void write_config(const Config& config, std::ostream& out);

}  // namespace proptrack
