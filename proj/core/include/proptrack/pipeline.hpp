#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proptrack/config.hpp"
#include "proptrack/gcn.hpp"
#include "proptrack/inference.hpp"
#include "proptrack/metrics.hpp"
#include "proptrack/proposals.hpp"
#include "proptrack/scoring.hpp"
#include "proptrack/synth.hpp"
#include "proptrack/tracklet.hpp"

namespace proptrack {

/// `oracle:<gt path>` or `gcn:<model path>`.
struct ScorerSpec {
  enum class Kind { kOracle, kGcn };
  Kind kind = Kind::kOracle;
  std::string path;
};
ScorerSpec parse_scorer_spec(const std::string& text);

/// In-memory pipeline result; what cmd_track writes out and what the ablation
/// runner evaluates.
struct TrackOutcome {
  std::vector<Tracklet> tracklets;
  std::vector<Trajectory> trajectories;
  GenerationStats generation;
  std::size_t proposal_count = 0;
  std::size_t scorer_calls = 0;
};

/// preprocess -> proposals -> score -> rank -> de-overlap (or greedy) ->
/// assemble -> interpolate. Detections must carry embeddings.
TrackOutcome track_sequence(const std::vector<Detection>& detections, const Config& config,
                            const ProposalScorer& scorer, bool greedy = false,
                            const GraphObserver& graph_observer = {},
                            std::ostream* proposal_dump = nullptr);

struct TrackOptions {
  std::string detections_path;
  std::string embeddings_path;
  std::string config_path;  // empty: defaults
  std::string scorer;       // parse_scorer_spec syntax
  std::string output_path;
  std::optional<std::uint64_t> seed;
  std::string dump_proposals_path;
  std::string dump_graph_path;
  bool greedy = false;
  bool quiet = false;
};
int run_track(const TrackOptions& options);

struct SequencePaths {
  std::string detections;
  std::string embeddings;
  std::string ground_truth;
};

struct TrainOptions {
  std::vector<SequencePaths> sequences;
  std::string config_path;
  std::string model_out;
  std::string report_out;         // empty: model_out + ".report"
  std::string samples_out;        // optional training-set dump
  std::optional<int> holdout;     // index into sequences, excluded from training
  std::optional<std::uint64_t> seed;
  LossKind loss = LossKind::kBce;
  bool quiet = false;
};
int run_train(const TrainOptions& options);

struct EvalOptions {
  std::string gt_path;
  std::string result_path;
  std::string report_out;  // optional key-value dump
  std::string name = "sequence";
};
int run_eval(const EvalOptions& options);

struct SynthOptions {
  std::string spec_path;  // empty: spec defaults
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};
int run_synth(const SynthOptions& options);

struct AblateOptions {
  std::string spec_path;           // scenario to sweep on
  std::string parameter;           // I, s_max, delta or K
  std::vector<double> values;
  std::string scorer = "oracle";   // "oracle" (scenario GT) or "gcn:<model>"
  std::string config_path;
  std::string output_path;         // optional table file
  bool quiet = false;
};
int run_ablate(const AblateOptions& options);

/// Apply one ablation parameter value to a config.
void apply_ablation_parameter(Config& config, const std::string& parameter, double value);

}  // namespace proptrack
