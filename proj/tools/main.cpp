// Batch multi-object-tracking association pipeline: builds tracklets from
// detections plus appearance embeddings, grows trajectory proposals by
// iterative graph clustering, scores them with an oracle or a trained purity
// network, and resolves overlaps into final tracks.

#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "proptrack/pipeline.hpp"

namespace {

std::vector<proptrack::SequencePaths> parse_sequence_args(const std::vector<std::string>& args) {
  std::vector<proptrack::SequencePaths> out;
  for (const auto& arg : args) {
    proptrack::SequencePaths paths;
    const auto first = arg.find(',');
    const auto second = first == std::string::npos ? std::string::npos : arg.find(',', first + 1);
    if (first == std::string::npos || second == std::string::npos)
      throw CLI::ValidationError("--seq expects det,emb,gt (comma separated)");
    paths.detections = arg.substr(0, first);
    paths.embeddings = arg.substr(first + 1, second - first - 1);
    paths.ground_truth = arg.substr(second + 1);
    out.push_back(std::move(paths));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proposal-based multi-object tracking"};
  app.require_subcommand(1);

  // track
  proptrack::TrackOptions track;
  std::uint64_t track_seed = 0;
  auto* cmd_track = app.add_subcommand("track", "associate detections into trajectories");
  cmd_track->add_option("--det", track.detections_path, "detection CSV")->required();
  cmd_track->add_option("--emb", track.embeddings_path, "embedding sidecar")->required();
  cmd_track->add_option("--config", track.config_path, "config file");
  cmd_track->add_option("--scorer", track.scorer, "oracle:<gt> or gcn:<model>")->required();
  cmd_track->add_option("--out", track.output_path, "tracking output file")->required();
  auto* track_seed_opt = cmd_track->add_option("--seed", track_seed, "seed override");
  cmd_track->add_option("--dump-proposals", track.dump_proposals_path, "proposal dump file");
  cmd_track->add_option("--dump-graph", track.dump_graph_path, "affinity graph dump file");
  cmd_track->add_flag("--greedy", track.greedy, "use the iterative-greedy baseline");
  cmd_track->add_flag("--quiet", track.quiet, "suppress progress output");

  // train
  proptrack::TrainOptions train;
  std::uint64_t train_seed = 0;
  int holdout = -1;
  std::vector<std::string> seq_args;
  std::string loss_name = "bce";
  auto* cmd_train = app.add_subcommand("train", "train the purity classifier");
  cmd_train->add_option("--seq", seq_args, "sequence triple det,emb,gt (repeatable)")->required();
  cmd_train->add_option("--config", train.config_path, "config file");
  cmd_train->add_option("--model-out", train.model_out, "model output file")->required();
  cmd_train->add_option("--report-out", train.report_out, "training report file");
  cmd_train->add_option("--dump-samples", train.samples_out, "training-set dump file");
  auto* holdout_opt =
      cmd_train->add_option("--holdout", holdout, "sequence index held out for validation");
  auto* train_seed_opt = cmd_train->add_option("--seed", train_seed, "seed override");
  cmd_train->add_option("--loss", loss_name, "bce or mse")
      ->check(CLI::IsMember({"bce", "mse"}));
  cmd_train->add_flag("--quiet", train.quiet, "suppress progress output");

  // eval
  proptrack::EvalOptions eval;
  auto* cmd_eval = app.add_subcommand("eval", "score a result file against ground truth");
  cmd_eval->add_option("--gt", eval.gt_path, "ground-truth CSV")->required();
  cmd_eval->add_option("--result", eval.result_path, "tracking output file")->required();
  cmd_eval->add_option("--report-out", eval.report_out, "key-value report file");
  cmd_eval->add_option("--name", eval.name, "sequence name in the report");

  // synth
  proptrack::SynthOptions synth;
  std::uint64_t synth_seed = 0;
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic scenario");
  cmd_synth->add_option("--spec", synth.spec_path, "scenario spec file");
  cmd_synth->add_option("--out-dir", synth.out_dir, "output directory")->required();
  auto* synth_seed_opt = cmd_synth->add_option("--seed", synth_seed, "seed override");

  // ablate
  proptrack::AblateOptions ablate;
  std::vector<double> values;
  auto* cmd_ablate = app.add_subcommand("ablate", "sweep one generation parameter");
  cmd_ablate->add_option("--spec", ablate.spec_path, "scenario spec file");
  cmd_ablate->add_option("--param", ablate.parameter, "I, s_max, delta or K")->required();
  cmd_ablate->add_option("--values", values, "parameter values")->required()->delimiter(',');
  cmd_ablate->add_option("--scorer", ablate.scorer, "oracle or gcn:<model>");
  cmd_ablate->add_option("--config", ablate.config_path, "config file");
  cmd_ablate->add_option("--out", ablate.output_path, "table output file");
  cmd_ablate->add_flag("--quiet", ablate.quiet, "suppress table output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_track->parsed()) {
      if (track_seed_opt->count()) track.seed = track_seed;
      return proptrack::run_track(track);
    }
    if (cmd_train->parsed()) {
      train.sequences = parse_sequence_args(seq_args);
      if (holdout_opt->count()) train.holdout = holdout;
      if (train_seed_opt->count()) train.seed = train_seed;
      train.loss = loss_name == "mse" ? proptrack::LossKind::kMse : proptrack::LossKind::kBce;
      return proptrack::run_train(train);
    }
    if (cmd_eval->parsed()) return proptrack::run_eval(eval);
    if (cmd_synth->parsed()) {
      if (synth_seed_opt->count()) synth.seed = synth_seed;
      return proptrack::run_synth(synth);
    }
    if (cmd_ablate->parsed()) {
      ablate.values = values;
      return proptrack::run_ablate(ablate);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
