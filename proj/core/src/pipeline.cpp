#include "proptrack/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "proptrack/io.hpp"

namespace proptrack {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Config load_config_or_defaults(const std::string& path) {
  if (path.empty()) {
    Config config;
    config.validate();
    return config;
  }
  return load_config(path);
}

std::vector<Detection> read_sequence(const std::string& det_path, const std::string& emb_path,
                                     const Config& config, ParseLog* log) {
  std::ifstream det_in(det_path, std::ios::binary);
  if (!det_in) throw std::runtime_error("cannot open detection file: " + det_path);
  auto detections = parse_detections(det_in, log);
  if (!detections.empty()) {
    std::ifstream emb_in(emb_path, std::ios::binary);
    if (!emb_in) throw std::runtime_error("cannot open embedding file: " + emb_path);
    const auto table = load_embeddings(emb_in, config.embedding_dim);
    attach_embeddings(detections, table, config.embedding_dim);
  }
  return detections;
}

std::vector<GroundTruthEntry> read_ground_truth(const std::string& path, ParseLog* log) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open ground-truth file: " + path);
  return parse_ground_truth(in, log);
}

}  // namespace

ScorerSpec parse_scorer_spec(const std::string& text) {
  ScorerSpec spec;
  const auto colon = text.find(':');
  const std::string kind = colon == std::string::npos ? text : text.substr(0, colon);
  spec.path = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "oracle")
    spec.kind = ScorerSpec::Kind::kOracle;
  else if (kind == "gcn")
    spec.kind = ScorerSpec::Kind::kGcn;
  else
    throw std::invalid_argument("scorer must be oracle:<gt path> or gcn:<model path>, got '" +
                                text + "'");
  return spec;
}

TrackOutcome track_sequence(const std::vector<Detection>& detections, const Config& config,
                            const ProposalScorer& scorer, bool greedy,
                            const GraphObserver& graph_observer, std::ostream* proposal_dump) {
  config.validate();
  TrackOutcome outcome;
  outcome.tracklets = build_tracklets(detections, config);

  const ProposalSet proposals =
      generate_proposals(outcome.tracklets, config, &outcome.generation, graph_observer);
  outcome.proposal_count = proposals.proposals.size();
  if (proposal_dump) dump_proposals(proposals, *proposal_dump);

  scorer.reset_call_count();
  std::map<int, int> assignment;
  if (greedy) {
    assignment = greedy_inference(proposals, scorer, outcome.tracklets);
  } else {
    assignment = deoverlap(rank_proposals(proposals, scorer));
  }
  outcome.scorer_calls = scorer.call_count();

  outcome.trajectories = assemble_trajectories(assignment, outcome.tracklets);
  if (config.interpolate)
    for (auto& t : outcome.trajectories) t = interpolate_gaps(t);
  outcome.trajectories = drop_short_tracks(std::move(outcome.trajectories), config.min_track_length);
  return outcome;
}

namespace {

void write_track_manifest(const TrackOptions& options, const Config& config,
                          const TrackOutcome& outcome, std::size_t detections,
                          std::size_t rejected, const std::string& path) {
  std::ostringstream out;
  out << "command = track\n";
  out << "detections = " << options.detections_path << "\n";
  out << "embeddings = " << options.embeddings_path << "\n";
  out << "config_file = " << (options.config_path.empty() ? "(defaults)" : options.config_path)
      << "\n";
  out << "scorer = " << options.scorer << "\n";
  out << "inference = " << (options.greedy ? "greedy" : "deoverlap") << "\n";
  out << "output = " << options.output_path << "\n";

  std::ostringstream cfg;
  write_config(config, cfg);
  std::istringstream cfg_lines(cfg.str());
  std::string line;
  while (std::getline(cfg_lines, line)) out << "config." << line << "\n";

  out << "count.detections = " << detections << "\n";
  out << "count.rejected_lines = " << rejected << "\n";
  out << "count.tracklets = " << outcome.tracklets.size() << "\n";
  out << "count.proposals = " << outcome.proposal_count << "\n";
  for (std::size_t i = 0; i < outcome.generation.new_proposals_per_iteration.size(); ++i) {
    out << "count.clusters_iter_" << (i + 1) << " = "
        << outcome.generation.clusters_per_iteration[i] << "\n";
    out << "count.proposals_iter_" << (i + 1) << " = "
        << outcome.generation.new_proposals_per_iteration[i] << "\n";
  }
  out << "count.tracks = " << outcome.trajectories.size() << "\n";
  out << "count.scorer_calls = " << outcome.scorer_calls << "\n";
  write_file(path, out.str());
}

}  // namespace

int run_track(const TrackOptions& options) {
  const auto t_start = Clock::now();
  Config config = load_config_or_defaults(options.config_path);
  if (options.seed) config.seed = *options.seed;

  ParseLog log;
  auto detections = read_sequence(options.detections_path, options.embeddings_path, config, &log);
  for (const auto& r : log.rejected) std::cerr << "warning: " << r << "\n";
  const double t_parse = ms_since(t_start);

  const ScorerSpec scorer_spec = parse_scorer_spec(options.scorer);
  std::unique_ptr<ProposalScorer> scorer;
  std::vector<Tracklet> scratch_tracklets;  // bound into the scorer below

  std::ofstream graph_dump;
  GraphObserver observer;
  if (!options.dump_graph_path.empty()) {
    graph_dump.open(options.dump_graph_path, std::ios::binary);
    if (!graph_dump) throw std::runtime_error("cannot write " + options.dump_graph_path);
    observer = [&graph_dump](int iteration, const AffinityGraph& graph) {
      graph_dump << "# iteration " << iteration << "\n";
      dump_graph(graph, graph_dump);
    };
  }
  std::ofstream proposal_dump;
  std::ostream* proposal_sink = nullptr;
  if (!options.dump_proposals_path.empty()) {
    proposal_dump.open(options.dump_proposals_path, std::ios::binary);
    if (!proposal_dump) throw std::runtime_error("cannot write " + options.dump_proposals_path);
    proposal_sink = &proposal_dump;
  }

  // The scorer needs the tracklets that track_sequence builds, so the
  // pipeline is run in two steps: build tracklets first, then score.
  TrackOutcome outcome;
  outcome.tracklets = build_tracklets(detections, config);
  const double t_tracklets = ms_since(t_start);

  switch (scorer_spec.kind) {
    case ScorerSpec::Kind::kOracle: {
      if (scorer_spec.path.empty())
        throw std::invalid_argument("oracle scorer needs a ground-truth path");
      const auto gt = read_ground_truth(scorer_spec.path, nullptr);
      scorer = std::make_unique<OracleScorer>(match_detections_to_gt(detections, gt),
                                              outcome.tracklets, config);
      break;
    }
    case ScorerSpec::Kind::kGcn: {
      if (scorer_spec.path.empty()) throw std::invalid_argument("gcn scorer needs a model path");
      GcnModel model = load_model_file(scorer_spec.path);
      if (model.embedding_dim != config.embedding_dim)
        throw std::runtime_error("model embedding_dim does not match config");
      scorer = std::make_unique<GcnScorer>(std::move(model), outcome.tracklets, config);
      break;
    }
  }

  const ProposalSet proposals =
      generate_proposals(outcome.tracklets, config, &outcome.generation, observer);
  outcome.proposal_count = proposals.proposals.size();
  if (proposal_sink) dump_proposals(proposals, *proposal_sink);
  const double t_proposals = ms_since(t_start);

  scorer->reset_call_count();
  std::map<int, int> assignment;
  if (options.greedy)
    assignment = greedy_inference(proposals, *scorer, outcome.tracklets);
  else
    assignment = deoverlap(rank_proposals(proposals, *scorer));
  outcome.scorer_calls = scorer->call_count();
  const double t_inference = ms_since(t_start);

  outcome.trajectories = assemble_trajectories(assignment, outcome.tracklets);
  if (config.interpolate)
    for (auto& t : outcome.trajectories) t = interpolate_gaps(t);
  outcome.trajectories = drop_short_tracks(std::move(outcome.trajectories), config.min_track_length);

  std::ostringstream result;
  write_tracking_output(outcome.trajectories, result);
  write_file(options.output_path, result.str());
  write_track_manifest(options, config, outcome, detections.size(), log.rejected.size(),
                       options.output_path + ".manifest");
  const double t_total = ms_since(t_start);

  if (!options.quiet) {
    std::cout << "detections " << detections.size() << ", tracklets "
              << outcome.tracklets.size() << ", proposals " << outcome.proposal_count
              << ", tracks " << outcome.trajectories.size() << ", scorer calls "
              << outcome.scorer_calls << "\n";
    std::cout << "timing_ms parse " << t_parse << ", tracklets " << (t_tracklets - t_parse)
              << ", proposals " << (t_proposals - t_tracklets) << ", inference "
              << (t_inference - t_proposals) << ", total " << t_total << "\n";
  }
  return 0;
}

int run_train(const TrainOptions& options) {
  if (options.sequences.empty()) throw std::invalid_argument("train: no sequences given");
  Config config = load_config_or_defaults(options.config_path);
  if (options.seed) config.seed = *options.seed;
  if (options.holdout &&
      (*options.holdout < 0 || *options.holdout >= static_cast<int>(options.sequences.size())))
    throw std::invalid_argument("train: holdout index out of range");

  Rng rng(config.seed);
  std::vector<TrainingSample> train_samples;
  std::vector<TrainingSample> holdout_samples;

  for (std::size_t s = 0; s < options.sequences.size(); ++s) {
    const auto& paths = options.sequences[s];
    const auto detections = read_sequence(paths.detections, paths.embeddings, config, nullptr);
    const auto gt = read_ground_truth(paths.ground_truth, nullptr);
    const auto tracklets = build_tracklets(detections, config);
    const auto proposals = generate_proposals(tracklets, config);
    const auto labeling = match_detections_to_gt(detections, gt);

    const bool is_holdout = options.holdout && *options.holdout == static_cast<int>(s);
    auto& sink = is_holdout ? holdout_samples : train_samples;
    for (const auto& p : proposals.proposals) {
      sink.push_back(make_training_sample(p, tracklets, labeling, config));
      if (!is_holdout && config.drop_prob > 0.0) {
        auto augmented = augment_sample(p, tracklets, labeling, config, config.drop_prob, rng);
        if (augmented) sink.push_back(std::move(*augmented));
      }
    }
  }
  if (train_samples.empty()) throw std::runtime_error("train: no training samples generated");
  if (!options.samples_out.empty()) {
    std::ostringstream dump;
    save_training_set(train_samples, dump);
    write_file(options.samples_out, dump.str());
  }

  TrainReport report;
  const GcnModel model = train_gcn(train_samples, config, rng, &report, options.loss);
  if (report.single_class_warning)
    std::cerr << "warning: training set contains a single class\n";
  save_model_file(model, options.model_out);

  std::ostringstream rep;
  rep << "samples = " << train_samples.size() << "\n";
  rep << "loss_kind = " << (options.loss == LossKind::kBce ? "bce" : "mse") << "\n";
  rep << "initial_loss = " << format_double(report.initial_loss) << "\n";
  rep << "final_loss = " << format_double(report.final_loss) << "\n";
  rep << "train_accuracy = " << format_double(report.train_accuracy) << "\n";
  if (options.holdout) {
    rep << "holdout_sequence = " << *options.holdout << "\n";
    rep << "holdout_samples = " << holdout_samples.size() << "\n";
    rep << "holdout_accuracy = "
        << format_double(holdout_samples.empty() ? 0.0 : corpus_accuracy(model, holdout_samples))
        << "\n";
  }
  for (std::size_t i = 0; i < report.loss_per_iteration.size(); ++i)
    rep << "loss_iter_" << (i + 1) << " = " << format_double(report.loss_per_iteration[i]) << "\n";
  write_file(options.report_out.empty() ? options.model_out + ".report" : options.report_out,
             rep.str());

  if (!options.quiet) {
    std::cout << "trained on " << train_samples.size() << " samples, train accuracy "
              << report.train_accuracy << "\n";
    if (options.holdout && !holdout_samples.empty())
      std::cout << "holdout accuracy " << corpus_accuracy(model, holdout_samples) << "\n";
  }
  return 0;
}

int run_eval(const EvalOptions& options) {
  const auto gt_entries = read_ground_truth(options.gt_path, nullptr);
  std::ifstream result_in(options.result_path, std::ios::binary);
  if (!result_in) throw std::runtime_error("cannot open result file: " + options.result_path);
  const auto predictions = parse_tracking_output(result_in);

  const auto report = evaluate_sequences(
      {{options.name, {gt_to_trajectories(gt_entries), predictions}}});
  std::cout << format_report(report);
  if (!options.report_out.empty()) {
    std::ostringstream out;
    write_report_kv(report, out);
    write_file(options.report_out, out.str());
  }
  return 0;
}

int run_synth(const SynthOptions& options) {
  ScenarioSpec spec;
  if (!options.spec_path.empty()) spec = load_scenario_spec(options.spec_path);
  if (options.seed) spec.seed = *options.seed;
  spec.validate();

  std::filesystem::create_directories(options.out_dir);
  const auto scenario = generate_scenario(spec);
  const std::string base = options.out_dir + "/";
  write_scenario_files(scenario, base + "det.txt", base + "emb.csv", base + "gt.txt");
  std::ostringstream snapshot;
  write_scenario_spec(spec, snapshot);
  write_file(base + "scenario.txt", snapshot.str());
  std::cout << "wrote " << scenario.detections.size() << " detections, "
            << scenario.ground_truth.size() << " gt entries to " << options.out_dir << "\n";
  return 0;
}

void apply_ablation_parameter(Config& config, const std::string& parameter, double value) {
  auto as_int = [&](const char* name) {
    const int v = static_cast<int>(value);
    if (static_cast<double>(v) != value)
      throw std::invalid_argument(std::string("ablate: ") + name + " takes integer values");
    return v;
  };
  if (parameter == "I")
    config.max_iterations = as_int("I");
  else if (parameter == "s_max")
    config.max_cluster_size = as_int("s_max");
  else if (parameter == "K")
    config.max_neighbors = as_int("K");
  else if (parameter == "delta")
    config.threshold_step = value;
  else
    throw std::invalid_argument("ablate: parameter must be one of I, s_max, delta, K");
}

int run_ablate(const AblateOptions& options) {
  if (options.values.empty()) throw std::invalid_argument("ablate: no values given");
  const Config base_config = load_config_or_defaults(options.config_path);

  ScenarioSpec spec;
  if (!options.spec_path.empty()) spec = load_scenario_spec(options.spec_path);
  Config scenario_config = base_config;
  scenario_config.embedding_dim = spec.embedding_dim;
  const Scenario scenario = generate_scenario(spec);
  std::vector<Detection> detections = scenario.detections;
  attach_embeddings(detections, scenario.embeddings, spec.embedding_dim);
  const auto gt_trajectories = gt_to_trajectories(scenario.ground_truth);
  const GtLabeling labeling = match_detections_to_gt(detections, scenario.ground_truth);

  // The oracle path is implicit here: ablation always scores against the
  // generated scenario's ground truth.
  const ScorerSpec scorer_spec = parse_scorer_spec(options.scorer);
  std::optional<GcnModel> model;
  if (scorer_spec.kind == ScorerSpec::Kind::kGcn) model = load_model_file(scorer_spec.path);

  std::ostringstream table;
  table << options.parameter << "\tMOTA\tIDF1\n";
  for (double value : options.values) {
    Config config = scenario_config;
    apply_ablation_parameter(config, options.parameter, value);
    config.validate();

    std::unique_ptr<ProposalScorer> scorer;
    std::vector<Tracklet> tracklets = build_tracklets(detections, config);
    if (scorer_spec.kind == ScorerSpec::Kind::kOracle)
      scorer = std::make_unique<OracleScorer>(labeling, tracklets, config);
    else
      scorer = std::make_unique<GcnScorer>(*model, tracklets, config);

    // Same pipeline as track_sequence, reusing the prebuilt tracklets.
    GenerationStats stats;
    const ProposalSet proposals = generate_proposals(tracklets, config, &stats);
    const auto assignment = deoverlap(rank_proposals(proposals, *scorer));
    auto trajectories = assemble_trajectories(assignment, tracklets);
    if (config.interpolate)
      for (auto& t : trajectories) t = interpolate_gaps(t);
    trajectories = drop_short_tracks(std::move(trajectories), config.min_track_length);

    const auto clear = compute_clear_mot(gt_trajectories, trajectories);
    const auto id = compute_idf1(gt_trajectories, trajectories);
    char row[96];
    std::snprintf(row, sizeof(row), "%g\t%.4f\t%.4f\n", value, clear.mota, id.idf1);
    table << row;
  }

  if (!options.quiet) std::cout << table.str();
  if (!options.output_path.empty()) write_file(options.output_path, table.str());
  return 0;
}

}  // namespace proptrack
