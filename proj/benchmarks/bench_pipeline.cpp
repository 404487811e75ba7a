#include <benchmark/benchmark.h>

#include "proptrack/io.hpp"
#include "proptrack/pipeline.hpp"
#include "proptrack/scoring.hpp"
#include "proptrack/synth.hpp"

using namespace proptrack;

namespace {

ScenarioSpec bench_scene(int identities, int frames) {
  ScenarioSpec spec;
  spec.num_identities = identities;
  spec.frames = frames;
  spec.embedding_dim = 16;
  spec.embedding_noise = 0.1;
  spec.jitter_sigma = 1.0;
  spec.box_noise = 0.5;
  for (int i = 1; i <= identities; ++i)
    spec.occlusions.push_back({i, 20 + 3 * i, 27 + 3 * i});
  spec.seed = 7;
  return spec;
}

}  // namespace

static void BM_BuildTracklets(benchmark::State& state) {
  const auto spec = bench_scene(static_cast<int>(state.range(0)), 150);
  const Scenario scenario = generate_scenario(spec);
  auto detections = scenario.detections;
  attach_embeddings(detections, scenario.embeddings, spec.embedding_dim);
  Config config;
  config.embedding_dim = spec.embedding_dim;
  for (auto _ : state) {
    auto tracklets = build_tracklets(detections, config);
    benchmark::DoNotOptimize(tracklets);
  }
}
BENCHMARK(BM_BuildTracklets)->Arg(5)->Arg(10)->Arg(20);

static void BM_GenerateProposals(benchmark::State& state) {
  const auto spec = bench_scene(static_cast<int>(state.range(0)), 150);
  const Scenario scenario = generate_scenario(spec);
  auto detections = scenario.detections;
  attach_embeddings(detections, scenario.embeddings, spec.embedding_dim);
  Config config;
  config.embedding_dim = spec.embedding_dim;
  const auto tracklets = build_tracklets(detections, config);
  for (auto _ : state) {
    auto proposals = generate_proposals(tracklets, config);
    benchmark::DoNotOptimize(proposals);
  }
}
BENCHMARK(BM_GenerateProposals)->Arg(5)->Arg(10)->Arg(20);

static void BM_TrackSequenceOracle(benchmark::State& state) {
  const auto spec = bench_scene(static_cast<int>(state.range(0)), 150);
  const Scenario scenario = generate_scenario(spec);
  auto detections = scenario.detections;
  attach_embeddings(detections, scenario.embeddings, spec.embedding_dim);
  Config config;
  config.embedding_dim = spec.embedding_dim;
  const auto labeling = match_detections_to_gt(detections, scenario.ground_truth);
  for (auto _ : state) {
    const auto tracklets = build_tracklets(detections, config);
    const OracleScorer scorer(labeling, tracklets, config);
    auto outcome = track_sequence(detections, config, scorer);
    benchmark::DoNotOptimize(outcome);
  }
}
BENCHMARK(BM_TrackSequenceOracle)->Arg(5)->Arg(10)->Arg(20);
