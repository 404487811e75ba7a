#include <benchmark/benchmark.h>

#include "proptrack/gcn.hpp"

using namespace proptrack;

namespace {

TrainingSample random_sample(Rng& rng, int vertices, int feature_dim) {
  TrainingSample s;
  s.features = Matrix(vertices, feature_dim);
  for (Eigen::Index r = 0; r < s.features.rows(); ++r)
    for (Eigen::Index c = 0; c < s.features.cols(); ++c)
      s.features(r, c) = rng.uniform(-1.0, 1.0);
  s.affinity = Matrix::Zero(vertices, vertices);
  for (int i = 0; i < vertices; ++i)
    for (int j = i + 1; j < vertices; ++j)
      s.affinity(i, j) = s.affinity(j, i) = rng.uniform(0.0, 1.0);
  s.label = 1.0;
  return s;
}

}  // namespace

static void BM_GcnForward(benchmark::State& state) {
  Config config;
  config.embedding_dim = 16;
  Rng rng(1);
  const GcnModel model = init_gcn(config, rng);
  const auto sample = random_sample(rng, static_cast<int>(state.range(0)), model.feature_dim());
  for (auto _ : state) {
    benchmark::DoNotOptimize(gcn_forward(model, sample.features, sample.affinity));
  }
}
BENCHMARK(BM_GcnForward)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_GcnGradients(benchmark::State& state) {
  Config config;
  config.embedding_dim = 16;
  Rng rng(2);
  const GcnModel model = init_gcn(config, rng);
  const auto sample = random_sample(rng, static_cast<int>(state.range(0)), model.feature_dim());
  for (auto _ : state) {
    auto grads = gcn_gradients(model, sample, LossKind::kBce);
    benchmark::DoNotOptimize(grads);
  }
}
BENCHMARK(BM_GcnGradients)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_AdamStep(benchmark::State& state) {
  Config config;
  config.embedding_dim = 16;
  Rng rng(3);
  GcnModel model = init_gcn(config, rng);
  const auto sample = random_sample(rng, 4, model.feature_dim());
  const auto grads = gcn_gradients(model, sample, LossKind::kBce);
  AdamState adam = make_adam_state(model);
  for (auto _ : state) {
    adam_step(model, grads, adam, config);
    benchmark::DoNotOptimize(model.classifier_b);
  }
}
BENCHMARK(BM_AdamStep);
