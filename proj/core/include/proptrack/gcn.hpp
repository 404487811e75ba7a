#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "proptrack/config.hpp"
#include "proptrack/graph.hpp"
#include "proptrack/proposals.hpp"
#include "proptrack/random.hpp"
#include "proptrack/tracklet.hpp"

namespace proptrack {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A proposal's member tracklets as singleton vertices, sorted ascending by
/// start frame. This is the vertex list the purity network sees.
std::vector<Vertex> proposal_members(const Proposal& proposal,
                                     const std::vector<Tracklet>& tracklets);

/// N x 5 spatio-temporal encoding: row 0 is (1,0,0,0,0); row i relates member
/// i-1's ending box to member i's starting box (normalized offsets, log size
/// ratios, frame gap).
Matrix encode_spatiotemporal(const std::vector<Vertex>& members);

/// N x (D_a + 5) rows of concat(embedding, st).
Matrix build_features(const std::vector<Vertex>& members);

/// Fully-connected symmetric affinity over the members, clamped to [0,1],
/// zero diagonal.
Matrix proposal_affinity_matrix(const std::vector<Vertex>& members, const Config& config);

struct GcnModel {
  int embedding_dim = 0;
  std::vector<Matrix> layers;  // W_l, width_in x width_out
  Vector classifier_w;
  double classifier_b = 0.0;

  int feature_dim() const { return embedding_dim + 5; }
};

/// Kaiming-style uniform init scaled by fan-in, deterministic per rng state.
GcnModel init_gcn(const Config& config, Rng& rng);

/// Purity probability in (0,1): L rounds of
/// relu(D^-1 (A + I) F W_l) with D the row sums of (A + I), column-wise max
/// pooling over the vertices, affine classifier, logistic squashing.
double gcn_forward(const GcnModel& model, const Matrix& features, const Matrix& affinity);

struct TrainingSample {
  Matrix features;
  Matrix affinity;
  double label = 0.0;  // 1 pure, 0 impure
};

enum class LossKind { kBce, kMse };

double sample_loss(double probability, double label, LossKind kind);

struct GcnGradients {
  std::vector<Matrix> layers;
  Vector classifier_w;
  double classifier_b = 0.0;
};

/// Exact analytic gradients of the chosen loss at the sample.
GcnGradients gcn_gradients(const GcnModel& model, const TrainingSample& sample, LossKind kind,
                           double* loss_out = nullptr, double* probability_out = nullptr);

struct AdamState {
  std::vector<Matrix> m_layers, v_layers;
  Vector m_cls, v_cls;
  double m_b = 0.0, v_b = 0.0;
  long step = 0;
};
AdamState make_adam_state(const GcnModel& model);

/// Adam with bias correction and decoupled weight decay.
void adam_step(GcnModel& model, const GcnGradients& grads, AdamState& state,
               const Config& config);

struct TrainReport {
  std::vector<double> loss_per_iteration;  // mean batch loss
  double initial_loss = 0.0;               // corpus mean before training
  double final_loss = 0.0;                 // corpus mean after training
  double train_accuracy = 0.0;             // 0.5-threshold accuracy on the corpus
  bool single_class_warning = false;
};

/// Minibatch training over shuffled samples for config.train_iterations
/// steps.
GcnModel train_gcn(const std::vector<TrainingSample>& samples, const Config& config, Rng& rng,
                   TrainReport* report = nullptr, LossKind kind = LossKind::kBce);

double corpus_loss(const GcnModel& model, const std::vector<TrainingSample>& samples,
                   LossKind kind);
double corpus_accuracy(const GcnModel& model, const std::vector<TrainingSample>& samples);

/// Versioned text container with exact-round-trip numbers.
void save_model(const GcnModel& model, std::ostream& out);
GcnModel load_model(std::istream& in);
void save_model_file(const GcnModel& model, const std::string& path);
GcnModel load_model_file(const std::string& path);

/// Training sets travel in the same container style as models.
void save_training_set(const std::vector<TrainingSample>& samples, std::ostream& out);
std::vector<TrainingSample> load_training_set(std::istream& in);

}  // namespace proptrack
