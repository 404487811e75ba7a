#include "proptrack/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "proptrack/io.hpp"

namespace proptrack {

std::vector<Vertex> proposal_members(const Proposal& proposal,
                                     const std::vector<Tracklet>& tracklets) {
  std::vector<Vertex> members;
  members.reserve(proposal.base_tracklets.size());
  for (int id : proposal.base_tracklets) {
    if (id < 0 || id >= static_cast<int>(tracklets.size()))
      throw std::out_of_range("proposal_members: unknown tracklet id");
    members.push_back(tracklet_to_vertex(tracklets[id], 0));
  }
  std::sort(members.begin(), members.end(),
            [](const Vertex& a, const Vertex& b) { return a.start_frame < b.start_frame; });
  for (std::size_t i = 0; i < members.size(); ++i) members[i].vertex_id = static_cast<int>(i);
  return members;
}

Matrix encode_spatiotemporal(const std::vector<Vertex>& members) {
  const int n = static_cast<int>(members.size());
  if (n == 0) throw std::invalid_argument("encode_spatiotemporal: empty proposal");
  Matrix st = Matrix::Zero(n, 5);
  st(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const BoundingBox& prev = members[i - 1].end_box;
    const BoundingBox& next = members[i].start_box;
    st(i, 0) = 2.0 * (next.x - prev.x) / (prev.w + next.w);
    st(i, 1) = 2.0 * (next.y - prev.y) / (prev.h + next.h);
    st(i, 2) = std::log(next.h / prev.h);
    st(i, 3) = std::log(next.w / prev.w);
    st(i, 4) = static_cast<double>(members[i].start_frame - members[i - 1].end_frame);
  }
  return st;
}

Matrix build_features(const std::vector<Vertex>& members) {
  const int n = static_cast<int>(members.size());
  if (n == 0) throw std::invalid_argument("build_features: empty proposal");
  const int dim = static_cast<int>(members.front().embedding.size());
  const Matrix st = encode_spatiotemporal(members);
  Matrix f(n, dim + 5);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(members[i].embedding.size()) != dim)
      throw std::invalid_argument("build_features: inconsistent embedding dimensions");
    for (int k = 0; k < dim; ++k) f(i, k) = members[i].embedding[k];
    f.block(i, dim, 1, 5) = st.row(i);
  }
  return f;
}

Matrix proposal_affinity_matrix(const std::vector<Vertex>& members, const Config& config) {
  const int n = static_cast<int>(members.size());
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = std::clamp(pair_affinity(members[i], members[j], config), 0.0, 1.0);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

GcnModel init_gcn(const Config& config, Rng& rng) {
  config.validate();
  GcnModel model;
  model.embedding_dim = config.embedding_dim;
  int width_in = model.feature_dim();
  for (int l = 0; l < config.gcn_layers; ++l) {
    const int width_out = config.gcn_hidden[l];
    Matrix w(width_in, width_out);
    const double bound = std::sqrt(6.0 / static_cast<double>(width_in));
    for (int r = 0; r < width_in; ++r)
      for (int c = 0; c < width_out; ++c) w(r, c) = rng.uniform(-bound, bound);
    model.layers.push_back(std::move(w));
    width_in = width_out;
  }
  model.classifier_w = Vector(width_in);
  const double bound = std::sqrt(6.0 / static_cast<double>(width_in));
  for (int r = 0; r < width_in; ++r) model.classifier_w(r) = rng.uniform(-bound, bound);
  model.classifier_b = 0.0;
  return model;
}

namespace {

void check_dims(const GcnModel& model, const Matrix& features, const Matrix& affinity) {
  if (features.cols() != model.feature_dim())
    throw std::invalid_argument("gcn: feature width does not match the model");
  if (affinity.rows() != features.rows() || affinity.cols() != features.rows())
    throw std::invalid_argument("gcn: affinity matrix shape mismatch");
  if (model.layers.empty()) throw std::invalid_argument("gcn: model has no layers");
}

// Row-normalized propagation matrix D^-1 (A + I); D is always invertible
// because the identity contributes 1 to every row sum.
Matrix propagation(const Matrix& affinity) {
  Matrix m = affinity + Matrix::Identity(affinity.rows(), affinity.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double d = m.row(r).sum();
    m.row(r) /= d;
  }
  return m;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct ForwardTrace {
  Matrix prop;                      // D^-1 (A + I)
  std::vector<Matrix> activations;  // H_0 .. H_L
  std::vector<Matrix> pre_relu;     // Z_0 .. Z_{L-1}
  Vector pooled;
  std::vector<Eigen::Index> argmax_row;
  double logit = 0.0;
  double probability = 0.0;
};

ForwardTrace run_forward(const GcnModel& model, const Matrix& features, const Matrix& affinity) {
  check_dims(model, features, affinity);
  ForwardTrace t;
  t.prop = propagation(affinity);
  t.activations.push_back(features);
  for (const Matrix& w : model.layers) {
    const Matrix z = t.prop * t.activations.back() * w;
    t.pre_relu.push_back(z);
    t.activations.push_back(z.cwiseMax(0.0));
  }
  const Matrix& top = t.activations.back();
  t.pooled = Vector(top.cols());
  t.argmax_row.resize(top.cols());
  for (Eigen::Index c = 0; c < top.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < top.rows(); ++r)
      if (top(r, c) > top(best, c)) best = r;
    t.argmax_row[c] = best;
    t.pooled(c) = top(best, c);
  }
  t.logit = model.classifier_w.dot(t.pooled) + model.classifier_b;
  t.probability = sigmoid(t.logit);
  return t;
}

}  // namespace

double gcn_forward(const GcnModel& model, const Matrix& features, const Matrix& affinity) {
  const double p = run_forward(model, features, affinity).probability;
  return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

double sample_loss(double probability, double label, LossKind kind) {
  const double p = std::clamp(probability, 1e-12, 1.0 - 1e-12);
  if (kind == LossKind::kMse) return (p - label) * (p - label);
  return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
}

GcnGradients gcn_gradients(const GcnModel& model, const TrainingSample& sample, LossKind kind,
                           double* loss_out, double* probability_out) {
  const ForwardTrace t = run_forward(model, sample.features, sample.affinity);
  const double p = t.probability;
  const double y = sample.label;
  if (loss_out) *loss_out = sample_loss(p, y, kind);
  if (probability_out) *probability_out = p;

  // d loss / d logit. BCE through the logistic collapses to p - y; MSE keeps
  // the logistic derivative.
  const double dlogit = kind == LossKind::kBce ? (p - y) : 2.0 * (p - y) * p * (1.0 - p);

  GcnGradients g;
  g.classifier_w = dlogit * t.pooled;
  g.classifier_b = dlogit;

  const Vector dpooled = dlogit * model.classifier_w;
  Matrix dh = Matrix::Zero(t.activations.back().rows(), t.activations.back().cols());
  for (Eigen::Index c = 0; c < dh.cols(); ++c) dh(t.argmax_row[c], c) = dpooled(c);

  const int num_layers = static_cast<int>(model.layers.size());
  g.layers.resize(num_layers);
  for (int l = num_layers - 1; l >= 0; --l) {
    const Matrix dz = (t.pre_relu[l].array() > 0.0).cast<double>().matrix().cwiseProduct(dh);
    g.layers[l] = (t.prop * t.activations[l]).transpose() * dz;
    dh = t.prop.transpose() * dz * model.layers[l].transpose();
  }
  return g;
}

AdamState make_adam_state(const GcnModel& model) {
  AdamState s;
  for (const Matrix& w : model.layers) {
    s.m_layers.push_back(Matrix::Zero(w.rows(), w.cols()));
    s.v_layers.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  s.m_cls = Vector::Zero(model.classifier_w.size());
  s.v_cls = Vector::Zero(model.classifier_w.size());
  return s;
}

namespace {

void adam_update(Matrix& w, const Matrix& g, Matrix& m, Matrix& v, double lr, double b1,
                 double b2, double eps, double wd, long step) {
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
  const Matrix m_hat = m / c1;
  const Matrix v_hat = v / c2;
  w -= lr * (m_hat.array() / (v_hat.array().sqrt() + eps)).matrix();
  if (wd != 0.0) w -= lr * wd * w;  // decoupled decay
}

}  // namespace

void adam_step(GcnModel& model, const GcnGradients& grads, AdamState& state,
               const Config& config) {
  ++state.step;
  const double lr = config.learning_rate, b1 = config.adam_beta1, b2 = config.adam_beta2;
  const double eps = config.adam_epsilon, wd = config.weight_decay;
  for (std::size_t l = 0; l < model.layers.size(); ++l)
    adam_update(model.layers[l], grads.layers[l], state.m_layers[l], state.v_layers[l], lr, b1,
                b2, eps, wd, state.step);

  Matrix cls = model.classifier_w;
  Matrix gcls = grads.classifier_w;
  Matrix mcls = state.m_cls, vcls = state.v_cls;
  adam_update(cls, gcls, mcls, vcls, lr, b1, b2, eps, wd, state.step);
  model.classifier_w = cls;
  state.m_cls = mcls;
  state.v_cls = vcls;

  state.m_b = b1 * state.m_b + (1.0 - b1) * grads.classifier_b;
  state.v_b = b2 * state.v_b + (1.0 - b2) * grads.classifier_b * grads.classifier_b;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  model.classifier_b -= lr * ((state.m_b / c1) / (std::sqrt(state.v_b / c2) + eps));
  if (wd != 0.0) model.classifier_b -= lr * wd * model.classifier_b;
}

double corpus_loss(const GcnModel& model, const std::vector<TrainingSample>& samples,
                   LossKind kind) {
  double total = 0.0;
  for (const auto& s : samples)
    total += sample_loss(gcn_forward(model, s.features, s.affinity), s.label, kind);
  return samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
}

double corpus_accuracy(const GcnModel& model, const std::vector<TrainingSample>& samples) {
  if (samples.empty()) return 0.0;
  int correct = 0;
  for (const auto& s : samples) {
    const double p = gcn_forward(model, s.features, s.affinity);
    if ((p > 0.5) == (s.label > 0.5)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

GcnModel train_gcn(const std::vector<TrainingSample>& samples, const Config& config, Rng& rng,
                   TrainReport* report, LossKind kind) {
  if (samples.empty()) throw std::invalid_argument("train_gcn: no samples");
  GcnModel model = init_gcn(config, rng);

  bool has_pure = false, has_impure = false;
  for (const auto& s : samples) (s.label > 0.5 ? has_pure : has_impure) = true;
  if (report) {
    report->single_class_warning = !(has_pure && has_impure);
    report->initial_loss = corpus_loss(model, samples, kind);
  }

  AdamState state = make_adam_state(model);
  std::vector<int> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::size_t cursor = order.size();  // forces an initial shuffle

  const std::size_t batch = std::min<std::size_t>(config.batch_size, samples.size());
  for (int it = 0; it < config.train_iterations; ++it) {
    if (cursor + batch > order.size()) {
      rng.shuffle(order);
      cursor = 0;
    }
    GcnGradients sum;
    sum.layers.reserve(model.layers.size());
    for (const Matrix& w : model.layers) sum.layers.push_back(Matrix::Zero(w.rows(), w.cols()));
    sum.classifier_w = Vector::Zero(model.classifier_w.size());
    sum.classifier_b = 0.0;

    double batch_loss = 0.0;
    for (std::size_t k = 0; k < batch; ++k) {
      const TrainingSample& s = samples[order[cursor + k]];
      double loss = 0.0;
      const GcnGradients g = gcn_gradients(model, s, kind, &loss);
      batch_loss += loss;
      for (std::size_t l = 0; l < sum.layers.size(); ++l) sum.layers[l] += g.layers[l];
      sum.classifier_w += g.classifier_w;
      sum.classifier_b += g.classifier_b;
    }
    cursor += batch;

    const double inv = 1.0 / static_cast<double>(batch);
    for (auto& g : sum.layers) g *= inv;
    sum.classifier_w *= inv;
    sum.classifier_b *= inv;
    adam_step(model, sum, state, config);
    if (report) report->loss_per_iteration.push_back(batch_loss * inv);
  }

  if (report) {
    report->final_loss = corpus_loss(model, samples, kind);
    report->train_accuracy = corpus_accuracy(model, samples);
  }
  return model;
}

void save_model(const GcnModel& model, std::ostream& out) {
  out << "ptgcn 1\n";
  out << "embedding_dim " << model.embedding_dim << "\n";
  out << "layers " << model.layers.size() << "\n";
  out << "dims " << model.feature_dim();
  for (const Matrix& w : model.layers) out << ' ' << w.cols();
  out << "\n";
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Matrix& w = model.layers[l];
    out << "W" << l << "\n";
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(w(r, c));
      }
      out << "\n";
    }
  }
  out << "classifier\n";
  for (Eigen::Index r = 0; r < model.classifier_w.size(); ++r) {
    if (r) out << ' ';
    out << format_double(model.classifier_w(r));
  }
  out << "\nbias " << format_double(model.classifier_b) << "\n";
}

GcnModel load_model(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "ptgcn" || version != 1)
    throw std::runtime_error("model file: unrecognized header");
  std::string key;
  GcnModel model;
  int num_layers = 0;
  in >> key >> model.embedding_dim;
  if (key != "embedding_dim") throw std::runtime_error("model file: expected embedding_dim");
  in >> key >> num_layers;
  if (key != "layers" || num_layers < 1) throw std::runtime_error("model file: bad layer count");
  in >> key;
  if (key != "dims") throw std::runtime_error("model file: expected dims");
  std::vector<int> dims(num_layers + 1);
  for (int& d : dims) {
    in >> d;
    if (!in || d < 1) throw std::runtime_error("model file: bad dimension");
  }
  if (dims[0] != model.embedding_dim + 5)
    throw std::runtime_error("model file: feature width does not match embedding_dim");
  for (int l = 0; l < num_layers; ++l) {
    in >> key;
    if (key != "W" + std::to_string(l)) throw std::runtime_error("model file: expected W" + std::to_string(l));
    Matrix w(dims[l], dims[l + 1]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        if (!(in >> w(r, c))) throw std::runtime_error("model file: truncated weights");
    model.layers.push_back(std::move(w));
  }
  in >> key;
  if (key != "classifier") throw std::runtime_error("model file: expected classifier");
  model.classifier_w = Vector(dims[num_layers]);
  for (Eigen::Index r = 0; r < model.classifier_w.size(); ++r)
    if (!(in >> model.classifier_w(r))) throw std::runtime_error("model file: truncated classifier");
  in >> key >> model.classifier_b;
  if (key != "bias" || !in) throw std::runtime_error("model file: expected bias");
  return model;
}

void save_training_set(const std::vector<TrainingSample>& samples, std::ostream& out) {
  out << "ptset 1\n";
  out << "samples " << samples.size() << "\n";
  for (const auto& s : samples) {
    out << "sample " << s.features.rows() << ' ' << s.features.cols() << ' '
        << format_double(s.label) << "\n";
    for (Eigen::Index r = 0; r < s.features.rows(); ++r) {
      for (Eigen::Index c = 0; c < s.features.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(s.features(r, c));
      }
      out << "\n";
    }
    for (Eigen::Index r = 0; r < s.affinity.rows(); ++r) {
      for (Eigen::Index c = 0; c < s.affinity.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(s.affinity(r, c));
      }
      out << "\n";
    }
  }
}

std::vector<TrainingSample> load_training_set(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "ptset" || version != 1)
    throw std::runtime_error("training-set file: unrecognized header");
  std::string key;
  std::size_t count = 0;
  in >> key >> count;
  if (key != "samples") throw std::runtime_error("training-set file: expected sample count");
  std::vector<TrainingSample> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::Index rows = 0, cols = 0;
    TrainingSample s;
    in >> key >> rows >> cols >> s.label;
    if (key != "sample" || !in || rows < 1 || cols < 6)
      throw std::runtime_error("training-set file: bad sample header");
    s.features = Matrix(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        if (!(in >> s.features(r, c)))
          throw std::runtime_error("training-set file: truncated features");
    s.affinity = Matrix(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < rows; ++c)
        if (!(in >> s.affinity(r, c)))
          throw std::runtime_error("training-set file: truncated affinity");
    samples.push_back(std::move(s));
  }
  return samples;
}

void save_model_file(const GcnModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  save_model(model, out);
}

GcnModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return load_model(in);
}

}  // namespace proptrack
