#include "proptrack/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "proptrack/io.hpp"

namespace proptrack {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("config: " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + v);
  }
  if (pos != v.size())
    throw std::invalid_argument("config: trailing characters in value for '" + key + "': " + v);
  return out;
}

int to_int(const std::string& v, const std::string& key) {
  const double d = to_double(v, key);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw std::invalid_argument("config: '" + key + "' must be an integer, got " + v);
  return i;
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: '" + key + "' must be true/false, got " + v);
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& v, const std::string& key, F convert) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(convert(item, key));
  }
  return out;
}

}  // namespace

void Config::validate() const {
  require(sigma_t > 0.0, "sigma_t must be > 0");
  require(sigma_p > 0.0, "sigma_p must be > 0");
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(max_neighbors >= 1, "max_neighbors must be >= 1");
  require(max_cluster_size >= 1, "max_cluster_size must be >= 1");
  require(threshold_step > 0.0, "threshold_step must be > 0");
  require(tau_t > 0.0, "tau_t must be > 0");
  require(tau_p > 0.0, "tau_p must be > 0");
  require(tau_a > 0.0, "tau_a must be > 0");
  require(!gate_relaxation.empty(), "gate_relaxation must not be empty");
  for (double m : gate_relaxation) require(m > 0.0, "gate_relaxation entries must be > 0");
  require(theta2 >= 0.0, "theta2 must be >= 0");
  require(recall_normalizer > 0.0, "recall_normalizer must be > 0");
  require(gcn_layers >= 1, "gcn_layers must be >= 1");
  require(static_cast<int>(gcn_hidden.size()) == gcn_layers,
          "gcn_hidden must list one width per layer");
  for (int w : gcn_hidden) require(w >= 1, "gcn_hidden widths must be >= 1");
  require(embedding_dim >= 1, "embedding_dim must be >= 1");
  require(learning_rate > 0.0, "learning_rate must be > 0");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1 must be in [0,1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2 must be in [0,1)");
  require(adam_epsilon > 0.0, "adam_epsilon must be > 0");
  require(weight_decay >= 0.0, "weight_decay must be >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(train_iterations >= 0, "train_iterations must be >= 0");
  require(drop_prob >= 0.0 && drop_prob < 1.0, "drop_prob must be in [0,1)");
  require(min_track_length >= 0, "min_track_length must be >= 0");
}

Config parse_config(std::istream& in) {
  Config config;
  std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters;

  auto set_d = [&](const std::string& k, double* field) {
    setters[k] = [field](const std::string& v, const std::string& key) { *field = to_double(v, key); };
  };
  auto set_i = [&](const std::string& k, int* field) {
    setters[k] = [field](const std::string& v, const std::string& key) { *field = to_int(v, key); };
  };
  auto set_b = [&](const std::string& k, bool* field) {
    setters[k] = [field](const std::string& v, const std::string& key) { *field = to_bool(v, key); };
  };

  set_d("sigma_t", &config.sigma_t);
  set_d("sigma_p", &config.sigma_p);
  set_i("max_iterations", &config.max_iterations);
  set_i("max_neighbors", &config.max_neighbors);
  set_i("max_cluster_size", &config.max_cluster_size);
  set_d("threshold_step", &config.threshold_step);
  set_b("strict_cluster_size", &config.strict_cluster_size);
  set_b("klimit_intersection", &config.klimit_intersection);
  set_d("tau_t", &config.tau_t);
  set_d("tau_p", &config.tau_p);
  set_d("tau_a", &config.tau_a);
  setters["gate_relaxation"] = [&config](const std::string& v, const std::string& key) {
    config.gate_relaxation = to_list<double>(v, key, to_double);
  };
  set_d("theta1", &config.theta1);
  set_d("theta2", &config.theta2);
  set_d("quality_weight", &config.quality_weight);
  set_d("recall_normalizer", &config.recall_normalizer);
  set_i("gcn_layers", &config.gcn_layers);
  setters["gcn_hidden"] = [&config](const std::string& v, const std::string& key) {
    config.gcn_hidden = to_list<int>(v, key, to_int);
  };
  set_i("embedding_dim", &config.embedding_dim);
  set_b("binarize_purity", &config.binarize_purity);
  set_d("learning_rate", &config.learning_rate);
  set_d("adam_beta1", &config.adam_beta1);
  set_d("adam_beta2", &config.adam_beta2);
  set_d("adam_epsilon", &config.adam_epsilon);
  set_d("weight_decay", &config.weight_decay);
  set_i("batch_size", &config.batch_size);
  set_i("train_iterations", &config.train_iterations);
  set_d("drop_prob", &config.drop_prob);
  set_b("interpolate", &config.interpolate);
  set_i("min_track_length", &config.min_track_length);
  setters["seed"] = [&config](const std::string& v, const std::string& key) {
    try {
      config.seed = std::stoull(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad value for '" + key + "': " + v);
    }
  };

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
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    it->second(value, key);
  }

  config.validate();
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

void write_config(const Config& c, std::ostream& out) {
  auto list_d = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += format_double(v[i]);
    }
    return s;
  };
  auto list_i = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(v[i]);
    }
    return s;
  };

  out << "sigma_t = " << format_double(c.sigma_t) << "\n";
  out << "sigma_p = " << format_double(c.sigma_p) << "\n";
  out << "max_iterations = " << c.max_iterations << "\n";
  out << "max_neighbors = " << c.max_neighbors << "\n";
  out << "max_cluster_size = " << c.max_cluster_size << "\n";
  out << "threshold_step = " << format_double(c.threshold_step) << "\n";
  out << "strict_cluster_size = " << (c.strict_cluster_size ? "true" : "false") << "\n";
  out << "klimit_intersection = " << (c.klimit_intersection ? "true" : "false") << "\n";
  out << "tau_t = " << format_double(c.tau_t) << "\n";
  out << "tau_p = " << format_double(c.tau_p) << "\n";
  out << "tau_a = " << format_double(c.tau_a) << "\n";
  out << "gate_relaxation = " << list_d(c.gate_relaxation) << "\n";
  out << "theta1 = " << format_double(c.theta1) << "\n";
  out << "theta2 = " << format_double(c.theta2) << "\n";
  out << "quality_weight = " << format_double(c.quality_weight) << "\n";
  out << "recall_normalizer = " << format_double(c.recall_normalizer) << "\n";
  out << "gcn_layers = " << c.gcn_layers << "\n";
  out << "gcn_hidden = " << list_i(c.gcn_hidden) << "\n";
  out << "embedding_dim = " << c.embedding_dim << "\n";
  out << "binarize_purity = " << (c.binarize_purity ? "true" : "false") << "\n";
  out << "learning_rate = " << format_double(c.learning_rate) << "\n";
  out << "adam_beta1 = " << format_double(c.adam_beta1) << "\n";
  out << "adam_beta2 = " << format_double(c.adam_beta2) << "\n";
  out << "adam_epsilon = " << format_double(c.adam_epsilon) << "\n";
  out << "weight_decay = " << format_double(c.weight_decay) << "\n";
  out << "batch_size = " << c.batch_size << "\n";
  out << "train_iterations = " << c.train_iterations << "\n";
  out << "drop_prob = " << format_double(c.drop_prob) << "\n";
  out << "interpolate = " << (c.interpolate ? "true" : "false") << "\n";
  out << "min_track_length = " << c.min_track_length << "\n";
  out << "seed = " << c.seed << "\n";
}

}  // namespace proptrack
