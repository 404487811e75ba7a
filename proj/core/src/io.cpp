#include "proptrack/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace proptrack {

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_field(const std::string& s, int line_no, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  }
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
  if (pos != s.size())
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  if (!std::isfinite(v))
    throw std::runtime_error("line " + std::to_string(line_no) + ": non-finite " + what);
  return v;
}

int parse_int_field(const std::string& s, int line_no, const char* what) {
  const double v = parse_field(s, line_no, what);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what +
                             " must be an integer, got '" + s + "'");
  return i;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

std::vector<Detection> parse_detections(std::istream& in, ParseLog* log) {
  std::vector<Detection> dets;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 7)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 7+ fields, got " +
                               std::to_string(fields.size()));
    Detection d;
    d.frame = parse_int_field(fields[0], line_no, "frame");
    if (d.frame < 1)
      throw std::runtime_error("line " + std::to_string(line_no) + ": frame must be >= 1");
    // fields[1] is the id column, ignored on input.
    d.box.x = parse_field(fields[2], line_no, "x");
    d.box.y = parse_field(fields[3], line_no, "y");
    d.box.w = parse_field(fields[4], line_no, "w");
    d.box.h = parse_field(fields[5], line_no, "h");
    d.confidence = std::clamp(parse_field(fields[6], line_no, "conf"), 0.0, 1.0);
    if (d.box.w <= 0.0 || d.box.h <= 0.0) {
      if (log)
        log->rejected.push_back("line " + std::to_string(line_no) + ": non-positive box size");
      continue;
    }
    dets.push_back(d);
  }

  // Canonical order: frames ascending, within a frame by box then confidence.
  // This makes the parse independent of input line order; index_in_frame is
  // the rank under this ordering.
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    return std::tie(a.frame, a.box.x, a.box.y, a.box.w, a.box.h, a.confidence) <
           std::tie(b.frame, b.box.x, b.box.y, b.box.w, b.box.h, b.confidence);
  });
  int current_frame = -1;
  int index = 0;
  for (auto& d : dets) {
    if (d.frame != current_frame) {
      current_frame = d.frame;
      index = 0;
    }
    d.index_in_frame = index++;
  }
  return dets;
}

std::vector<GroundTruthEntry> parse_ground_truth(std::istream& in, ParseLog* log) {
  std::vector<GroundTruthEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 7)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 7+ fields, got " +
                               std::to_string(fields.size()));
    GroundTruthEntry e;
    e.frame = parse_int_field(fields[0], line_no, "frame");
    e.identity = parse_int_field(fields[1], line_no, "id");
    e.box.x = parse_field(fields[2], line_no, "x");
    e.box.y = parse_field(fields[3], line_no, "y");
    e.box.w = parse_field(fields[4], line_no, "w");
    e.box.h = parse_field(fields[5], line_no, "h");
    const int active = parse_int_field(fields[6], line_no, "active");
    if (fields.size() >= 9) e.visibility = parse_field(fields[8], line_no, "visibility");
    if (active == 0) continue;
    if (e.frame < 1)
      throw std::runtime_error("line " + std::to_string(line_no) + ": frame must be >= 1");
    if (e.identity < 1)
      throw std::runtime_error("line " + std::to_string(line_no) + ": identity must be >= 1");
    if (e.box.w <= 0.0 || e.box.h <= 0.0) {
      if (log)
        log->rejected.push_back("line " + std::to_string(line_no) + ": non-positive box size");
      continue;
    }
    entries.push_back(e);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const GroundTruthEntry& a, const GroundTruthEntry& b) {
                     return std::tie(a.frame, a.identity) < std::tie(b.frame, b.identity);
                   });
  return entries;
}

namespace {

constexpr char kEmbeddingMagic[4] = {'P', 'T', 'E', 'B'};
constexpr std::uint32_t kEmbeddingVersion = 1;

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(const char*& p, const char* end) {
  if (p + sizeof(T) > end) throw std::runtime_error("embedding file: truncated binary record");
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

EmbeddingTable parse_embeddings_binary(const std::string& buf, int expected_dim) {
  const char* p = buf.data();
  const char* end = buf.data() + buf.size();
  p += sizeof(kEmbeddingMagic);
  const auto version = read_raw<std::uint32_t>(p, end);
  if (version != kEmbeddingVersion)
    throw std::runtime_error("embedding file: unsupported version " + std::to_string(version));
  const auto dim = read_raw<std::uint32_t>(p, end);
  if (static_cast<int>(dim) != expected_dim)
    throw std::runtime_error("embedding file: dimension " + std::to_string(dim) +
                             " does not match expected " + std::to_string(expected_dim));
  const auto count = read_raw<std::uint64_t>(p, end);
  EmbeddingTable table;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto frame = read_raw<std::int32_t>(p, end);
    const auto index = read_raw<std::int32_t>(p, end);
    std::vector<double> v(dim);
    for (auto& x : v) x = read_raw<double>(p, end);
    const EmbeddingKey key{frame, index};
    if (!table.emplace(key, std::move(v)).second)
      throw std::runtime_error("embedding file: duplicate key (" + std::to_string(frame) + "," +
                               std::to_string(index) + ")");
  }
  if (p != end) throw std::runtime_error("embedding file: trailing bytes after records");
  return table;
}

EmbeddingTable parse_embeddings_csv(const std::string& buf, int expected_dim) {
  EmbeddingTable table;
  std::stringstream in(buf);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != 2 + expected_dim)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(2 + expected_dim) + " fields, got " +
                               std::to_string(fields.size()));
    const int frame = parse_int_field(fields[0], line_no, "frame");
    const int index = parse_int_field(fields[1], line_no, "index");
    std::vector<double> v(expected_dim);
    for (int i = 0; i < expected_dim; ++i)
      v[i] = parse_field(fields[2 + i], line_no, "embedding value");
    const EmbeddingKey key{frame, index};
    if (!table.emplace(key, std::move(v)).second)
      throw std::runtime_error("line " + std::to_string(line_no) + ": duplicate key (" +
                               std::to_string(frame) + "," + std::to_string(index) + ")");
  }
  return table;
}

}  // namespace

EmbeddingTable load_embeddings(std::istream& in, int expected_dim) {
  if (expected_dim < 1) throw std::invalid_argument("load_embeddings: expected_dim must be >= 1");
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() >= sizeof(kEmbeddingMagic) &&
      std::memcmp(buf.data(), kEmbeddingMagic, sizeof(kEmbeddingMagic)) == 0)
    return parse_embeddings_binary(buf, expected_dim);
  return parse_embeddings_csv(buf, expected_dim);
}

void write_embeddings_csv(const EmbeddingTable& table, std::ostream& out) {
  for (const auto& [key, v] : table) {
    out << key.first << ',' << key.second;
    for (double x : v) out << ',' << format_double(x);
    out << '\n';
  }
}

void write_embeddings_binary(const EmbeddingTable& table, std::ostream& out) {
  out.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  write_raw<std::uint32_t>(out, kEmbeddingVersion);
  const std::uint32_t dim = table.empty() ? 0u : static_cast<std::uint32_t>(table.begin()->second.size());
  write_raw<std::uint32_t>(out, dim);
  write_raw<std::uint64_t>(out, table.size());
  for (const auto& [key, v] : table) {
    write_raw<std::int32_t>(out, key.first);
    write_raw<std::int32_t>(out, key.second);
    for (double x : v) write_raw<double>(out, x);
  }
}

void attach_embeddings(std::vector<Detection>& detections, const EmbeddingTable& table,
                       int expected_dim) {
  for (auto& d : detections) {
    const auto it = table.find({d.frame, d.index_in_frame});
    if (it == table.end())
      throw std::runtime_error("no embedding for detection (frame " + std::to_string(d.frame) +
                               ", index " + std::to_string(d.index_in_frame) + ")");
    if (static_cast<int>(it->second.size()) != expected_dim)
      throw std::runtime_error("embedding dimension mismatch at (frame " +
                               std::to_string(d.frame) + ", index " +
                               std::to_string(d.index_in_frame) + ")");
    d.embedding = it->second;
  }
}

void write_tracking_output(const std::vector<Trajectory>& trajectories, std::ostream& out) {
  struct Row {
    int frame;
    int track_id;
    const BoundingBox* box;
  };
  std::vector<Row> rows;
  for (const auto& t : trajectories)
    for (const auto& d : t.detections) rows.push_back({d.frame, t.track_id, &d.box});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.frame, a.track_id) < std::tie(b.frame, b.track_id);
  });
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,-1,-1,-1,-1\n", r.frame,
                  r.track_id, r.box->x, r.box->y, r.box->w, r.box->h);
    out << buf;
  }
}

std::vector<Trajectory> parse_tracking_output(std::istream& in) {
  std::map<int, Trajectory> by_id;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 6)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 6+ fields");
    Detection d;
    d.frame = parse_int_field(fields[0], line_no, "frame");
    const int track_id = parse_int_field(fields[1], line_no, "track id");
    d.box.x = parse_field(fields[2], line_no, "x");
    d.box.y = parse_field(fields[3], line_no, "y");
    d.box.w = parse_field(fields[4], line_no, "w");
    d.box.h = parse_field(fields[5], line_no, "h");
    auto& traj = by_id[track_id];
    traj.track_id = track_id;
    traj.detections.push_back(d);
  }
  std::vector<Trajectory> out;
  out.reserve(by_id.size());
  for (auto& [id, traj] : by_id) {
    std::sort(traj.detections.begin(), traj.detections.end(),
              [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
    for (std::size_t i = 1; i < traj.detections.size(); ++i)
      if (traj.detections[i].frame == traj.detections[i - 1].frame)
        throw std::runtime_error("track " + std::to_string(id) + " has two boxes in frame " +
                                 std::to_string(traj.detections[i].frame));
    out.push_back(std::move(traj));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace proptrack
