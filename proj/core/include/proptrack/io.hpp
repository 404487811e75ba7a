#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "proptrack/types.hpp"

namespace proptrack {

/// Non-fatal skips (e.g. degenerate boxes) collected during parsing.
struct ParseLog {
  std::vector<std::string> rejected;
};

/// Detection file: CSV `frame,id,x,y,w,h,conf[,...]`, the id field is
/// ignored. Output is sorted by (frame, index_in_frame). index_in_frame is
/// the detection's rank within its frame under the canonical ordering
/// (x, y, w, h, conf), which makes parsing independent of line order;
/// embedding sidecars must be keyed against the same ranking.
/// Malformed lines throw with a line number; non-positive boxes are skipped
/// and reported through `log`.
std::vector<Detection> parse_detections(std::istream& in, ParseLog* log = nullptr);

/// Ground truth: CSV `frame,id,x,y,w,h,active,class,visibility`; rows with
/// active=0 are dropped.
std::vector<GroundTruthEntry> parse_ground_truth(std::istream& in, ParseLog* log = nullptr);

using EmbeddingKey = std::pair<int, int>;  // (frame, index_in_frame)
using EmbeddingTable = std::map<EmbeddingKey, std::vector<double>>;

/// Accepts either the CSV sidecar `frame,index,v1..vD` or the length-prefixed
/// binary container; the two are bit-compatible in result.
EmbeddingTable load_embeddings(std::istream& in, int expected_dim);
void write_embeddings_csv(const EmbeddingTable& table, std::ostream& out);
void write_embeddings_binary(const EmbeddingTable& table, std::ostream& out);

/// Fails if any detection lacks a sidecar entry or a vector has the wrong
/// dimension.
void attach_embeddings(std::vector<Detection>& detections, const EmbeddingTable& table,
                       int expected_dim);

/// One line per detection: `frame,track_id,x,y,w,h,-1,-1,-1,-1`, boxes at two
/// decimals, sorted by frame then track id.
void write_tracking_output(const std::vector<Trajectory>& trajectories, std::ostream& out);
std::vector<Trajectory> parse_tracking_output(std::istream& in);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace proptrack
