#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fmds/core.hpp"
#include "fmds/fmds.hpp"
#include "fmds/metrics.hpp"

namespace fmds {

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

// File formats (UTF-8, '.' decimal, LF line endings):
//   abundance: header "sample_id,<feature>,...", one row per sample
//   labels:    header "sample_id,label", nonnegative integer labels
//   distance:  first row and column are sample IDs
//   embedding: header "sample_id,x,y[,label]"
AbundanceTable read_abundance_csv(const std::filesystem::path& path);
void write_abundance_csv(const std::filesystem::path& path, const AbundanceTable& table);

LabelVector read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path, const LabelVector& labels);

DistanceMatrix read_distance_csv(const std::filesystem::path& path);
void write_distance_csv(const std::filesystem::path& path, const DistanceMatrix& d);

Embedding read_embedding_csv(const std::filesystem::path& path);
void write_embedding_csv(const std::filesystem::path& path, const Embedding& emb,
                         const LabelVector* labels = nullptr);

// Distinguishes the two matrix-bearing formats by header shape.
bool looks_like_embedding_csv(const std::filesystem::path& path);

void write_trace_csv(const std::filesystem::path& path, const FmdsTrace& trace);

// FNV-1a 64-bit content digest, "fnv1a64:<hex>".
std::string file_digest(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Deterministic SVG scatter with one color per label and a per-group
// confidence ellipse. Groups with fewer than 3 points get points only; their
// labels are returned as warnings.
std::vector<int> write_scatter_svg(const std::filesystem::path& path, const Embedding& emb,
                                   const LabelVector& labels, double ellipse_level);

}  // namespace fmds
