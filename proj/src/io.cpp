#include "fmds/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace fmds {

std::string format_double(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

double parse_double(std::string_view text, const std::filesystem::path& path, std::size_t line) {
  double value = 0.0;
  auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    throw_error(errc::io_error, path.string() + ":" + std::to_string(line) +
                                    ": malformed number '" + std::string(text) + "'");
  }
  return value;
}

long parse_int(std::string_view text, const std::filesystem::path& path, std::size_t line) {
  long value = 0;
  auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    throw_error(errc::io_error, path.string() + ":" + std::to_string(line) +
                                    ": malformed integer '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(errc::io_error, "cannot open '" + path.string() + "' for reading");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) {
    throw_error(errc::io_error, "'" + path.string() + "' is empty");
  }
  return lines;
}

class FileWriter {
 public:
  explicit FileWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) {
      throw_error(errc::io_error, "cannot open '" + path.string() + "' for writing");
    }
  }

  FileWriter& operator<<(std::string_view text) {
    out_ << text;
    return *this;
  }

  void close() {
    out_.close();
    if (!out_) {
      throw_error(errc::io_error, "failed writing '" + path_.string() + "'");
    }
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace

AbundanceTable read_abundance_csv(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "sample_id") {
    throw_error(errc::io_error, path.string() + ": expected header 'sample_id,<features...>'");
  }
  std::vector<std::string> feature_ids(header.begin() + 1, header.end());
  const std::size_t n = lines.size() - 1;
  std::vector<std::string> sample_ids;
  sample_ids.reserve(n);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(feature_ids.size()));
  for (std::size_t r = 0; r < n; ++r) {
    auto fields = split_csv_line(lines[r + 1]);
    if (fields.size() != header.size()) {
      throw_error(errc::io_error, path.string() + ":" + std::to_string(r + 2) +
                                      ": expected " + std::to_string(header.size()) + " fields");
    }
    sample_ids.push_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) =
          parse_double(fields[c], path, r + 2);
    }
  }
  return make_abundance_table(std::move(sample_ids), std::move(feature_ids), std::move(values));
}

void write_abundance_csv(const std::filesystem::path& path, const AbundanceTable& table) {
  FileWriter out(path);
  out << "sample_id";
  for (const auto& f : table.feature_ids) out << "," << f;
  out << "\n";
  for (int i = 0; i < table.n_samples(); ++i) {
    out << table.sample_ids[static_cast<std::size_t>(i)];
    for (int c = 0; c < table.n_features(); ++c) {
      out << "," << format_double(table.values(i, c));
    }
    out << "\n";
  }
  out.close();
}

LabelVector read_labels_csv(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  auto header = split_csv_line(lines[0]);
  if (header.size() != 2 || header[0] != "sample_id" || header[1] != "label") {
    throw_error(errc::io_error, path.string() + ": expected header 'sample_id,label'");
  }
  std::vector<std::string> ids;
  std::vector<int> y;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto fields = split_csv_line(lines[r]);
    if (fields.size() != 2) {
      throw_error(errc::io_error, path.string() + ":" + std::to_string(r + 1) + ": expected 2 fields");
    }
    long label = parse_int(fields[1], path, r + 1);
    if (label < 0) {
      throw_error(errc::io_error,
                  path.string() + ":" + std::to_string(r + 1) + ": labels must be nonnegative");
    }
    ids.push_back(fields[0]);
    y.push_back(static_cast<int>(label));
  }
  return make_label_vector(std::move(ids), std::move(y));
}

void write_labels_csv(const std::filesystem::path& path, const LabelVector& labels) {
  FileWriter out(path);
  out << "sample_id,label\n";
  for (int i = 0; i < labels.n(); ++i) {
    out << labels.sample_ids[static_cast<std::size_t>(i)] << ","
        << std::to_string(labels.y[static_cast<std::size_t>(i)]) << "\n";
  }
  out.close();
}

DistanceMatrix read_distance_csv(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "sample_id") {
    throw_error(errc::io_error, path.string() + ": expected header 'sample_id,<ids...>'");
  }
  std::vector<std::string> ids(header.begin() + 1, header.end());
  const std::size_t n = ids.size();
  if (lines.size() - 1 != n) {
    throw_error(errc::io_error, path.string() + ": expected " + std::to_string(n) + " data rows");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    auto fields = split_csv_line(lines[r + 1]);
    if (fields.size() != n + 1) {
      throw_error(errc::io_error, path.string() + ":" + std::to_string(r + 2) +
                                      ": expected " + std::to_string(n + 1) + " fields");
    }
    if (fields[0] != ids[r]) {
      throw_error(errc::io_error, path.string() + ":" + std::to_string(r + 2) +
                                      ": row ID '" + fields[0] + "' does not match column ID '" +
                                      ids[r] + "'");
    }
    for (std::size_t c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_double(fields[c + 1], path, r + 2);
    }
  }
  return validate_distance_matrix(std::move(m), std::move(ids));
}

void write_distance_csv(const std::filesystem::path& path, const DistanceMatrix& d) {
  FileWriter out(path);
  out << "sample_id";
  for (const auto& id : d.sample_ids) out << "," << id;
  out << "\n";
  for (int i = 0; i < d.n(); ++i) {
    out << d.sample_ids[static_cast<std::size_t>(i)];
    for (int j = 0; j < d.n(); ++j) {
      out << "," << format_double(d.d(i, j));
    }
    out << "\n";
  }
  out.close();
}

Embedding read_embedding_csv(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  auto header = split_csv_line(lines[0]);
  bool with_label = header.size() == 4 && header[3] == "label";
  if (!(header.size() == 3 || with_label) || header[0] != "sample_id" || header[1] != "x" ||
      header[2] != "y") {
    throw_error(errc::io_error, path.string() + ": expected header 'sample_id,x,y[,label]'");
  }
  const std::size_t n = lines.size() - 1;
  std::vector<std::string> ids;
  ids.reserve(n);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), 2);
  for (std::size_t r = 0; r < n; ++r) {
    auto fields = split_csv_line(lines[r + 1]);
    if (fields.size() != header.size()) {
      throw_error(errc::io_error, path.string() + ":" + std::to_string(r + 2) +
                                      ": expected " + std::to_string(header.size()) + " fields");
    }
    ids.push_back(fields[0]);
    z(static_cast<Eigen::Index>(r), 0) = parse_double(fields[1], path, r + 2);
    z(static_cast<Eigen::Index>(r), 1) = parse_double(fields[2], path, r + 2);
  }
  return make_embedding(std::move(ids), std::move(z));
}

void write_embedding_csv(const std::filesystem::path& path, const Embedding& emb,
                         const LabelVector* labels) {
  if (labels != nullptr) {
    require_same_ids(emb.sample_ids, labels->sample_ids, "embedding CSV");
  }
  FileWriter out(path);
  out << (labels != nullptr ? "sample_id,x,y,label\n" : "sample_id,x,y\n");
  for (int i = 0; i < emb.n(); ++i) {
    out << emb.sample_ids[static_cast<std::size_t>(i)] << "," << format_double(emb.z(i, 0))
        << "," << format_double(emb.z(i, 1));
    if (labels != nullptr) {
      out << "," << std::to_string(labels->y[static_cast<std::size_t>(i)]);
    }
    out << "\n";
  }
  out.close();
}

bool looks_like_embedding_csv(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  auto header = split_csv_line(lines[0]);
  return (header.size() == 3 || (header.size() == 4 && header[3] == "label")) &&
         header.size() >= 3 && header[0] == "sample_id" && header[1] == "x" && header[2] == "y";
}

// Per-iteration wall time stays out of the CSV: trace files are primary
// outputs and must be byte-identical across reruns.
void write_trace_csv(const std::filesystem::path& path, const FmdsTrace& trace) {
  FileWriter out(path);
  out << "iteration,raw_stress,confirmatory,confirmatory_exact,objective,p_z,delta,fz_fx,"
         "linearized_before,linearized_after\n";
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const auto& it = trace.iterations[i];
    out << std::to_string(i + 1) << "," << format_double(it.raw_stress) << ","
        << format_double(it.confirmatory_signed) << "," << format_double(it.confirmatory_exact)
        << "," << format_double(it.objective) << "," << format_double(it.p_z) << ","
        << std::to_string(it.delta) << "," << format_double(it.fz_fx) << ","
        << format_double(it.linearized_before) << "," << format_double(it.linearized_after)
        << "\n";
  }
  out.close();
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(errc::io_error, "cannot open '" + path.string() + "' for digest");
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[4096];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  for (int i = 15; i >= 0; --i) {
    hex[i] = "0123456789abcdef"[hash & 0xf];
    hash >>= 4;
  }
  hex[16] = '\0';
  return std::string("fnv1a64:") + hex;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(errc::io_error, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  FileWriter out(path);
  out << content;
  out.close();
}

}  // namespace fmds
