#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <string>

#include "fmds/dist.hpp"
#include "fmds/fmds.hpp"
#include "fmds/io.hpp"
#include "fmds/metrics.hpp"
#include "fmds/mds.hpp"
#include "fmds/permanova.hpp"
#include "fmds/phylo.hpp"
#include "fmds/simulate.hpp"
#include "fmds/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitNonConvergence = 5;

int exit_code_for(const fmds::Error& e) {
  switch (e.category()) {
    case fmds::error_category::numerical: return kExitNumerical;
    case fmds::error_category::convergence: return kExitNonConvergence;
    case fmds::error_category::validation: return kExitValidation;
  }
  return 1;
}

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buffer[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// Every command drops a manifest next to its outputs recording the exact
// invocation, seeds and content digests. Timestamps live only here, so the
// primary outputs stay byte-stable across reruns.
class Manifest {
 public:
  Manifest(std::string command, json parameters)
      : command_(std::move(command)), parameters_(std::move(parameters)) {}

  void add_input(const fs::path& path) {
    inputs_[path.string()] = fmds::file_digest(path);
  }

  void add_output(const fs::path& path) {
    outputs_[path.string()] = fmds::file_digest(path);
  }

  void set_metadata(const std::string& key, const json& value) { metadata_[key] = value; }

  void write(const fs::path& path) const {
    json doc;
    doc["command"] = command_;
    doc["version"] = FMDS_VERSION;
    doc["parameters"] = parameters_;
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    if (!metadata_.empty()) doc["metadata"] = metadata_;
    doc["timestamp_utc"] = timestamp_utc();
    fmds::write_text_file(path, doc.dump(2) + "\n");
  }

 private:
  std::string command_;
  json parameters_;
  json inputs_ = json::object();
  json outputs_ = json::object();
  json metadata_ = json::object();
};

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    fmds::throw_error(fmds::errc::io_error, "cannot create directory '" + dir.string() + "'");
  }
}

struct SimulateArgs {
  std::string kind = "binary";
  std::uint64_t seed = 0;
  int replicate = 0;
  int n_per_group = 50;
  std::string out;
};

int run_simulate(const SimulateArgs& args) {
  fmds::SimSpec spec;
  spec.kind = args.kind == "binary" ? fmds::SimKind::binary_compositional : fmds::SimKind::ternary;
  spec.seed = args.seed;
  spec.replicate = args.replicate;
  spec.n_per_group = args.n_per_group;

  fmds::SimulatedDataset data = spec.kind == fmds::SimKind::binary_compositional
                                    ? fmds::simulate_binary(spec)
                                    : fmds::simulate_ternary(spec);

  fs::path dir(args.out);
  ensure_directory(dir);
  fs::path abundance = dir / "abundance.csv";
  fs::path labels = dir / "labels.csv";
  fmds::write_abundance_csv(abundance, data.table);
  fmds::write_labels_csv(labels, data.labels);

  Manifest manifest("simulate", json{{"kind", args.kind},
                                     {"seed", args.seed},
                                     {"replicate", args.replicate},
                                     {"n_per_group", args.n_per_group},
                                     {"out", args.out}});
  manifest.set_metadata("truncation", args.kind == "binary" ? "nonnegative orthant" : "none");
  manifest.set_metadata("compositional", args.kind == "binary");
  manifest.add_output(abundance);
  manifest.add_output(labels);
  manifest.write(dir / "manifest.json");
  return 0;
}

struct DistanceArgs {
  std::string table;
  std::string metric = "euclidean";
  std::string tree;
  bool unnormalized = false;
  bool unit_branch_lengths = false;
  std::string out;
};

int run_distance(const DistanceArgs& args) {
  fmds::AbundanceTable table = fmds::read_abundance_csv(args.table);
  fmds::DistanceMatrix d{{}, {}};
  if (args.metric == "euclidean") {
    d = fmds::euclidean(table);
  } else if (args.metric == "braycurtis") {
    d = fmds::bray_curtis(table);
  } else {
    fmds::PhyloTree tree = fmds::parse_newick(fmds::read_text_file(args.tree));
    if (args.unit_branch_lengths) {
      for (auto& node : tree.nodes) node.branch_length = 1.0;
      tree.nodes[static_cast<std::size_t>(tree.root)].branch_length = 0.0;
    }
    d = fmds::weighted_unifrac(table, tree, !args.unnormalized);
  }

  fs::path out(args.out);
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  fmds::write_distance_csv(out, d);

  Manifest manifest("distance", json{{"table", args.table},
                                     {"metric", args.metric},
                                     {"tree", args.tree},
                                     {"unnormalized", args.unnormalized},
                                     {"unit_branch_lengths", args.unit_branch_lengths},
                                     {"out", args.out}});
  if (args.metric == "wunifrac") {
    manifest.set_metadata("unifrac_form", args.unnormalized ? "raw" : "normalized");
    manifest.add_input(args.tree);
  }
  manifest.add_input(args.table);
  manifest.add_output(out);
  manifest.write(out.string() + ".manifest.json");
  return 0;
}

struct EmbedArgs {
  std::string distance;
  std::string labels;
  std::string method = "mds";
  double lambda = 1.0;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  int map_permutations = 999;
  int pvalue_permutations = 999;
  double p_tol = 0.01;
  int max_outer_iter = 100;
  bool remap_every_point = false;
  int max_iter = 300;
  double stress_tol = 1e-6;
  std::string out;
};

int run_embed(const EmbedArgs& args) {
  fmds::DistanceMatrix d = fmds::read_distance_csv(args.distance);

  bool have_labels = !args.labels.empty();
  fmds::LabelVector labels{{}, {}, {}};
  if (have_labels) {
    labels = fmds::align_labels(fmds::read_labels_csv(args.labels), d.sample_ids);
  }

  fs::path dir(args.out);
  ensure_directory(dir);
  fs::path embedding_path = dir / "embedding.csv";
  fs::path trace_path = dir / "trace.csv";

  Manifest manifest("embed", json{{"distance", args.distance},
                                  {"labels", args.labels},
                                  {"method", args.method},
                                  {"lambda", args.lambda},
                                  {"alpha", args.alpha},
                                  {"seed", args.seed},
                                  {"map_permutations", args.map_permutations},
                                  {"pvalue_permutations", args.pvalue_permutations},
                                  {"p_tol", args.p_tol},
                                  {"max_outer_iter", args.max_outer_iter},
                                  {"remap_every_point", args.remap_every_point},
                                  {"max_iter", args.max_iter},
                                  {"stress_tol", args.stress_tol},
                                  {"out", args.out}});
  manifest.add_input(args.distance);
  if (have_labels) manifest.add_input(args.labels);
  manifest.set_metadata("init", "classical");
  manifest.set_metadata("mapping", "rank-paired quantile map, linear extrapolation");

  fmds::MdsConfig mds_cfg;
  mds_cfg.max_iter = args.max_iter;
  mds_cfg.stress_tol = args.stress_tol;

  auto finish = [&](const fmds::Embedding& emb, const fmds::FmdsTrace* trace, int code) {
    fmds::write_embedding_csv(embedding_path, emb, have_labels ? &labels : nullptr);
    manifest.add_output(embedding_path);
    if (trace != nullptr) {
      fmds::write_trace_csv(trace_path, *trace);
      manifest.add_output(trace_path);
      manifest.set_metadata("p_x", trace->p_x);
      manifest.set_metadata("f_x", trace->f_x);
      manifest.set_metadata("iterations", trace->iterations.size());
      manifest.set_metadata("converged", code == 0);
    }
    manifest.write(dir / "manifest.json");
    return code;
  };

  if (args.method == "mds") {
    if (have_labels) {
      std::cerr << "warning: --labels are ignored by method 'mds'\n";
    }
    return finish(fmds::smacof_fit(d, mds_cfg), nullptr, 0);
  }
  if (args.method == "smds") {
    return finish(fmds::smds_fit(d, labels, args.alpha, mds_cfg), nullptr, 0);
  }

  fmds::FmdsConfig cfg;
  cfg.lambda = args.lambda;
  cfg.map_permutations = args.map_permutations;
  cfg.pvalue_permutations = args.pvalue_permutations;
  cfg.p_tol = args.p_tol;
  cfg.max_outer_iter = args.max_outer_iter;
  cfg.seed = args.seed;
  cfg.remap_every_point = args.remap_every_point;
  cfg.init = mds_cfg;
  try {
    fmds::FmdsResult result = fmds::fmds_fit(d, labels, cfg);
    return finish(result.embedding, &result.trace, 0);
  } catch (const fmds::MaxIterationsError& e) {
    std::cerr << "error (MaxIterationsExceeded): " << e.what() << "\n";
    return finish(e.embedding, &e.trace, kExitNonConvergence);
  }
}

struct PermanovaArgs {
  std::string input;
  std::string labels;
  int permutations = 999;
  std::uint64_t seed = 0;
  bool conservative = false;
  std::string out;
};

int run_permanova(const PermanovaArgs& args) {
  fmds::LabelVector labels = fmds::read_labels_csv(args.labels);
  fmds::SeededRng rng(args.seed);

  double f = 0.0;
  fmds::PermutationDistribution dist;
  if (fmds::looks_like_embedding_csv(args.input)) {
    fmds::Embedding emb = fmds::read_embedding_csv(args.input);
    labels = fmds::align_labels(labels, emb.sample_ids);
    dist = fmds::permutation_distribution(emb, labels, args.permutations, rng);
    f = fmds::pseudo_f_embedding(emb, labels);
  } else {
    fmds::DistanceMatrix d = fmds::read_distance_csv(args.input);
    labels = fmds::align_labels(labels, d.sample_ids);
    dist = fmds::permutation_distribution(d, labels, args.permutations, rng);
    f = fmds::pseudo_f(d, labels);
  }

  double p = args.conservative ? fmds::p_value_conservative(dist) : fmds::p_value(dist);
  json report;
  report["F"] = f;
  report["p"] = p;
  report["K"] = args.permutations;
  report["seed"] = args.seed;
  report["conservative"] = args.conservative;
  std::string text = report.dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << text;
  } else {
    fmds::write_text_file(args.out, text);
    Manifest manifest("permanova", json{{"input", args.input},
                                        {"labels", args.labels},
                                        {"permutations", args.permutations},
                                        {"seed", args.seed},
                                        {"conservative", args.conservative},
                                        {"out", args.out}});
    manifest.add_input(args.input);
    manifest.add_input(args.labels);
    manifest.add_output(args.out);
    manifest.write(args.out + ".manifest.json");
  }
  return 0;
}

struct EvaluateArgs {
  std::string distance;
  std::string embedding;
  std::string labels;
  int k_local = 0;   // 0 = default fraction
  int k_global = 0;  // 0 = default fraction
  int permutations = 500;
  std::uint64_t seed = 0;
  bool force_k = false;
  bool kruskal_root = false;
  std::string out;
  std::string shepard_out;
};

int run_evaluate(const EvaluateArgs& args) {
  fmds::DistanceMatrix d = fmds::read_distance_csv(args.distance);
  fmds::Embedding emb = fmds::align_embedding(fmds::read_embedding_csv(args.embedding), d.sample_ids);
  fmds::LabelVector labels = fmds::align_labels(fmds::read_labels_csv(args.labels), d.sample_ids);

  const int n = d.n();
  int k_local = args.k_local;
  if (k_local <= 0) {
    k_local = std::max(1, static_cast<int>(std::lround(0.07 * n)));
  }
  int k_global = args.k_global;
  if (k_global <= 0) {
    k_global = std::max(1, static_cast<int>(std::lround(0.75 * n)));
    if (!args.force_k && 2 * k_global >= n) {
      int clamped = std::max(1, (n - 1) / 2);
      std::cerr << "warning: default k_global " << k_global
                << " exceeds the normalizer's validity (k < N/2); clamping to " << clamped
                << " (use --force-k to compute the literal formula)\n";
      k_global = clamped;
    }
  }

  fmds::QualityReport report = fmds::evaluate_quality(
      d, emb, labels, k_local, k_global, args.permutations, fmds::SeededRng(args.seed),
      args.force_k, args.kruskal_root);

  json doc;
  doc["trustworthiness_local"] = report.trustworthiness_local;
  doc["trustworthiness_global"] = report.trustworthiness_global;
  doc["continuity_local"] = report.continuity_local;
  doc["continuity_global"] = report.continuity_global;
  doc["stress1"] = report.stress1;
  doc["shepard_r"] = report.shepard_r;
  doc["f_correlation"] = report.f_correlation;
  doc["f_rank_ratio"] = report.f_rank_ratio;
  doc["k_local"] = report.k_local;
  doc["k_global"] = report.k_global;
  doc["k_global_valid"] = report.k_global_valid;
  doc["permutations"] = report.permutations;
  doc["seed"] = args.seed;
  doc["kruskal_root"] = args.kruskal_root;

  // Per-group centroid/axis summary, when every group is large enough.
  bool groups_ok = true;
  for (int size : labels.group_sizes) {
    if (size > 0 && size < 3) groups_ok = false;
  }
  if (groups_ok) {
    fmds::ClusterGeometry geom = fmds::cluster_geometry(emb, labels);
    json groups = json::array();
    for (const auto& g : geom.groups) {
      groups.push_back(json{{"label", g.label},
                            {"centroid", {g.centroid(0), g.centroid(1)}},
                            {"long_axis_variance", g.long_axis_variance},
                            {"short_axis_variance", g.short_axis_variance}});
    }
    doc["groups"] = groups;
    json dists = json::array();
    for (Eigen::Index a = 0; a < geom.centroid_distances.rows(); ++a) {
      json row = json::array();
      for (Eigen::Index b = 0; b < geom.centroid_distances.cols(); ++b) {
        row.push_back(geom.centroid_distances(a, b));
      }
      dists.push_back(row);
    }
    doc["centroid_distances"] = dists;
  } else {
    std::cerr << "warning: a group has fewer than 3 samples; cluster geometry omitted\n";
  }
  std::string text = doc.dump(2) + "\n";

  Manifest manifest("evaluate", json{{"distance", args.distance},
                                     {"embedding", args.embedding},
                                     {"labels", args.labels},
                                     {"k_local", k_local},
                                     {"k_global", k_global},
                                     {"permutations", args.permutations},
                                     {"seed", args.seed},
                                     {"force_k", args.force_k},
                                     {"kruskal_root", args.kruskal_root},
                                     {"out", args.out}});
  manifest.add_input(args.distance);
  manifest.add_input(args.embedding);
  manifest.add_input(args.labels);

  if (args.out.empty()) {
    std::cout << text;
  } else {
    fmds::write_text_file(args.out, text);
    manifest.add_output(args.out);
  }
  if (!args.shepard_out.empty()) {
    fmds::ShepardResult sh = fmds::shepard(d, emb);
    std::string csv = "original,embedded\n";
    for (const auto& [dx, dz] : sh.pairs) {
      csv += fmds::format_double(dx) + "," + fmds::format_double(dz) + "\n";
    }
    fmds::write_text_file(args.shepard_out, csv);
    manifest.add_output(args.shepard_out);
  }
  if (!args.out.empty()) {
    manifest.write(args.out + ".manifest.json");
  }
  return 0;
}

struct PlotArgs {
  std::string embedding;
  std::string labels;
  double level = 0.68;
  std::string out;
};

int run_plot(const PlotArgs& args) {
  fmds::Embedding emb = fmds::read_embedding_csv(args.embedding);
  fmds::LabelVector labels = fmds::align_labels(fmds::read_labels_csv(args.labels), emb.sample_ids);
  fs::path out(args.out);
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  auto skipped = fmds::write_scatter_svg(out, emb, labels, args.level);
  for (int label : skipped) {
    std::cerr << "warning: group " << label << " has fewer than 3 points; ellipse skipped\n";
  }
  Manifest manifest("plot", json{{"embedding", args.embedding},
                                 {"labels", args.labels},
                                 {"level", args.level},
                                 {"out", args.out}});
  manifest.add_input(args.embedding);
  manifest.add_input(args.labels);
  manifest.add_output(out);
  manifest.write(out.string() + ".manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"F-informed multidimensional scaling pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FMDS_VERSION);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Generate a seeded synthetic dataset");
  cmd_sim->add_option("--kind", sim.kind, "Dataset kind")
      ->check(CLI::IsMember({"binary", "ternary"}))
      ->capture_default_str();
  cmd_sim->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  cmd_sim->add_option("--replicate", sim.replicate, "Replicate index")->capture_default_str();
  cmd_sim->add_option("--n-per-group", sim.n_per_group, "Samples per group")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_sim->add_option("--out", sim.out, "Output directory")->required();

  DistanceArgs dist;
  auto* cmd_dist = app.add_subcommand("distance", "Compute a pairwise distance matrix");
  cmd_dist->add_option("--table", dist.table, "Abundance CSV")->required();
  cmd_dist->add_option("--metric", dist.metric, "Distance metric")
      ->check(CLI::IsMember({"euclidean", "braycurtis", "wunifrac"}))
      ->capture_default_str();
  cmd_dist->add_option("--tree", dist.tree, "Newick tree (required for wunifrac)");
  cmd_dist->add_flag("--unnormalized", dist.unnormalized, "Raw weighted UniFrac");
  cmd_dist->add_flag("--unit-branch-lengths", dist.unit_branch_lengths,
                     "Override all branch lengths with 1");
  cmd_dist->add_option("--out", dist.out, "Output CSV")->required();

  EmbedArgs embed;
  auto* cmd_embed = app.add_subcommand("embed", "Compute a 2D embedding");
  cmd_embed->add_option("--distance", embed.distance, "Distance CSV")->required();
  cmd_embed->add_option("--labels", embed.labels, "Labels CSV");
  cmd_embed->add_option("--method", embed.method, "Embedding method")
      ->check(CLI::IsMember({"mds", "fmds", "smds"}))
      ->capture_default_str();
  cmd_embed->add_option("--lambda", embed.lambda, "F-MDS confirmatory weight")
      ->capture_default_str();
  cmd_embed->add_option("--alpha", embed.alpha, "SuperMDS confirmatory weight")
      ->capture_default_str();
  cmd_embed->add_option("--seed", embed.seed, "Master seed")->capture_default_str();
  cmd_embed->add_option("--map-permutations", embed.map_permutations,
                        "Permutations per mapping build")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_embed->add_option("--pvalue-permutations", embed.pvalue_permutations,
                        "Permutations per p-value")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_embed->add_option("--p-tol", embed.p_tol, "Stop when |p_z - p_x| drops below this")
      ->capture_default_str();
  cmd_embed->add_option("--max-outer-iter", embed.max_outer_iter, "Outer iteration budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_embed->add_flag("--remap-every-point", embed.remap_every_point,
                      "Rebuild the mapping before every point update");
  cmd_embed->add_option("--max-iter", embed.max_iter, "Metric-MDS iteration budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_embed->add_option("--stress-tol", embed.stress_tol, "Metric-MDS relative stress tolerance")
      ->capture_default_str();
  cmd_embed->add_option("--out", embed.out, "Output directory")->required();

  PermanovaArgs perm;
  auto* cmd_perm = app.add_subcommand("permanova", "PERMANOVA significance test");
  cmd_perm->add_option("--input", perm.input, "Distance or embedding CSV")->required();
  cmd_perm->add_option("--labels", perm.labels, "Labels CSV")->required();
  cmd_perm->add_option("-k,--permutations", perm.permutations, "Permutation count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_perm->add_option("--seed", perm.seed, "Master seed")->capture_default_str();
  cmd_perm->add_flag("--conservative", perm.conservative,
                     "Report (1 + count) / (1 + K) instead of count / K");
  cmd_perm->add_option("--out", perm.out, "Report path (default: stdout)");

  EvaluateArgs eval;
  auto* cmd_eval = app.add_subcommand("evaluate", "Embedding quality report");
  cmd_eval->add_option("--distance", eval.distance, "Distance CSV")->required();
  cmd_eval->add_option("--embedding", eval.embedding, "Embedding CSV (any method)")->required();
  cmd_eval->add_option("--labels", eval.labels, "Labels CSV")->required();
  cmd_eval->add_option("--k-local", eval.k_local, "Local neighborhood size (default 7% of N)");
  cmd_eval->add_option("--k-global", eval.k_global, "Global neighborhood size (default 75% of N)");
  cmd_eval->add_option("-k,--permutations", eval.permutations, "Permutations for F metrics")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_eval->add_option("--seed", eval.seed, "Master seed")->capture_default_str();
  cmd_eval->add_flag("--force-k", eval.force_k,
                     "Compute the literal formula even where the normalizer is invalid");
  cmd_eval->add_flag("--kruskal-root", eval.kruskal_root, "Report sqrt of Stress-1");
  cmd_eval->add_option("--out", eval.out, "Report path (default: stdout)");
  cmd_eval->add_option("--shepard", eval.shepard_out, "Also write Shepard pairs CSV");

  PlotArgs plot;
  auto* cmd_plot = app.add_subcommand("plot", "SVG scatter with confidence ellipses");
  cmd_plot->add_option("--embedding", plot.embedding, "Embedding CSV")->required();
  cmd_plot->add_option("--labels", plot.labels, "Labels CSV")->required();
  cmd_plot->add_option("--level", plot.level, "Ellipse confidence level")->capture_default_str();
  cmd_plot->add_option("--out", plot.out, "Output SVG")->required();

  try {
    app.parse(argc, argv);

    // Cross-option usage checks.
    if (cmd_dist->parsed() && dist.metric == "wunifrac" && dist.tree.empty()) {
      std::cerr << "error: --metric wunifrac requires --tree\n";
      return kExitUsage;
    }
    if (cmd_embed->parsed()) {
      if (embed.method != "mds" && embed.labels.empty()) {
        std::cerr << "error: --method " << embed.method << " requires --labels\n";
        return kExitUsage;
      }
      if (embed.lambda < 0.0 || embed.lambda > 1.0) {
        std::cerr << "error: --lambda " << embed.lambda
                  << " rejected; the hyperparameter ranges over [0,1]\n";
        return kExitUsage;
      }
      if (embed.alpha < 0.0 || embed.alpha > 1.0) {
        std::cerr << "error: --alpha " << embed.alpha << " rejected; valid range is [0,1]\n";
        return kExitUsage;
      }
    }
    if (cmd_plot->parsed() && (plot.level < 0.0 || plot.level >= 1.0)) {
      std::cerr << "error: --level must lie in [0, 1)\n";
      return kExitUsage;
    }

    if (cmd_sim->parsed()) return run_simulate(sim);
    if (cmd_dist->parsed()) return run_distance(dist);
    if (cmd_embed->parsed()) return run_embed(embed);
    if (cmd_perm->parsed()) return run_permanova(perm);
    if (cmd_eval->parsed()) return run_evaluate(eval);
    if (cmd_plot->parsed()) return run_plot(plot);
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const fmds::Error& e) {
    std::cerr << "error (" << fmds::errc_name(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
