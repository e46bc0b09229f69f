#include <doctest.h>

#include "fmds/dist.hpp"
#include "fmds/fmds.hpp"
#include "fmds/permanova.hpp"
#include "testutil.hpp"

using namespace fmds;

namespace {

DistanceMatrix matrix_of(const Eigen::MatrixXd& m) {
  return validate_distance_matrix(m, testutil::ids(static_cast<int>(m.rows())));
}

LabelVector labels_of(std::vector<int> y) {
  const int n = static_cast<int>(y.size());
  return make_label_vector(testutil::ids(n), std::move(y));
}

}  // namespace

TEST_SUITE("fmds") {

TEST_CASE("mapping between isometric spaces is close to the identity") {
  // Paired seeds: the same permutations score both spaces, so on an
  // isometry the two sorted lists coincide and the map is the identity.
  Rng rng = SeededRng(1).stream(0);
  Eigen::MatrixXd pts = testutil::random_points(rng, 24, 2);
  auto table = make_abundance_table(testutil::ids(24), {"x", "y"}, pts);
  auto d = euclidean(table);
  auto emb = make_embedding(testutil::ids(24), pts);
  auto labels = labels_of(testutil::balanced_labels(24, 2));

  auto paired_map = [&](const Embedding& z) {
    MappingFunction map;
    map.sorted_fx = fmds::detail::permuted_f_batch(fmds::detail::squared_distances(d), labels,
                                                   999, SeededRng(17));
    map.sorted_fz = fmds::detail::permuted_f_batch(fmds::detail::squared_distances(z), labels,
                                                   999, SeededRng(17));
    std::sort(map.sorted_fx.begin(), map.sorted_fx.end());
    std::sort(map.sorted_fz.begin(), map.sorted_fz.end());
    return map;
  };

  auto map = paired_map(emb);
  double lo = map.sorted_fx.front();
  double hi = map.sorted_fx.back();
  double range = hi - lo;
  double worst = 0.0;
  for (int g = 0; g <= 50; ++g) {
    double f = lo + range * g / 50.0;
    worst = std::max(worst, std::abs(map(f) - f));
  }
  CHECK(worst < 0.05 * range);

  // Scaling the embedding changes nothing material (pseudo-F is scale free).
  auto scaled = make_embedding(testutil::ids(24), (3.0 * pts).eval());
  auto map2 = paired_map(scaled);
  double worst2 = 0.0;
  for (int g = 0; g <= 50; ++g) {
    double f = lo + range * g / 50.0;
    worst2 = std::max(worst2, std::abs(map2(f) - f));
  }
  CHECK(worst2 < 0.05 * range);
}

TEST_CASE("build_mapping draws independent batches and is deterministic") {
  Rng rng = SeededRng(18).stream(0);
  Eigen::MatrixXd pts = testutil::random_points(rng, 20, 2);
  auto d = matrix_of(testutil::distances_of_points(pts));
  auto emb = make_embedding(testutil::ids(20), pts);
  auto labels = labels_of(testutil::balanced_labels(20, 2));
  auto a = build_mapping(d, emb, labels, 199, SeededRng(3));
  auto b = build_mapping(d, emb, labels, 199, SeededRng(3));
  CHECK(a.sorted_fx == b.sorted_fx);
  CHECK(a.sorted_fz == b.sorted_fz);
  CHECK(a.sorted_fx.size() == 199);
  CHECK(std::is_sorted(a.sorted_fx.begin(), a.sorted_fx.end()));
  CHECK(std::is_sorted(a.sorted_fz.begin(), a.sorted_fz.end()));
  // Independent draws for the two spaces: even on an isometry the raw
  // (pre-sort) samples differ, so the sorted lists are not bitwise equal.
  CHECK(a.sorted_fx != a.sorted_fz);
}

TEST_CASE("mapping evaluation: interpolation and boundary extrapolation") {
  MappingFunction map;
  map.sorted_fx = {1.0, 2.0, 4.0};
  map.sorted_fz = {10.0, 20.0, 40.0};
  CHECK(map(2.0) == doctest::Approx(20.0));
  CHECK(map(3.0) == doctest::Approx(30.0));
  CHECK(map(0.5) == doctest::Approx(5.0));   // below the range: lowest segment
  CHECK(map(5.0) == doctest::Approx(50.0));  // above the range: highest segment
}

TEST_CASE("mapping evaluation is monotone") {
  Rng rng = SeededRng(2).stream(0);
  MappingFunction map;
  for (int i = 0; i < 200; ++i) {
    map.sorted_fx.push_back(rng.next_double() * 6.0);
    map.sorted_fz.push_back(rng.next_double() * 4.0);
  }
  std::sort(map.sorted_fx.begin(), map.sorted_fx.end());
  std::sort(map.sorted_fz.begin(), map.sorted_fz.end());
  double prev = map(-1.0);
  for (int g = 0; g <= 400; ++g) {
    double q = -1.0 + 9.0 * g / 400.0;
    double v = map(q);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("objective at lambda zero is twice the raw stress") {
  Rng rng = SeededRng(3).stream(0);
  auto m = testutil::random_dissimilarities(rng, 12);
  auto d = matrix_of(m);
  auto z = make_embedding(testutil::ids(12), testutil::random_points(rng, 12, 2));
  auto labels = labels_of(testutil::balanced_labels(12, 2));
  auto result = fmds_objective(d, z, labels, 1.7, 0.0);
  CHECK(result.objective == doctest::Approx(2.0 * raw_stress(d, z)).epsilon(1e-12));
}

TEST_CASE("confirmatory sign tracks the configuration") {
  // Groups collapsed to points, far apart: within-terms vanish.
  Eigen::MatrixXd z(4, 2);
  z << 0, 0, 0, 0, 9, 0, 9, 0;
  auto labels = labels_of({0, 0, 1, 1});
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(4, 4) - Eigen::MatrixXd::Identity(4, 4);
  auto d = matrix_of(m);
  auto res = fmds_objective(d, make_embedding(testutil::ids(4), z), labels, 0.0, 1.0);
  CHECK(res.confirmatory_signed > 0.0);
  CHECK(delta_sign(res.confirmatory_signed) == 1);

  // Within-group spread dominating: for a balanced binary design the
  // fzFx=0 sum reduces to 2N * between-centroid dispersion and cannot go
  // negative, so a positive mapped target is what flips the sign.
  Eigen::MatrixXd z2(4, 2);
  z2 << 0, 0, 100, 0, 0, 1e-3, 100, 1e-3;
  auto res2 = fmds_objective(d, make_embedding(testutil::ids(4), z2), labels, 1.0, 1.0);
  CHECK(res2.confirmatory_signed < 0.0);
  CHECK(delta_sign(res2.confirmatory_signed) == -1);
}

TEST_CASE("delta_sign tie-break") {
  CHECK(delta_sign(3.2) == 1);
  CHECK(delta_sign(-0.4) == -1);
  CHECK(delta_sign(0.0) == 1);
}

TEST_CASE("update at lambda zero is the Guttman step") {
  Rng rng = SeededRng(4).stream(0);
  auto m = testutil::random_dissimilarities(rng, 10);
  auto d = matrix_of(m);
  auto labels = labels_of(testutil::balanced_labels(10, 2));
  Eigen::MatrixXd z = testutil::random_points(rng, 10, 2);

  Eigen::MatrixXd viaFmds = z;
  for (int k = 0; k < 10; ++k) {
    majorization_update(viaFmds, d, labels, 2.5, -1, 0.0, k);
  }
  Eigen::MatrixXd viaGuttman = z;
  fmds::detail::guttman_sweep(viaGuttman, d.d);
  CHECK((viaFmds - viaGuttman).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generalized coefficient reduces to the binary form at g=2") {
  Rng rng = SeededRng(5).stream(0);
  for (int trial = 0; trial < 500; ++trial) {
    int n = 4 + 2 * static_cast<int>(rng.next_below(60));
    double lambda = rng.next_double();
    int delta = rng.next_double() < 0.5 ? -1 : 1;
    double f = rng.next_double() * 8.0;
    double general = generalized_coefficient(n, 2, lambda, delta, f);
    double binary = (n * (n - 2.0) - n * lambda * delta * f) / (n - 2.0);
    CHECK(general == doctest::Approx(binary).epsilon(1e-12));
  }
}

TEST_CASE("non-positive quadratic coefficient is rejected") {
  auto labels = labels_of({0, 0, 1, 1});
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(4, 4) - Eigen::MatrixXd::Identity(4, 4);
  auto d = matrix_of(m);
  Eigen::MatrixXd z = Eigen::MatrixXd::Random(4, 2);
  // lambda=1, delta=+1, f > N-2 drives C_2 below zero.
  try {
    majorization_update(z, d, labels, 5.0, 1, 1.0, 0);
    FAIL("expected NonPositiveQuadraticCoefficient");
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_positive_quadratic_coefficient);
    CHECK(std::string(e.what()).find("lambda") != std::string::npos);
  }
}

TEST_CASE("unbalanced labels are rejected") {
  Rng rng = SeededRng(6).stream(0);
  auto d = matrix_of(testutil::random_dissimilarities(rng, 6));
  auto labels = labels_of({0, 0, 0, 0, 1, 1});
  Eigen::MatrixXd z = testutil::random_points(rng, 6, 2);
  try {
    majorization_update(z, d, labels, 0.0, 1, 0.5, 0);
    FAIL("expected UnbalancedDesign");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unbalanced_design);
  }
  FmdsConfig cfg;
  try {
    fmds_fit(d, labels, cfg);
    FAIL("expected UnbalancedDesign");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unbalanced_design);
    CHECK(std::string(e.what()).find("PERMANOVA") != std::string::npos);
  }
}

TEST_CASE("contraction step raises the embedded pseudo-F") {
  // Exactly embeddable distances: the stress gradient vanishes at the
  // start, so a delta=-1 sweep acts purely through the confirmatory term.
  Rng rng = SeededRng(7).stream(0);
  Eigen::MatrixXd pts = testutil::random_points(rng, 16, 2);
  auto d = matrix_of(testutil::distances_of_points(pts));
  auto labels = labels_of(testutil::balanced_labels(16, 2));
  double before = pseudo_f_embedding(make_embedding(testutil::ids(16), pts), labels);

  Eigen::MatrixXd z = pts;
  for (int k = 0; k < 16; ++k) {
    majorization_update(z, d, labels, 3.0, -1, 0.5, k);
  }
  double after = pseudo_f_embedding(make_embedding(testutil::ids(16), z), labels);
  CHECK(after > before);
}

TEST_CASE("fit returns the metric embedding when p-values already agree") {
  // Planar, well-separated clusters: 2D keeps the full signal, so
  // p_z == p_x == 0 and no outer iteration is needed.
  Rng rng = SeededRng(8).stream(0);
  Eigen::MatrixXd pts(20, 2);
  for (int i = 0; i < 20; ++i) {
    pts(i, 0) = (i < 10 ? 0.0 : 8.0) + rng.next_normal() * 0.3;
    pts(i, 1) = rng.next_normal() * 0.3;
  }
  auto d = matrix_of(testutil::distances_of_points(pts));
  std::vector<int> y(20, 0);
  for (int i = 10; i < 20; ++i) y[static_cast<std::size_t>(i)] = 1;
  FmdsConfig cfg;
  cfg.map_permutations = 199;
  cfg.pvalue_permutations = 199;
  FmdsResult result = fmds_fit(d, labels_of(y), cfg);
  CHECK(result.trace.iterations.empty());
  CHECK(result.converged);
  auto metric = smacof_fit(d, cfg.init);
  CHECK(result.embedding.z == metric.z);
}

TEST_CASE("lambda-zero fit iterates exactly like SMACOF") {
  Rng rng = SeededRng(9).stream(0);
  auto m = testutil::random_dissimilarities(rng, 14);
  auto d = matrix_of(m);
  auto labels = labels_of(testutil::balanced_labels(14, 2));

  MdsConfig long_cfg;
  long_cfg.max_iter = 11;  // 5 init + 6 outer sweeps
  long_cfg.stress_tol = 1e-300;
  auto reference = smacof_fit(d, long_cfg);

  FmdsConfig cfg;
  cfg.lambda = 0.0;
  cfg.p_tol = 1e-300;
  cfg.max_outer_iter = 6;
  cfg.map_permutations = 23;
  cfg.pvalue_permutations = 23;
  cfg.init.max_iter = 5;
  cfg.init.stress_tol = 1e-300;
  try {
    FmdsResult r = fmds_fit(d, labels, cfg);
    // Converging here would need p_z to equal p_x to 1e-300; treat as the
    // comparison point anyway.
    CHECK((r.embedding.z - reference.z).cwiseAbs().maxCoeff() < 1e-10);
  } catch (const MaxIterationsError& e) {
    CHECK((e.embedding.z - reference.z).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("fit is deterministic and majorization is monotone per sweep") {
  Rng rng = SeededRng(10).stream(0);
  Eigen::MatrixXd pts = testutil::random_points(rng, 20, 4);
  auto d = matrix_of(testutil::distances_of_points(pts));
  auto labels = labels_of(testutil::balanced_labels(20, 2));

  FmdsConfig cfg;
  cfg.lambda = 0.6;
  cfg.seed = 33;
  cfg.map_permutations = 99;
  cfg.pvalue_permutations = 99;
  cfg.p_tol = 1e-9;  // unreachable: force the full budget
  cfg.max_outer_iter = 8;

  FmdsTrace trace;
  Eigen::MatrixXd z_first;
  try {
    FmdsResult r = fmds_fit(d, labels, cfg);
    trace = r.trace;
    z_first = r.embedding.z;
  } catch (const MaxIterationsError& e) {
    trace = e.trace;
    z_first = e.embedding.z;
  }
  REQUIRE(!trace.iterations.empty());
  for (const auto& it : trace.iterations) {
    CHECK(it.linearized_after <= it.linearized_before + 1e-9);
  }

  try {
    FmdsResult r = fmds_fit(d, labels, cfg);
    CHECK(r.embedding.z == z_first);
  } catch (const MaxIterationsError& e) {
    CHECK(e.embedding.z == z_first);
  }
}

TEST_CASE("independent p-value batch is used when the counts differ") {
  Rng rng = SeededRng(19).stream(0);
  Eigen::MatrixXd pts = testutil::random_points(rng, 12, 3);
  auto d = matrix_of(testutil::distances_of_points(pts));
  auto labels = labels_of(testutil::balanced_labels(12, 2));
  FmdsConfig cfg;
  cfg.lambda = 0.5;
  cfg.seed = 4;
  cfg.map_permutations = 99;
  cfg.pvalue_permutations = 77;
  cfg.p_tol = 1e-9;
  cfg.max_outer_iter = 3;
  FmdsTrace trace_a, trace_b;
  for (FmdsTrace* trace : {&trace_a, &trace_b}) {
    try {
      *trace = fmds_fit(d, labels, cfg).trace;
    } catch (const MaxIterationsError& e) {
      *trace = e.trace;
    }
  }
  REQUIRE(trace_a.iterations.size() == trace_b.iterations.size());
  for (std::size_t i = 0; i < trace_a.iterations.size(); ++i) {
    CHECK(trace_a.iterations[i].p_z == trace_b.iterations[i].p_z);
    CHECK(trace_a.iterations[i].objective == trace_b.iterations[i].objective);
  }
}

TEST_CASE("remap-every-point mode runs and stays deterministic") {
  Rng rng = SeededRng(11).stream(0);
  Eigen::MatrixXd pts = testutil::random_points(rng, 8, 3);
  auto d = matrix_of(testutil::distances_of_points(pts));
  auto labels = labels_of(testutil::balanced_labels(8, 2));
  FmdsConfig cfg;
  cfg.lambda = 0.5;
  cfg.remap_every_point = true;
  cfg.map_permutations = 19;
  cfg.pvalue_permutations = 19;
  cfg.max_outer_iter = 2;
  cfg.p_tol = 1e-9;
  Eigen::MatrixXd first, second;
  for (Eigen::MatrixXd* out : {&first, &second}) {
    try {
      FmdsResult r = fmds_fit(d, labels, cfg);
      *out = r.embedding.z;
    } catch (const MaxIterationsError& e) {
      *out = e.embedding.z;
    }
  }
  CHECK(first == second);
}

TEST_CASE("invalid configurations are rejected") {
  Rng rng = SeededRng(12).stream(0);
  auto d = matrix_of(testutil::random_dissimilarities(rng, 6));
  auto labels = labels_of(testutil::balanced_labels(6, 2));
  FmdsConfig cfg;
  cfg.lambda = 1.5;
  CHECK_THROWS_AS(fmds_fit(d, labels, cfg), Error);
  cfg.lambda = -0.1;
  CHECK_THROWS_AS(fmds_fit(d, labels, cfg), Error);
}

TEST_CASE("smds objective reductions and hand evaluation") {
  Rng rng = SeededRng(13).stream(0);
  auto m = testutil::random_dissimilarities(rng, 8);
  auto d = matrix_of(m);
  auto z = make_embedding(testutil::ids(8), testutil::random_points(rng, 8, 2));

  auto labels = labels_of(testutil::balanced_labels(8, 2));
  CHECK(smds_objective(d, z, labels, 0.0) == doctest::Approx(raw_stress(d, z)).epsilon(1e-12));

  auto single = labels_of(std::vector<int>(8, 0));
  CHECK(smds_objective(d, z, single, 0.3) ==
        doctest::Approx(0.7 * raw_stress(d, z)).epsilon(1e-12));

  // Two points, labels (0,1), hand-set coordinates.
  Eigen::MatrixXd m2(2, 2);
  m2 << 0, 3, 3, 0;
  Eigen::MatrixXd z2(2, 2);
  z2 << 0, 0, 1, 1;
  double alpha = 0.7;
  double stress = (3.0 - std::sqrt(2.0)) * (3.0 - std::sqrt(2.0));
  double target = 3.0 / std::sqrt(2.0);
  double confirm = 2.0 * (target - 1.0) * (target - 1.0);
  double expected = (1.0 - alpha) * stress + alpha * confirm;
  CHECK(smds_objective(matrix_of(m2), make_embedding(testutil::ids(2), z2),
                       labels_of({0, 1}), alpha) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("smds fit at alpha zero matches SMACOF stress") {
  Rng rng = SeededRng(14).stream(0);
  auto m = testutil::random_dissimilarities(rng, 12);
  auto d = matrix_of(m);
  auto labels = labels_of(testutil::balanced_labels(12, 2));
  double smacof_stress = raw_stress(d, smacof_fit(d, {}));
  double smds_stress = raw_stress(d, smds_fit(d, labels, 0.0));
  CHECK(smds_stress == doctest::Approx(smacof_stress).epsilon(1e-6));
}

TEST_CASE("smds objective is non-increasing in the iteration budget") {
  Rng rng = SeededRng(15).stream(0);
  auto m = testutil::random_dissimilarities(rng, 10);
  auto d = matrix_of(m);
  auto labels = labels_of(testutil::balanced_labels(10, 2));
  double prev = std::numeric_limits<double>::infinity();
  for (int budget : {1, 2, 3, 5, 8, 13, 21}) {
    MdsConfig cfg;
    cfg.max_iter = budget;
    cfg.stress_tol = 1e-300;
    double obj = smds_objective(d, smds_fit(d, labels, 0.5, cfg), labels, 0.5);
    CHECK(obj <= prev + 1e-12);
    prev = obj;
  }
}

}  // TEST_SUITE
