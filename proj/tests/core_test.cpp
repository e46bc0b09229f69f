#include <doctest.h>

#include "fmds/core.hpp"
#include "fmds/rng.hpp"
#include "testutil.hpp"

using namespace fmds;

TEST_SUITE("core") {

TEST_CASE("validate_distance_matrix accepts a minimal symmetric matrix") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  auto d = validate_distance_matrix(m, testutil::ids(2));
  CHECK(d.d(0, 1) == 1.0);
  CHECK(d.d(1, 0) == 1.0);
}

TEST_CASE("validate_distance_matrix rejects real asymmetry") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 2, 0;
  CHECK_THROWS_WITH_AS(validate_distance_matrix(m, testutil::ids(2)),
                       doctest::Contains("asymmetry"), Error);
  try {
    validate_distance_matrix(m, testutil::ids(2));
  } catch (const Error& e) {
    CHECK(e.code() == errc::asymmetric_matrix);
  }
}

TEST_CASE("validate_distance_matrix averages round-trip noise") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1 + 1e-12, 0;
  auto d = validate_distance_matrix(m, testutil::ids(2));
  double expected = 0.5 * (1.0 + (1.0 + 1e-12));
  CHECK(d.d(0, 1) == expected);
  CHECK(d.d(1, 0) == expected);
}

TEST_CASE("validate_distance_matrix rejects negatives, bad diagonal, non-finite") {
  Eigen::MatrixXd neg(2, 2);
  neg << 0, -1, -1, 0;
  CHECK_THROWS_AS(validate_distance_matrix(neg, testutil::ids(2)), Error);

  Eigen::MatrixXd diag(2, 2);
  diag << 0.5, 1, 1, 0;
  try {
    validate_distance_matrix(diag, testutil::ids(2));
    FAIL("expected NonZeroDiagonal");
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_zero_diagonal);
  }

  Eigen::MatrixXd inf(2, 2);
  inf << 0, std::numeric_limits<double>::infinity(), 1, 0;
  try {
    validate_distance_matrix(inf, testutil::ids(2));
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_finite);
  }
}

TEST_CASE("indicator_same_group block structure") {
  auto labels = make_label_vector(testutil::ids(4), {0, 0, 1, 1});
  auto eps = indicator_same_group(labels);
  Eigen::MatrixXi expected(4, 4);
  expected << 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1;
  CHECK(eps == expected);

  auto two = indicator_same_group(make_label_vector(testutil::ids(2), {0, 1}));
  CHECK(two == Eigen::MatrixXi::Identity(2, 2));

  auto all = indicator_same_group(make_label_vector(testutil::ids(3), {0, 0, 0}));
  CHECK(all == Eigen::MatrixXi::Ones(3, 3));
}

TEST_CASE("indicator is symmetric with unit diagonal for random labels") {
  Rng rng = SeededRng(7).stream(0);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + static_cast<int>(rng.next_below(12));
    std::vector<int> y;
    for (int i = 0; i < n; ++i) y.push_back(static_cast<int>(rng.next_below(4)));
    auto eps = indicator_same_group(make_label_vector(testutil::ids(n), y));
    CHECK(eps == eps.transpose().eval());
    CHECK(eps.diagonal() == Eigen::VectorXi::Ones(n));
  }
}

TEST_CASE("LabelVector balance and group bookkeeping") {
  auto balanced = make_label_vector(testutil::ids(6), {0, 0, 1, 1, 2, 2});
  CHECK(balanced.balanced());
  CHECK(balanced.distinct_groups() == 3);

  auto skewed = make_label_vector(testutil::ids(5), {0, 0, 0, 1, 1});
  CHECK_FALSE(skewed.balanced());

  CHECK_THROWS_AS(make_label_vector(testutil::ids(2), {0, -1}), Error);
}

TEST_CASE("IDs travel with rows under joint permutation") {
  Rng rng = SeededRng(13).stream(0);
  auto pts = testutil::random_points(rng, 8, 3);
  auto m = testutil::distances_of_points(pts);
  auto base_ids = testutil::ids(8);
  auto d = validate_distance_matrix(m, base_ids);

  std::vector<int> perm{3, 1, 7, 0, 5, 2, 6, 4};
  Eigen::MatrixXd pm(8, 8);
  std::vector<std::string> pids;
  for (int i = 0; i < 8; ++i) {
    pids.push_back(base_ids[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
    for (int j = 0; j < 8; ++j) {
      pm(i, j) = m(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
  }
  auto dp = validate_distance_matrix(pm, pids);

  // Joining labels by ID must undo the permutation.
  auto labels = make_label_vector(base_ids, testutil::balanced_labels(8, 2));
  auto aligned = align_labels(labels, dp.sample_ids);
  for (int i = 0; i < 8; ++i) {
    CHECK(aligned.y[static_cast<std::size_t>(i)] ==
          labels.y[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
  }
}

TEST_CASE("align reports missing IDs") {
  auto labels = make_label_vector({"a", "b"}, {0, 1});
  try {
    align_labels(labels, {"a", "zz"});
    FAIL("expected IdMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == errc::id_mismatch);
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }
}

TEST_CASE("SeededRng substreams are independent of draw interleaving") {
  SeededRng root(123);
  Rng a1 = root.stream(5);
  Rng b1 = root.stream(9);
  std::vector<std::uint64_t> seq_a, seq_b;
  for (int i = 0; i < 8; ++i) seq_a.push_back(a1.next_u64());
  for (int i = 0; i < 8; ++i) seq_b.push_back(b1.next_u64());

  Rng a2 = root.stream(5);
  Rng b2 = root.stream(9);
  for (int i = 0; i < 8; ++i) {
    CHECK(b2.next_u64() == seq_b[static_cast<std::size_t>(i)]);
    CHECK(a2.next_u64() == seq_a[static_cast<std::size_t>(i)]);
  }
  CHECK(seq_a != seq_b);
}

TEST_CASE("shuffle is a permutation and deterministic per stream") {
  Rng rng = SeededRng(42).stream(1);
  std::vector<int> v42(100);
  for (int i = 0; i < 100; ++i) v42[static_cast<std::size_t>(i)] = i;
  auto original = v42;
  rng.shuffle(v42);
  CHECK(v42 != original);
  auto sorted = v42;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == original);

  Rng rng2 = SeededRng(42).stream(1);
  auto again = original;
  rng2.shuffle(again);
  CHECK(again == v42);
}

}  // TEST_SUITE
