#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "benchbias/clustering.hpp"
#include "benchbias/random.hpp"
#include "benchbias/similarity.hpp"
#include "benchbias/synthetic.hpp"
#include "test_support.hpp"

using namespace benchbias;
using testing::error_code_of;

namespace {

DenseMatrix unit_circle(std::initializer_list<double> degrees) {
  DenseMatrix m(degrees.size(), 2);
  std::size_t i = 0;
  for (double d : degrees) {
    const double r = d * M_PI / 180.0;
    m(i, 0) = std::cos(r);
    m(i, 1) = std::sin(r);
    ++i;
  }
  return m;
}

double objective(const DenseMatrix& v, const std::vector<std::size_t>& assign, std::size_t k) {
  // sum of member-to-normalized-mean cosines
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> mean(v.cols(), 0.0);
    for (std::size_t i = 0; i < v.rows(); ++i) {
      if (assign[i] != c) continue;
      double norm = 0.0;
      for (double x : v.row(i)) norm += x * x;
      norm = std::sqrt(norm);
      for (std::size_t d = 0; d < v.cols(); ++d) mean[d] += v(i, d) / norm;
    }
    double mn = 0.0;
    for (double x : mean) mn += x * x;
    total += std::sqrt(mn);
  }
  return total;
}

}  // namespace

TEST_CASE("spherical k-means on two exact directions") {
  const auto v = DenseMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = spherical_kmeans(v, 2, seed);
    CHECK(c.assignments[0] == c.assignments[1]);
    CHECK(c.assignments[2] == c.assignments[3]);
    CHECK(c.assignments[0] != c.assignments[2]);
    const auto a = c.assignments[0];
    CHECK(c.centroids(a, 0) == doctest::Approx(1.0));
    CHECK(c.centroids(a, 1) == doctest::Approx(0.0));
    CHECK(c.cluster_sizes[0] + c.cluster_sizes[1] == 4);
  }
}

TEST_CASE("k = n puts every point in its own cluster") {
  const auto v = unit_circle({0, 40, 80, 120, 160});
  const auto c = spherical_kmeans(v, 5, 3);
  std::vector<std::size_t> sorted = c.assignments;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(c.objective_history.back() == doctest::Approx(5.0));
}

TEST_CASE("two tight angular groups match the brute-force best 2-partition") {
  const auto v = unit_circle({0, 2, 4, 70, 72, 74.5});
  double best = -1;
  std::vector<std::size_t> best_assign;
  for (unsigned mask = 1; mask < (1u << 6) - 1; ++mask) {
    std::vector<std::size_t> a(6);
    for (unsigned i = 0; i < 6; ++i) a[i] = (mask >> i) & 1u;
    const double o = objective(v, a, 2);
    if (o > best) {
      best = o;
      best_assign = a;
    }
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = spherical_kmeans(v, 2, seed);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK((c.assignments[i] == c.assignments[0]) == (best_assign[i] == best_assign[0]));
    }
  }
}

TEST_CASE("k-means invariants: unit centroids, monotone objective, fixed point") {
  Rng rng(5);
  DenseMatrix v(60, 6);
  for (double& x : v.data()) x = rng.uniform_open() - 0.3;
  const auto c = spherical_kmeans(v, 4, 11);
  for (std::size_t j = 0; j < 4; ++j) {
    double norm = 0.0;
    for (double x : c.centroids.row(j)) norm += x * x;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.cluster_sizes[j] > 0);
  }
  for (std::size_t t = 1; t < c.objective_history.size(); ++t) {
    CHECK(c.objective_history[t] >= c.objective_history[t - 1] - 1e-12);
  }
  CHECK(c.converged);
  for (std::size_t i = 0; i < 60; ++i) {
    std::size_t arg = 0;
    double best = -2;
    for (std::size_t j = 0; j < 4; ++j) {
      const double s = pairwise_similarity(v.row(i), c.centroids.row(j), SimilarityMeasure::Cosine);
      if (s > best) {
        best = s;
        arg = j;
      }
    }
    CHECK(c.assignments[i] == arg);
  }
}

TEST_CASE("k-means errors and zero rows") {
  const auto v = DenseMatrix::from_rows({{1, 0}, {0, 1}, {1, 1}});
  CHECK(error_code_of([&] { spherical_kmeans(v, 1, 0); }) == ErrorCode::InvalidK);
  CHECK(error_code_of([&] { spherical_kmeans(v, 4, 0); }) == ErrorCode::InvalidK);
  const auto zeros = DenseMatrix::from_rows({{0, 0}, {0, 0}, {1, 0}});
  CHECK(error_code_of([&] { spherical_kmeans(zeros, 2, 0); }) == ErrorCode::DegenerateInput);
  const auto with_zero = DenseMatrix::from_rows({{0, 0}, {1, 0}, {1, 0.1}, {0, 1}});
  const auto c = spherical_kmeans(with_zero, 2, 1);
  CHECK(c.assignments.size() == 4);
  CHECK(c.cluster_sizes[0] + c.cluster_sizes[1] == 4);
}

TEST_CASE("silhouette hand cases") {
  const auto dup = DenseMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  const std::vector<std::size_t> a{0, 0, 1, 1};
  CHECK(silhouette_score(dup, a) == 1.0);
  const auto same = DenseMatrix::from_rows({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  CHECK(silhouette_score(same, a) == 0.0);
  // sklearn.metrics.silhouette_score(..., metric="cosine") on angles 0, 10, 90, 100
  CHECK(silhouette_score(unit_circle({0, 10, 90, 100}), a) == doctest::Approx(0.9846923575373495).epsilon(1e-12));
  const std::vector<std::size_t> one{0, 0, 0, 0};
  CHECK(error_code_of([&] { silhouette_score(dup, one); }) == ErrorCode::SingleCluster);
  const std::vector<std::size_t> singleton{0, 0, 0, 1};
  // p0, p1: (0.5); p2: (0 - 1) / 1; p3 is a singleton and scores 0
  CHECK(silhouette_score(dup, singleton) == doctest::Approx(0.0));
}

TEST_CASE("silhouette matches the O(n^2) definition on random data") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix v(25, 4);
    for (double& x : v.data()) x = rng.uniform_open() - 0.5;
    std::vector<std::size_t> a(25);
    for (auto& x : a) x = rng.below(3);
    a[0] = 0;
    a[1] = 1;
    a[2] = 2;
    double total = 0.0;
    for (std::size_t i = 0; i < 25; ++i) {
      std::vector<double> sum(3, 0.0);
      std::vector<double> cnt(3, 0.0);
      for (std::size_t j = 0; j < 25; ++j) {
        if (j == i) continue;
        sum[a[j]] += cosine_distance(v.row(i), v.row(j));
        cnt[a[j]] += 1;
      }
      if (cnt[a[i]] == 0) continue;
      const double in = sum[a[i]] / cnt[a[i]];
      double out = 1e300;
      for (std::size_t c = 0; c < 3; ++c) {
        if (c != a[i] && cnt[c] > 0) out = std::min(out, sum[c] / cnt[c]);
      }
      const double m = std::max(in, out);
      total += m > 0 ? (out - in) / m : 0.0;
    }
    CHECK(silhouette_score(v, a) == doctest::Approx(total / 25).epsilon(1e-10));
  }
}

TEST_CASE("medoids minimize within-cluster distance sums") {
  Rng rng(21);
  DenseMatrix v(30, 5);
  for (double& x : v.data()) x = rng.uniform_open();
  const auto c = spherical_kmeans(v, 3, 2);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto m = c.medoid_indices[j];
    CHECK(c.assignments[m] == j);
    const auto cost = [&](std::size_t p) {
      double s = 0.0;
      for (std::size_t i = 0; i < 30; ++i) {
        if (c.assignments[i] == j) s += cosine_distance(v.row(p), v.row(i));
      }
      return s;
    };
    for (std::size_t i = 0; i < 30; ++i) {
      if (c.assignments[i] == j) CHECK(cost(m) <= cost(i));
    }
  }
  const auto d = medoid_distances(v, c);
  for (std::size_t j = 0; j < 3; ++j) CHECK(d[c.medoid_indices[j]] == 0.0);
}

TEST_CASE("select_k picks planted orthogonal groups and breaks ties toward smaller k") {
  DenseMatrix v(15, 3);
  Rng rng(4);
  for (std::size_t i = 0; i < 15; ++i) {
    for (std::size_t d = 0; d < 3; ++d) v(i, d) = (d == i % 3 ? 1.0 : 0.0) + 0.02 * rng.uniform_open();
  }
  const auto scored = select_k_scored(v, {2, 6}, 1, 5, 1);
  CHECK(scored.best.k == 3);
  CHECK(scored.silhouette_by_k.size() == 5);
  CHECK(select_k(v, {2, 2}, 1, 3, 1).k == 2);

  // all points identical: every k scores 0, so the tie goes to k = 2
  const auto flat = DenseMatrix::from_rows({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}});
  CHECK(select_k(flat, {2, 4}, 1, 2, 1).k == 2);
  CHECK(error_code_of([&] { select_k(v, {1, 3}, 1); }) == ErrorCode::InvalidK);
  CHECK(error_code_of([&] { select_k(v, {2, 15}, 1); }) == ErrorCode::InvalidK);
}

TEST_CASE("clustering comparison on planted and degenerate matrices") {
  const auto planted = synthetic::planted_blocks(5, 10, 10, 0.02, 3);
  const auto c = clustering_comparison(planted, {2, 10}, 9, 10, 1);
  CHECK(c.observed_silhouette > c.permuted_silhouette);
  const auto again = clustering_comparison(planted, {2, 10}, 9, 10, 2);
  CHECK(again.observed_silhouette == c.observed_silhouette);
  CHECK(again.permuted_silhouette == c.permuted_silhouette);
  CHECK(again.observed.best.assignments == c.observed.best.assignments);

  const auto ones = testing::perf({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  const auto flat = clustering_comparison(ones, {2, 3}, 1, 2, 1);
  CHECK(flat.observed_silhouette == 0.0);
  CHECK(flat.permuted_silhouette == 0.0);
  const auto zeros = testing::perf({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  CHECK(error_code_of([&] { clustering_comparison(zeros, {2, 3}, 1, 2, 1); }) == ErrorCode::DegenerateInput);
}
