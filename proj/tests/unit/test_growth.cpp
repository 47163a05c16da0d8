#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "benchbias/growth.hpp"
#include "benchbias/random.hpp"
#include "benchbias/similarity.hpp"
#include "benchbias/synthetic.hpp"
#include "benchbias/weighting.hpp"
#include "test_support.hpp"

using namespace benchbias;
using testing::error_code_of;

TEST_CASE("informative order on the 0/90/5 degree fixture") {
  const double r = 5.0 * M_PI / 180.0;
  const auto e = DenseMatrix::from_rows({{1, 0}, {0, 1}, {std::cos(r), std::sin(r)}});
  CHECK(informative_order(e, 0) == std::vector<std::size_t>{0, 1, 2});
  const auto perf = testing::perf({{1, 0}, {0, 1}, {1, 1}});
  const auto emb = testing::emb({{1, 0}, {0, 1}, {std::cos(r), std::sin(r)}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = growth_curve_informative(perf, emb, seed);
    auto sorted = g.selection_order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 1, 2});
    if (g.selection_order[0] == 0) CHECK(g.selection_order == std::vector<std::size_t>{0, 1, 2});
  }
}

TEST_CASE("growth curves end at the column means bit for bit") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = synthetic::grouped(7, 9, 6, 5, 0.1, 0.3, seed);
    const auto means = column_means(f.performance);
    for (const auto& g : {growth_curve_random(f.performance, seed), growth_curve_informative(f.performance, f.embeddings, seed)}) {
      const auto& rs = g.running_scores;
      REQUIRE(rs.rows() == 63);
      for (std::size_t j = 0; j < 6; ++j) CHECK(rs(62, j) == means[j]);
      // adding one binary row moves a running mean by at most 1/t
      for (std::size_t t = 1; t < rs.rows(); ++t) {
        for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(rs(t, j) - rs(t - 1, j)) <= 1.0 / static_cast<double>(t + 1) + 1e-15);
      }
      // first row is the first selected prompt
      for (std::size_t j = 0; j < 6; ++j) CHECK(rs(0, j) == f.performance(g.selection_order[0], j));
    }
  }
}

TEST_CASE("growth: n=2, determinism, mismatched prompts") {
  const auto perf = testing::perf({{1, 0}, {0, 1}});
  const auto emb = testing::emb({{1, 0}, {0, 1}});
  const auto g = growth_curve_informative(perf, emb, 3);
  CHECK(g.selection_order.size() == 2);
  CHECK(g.selection_order[0] != g.selection_order[1]);
  CHECK(g.running_scores(1, 0) == 0.5);
  const auto r1 = growth_curve_random(perf, 77);
  const auto r2 = growth_curve_random(perf, 77);
  CHECK(r1.selection_order == r2.selection_order);
  CHECK(r1.running_scores == r2.running_scores);
  const EmbeddingMatrix other({"x", "y"}, DenseMatrix::from_rows({{1, 0}, {0, 1}}));
  CHECK(error_code_of([&] { growth_curve_informative(perf, other, 1); }) == ErrorCode::MismatchedPrompts);
  CHECK(random_order(1, 5) == std::vector<std::size_t>{0});
}

TEST_CASE("random order is uniform over the 6 permutations of 3 prompts") {
  std::map<std::vector<std::size_t>, double> counts;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) counts[random_order(3, seed)] += 1;
  REQUIRE(counts.size() == 6);
  double stat = 0.0;
  const double expect = 10000.0 / 6.0;
  for (const auto& [order, c] : counts) stat += (c - expect) * (c - expect) / expect;
  const boost::math::chi_squared dist(5);
  CHECK(boost::math::cdf(boost::math::complement(dist, stat)) > 0.001);
}

TEST_CASE("informative order never repeats and follows the greedy rule") {
  Rng rng(4);
  DenseMatrix e(30, 4);
  for (double& x : e.data()) x = rng.uniform_open() - 0.5;
  const auto order = informative_order(e, 7);
  auto sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 30; ++i) CHECK(sorted[i] == i);
  std::vector<bool> taken(30, false);
  taken[order[0]] = true;
  for (std::size_t t = 1; t < 30; ++t) {
    double best = -1e300;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < 30; ++i) {
      if (taken[i]) continue;
      double sum = 0.0;
      for (std::size_t s = 0; s < t; ++s) sum += 1.0 - pairwise_similarity(e.row(i), e.row(order[s]), SimilarityMeasure::Cosine);
      if (sum > best + 1e-12) {
        best = sum;
        arg = i;
      }
    }
    CHECK(order[t] == arg);
    taken[order[t]] = true;
  }
}
