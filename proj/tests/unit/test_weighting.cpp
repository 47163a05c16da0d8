#include <doctest.h>

#include <numeric>
#include <vector>

#include "benchbias/clustering.hpp"
#include "benchbias/random.hpp"
#include "benchbias/synthetic.hpp"
#include "benchbias/weighting.hpp"
#include "test_support.hpp"

using namespace benchbias;
using testing::error_code_of;
using testing::perf;

namespace {

Clustering hand_clustering(std::vector<std::size_t> assignments, std::vector<std::size_t> medoids) {
  Clustering c;
  c.k = medoids.size();
  c.assignments = std::move(assignments);
  c.medoid_indices = std::move(medoids);
  c.cluster_sizes.assign(c.k, 0);
  for (auto a : c.assignments) ++c.cluster_sizes[a];
  return c;
}

}  // namespace

TEST_CASE("weighted performance") {
  const auto q = perf({{1, 0}, {0, 1}});
  CHECK(weighted_performance(q, WeightVector({1, 0}, "w")) == std::vector<double>{1, 0});
  CHECK(weighted_performance(q, WeightVector({0.25, 0.75}, "w")) == std::vector<double>{0.25, 0.75});
  CHECK(error_code_of([&] { weighted_performance(q, WeightVector::uniform(3)); }) == ErrorCode::LengthMismatch);
  const auto b = synthetic::null_bernoulli(40, 7, 3);
  const auto uniform = weighted_performance(b, WeightVector::uniform(40));
  const auto means = column_means(b);
  for (std::size_t j = 0; j < 7; ++j) CHECK(std::abs(uniform[j] - means[j]) <= 1e-12);
}

TEST_CASE("medoid-only scores") {
  const auto q = perf({{1, 0, 1}, {0, 1, 1}, {1, 1, 0}});
  CHECK(medoid_subset_performance(q, hand_clustering({0, 0, 0}, {0})) == std::vector<double>{1, 0, 1});
  const auto two = perf({{1, 0}, {0, 1}, {1, 1}});
  CHECK(medoid_subset_performance(two, hand_clustering({0, 1, 1}, {0, 1})) == std::vector<double>{0.5, 0.5});
  const auto three = perf({{1, 0}, {1, 1}, {0, 0}, {1, 0}});
  const auto s = medoid_subset_performance(three, hand_clustering({0, 1, 2, 2}, {0, 1, 2}));
  CHECK(s[0] == doctest::Approx(2.0 / 3));
  CHECK(s[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("distance weights") {
  const std::vector<double> d1{0, 1, 3};
  const auto w1 = distance_weights(hand_clustering({0, 0, 0}, {0}), d1);
  CHECK(w1.weights.weights() == std::vector<double>{0, 0.25, 0.75});
  CHECK(w1.fallback_clusters.empty());

  const std::vector<double> d2{0, 1, 0, 1};
  const auto w2 = distance_weights(hand_clustering({0, 0, 1, 1}, {0, 2}), d2);
  CHECK(w2.weights.weights() == std::vector<double>{0, 0.5, 0, 0.5});

  const std::vector<double> d3{0, 0, 0};
  const auto w3 = distance_weights(hand_clustering({0, 1, 2}, {0, 1, 2}), d3);
  for (double w : w3.weights.weights()) CHECK(w == doctest::Approx(1.0 / 3));
  CHECK(w3.fallback_clusters.size() == 3);
}

TEST_CASE("inverse distance weights") {
  const std::vector<double> d{0, 0.5, 1.0};
  const auto w = inverse_distance_weights(hand_clustering({0, 0, 0}, {0}), d);
  // eps = 0.01 * 0.75; weights proportional to 1 / (d + eps)
  const double eps = 0.0075;
  const double u[] = {1 / eps, 1 / (0.5 + eps), 1 / (1.0 + eps)};
  const double total = u[0] + u[1] + u[2];
  for (int i = 0; i < 3; ++i) CHECK(w.weights[static_cast<std::size_t>(i)] == doctest::Approx(u[i] / total).epsilon(1e-12));
  // the rounded values quoted for this case
  CHECK(w.weights[0] == doctest::Approx(0.97825).epsilon(2e-5));
  CHECK(w.weights[1] == doctest::Approx(0.014459).epsilon(2e-4));
  CHECK(w.weights[2] == doctest::Approx(0.0072838).epsilon(2e-4));

  const std::vector<double> same{0, 0, 0};
  const auto flat = inverse_distance_weights(hand_clustering({0, 0, 0}, {0}), same);
  for (double x : flat.weights.weights()) CHECK(x == doctest::Approx(1.0 / 3));
  const std::vector<double> singles{0, 0};
  const auto two = inverse_distance_weights(hand_clustering({0, 1}, {0, 1}), singles);
  CHECK(two.weights.weights() == std::vector<double>{0.5, 0.5});
}

TEST_CASE("weight-scheme algebra on real clusterings") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto q = synthetic::planted_blocks(4, 8, 9, 0.1, seed);
    const auto c = select_k(q.values(), {2, 6}, seed, 3, 1);
    const auto d = medoid_distances(q.values(), c);
    for (const auto& scheme : {distance_weights(c, d), inverse_distance_weights(c, d)}) {
      const auto& w = scheme.weights.weights();
      double sum = 0.0;
      std::vector<double> mass(c.k, 0.0);
      for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(w[i] >= 0.0);
        sum += w[i];
        mass[c.assignments[i]] += w[i];
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
      for (std::size_t j = 0; j < c.k; ++j) {
        CHECK(std::abs(mass[j] - static_cast<double>(c.cluster_sizes[j]) / 32.0) <= 1e-9);
      }
    }
    const auto dw = distance_weights(c, d);
    for (std::size_t j = 0; j < c.k; ++j) {
      const bool fell_back = std::find(dw.fallback_clusters.begin(), dw.fallback_clusters.end(), j) !=
                             dw.fallback_clusters.end();
      if (!fell_back) CHECK(dw.weights[c.medoid_indices[j]] == 0.0);
    }
  }
}

TEST_CASE("competition ranking") {
  CHECK(rank_models(std::vector<double>{0.9, 0.5, 0.7}) == std::vector<int>{1, 3, 2});
  CHECK(rank_models(std::vector<double>{0.5, 0.5}) == std::vector<int>{1, 1});
  CHECK(rank_models(std::vector<double>{0.3, 0.9, 0.9, 0.1}) == std::vector<int>{3, 1, 1, 4});
}

TEST_CASE("rank change report") {
  SUBCASE("uniform against itself is zero") {
    const std::vector<double> s{0.3, 0.9, 0.6};
    const auto base = rank_models(s);
    const auto r = make_ranking("uniform", s, base);
    CHECK(r.rank_delta == std::vector<int>{0, 0, 0});
  }
  SUBCASE("medoid rows invert two models") {
    // baseline: m0 = 4/6, m1 = 3/6; medoids p0 and p3 score m0 = 0.5, m1 = 1
    const auto q = perf({{1, 1}, {1, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 0}});
    const auto c = hand_clustering({0, 0, 0, 1, 1, 1}, {0, 3});
    const auto r = rank_change_report(q, c);
    CHECK(r.baseline.ranks == std::vector<int>{1, 2});
    CHECK(r.baseline.rank_delta == std::vector<int>{0, 0});
    REQUIRE(r.schemes.size() == 3);
    CHECK(r.schemes[0].scheme == "medoid-only");
    CHECK(r.schemes[0].rank_delta == std::vector<int>{-1, 1});
    CHECK(r.column_order == std::vector<std::size_t>{1, 0});
  }
  SUBCASE("identical ranks under every scheme give zero rows") {
    const auto q = perf({{1, 0}, {1, 0}, {1, 1}, {1, 0}});
    const auto c = hand_clustering({0, 0, 1, 1}, {0, 2});
    const auto r = rank_change_report(q, c);
    for (const auto& s : r.schemes) CHECK(s.rank_delta == std::vector<int>{0, 0});
  }
}
