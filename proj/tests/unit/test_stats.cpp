#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "benchbias/distribution.hpp"
#include "benchbias/random.hpp"
#include "benchbias/similarity.hpp"
#include "benchbias/stats.hpp"
#include "benchbias/synthetic.hpp"
#include "test_support.hpp"

using namespace benchbias;
using testing::error_code_of;

namespace {

std::vector<double> brute_force_bh(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<double> q(m);
  for (std::size_t i = 0; i < m; ++i) {
    double best = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (p[j] < p[i]) continue;
      std::size_t rank = 0;
      for (std::size_t l = 0; l < m; ++l) rank += p[l] <= p[j] ? 1 : 0;
      best = std::min(best, p[j] * static_cast<double>(m) / static_cast<double>(rank));
    }
    q[i] = best;
  }
  return q;
}

double brute_force_ks(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  const auto ecdf_count = [](const std::vector<double>& s, double x) {
    std::size_t c = 0;
    for (double v : s) c += v <= x ? 1 : 0;
    return c;
  };
  for (const auto* s : {&a, &b}) {
    for (double x : *s) {
      const double fa = static_cast<double>(ecdf_count(a, x)) / static_cast<double>(a.size());
      const double fb = static_cast<double>(ecdf_count(b, x)) / static_cast<double>(b.size());
      d = std::max(d, std::abs(fa - fb));
    }
  }
  return d;
}

double chi_square_pvalue(const std::vector<double>& observed, double expected_each) {
  double stat = 0.0;
  for (double o : observed) stat += (o - expected_each) * (o - expected_each) / expected_each;
  const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST_CASE("permute_columns keeps column multisets and is seeded") {
  Rng rng(9);
  DenseMatrix m(12, 4);
  for (double& v : m.data()) v = std::floor(rng.uniform_open() * 5);
  const auto p = permute_columns(m, 42);
  CHECK(p == permute_columns(m, 42));
  CHECK_FALSE(p == permute_columns(m, 43));
  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < 12; ++i) {
      a.push_back(m(i, j));
      b.push_back(p(i, j));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
  const auto single = DenseMatrix::from_rows({{0.1, 0.9, 0.4}});
  CHECK(permute_columns(single, 5) == single);

  const auto pm = synthetic::null_bernoulli(30, 8, 1);
  const auto pp = permute_matrix(pm, 3);
  CHECK(pp.prompt_ids() == pm.prompt_ids());
  CHECK(pp.kind() == pm.kind());
}

TEST_CASE("column permutation is uniform over arrangements") {
  const auto col = DenseMatrix::from_rows({{1}, {0}, {0}});
  std::vector<double> counts(3, 0.0);
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto p = permute_columns(col, s);
    for (std::size_t i = 0; i < 3; ++i) {
      if (p(i, 0) == 1.0) counts[i] += 1.0;
    }
  }
  CHECK(chi_square_pvalue(counts, 10000.0 / 3.0) > 0.001);
}

TEST_CASE("offdiagonal values") {
  const SimilarityMatrix two({"a", "b"}, DenseMatrix::from_rows({{1, 0.4}, {0.4, 1}}), SimilarityMeasure::Cosine);
  CHECK(offdiagonal_values(two) == std::vector<double>{0.4});
  const SimilarityMatrix three({"a", "b", "c"},
                               DenseMatrix::from_rows({{1, 0.1, 0.2}, {0.1, 1, 0.3}, {0.2, 0.3, 1}}),
                               SimilarityMeasure::Cosine);
  CHECK(offdiagonal_values(three) == std::vector<double>{0.1, 0.2, 0.3});
  const auto big = performance_similarity_matrix(synthetic::null_bernoulli(17, 6, 2), SimilarityMeasure::Hamming);
  CHECK(offdiagonal_values(big).size() == 17u * 16u / 2u);
}

TEST_CASE("summary statistics") {
  const std::vector<double> one{0.5};
  for (auto k : {StatisticKind::Mean, StatisticKind::P75, StatisticKind::P95}) CHECK(summary_statistic(one, k) == 0.5);
  CHECK(summary_statistic(std::vector<double>{0, 1}, StatisticKind::Mean) == 0.5);
  CHECK(summary_statistic(std::vector<double>{4, 0, 2, 1, 3}, StatisticKind::P75) == 3.0);
  CHECK(summary_statistic(std::vector<double>{0, 1, 2, 3, 4}, StatisticKind::P95) == doctest::Approx(3.8));
  CHECK(error_code_of([] { summary_statistic(std::vector<double>{}, StatisticKind::Mean); }) ==
        ErrorCode::EmptyInput);
  const auto dist = EmpiricalDistribution::from_samples({3, 1, 1, 2, 4, 4, 4});
  const std::vector<double> flat{3, 1, 1, 2, 4, 4, 4};
  for (auto k : {StatisticKind::Mean, StatisticKind::P75, StatisticKind::P95}) {
    CHECK(summary_statistic(dist, k) == doctest::Approx(summary_statistic(flat, k)).epsilon(1e-15));
  }
}

TEST_CASE("permutation p-values") {
  const std::vector<double> below(1000, 4.0);
  CHECK(permutation_pvalue(5.0, below) == 1.0 / 1001.0);
  const std::vector<double> ties(10, 2.0);
  CHECK(permutation_pvalue(2.0, ties) == 1.0);
  const std::vector<double> above(9, 3.0);
  CHECK(permutation_pvalue(1.0, above) == 1.0);
}

TEST_CASE("KS two-sample hand cases") {
  const std::vector<double> a{0.3, 0.1, 0.2};
  const auto same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK(ks_two_sample(std::vector<double>{1, 2, 3, 4}, std::vector<double>{5, 6, 7, 8}).statistic == 1.0);
  CHECK(ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4}).statistic == 0.5);
  const auto small = ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4});
  CHECK(small.approximate);
  CHECK(error_code_of([] { ks_two_sample(std::vector<double>{}, std::vector<double>{1}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("KS p-value uses the asymptotic Kolmogorov tail with effective size mn/(m+n)") {
  // scipy.special.kolmogorov(1.0) = 0.26999967167735456
  const double d = 1.0 / std::sqrt(100.0 * 100.0 / 200.0);
  CHECK(ks_asymptotic_pvalue(d, 100, 100) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(ks_asymptotic_pvalue(1.0, 1e9, 1e9) > 0.0);  // floored, never zero
}

TEST_CASE("KS statistic equals the brute-force ECDF sup on random cases") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(40);
    const std::size_t n = 1 + rng.below(40);
    std::vector<double> a(m);
    std::vector<double> b(n);
    // coarse values so ties across and within samples are common
    for (double& v : a) v = std::floor(rng.uniform_open() * 12) / 4;
    for (double& v : b) v = std::floor(rng.uniform_open() * 12) / 4;
    REQUIRE(ks_two_sample(a, b).statistic == brute_force_ks(a, b));
  }
}

TEST_CASE("pooled KS accumulator equals KS against the concatenated sample") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> ref(1 + rng.below(30));
    for (double& v : ref) v = std::floor(rng.uniform_open() * 8);
    const auto reference = EmpiricalDistribution::from_samples(ref);
    PooledKsAccumulator acc(reference);
    PooledKsAccumulator other(reference);
    std::vector<double> pooled;
    for (int s = 0; s < 5; ++s) {
      std::vector<double> sample(1 + rng.below(20));
      for (double& v : sample) v = std::floor(rng.uniform_open() * 10) - 1;
      pooled.insert(pooled.end(), sample.begin(), sample.end());
      if (s % 2 == 0) {
        acc.add(EmpiricalDistribution::from_samples(sample));
      } else {
        std::sort(sample.begin(), sample.end());
        other.add(sample);
      }
    }
    acc.merge(other);
    const auto got = acc.compare();
    const auto expect = ks_two_sample(ref, pooled);
    REQUIRE(got.statistic == expect.statistic);
    REQUIRE(got.statistic == brute_force_ks(ref, pooled));
    REQUIRE(got.p_value == expect.p_value);
    REQUIRE(acc.pooled_total() == pooled.size());
  }
}

TEST_CASE("BH-FDR hand cases and range checks") {
  CHECK(bh_fdr(std::vector<double>{0.001}) == std::vector<double>{0.001});
  const auto three = bh_fdr(std::vector<double>{0.01, 0.02, 0.03});
  for (double q : three) CHECK(q == doctest::Approx(0.03).epsilon(1e-15));
  const auto two = bh_fdr(std::vector<double>{0.04, 0.5});
  CHECK(two[0] == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(two[1] == 0.5);
  CHECK(error_code_of([] { bh_fdr(std::vector<double>{0.5, 1.5}); }) == ErrorCode::RangeError);
  CHECK(error_code_of([] { bh_fdr(std::vector<double>{-0.1}); }) == ErrorCode::RangeError);
}

TEST_CASE("BH-FDR matches a brute-force double loop on 1000 random vectors") {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> p(1 + rng.below(60));
    for (double& v : p) v = trial % 3 == 0 ? std::floor(rng.uniform_open() * 20) / 20 : rng.uniform_open();
    const auto q = bh_fdr(p);
    REQUIRE(q == brute_force_bh(p));
    for (std::size_t i = 0; i < p.size(); ++i) {
      // p * m / m may land one ulp below p
      REQUIRE(q[i] >= std::nextafter(p[i], 0.0));
      REQUIRE(q[i] <= 1.0);
    }
  }
}

TEST_CASE("correlation test: planted blocks, B=1, determinism") {
  const auto planted = synthetic::planted_blocks(5, 10, 10, 0.02, 4);
  const SimilarityMeasure cos[] = {SimilarityMeasure::Cosine};
  const StatisticKind p95[] = {StatisticKind::P95};
  const auto r = run_prompt_correlation_test(planted, cos, p95, 999, 7, 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0].tests[0].p_value <= 0.005);
  CHECK(r[0].tests[0].permuted.size() == 999);

  const SimilarityMeasure all[] = {SimilarityMeasure::Cosine, SimilarityMeasure::Hamming, SimilarityMeasure::Jaccard};
  const StatisticKind kinds[] = {StatisticKind::Mean, StatisticKind::P75, StatisticKind::P95};
  const auto null = synthetic::null_bernoulli(20, 6, 5);
  const auto one = run_prompt_correlation_test(null, all, kinds, 1, 3, 1);
  for (const auto& m : one) {
    for (const auto& t : m.tests) CHECK((t.p_value == 0.5 || t.p_value == 1.0));
    CHECK(m.ks.size_b == m.ks.size_a);
  }
  const auto threaded = run_prompt_correlation_test(null, all, kinds, 25, 3, 3);
  const auto serial = run_prompt_correlation_test(null, all, kinds, 25, 3, 1);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    for (std::size_t t = 0; t < serial[i].tests.size(); ++t) {
      CHECK(serial[i].tests[t].permuted == threaded[i].tests[t].permuted);
      CHECK(serial[i].tests[t].p_value == threaded[i].tests[t].p_value);
    }
    CHECK(serial[i].ks.statistic == threaded[i].ks.statistic);
  }
}

TEST_CASE("correlation test KS pools exactly the permuted off-diagonal values") {
  const auto p = synthetic::null_bernoulli(9, 5, 8);
  const SimilarityMeasure cos[] = {SimilarityMeasure::Cosine};
  const StatisticKind mean[] = {StatisticKind::Mean};
  const std::uint64_t seed = 21;
  const auto r = run_prompt_correlation_test(p, cos, mean, 6, seed, 1);
  const SimilarityKernel kernel(SimilarityMeasure::Cosine, p.kind(), p.model_count());
  std::vector<double> observed;
  kernel.upper_triangle(p.values(), observed);
  std::vector<double> pooled;
  for (std::size_t b = 0; b < 6; ++b) {
    std::vector<double> t;
    kernel.upper_triangle(permute_columns(p.values(), derive_seed(seed, b)), t);
    CHECK(summary_statistic(t, StatisticKind::Mean) == doctest::Approx(r[0].tests[0].permuted[b]).epsilon(1e-14));
    pooled.insert(pooled.end(), t.begin(), t.end());
  }
  CHECK(r[0].ks.statistic == brute_force_ks(observed, pooled));
  CHECK(r[0].tests[0].observed == doctest::Approx(summary_statistic(observed, StatisticKind::Mean)).epsilon(1e-14));
}
