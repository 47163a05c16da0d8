#ifndef BENCHBIAS_STATS_HPP
#define BENCHBIAS_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "benchbias/data_model.hpp"
#include "benchbias/distribution.hpp"
#include "benchbias/matrix.hpp"

namespace benchbias {

enum class StatisticKind { Mean, P75, P95 };

std::string_view to_string(StatisticKind kind) noexcept;
std::optional<StatisticKind> parse_statistic_kind(std::string_view name) noexcept;

struct PermutationTestReport {
  SimilarityMeasure measure = SimilarityMeasure::Cosine;
  StatisticKind statistic = StatisticKind::Mean;
  double observed = 0.0;
  std::vector<double> permuted;  // one value per permutation, by permutation index
  double p_value = 1.0;
  std::size_t permutations = 0;
  std::uint64_t seed = 0;
};

struct KsReport {
  double statistic = 0.0;  // sup |ECDF_a - ECDF_b|
  double p_value = 1.0;    // asymptotic Kolmogorov tail
  std::uint64_t size_a = 0;
  std::uint64_t size_b = 0;
  bool approximate = false;  // min(size_a, size_b) < 50
};

/// Observed-vs-permuted result for one similarity measure.
struct CorrelationTestResult {
  SimilarityMeasure measure = SimilarityMeasure::Cosine;
  std::vector<PermutationTestReport> tests;  // one per statistic kind, in request order
  KsReport ks;                               // observed vs pooled permuted off-diagonal values
};

/// Shuffles each column independently (Fisher-Yates, one stream per seed).
/// Works on any shape, including a single row.
DenseMatrix permute_columns(const DenseMatrix& values, std::uint64_t seed);

/// Column-wise shuffle: each model's multiset of scores (hence its mean) is kept.
PerformanceMatrix permute_matrix(const PerformanceMatrix& performance, std::uint64_t seed);

/// Strict upper triangle, row-major: n(n-1)/2 values.
std::vector<double> offdiagonal_values(const SimilarityMatrix& similarity);

/// Mean, or a percentile by linear interpolation at rank p(m-1).
double summary_statistic(std::span<const double> values, StatisticKind kind);
double summary_statistic(const EmpiricalDistribution& values, StatisticKind kind);

/// (#{permuted >= observed} + 1) / (B + 1). Ties count against significance.
double permutation_pvalue(double observed, std::span<const double> permuted);

KsReport ks_two_sample(std::span<const double> a, std::span<const double> b);
KsReport ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// One-sample KS against a continuous CDF.
KsReport ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// p-value of the asymptotic KS test for statistic d and sample sizes m, n.
double ks_asymptotic_pvalue(double d, double m, double n);

/// Benjamini-Hochberg adjusted values, in input order. Throws RangeError for
/// values outside [0, 1].
std::vector<double> bh_fdr(std::span<const double> pvalues);

/// Exact two-sample KS between a fixed reference sample and the union of many
/// samples streamed in one at a time, without keeping the streamed values.
///
/// The supremum of |F_ref - F_pooled| over a pair of step functions is
/// reached at a reference point or just left of one, so counting pooled
/// values per gap and per tie against the reference support is sufficient.
class PooledKsAccumulator {
 public:
  explicit PooledKsAccumulator(const EmpiricalDistribution& reference);

  void add(const EmpiricalDistribution& sample);
  void add(std::span<const double> sorted_sample);
  void merge(const PooledKsAccumulator& other);

  std::uint64_t pooled_total() const noexcept { return pooled_total_; }
  KsReport compare() const;

 private:
  const EmpiricalDistribution* reference_;
  std::vector<std::uint64_t> below_;  // below_[i]: pooled values in (ref[i-1], ref[i])
  std::vector<std::uint64_t> equal_;  // equal_[i]: pooled values == ref[i]
  std::uint64_t pooled_total_ = 0;
};

/// Column-permutation test of whether performance vectors are more similar
/// than chance. For every measure: the observed similarity table, B permuted
/// tables (permutation b uses derive_seed(seed, b)), one report per statistic
/// kind and a KS comparison against the pooled permuted values.
/// Output does not depend on the thread count.
std::vector<CorrelationTestResult> run_prompt_correlation_test(
    const PerformanceMatrix& performance, std::span<const SimilarityMeasure> measures,
    std::span<const StatisticKind> statistics, std::size_t permutations, std::uint64_t seed,
    unsigned threads = 0);

}  // namespace benchbias

#endif  // BENCHBIAS_STATS_HPP
