#ifndef BENCHBIAS_REGRESSION_HPP
#define BENCHBIAS_REGRESSION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "benchbias/data_model.hpp"
#include "benchbias/matrix.hpp"
#include "benchbias/stats.hpp"

namespace benchbias {

struct PairwiseObservations {
  std::vector<double> semantic;     // x: T_sem[i, j], j != i, ascending j
  std::vector<double> performance;  // y: T_perf[i, j], paired with x
};

/// Throws MismatchedPrompts unless both tables cover the same ids in the same order.
PairwiseObservations pairwise_observations(std::size_t prompt, const SimilarityMatrix& performance,
                                           const SimilarityMatrix& semantic);

struct SlopeFit {
  double beta = 0.0;
  double standard_error = 0.0;
  double p_value = 1.0;  // two-sided Student t
  double residual_variance = 0.0;
  double intercept = 0.0;  // 0 unless fitted
  std::size_t observations = 0;
  std::size_t degrees_of_freedom = 0;
};

/// y = beta x + e. beta = sum xy / sum x^2, residual variance RSS / (m - 1),
/// df = m - 1. Throws TooFewObservations (m < 2), DegenerateRegressor (x = 0).
SlopeFit fit_slope_no_intercept(std::span<const double> x, std::span<const double> y);

/// y = a + beta x + e, df = m - 2. Throws TooFewObservations (m < 3),
/// DegenerateRegressor (constant x).
SlopeFit fit_slope_with_intercept(std::span<const double> x, std::span<const double> y);

struct RegressionOptions {
  bool intercept = false;
};

struct RegressionRecord {
  std::string prompt_id;
  double beta = 0.0;
  double standard_error = 0.0;
  double p_value = 1.0;
  double fdr = 1.0;
  double residual_variance = 0.0;
  std::size_t observation_count = 0;
  bool degenerate = false;  // regressor was all zero; excluded from the FDR pass, fdr = 1
};

/// One fit per prompt over all pairs it takes part in, then BH-FDR across the
/// non-degenerate fits. Requires n >= 3.
std::vector<RegressionRecord> per_prompt_regression(const SimilarityMatrix& performance,
                                                    const SimilarityMatrix& semantic,
                                                    const RegressionOptions& options = {});

/// Same as above on raw n x n tables.
std::vector<RegressionRecord> per_prompt_regression(const DenseMatrix& performance,
                                                    const DenseMatrix& semantic,
                                                    std::span<const std::string> prompt_ids,
                                                    const RegressionOptions& options = {});

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

SampleSummary summarize_sample(std::span<const double> values);

struct RegressionBaselineOptions {
  SimilarityMeasure performance_measure = SimilarityMeasure::Cosine;
  RegressionOptions regression;
};

struct RegressionComparisonReport {
  SimilarityMeasure performance_measure = SimilarityMeasure::Cosine;
  bool intercept = false;
  std::vector<RegressionRecord> observed;
  std::vector<double> permuted_betas;  // pooled over permutations, permutation-major
  std::vector<double> permuted_fdrs;
  SampleSummary observed_beta;
  SampleSummary observed_fdr;
  SampleSummary permuted_beta;
  SampleSummary permuted_fdr;
  KsReport beta_ks;
  KsReport fdr_ks;
  std::size_t permutations = 0;
  std::uint64_t seed = 0;
};

/// Observed per-prompt regression against B column permutations of the
/// performance matrix (permutation b uses derive_seed(seed, b)); the
/// semantic table is fixed. Degenerate fits are left out of every pool.
RegressionComparisonReport regression_permutation_baseline(
    const PerformanceMatrix& performance, const EmbeddingMatrix& embeddings,
    std::size_t permutations, std::uint64_t seed, const RegressionBaselineOptions& options = {},
    unsigned threads = 0);

}  // namespace benchbias

#endif  // BENCHBIAS_REGRESSION_HPP
