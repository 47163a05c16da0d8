#include "benchbias/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "benchbias/error.hpp"
#include "benchbias/parallel.hpp"
#include "benchbias/random.hpp"
#include "benchbias/similarity.hpp"
#include "benchbias/special_functions.hpp"

namespace benchbias {

namespace {

double slope_pvalue(double beta, double standard_error, double df) {
  if (standard_error == 0.0) return beta == 0.0 ? 1.0 : 0.0;
  return student_t_two_sided_pvalue(beta / standard_error, df);
}

void check_pair(std::span<const double> x, std::span<const double> y, std::size_t minimum) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
  if (x.size() < minimum) {
    throw Error(ErrorCode::TooFewObservations, std::to_string(x.size()) + " observations, need " +
                                                   std::to_string(minimum));
  }
}

struct FitOutcome {
  SlopeFit fit;
  bool degenerate = false;
};

FitOutcome fit_row(std::size_t i, const DenseMatrix& performance, const DenseMatrix& semantic,
                   bool intercept, std::vector<double>& xs, std::vector<double>& ys) {
  const std::size_t n = performance.rows();
  xs.clear();
  ys.clear();
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    xs.push_back(semantic(i, j));
    ys.push_back(performance(i, j));
  }
  try {
    return {intercept ? fit_slope_with_intercept(xs, ys) : fit_slope_no_intercept(xs, ys), false};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateRegressor) throw;
    FitOutcome out;
    out.degenerate = true;
    out.fit.observations = xs.size();
    return out;
  }
}

}  // namespace

PairwiseObservations pairwise_observations(std::size_t prompt, const SimilarityMatrix& performance,
                                           const SimilarityMatrix& semantic) {
  if (performance.prompt_ids() != semantic.prompt_ids()) {
    std::vector<std::string> missing_in_perf;
    std::vector<std::string> missing_in_sem;
    for (const auto& id : semantic.prompt_ids()) {
      if (std::find(performance.prompt_ids().begin(), performance.prompt_ids().end(), id) ==
          performance.prompt_ids().end()) {
        missing_in_perf.push_back(id);
      }
    }
    for (const auto& id : performance.prompt_ids()) {
      if (std::find(semantic.prompt_ids().begin(), semantic.prompt_ids().end(), id) ==
          semantic.prompt_ids().end()) {
        missing_in_sem.push_back(id);
      }
    }
    throw MismatchedPromptsError(std::move(missing_in_perf), std::move(missing_in_sem));
  }
  const std::size_t n = performance.size();
  if (prompt >= n) throw Error(ErrorCode::RangeError, "prompt index out of range");
  PairwiseObservations obs;
  obs.semantic.reserve(n - 1);
  obs.performance.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == prompt) continue;
    obs.semantic.push_back(semantic(prompt, j));
    obs.performance.push_back(performance(prompt, j));
  }
  return obs;
}

SlopeFit fit_slope_no_intercept(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 2);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  if (sxx == 0.0) throw Error(ErrorCode::DegenerateRegressor, "regressor is identically zero");
  SlopeFit fit;
  fit.observations = x.size();
  fit.degrees_of_freedom = x.size() - 1;
  fit.beta = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.beta * x[i];
    rss += r * r;
  }
  fit.residual_variance = rss / static_cast<double>(fit.degrees_of_freedom);
  fit.standard_error = std::sqrt(fit.residual_variance / sxx);
  fit.p_value = slope_pvalue(fit.beta, fit.standard_error, static_cast<double>(fit.degrees_of_freedom));
  return fit;
}

SlopeFit fit_slope_with_intercept(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 3);
  const double m = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / m;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
  }
  if (sxx == 0.0) throw Error(ErrorCode::DegenerateRegressor, "regressor is constant");
  SlopeFit fit;
  fit.observations = x.size();
  fit.degrees_of_freedom = x.size() - 2;
  fit.beta = sxy / sxx;
  fit.intercept = mean_y - fit.beta * mean_x;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.beta * x[i];
    rss += r * r;
  }
  fit.residual_variance = rss / static_cast<double>(fit.degrees_of_freedom);
  fit.standard_error = std::sqrt(fit.residual_variance / sxx);
  fit.p_value = slope_pvalue(fit.beta, fit.standard_error, static_cast<double>(fit.degrees_of_freedom));
  return fit;
}

std::vector<RegressionRecord> per_prompt_regression(const DenseMatrix& performance,
                                                    const DenseMatrix& semantic,
                                                    std::span<const std::string> prompt_ids,
                                                    const RegressionOptions& options) {
  const std::size_t n = performance.rows();
  if (performance.cols() != n || semantic.rows() != n || semantic.cols() != n ||
      prompt_ids.size() != n) {
    throw Error(ErrorCode::InvalidShape, "regression needs two n x n tables over the same prompts");
  }
  if (n < 3) throw Error(ErrorCode::TooFewObservations, "per-prompt regression needs n >= 3");

  std::vector<RegressionRecord> records(n);
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(n);
  ys.reserve(n);
  std::vector<double> pvalues;
  std::vector<std::size_t> fitted;
  for (std::size_t i = 0; i < n; ++i) {
    const auto outcome = fit_row(i, performance, semantic, options.intercept, xs, ys);
    auto& r = records[i];
    r.prompt_id = prompt_ids[i];
    r.observation_count = n - 1;
    r.degenerate = outcome.degenerate;
    if (outcome.degenerate) continue;
    r.beta = outcome.fit.beta;
    r.standard_error = outcome.fit.standard_error;
    r.p_value = outcome.fit.p_value;
    r.residual_variance = outcome.fit.residual_variance;
    pvalues.push_back(r.p_value);
    fitted.push_back(i);
  }
  const auto fdr = bh_fdr(pvalues);
  for (std::size_t t = 0; t < fitted.size(); ++t) records[fitted[t]].fdr = fdr[t];
  return records;
}

std::vector<RegressionRecord> per_prompt_regression(const SimilarityMatrix& performance,
                                                    const SimilarityMatrix& semantic,
                                                    const RegressionOptions& options) {
  if (performance.prompt_ids() != semantic.prompt_ids()) {
    // Reuse the detailed mismatch report.
    (void)pairwise_observations(0, performance, semantic);
  }
  return per_prompt_regression(performance.values(), semantic.values(), performance.prompt_ids(),
                               options);
}

SampleSummary summarize_sample(std::span<const double> values) {
  SampleSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto at = [&](double p) {
    const double position = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(position);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (position - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q25 = at(0.25);
  s.median = at(0.5);
  s.q75 = at(0.75);
  return s;
}

RegressionComparisonReport regression_permutation_baseline(
    const PerformanceMatrix& performance, const EmbeddingMatrix& embeddings,
    std::size_t permutations, std::uint64_t seed, const RegressionBaselineOptions& options,
    unsigned threads) {
  if (permutations < 1) throw Error(ErrorCode::InvalidConfig, "permutation count must be >= 1");
  const auto aligned = validate_alignment(performance, embeddings);
  const std::size_t n = performance.prompt_count();
  if (n < 3) throw Error(ErrorCode::TooFewObservations, "per-prompt regression needs n >= 3");

  const SimilarityKernel kernel(options.performance_measure, performance.kind(),
                                performance.model_count());
  const auto semantic = semantic_similarity_matrix(aligned.embeddings, threads);
  const auto& ids = performance.prompt_ids();

  RegressionComparisonReport report;
  report.performance_measure = options.performance_measure;
  report.intercept = options.regression.intercept;
  report.permutations = permutations;
  report.seed = seed;
  report.observed = per_prompt_regression(kernel.full(performance.values(), threads),
                                          semantic.values(), ids, options.regression);

  std::vector<std::vector<RegressionRecord>> replicates(permutations);
  parallel_for(permutations, threads, [&](std::size_t b, unsigned) {
    const auto shuffled = permute_columns(performance.values(), derive_seed(seed, b));
    replicates[b] = per_prompt_regression(kernel.full(shuffled, 1), semantic.values(), ids,
                                          options.regression);
  });

  std::vector<double> observed_betas;
  std::vector<double> observed_fdrs;
  for (const auto& r : report.observed) {
    if (r.degenerate) continue;
    observed_betas.push_back(r.beta);
    observed_fdrs.push_back(r.fdr);
  }
  report.permuted_betas.reserve(permutations * n);
  report.permuted_fdrs.reserve(permutations * n);
  for (const auto& records : replicates) {
    for (const auto& r : records) {
      if (r.degenerate) continue;
      report.permuted_betas.push_back(r.beta);
      report.permuted_fdrs.push_back(r.fdr);
    }
  }
  if (observed_betas.empty() || report.permuted_betas.empty()) {
    throw Error(ErrorCode::DegenerateRegressor, "every per-prompt regression was degenerate");
  }
  report.observed_beta = summarize_sample(observed_betas);
  report.observed_fdr = summarize_sample(observed_fdrs);
  report.permuted_beta = summarize_sample(report.permuted_betas);
  report.permuted_fdr = summarize_sample(report.permuted_fdrs);
  report.beta_ks = ks_two_sample(observed_betas, report.permuted_betas);
  report.fdr_ks = ks_two_sample(observed_fdrs, report.permuted_fdrs);
  return report;
}

}  // namespace benchbias
