#include "benchbias/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "benchbias/error.hpp"
#include "benchbias/parallel.hpp"
#include "benchbias/random.hpp"
#include "benchbias/similarity.hpp"
#include "benchbias/special_functions.hpp"

namespace benchbias {

std::string_view to_string(StatisticKind kind) noexcept {
  switch (kind) {
    case StatisticKind::Mean: return "mean";
    case StatisticKind::P75: return "p75";
    case StatisticKind::P95: return "p95";
  }
  return "unknown";
}

std::optional<StatisticKind> parse_statistic_kind(std::string_view name) noexcept {
  if (name == "mean") return StatisticKind::Mean;
  if (name == "p75") return StatisticKind::P75;
  if (name == "p95") return StatisticKind::P95;
  return std::nullopt;
}

namespace {

double percentile_level(StatisticKind kind) {
  return kind == StatisticKind::P75 ? 0.75 : 0.95;
}

double ecdf_gap(std::uint64_t count_a, std::uint64_t size_a, std::uint64_t count_b,
                std::uint64_t size_b) {
  return std::abs(static_cast<double>(count_a) / static_cast<double>(size_a) -
                  static_cast<double>(count_b) / static_cast<double>(size_b));
}

KsReport make_ks_report(double d, std::uint64_t m, std::uint64_t n) {
  KsReport r;
  r.statistic = d;
  r.size_a = m;
  r.size_b = n;
  r.p_value = ks_asymptotic_pvalue(d, static_cast<double>(m), static_cast<double>(n));
  r.approximate = std::min(m, n) < 50;
  return r;
}

}  // namespace

DenseMatrix permute_columns(const DenseMatrix& values, std::uint64_t seed) {
  DenseMatrix out = values;
  Rng rng(seed);
  const std::size_t rows = values.rows();
  const std::size_t cols = values.cols();
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t i = rows; i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.below(i));
      std::swap(out(i - 1, c), out(j, c));
    }
  }
  return out;
}

PerformanceMatrix permute_matrix(const PerformanceMatrix& performance, std::uint64_t seed) {
  return performance.with_values(permute_columns(performance.values(), seed));
}

std::vector<double> offdiagonal_values(const SimilarityMatrix& similarity) {
  const std::size_t n = similarity.size();
  std::vector<double> out;
  out.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(similarity(i, j));
  }
  return out;
}

double summary_statistic(std::span<const double> values, StatisticKind kind) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "summary statistic of an empty vector");
  if (kind == StatisticKind::Mean) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double position = percentile_level(kind) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(position));
  const auto hi = static_cast<std::size_t>(std::ceil(position));
  if (lo == hi) return sorted[lo];
  return sorted[lo] + (position - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double summary_statistic(const EmpiricalDistribution& values, StatisticKind kind) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "summary statistic of an empty sample");
  return kind == StatisticKind::Mean ? values.mean() : values.quantile(percentile_level(kind));
}

double permutation_pvalue(double observed, std::span<const double> permuted) {
  if (permuted.empty()) throw Error(ErrorCode::EmptyInput, "no permuted statistics");
  const auto at_least = std::count_if(permuted.begin(), permuted.end(),
                                      [observed](double v) { return v >= observed; });
  return static_cast<double>(at_least + 1) / static_cast<double>(permuted.size() + 1);
}

double ks_asymptotic_pvalue(double d, double m, double n) {
  const double effective = m * n / (m + n);
  const double p = kolmogorov_survival(std::sqrt(effective) * d);
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

KsReport ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "KS test on an empty sample");
  const auto& va = a.values();
  const auto& vb = b.values();
  const auto& ca = a.counts();
  const auto& cb = b.counts();
  std::uint64_t cum_a = 0;
  std::uint64_t cum_b = 0;
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < va.size() || j < vb.size()) {
    double x;
    if (j >= vb.size() || (i < va.size() && va[i] < vb[j])) {
      x = va[i];
    } else {
      x = vb[j];
    }
    if (i < va.size() && va[i] == x) cum_a += ca[i++];
    if (j < vb.size() && vb[j] == x) cum_b += cb[j++];
    d = std::max(d, ecdf_gap(cum_a, a.total(), cum_b, b.total()));
  }
  return make_ks_report(d, a.total(), b.total());
}

KsReport ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "KS test on an empty sample");
  return ks_two_sample(EmpiricalDistribution::from_samples({a.begin(), a.end()}),
                       EmpiricalDistribution::from_samples({b.begin(), b.end()}));
}

KsReport ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw Error(ErrorCode::EmptyInput, "KS test on an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KsReport r;
  r.statistic = d;
  r.size_a = sorted.size();
  r.size_b = 0;
  r.p_value = std::clamp(kolmogorov_survival(std::sqrt(n) * d),
                         std::numeric_limits<double>::min(), 1.0);
  r.approximate = sorted.size() < 50;
  return r;
}

std::vector<double> bh_fdr(std::span<const double> pvalues) {
  const std::size_t m = pvalues.size();
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::RangeError, "p-value " + std::to_string(p) + " outside [0, 1]");
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double candidate =
        pvalues[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, candidate);
    adjusted[order[r]] = running;
  }
  return adjusted;
}

PooledKsAccumulator::PooledKsAccumulator(const EmpiricalDistribution& reference)
    : reference_(&reference),
      below_(reference.values().size() + 1, 0),
      equal_(reference.values().size(), 0) {
  if (reference.empty()) throw Error(ErrorCode::EmptyInput, "empty KS reference sample");
}

void PooledKsAccumulator::add(const EmpiricalDistribution& sample) {
  const auto& ref = reference_->values();
  std::size_t r = 0;
  for (std::size_t s = 0; s < sample.values().size(); ++s) {
    const double x = sample.values()[s];
    while (r < ref.size() && ref[r] < x) ++r;
    if (r < ref.size() && ref[r] == x) {
      equal_[r] += sample.counts()[s];
    } else {
      below_[r] += sample.counts()[s];
    }
  }
  pooled_total_ += sample.total();
}

void PooledKsAccumulator::add(std::span<const double> sorted_sample) {
  const auto& ref = reference_->values();
  std::size_t r = 0;
  for (double x : sorted_sample) {
    while (r < ref.size() && ref[r] < x) ++r;
    if (r < ref.size() && ref[r] == x) {
      ++equal_[r];
    } else {
      ++below_[r];
    }
  }
  pooled_total_ += sorted_sample.size();
}

void PooledKsAccumulator::merge(const PooledKsAccumulator& other) {
  if (other.reference_ != reference_) {
    throw Error(ErrorCode::InvalidShape, "merging KS accumulators with different references");
  }
  for (std::size_t i = 0; i < below_.size(); ++i) below_[i] += other.below_[i];
  for (std::size_t i = 0; i < equal_.size(); ++i) equal_[i] += other.equal_[i];
  pooled_total_ += other.pooled_total_;
}

KsReport PooledKsAccumulator::compare() const {
  if (pooled_total_ == 0) throw Error(ErrorCode::EmptyInput, "no pooled values accumulated");
  const auto& counts = reference_->counts();
  const std::uint64_t ref_total = reference_->total();
  std::uint64_t cum_ref = 0;
  std::uint64_t cum_pool = 0;
  double d = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    cum_pool += below_[i];
    d = std::max(d, ecdf_gap(cum_ref, ref_total, cum_pool, pooled_total_));
    cum_pool += equal_[i];
    cum_ref += counts[i];
    d = std::max(d, ecdf_gap(cum_ref, ref_total, cum_pool, pooled_total_));
  }
  return make_ks_report(d, ref_total, pooled_total_);
}

std::vector<CorrelationTestResult> run_prompt_correlation_test(
    const PerformanceMatrix& performance, std::span<const SimilarityMeasure> measures,
    std::span<const StatisticKind> statistics, std::size_t permutations, std::uint64_t seed,
    unsigned threads) {
  if (permutations < 1) throw Error(ErrorCode::InvalidConfig, "permutation count must be >= 1");
  if (measures.empty() || statistics.empty()) {
    throw Error(ErrorCode::InvalidConfig, "at least one measure and one statistic are required");
  }

  std::vector<SimilarityKernel> kernels;
  std::vector<EmpiricalDistribution> observed;
  for (auto m : measures) {
    kernels.emplace_back(m, performance.kind(), performance.model_count());
    observed.push_back(kernels.back().upper_triangle_distribution(performance.values()));
  }

  const std::size_t n_measures = measures.size();
  const std::size_t n_stats = statistics.size();
  // permuted[(measure * n_stats + stat) * B + b]
  std::vector<double> permuted(n_measures * n_stats * permutations);

  const unsigned workers = worker_count(permutations, threads);
  std::vector<std::vector<PooledKsAccumulator>> accumulators(workers);
  for (auto& per_worker : accumulators) {
    for (const auto& dist : observed) per_worker.emplace_back(dist);
  }

  parallel_for(permutations, threads, [&](std::size_t b, unsigned worker) {
    const DenseMatrix shuffled = permute_columns(performance.values(), derive_seed(seed, b));
    for (std::size_t m = 0; m < n_measures; ++m) {
      const auto dist = kernels[m].upper_triangle_distribution(shuffled);
      for (std::size_t s = 0; s < n_stats; ++s) {
        permuted[(m * n_stats + s) * permutations + b] = summary_statistic(dist, statistics[s]);
      }
      accumulators[worker][m].add(dist);
    }
  });

  std::vector<CorrelationTestResult> results;
  results.reserve(n_measures);
  for (std::size_t m = 0; m < n_measures; ++m) {
    CorrelationTestResult result;
    result.measure = measures[m];
    for (std::size_t s = 0; s < n_stats; ++s) {
      PermutationTestReport report;
      report.measure = measures[m];
      report.statistic = statistics[s];
      report.observed = summary_statistic(observed[m], statistics[s]);
      const auto begin = permuted.begin() + static_cast<std::ptrdiff_t>((m * n_stats + s) * permutations);
      report.permuted.assign(begin, begin + static_cast<std::ptrdiff_t>(permutations));
      report.p_value = permutation_pvalue(report.observed, report.permuted);
      report.permutations = permutations;
      report.seed = seed;
      result.tests.push_back(std::move(report));
    }
    PooledKsAccumulator pooled = accumulators[0][m];
    for (unsigned w = 1; w < workers; ++w) pooled.merge(accumulators[w][m]);
    result.ks = pooled.compare();
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace benchbias
