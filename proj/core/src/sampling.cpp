#include "benchbias/sampling.hpp"

#include <algorithm>
#include <string>

#include "benchbias/error.hpp"
#include "benchbias/parallel.hpp"
#include "benchbias/weighting.hpp"

namespace benchbias {

void sample_simplex(Rng& rng, std::span<double> out, std::vector<double>& scratch) {
  const std::size_t n = out.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "simplex of dimension 0");
  scratch.resize(n - 1);
  for (double& u : scratch) u = rng.uniform_open();
  std::sort(scratch.begin(), scratch.end());
  double previous = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out[i] = scratch[i] - previous;
    previous = scratch[i];
  }
  out[n - 1] = 1.0 - previous;
}

WeightVector sample_simplex(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> weights(n);
  std::vector<double> scratch;
  sample_simplex(rng, weights, scratch);
  return WeightVector(std::move(weights), "simplex");
}

namespace {

// Calls fn(sample_index, weights) for every sample, batch by batch.
template <class Fn>
void for_each_simplex_sample(std::size_t n, std::size_t count, std::uint64_t seed,
                             unsigned threads, Fn&& fn) {
  const std::size_t batches = (count + kSimplexBatchSize - 1) / kSimplexBatchSize;
  parallel_for(batches, threads, [&](std::size_t b, unsigned) {
    Rng rng(derive_seed(seed, b));
    std::vector<double> weights(n);
    std::vector<double> scratch;
    const std::size_t end = std::min(count, (b + 1) * kSimplexBatchSize);
    for (std::size_t s = b * kSimplexBatchSize; s < end; ++s) {
      sample_simplex(rng, weights, scratch);
      fn(s, std::span<const double>(weights));
    }
  });
}

}  // namespace

DenseMatrix sample_simplex_batch(std::size_t n, std::size_t count, std::uint64_t seed,
                                 unsigned threads) {
  DenseMatrix out(count, n);
  for_each_simplex_sample(n, count, seed, threads, [&](std::size_t s, std::span<const double> w) {
    std::copy(w.begin(), w.end(), out.row(s).begin());
  });
  return out;
}

SampledScores sample_weighted_scores(const PerformanceMatrix& performance,
                                     std::size_t sample_count, std::uint64_t seed,
                                     unsigned threads) {
  if (sample_count < 1) throw Error(ErrorCode::InvalidConfig, "sample count must be >= 1");
  const std::size_t n = performance.prompt_count();
  const std::size_t k = performance.model_count();
  SampledScores out{performance.model_ids(), DenseMatrix(sample_count, k), seed};
  for_each_simplex_sample(n, sample_count, seed, threads, [&](std::size_t s, std::span<const double> w) {
    auto scores = out.scores.row(s);
    std::fill(scores.begin(), scores.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = performance.row(i);
      for (std::size_t j = 0; j < k; ++j) scores[j] += w[i] * row[j];
    }
  });
  return out;
}

ScoreDistribution summarize_scores(const PerformanceMatrix& performance,
                                   const SampledScores& sampled) {
  const std::size_t count = sampled.scores.rows();
  const std::size_t k = sampled.scores.cols();
  if (count == 0) throw Error(ErrorCode::EmptyInput, "no sampled scores");
  if (k != performance.model_count()) throw Error(ErrorCode::LengthMismatch, "model count mismatch");
  const auto uniform = column_means(performance);

  ScoreDistribution out;
  out.model_ids = sampled.model_ids;
  out.sample_count = count;
  out.seed = sampled.seed;
  std::vector<double> column(count);
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      column[s] = sampled.scores(s, j);
      sum += column[s];
    }
    std::sort(column.begin(), column.end());
    ModelScoreSummary m;
    m.min = column.front();
    m.max = column.back();
    m.mean = sum / static_cast<double>(count);
    for (std::size_t q = 0; q < kScoreQuantileLevels.size(); ++q) {
      const double position = kScoreQuantileLevels[q] * static_cast<double>(count - 1);
      const auto lo = static_cast<std::size_t>(position);
      const std::size_t hi = std::min(lo + 1, count - 1);
      m.quantiles[q] = column[lo] + (position - static_cast<double>(lo)) * (column[hi] - column[lo]);
    }
    m.uniform_score = uniform[j];
    out.models.push_back(m);
  }
  return out;
}

WinMatrix win_matrix_from_scores(const SampledScores& sampled) {
  const std::size_t count = sampled.scores.rows();
  const std::size_t k = sampled.scores.cols();
  if (count == 0) throw Error(ErrorCode::EmptyInput, "no sampled scores");
  // Twice the win count plus ties, so every cell is an exact integer.
  std::vector<std::uint64_t> doubled(k * k, 0);
  for (std::size_t s = 0; s < count; ++s) {
    const auto row = sampled.scores.row(s);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (row[i] > row[j]) {
          doubled[i * k + j] += 2;
        } else if (row[i] < row[j]) {
          doubled[j * k + i] += 2;
        } else {
          ++doubled[i * k + j];
          ++doubled[j * k + i];
        }
      }
    }
  }
  WinMatrix out{sampled.model_ids, DenseMatrix(k, k), count};
  const double denominator = 2.0 * static_cast<double>(count);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j) out.fractions(i, j) = static_cast<double>(doubled[i * k + j]) / denominator;
    }
  }
  return out;
}

ScoreDistribution score_distribution(const PerformanceMatrix& performance,
                                     std::size_t sample_count, std::uint64_t seed,
                                     unsigned threads) {
  return summarize_scores(performance, sample_weighted_scores(performance, sample_count, seed, threads));
}

WinMatrix pairwise_win_matrix(const PerformanceMatrix& performance, std::size_t sample_count,
                              std::uint64_t seed, unsigned threads) {
  return win_matrix_from_scores(sample_weighted_scores(performance, sample_count, seed, threads));
}

}  // namespace benchbias
