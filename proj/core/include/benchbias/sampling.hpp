#ifndef BENCHBIAS_SAMPLING_HPP
#define BENCHBIAS_SAMPLING_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "benchbias/data_model.hpp"
#include "benchbias/matrix.hpp"
#include "benchbias/random.hpp"

namespace benchbias {

/// Uniform draw from the unit simplex: sort n - 1 uniforms on (0, 1) and take
/// the n gaps between 0, the sorted values and 1 (a flat Dirichlet sample).
void sample_simplex(Rng& rng, std::span<double> out, std::vector<double>& scratch);

WeightVector sample_simplex(std::size_t n, std::uint64_t seed);

/// count x n matrix of independent simplex draws from one seed. Draws are
/// grouped in fixed-size batches, batch b seeded with derive_seed(seed, b).
DenseMatrix sample_simplex_batch(std::size_t n, std::size_t count, std::uint64_t seed,
                                 unsigned threads = 0);

inline constexpr std::size_t kSimplexBatchSize = 1024;

/// Weighted model scores for `sample_count` simplex weightings: one stream of
/// weights feeds both the score distribution and the win matrix.
struct SampledScores {
  std::vector<std::string> model_ids;
  DenseMatrix scores;  // sample_count x k
  std::uint64_t seed = 0;
};

SampledScores sample_weighted_scores(const PerformanceMatrix& performance,
                                     std::size_t sample_count, std::uint64_t seed,
                                     unsigned threads = 0);

inline constexpr std::array<double, 7> kScoreQuantileLevels = {0.01, 0.05, 0.25, 0.5,
                                                               0.75, 0.95, 0.99};

struct ModelScoreSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::array<double, 7> quantiles{};  // at kScoreQuantileLevels
  double uniform_score = 0.0;
};

struct ScoreDistribution {
  std::vector<std::string> model_ids;
  std::vector<ModelScoreSummary> models;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

struct WinMatrix {
  std::vector<std::string> model_ids;
  DenseMatrix fractions;  // (i, j): share of samples where model i beats model j, ties half
  std::size_t sample_count = 0;
};

ScoreDistribution summarize_scores(const PerformanceMatrix& performance,
                                   const SampledScores& sampled);
WinMatrix win_matrix_from_scores(const SampledScores& sampled);

ScoreDistribution score_distribution(const PerformanceMatrix& performance,
                                     std::size_t sample_count, std::uint64_t seed,
                                     unsigned threads = 0);
WinMatrix pairwise_win_matrix(const PerformanceMatrix& performance, std::size_t sample_count,
                              std::uint64_t seed, unsigned threads = 0);

}  // namespace benchbias

#endif  // BENCHBIAS_SAMPLING_HPP
