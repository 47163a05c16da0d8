#ifndef BENCHBIAS_GROWTH_HPP
#define BENCHBIAS_GROWTH_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "benchbias/data_model.hpp"
#include "benchbias/matrix.hpp"

namespace benchbias {

enum class GrowthMethod { MostInformative, Random };

std::string_view to_string(GrowthMethod method) noexcept;

/// Model scores as prompts are added one at a time.
/// running_scores(t, j) is the mean score of model j over the first t + 1
/// selected prompts; the last row equals column_means() bit for bit.
struct GrowthCurve {
  GrowthMethod method = GrowthMethod::Random;
  std::vector<std::size_t> selection_order;
  DenseMatrix running_scores;
  std::uint64_t seed = 0;
};

/// Running means for a given selection order. Means are recomputed from
/// scratch in prompt order at every step for n <= 2000, and at evenly spaced
/// checkpoints plus the final step beyond that.
DenseMatrix running_means(const PerformanceMatrix& performance,
                          std::span<const std::size_t> order);

/// Starts from a seeded uniform prompt, then repeatedly adds the prompt with
/// the largest mean cosine distance (in embedding space) to the prompts
/// already selected; ties go to the lower index. Embeddings are aligned to
/// the performance matrix first (MismatchedPrompts on disagreement).
GrowthCurve growth_curve_informative(const PerformanceMatrix& performance,
                                     const EmbeddingMatrix& embeddings, std::uint64_t seed);

/// Uniform random selection order.
GrowthCurve growth_curve_random(const PerformanceMatrix& performance, std::uint64_t seed);

/// Greedy max-mean-distance order over raw embedding rows (no alignment).
std::vector<std::size_t> informative_order(const DenseMatrix& embeddings, std::size_t first);

/// Uniform permutation of [0, n).
std::vector<std::size_t> random_order(std::size_t n, std::uint64_t seed);

}  // namespace benchbias

#endif  // BENCHBIAS_GROWTH_HPP
