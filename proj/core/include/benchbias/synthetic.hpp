#ifndef BENCHBIAS_SYNTHETIC_HPP
#define BENCHBIAS_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>

#include "benchbias/data_model.hpp"
#include "benchbias/matrix.hpp"

// Seeded fixture generators used by the tests, the benchmarks and `benchbias synth`.
namespace benchbias::synthetic {

/// n x k binary matrix; column j is iid Bernoulli(r_j) with r_j ~ U(rate_lo, rate_hi).
PerformanceMatrix null_bernoulli(std::size_t n, std::size_t k, std::uint64_t seed, double rate_lo = 0.1,
                                 double rate_hi = 0.9);

/// `blocks` random binary base rows, each copied `rows_per_block` times with
/// every cell flipped independently with probability `flip`. Rows of a block
/// are contiguous.
PerformanceMatrix planted_blocks(std::size_t blocks, std::size_t rows_per_block, std::size_t k,
                                 double flip, std::uint64_t seed);

struct SimilarityTables {
  DenseMatrix semantic;     // T_sem
  DenseMatrix performance;  // T_perf
};

/// T_sem from cosines of n random Gaussian vectors in `dimension` dimensions;
/// T_perf = slope * T_sem + N(0, noise) off the diagonal, mirrored so both are
/// symmetric; unit diagonals.
SimilarityTables planted_coupling(std::size_t n, std::uint64_t seed, double slope = 0.8, double noise = 0.05,
                                  std::size_t dimension = 8);

/// Independent symmetric tables with iid N(0, 1) off-diagonal entries.
SimilarityTables null_tables(std::size_t n, std::uint64_t seed);

struct GroupedFixture {
  PerformanceMatrix performance;
  EmbeddingMatrix embeddings;
};

/// `groups` topics of `per_group` prompts. Each topic has a random Gaussian
/// centre in `dimension` dimensions and a random binary base row over k
/// models; a prompt's embedding is its centre plus N(0, embedding_noise)
/// per coordinate and its scores are the base row with each cell flipped with
/// probability `flip`. Prompts are interleaved across groups.
GroupedFixture grouped(std::size_t groups, std::size_t per_group, std::size_t k, std::size_t dimension,
                       double flip, double embedding_noise, std::uint64_t seed);

/// Same layout with scores independent of topic (null for the regression).
GroupedFixture grouped_null(std::size_t groups, std::size_t per_group, std::size_t k, std::size_t dimension,
                            double embedding_noise, std::uint64_t seed);

}  // namespace benchbias::synthetic

#endif  // BENCHBIAS_SYNTHETIC_HPP
