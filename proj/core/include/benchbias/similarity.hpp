#ifndef BENCHBIAS_SIMILARITY_HPP
#define BENCHBIAS_SIMILARITY_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "benchbias/data_model.hpp"
#include "benchbias/distribution.hpp"
#include "benchbias/matrix.hpp"

namespace benchbias {

/// Cosine, Hamming (fraction of agreeing positions) or Jaccard similarity.
/// Throws LengthMismatch, NonBinaryInput (Hamming/Jaccard on non-0/1 entries)
/// and UndefinedSimilarity (cosine with a zero vector, Jaccard of two zero
/// vectors).
double pairwise_similarity(std::span<const double> u, std::span<const double> v,
                           SimilarityMeasure measure);

/// 1 - cosine similarity. Same errors as the cosine case above.
double cosine_distance(std::span<const double> u, std::span<const double> v);

bool measure_supports(SimilarityMeasure measure, ScoreKind kind) noexcept;

/// Builds the full n x n table over performance vectors. Pairs where the
/// scalar measure is undefined (a zero performance vector under cosine, two
/// zero vectors under Jaccard) are scored 0; the diagonal is always 1.
SimilarityMatrix performance_similarity_matrix(const PerformanceMatrix& performance,
                                               SimilarityMeasure measure, unsigned threads = 0);

/// Cosine similarity between embedding rows.
SimilarityMatrix semantic_similarity_matrix(const EmbeddingMatrix& embeddings,
                                            unsigned threads = 0);

/// Index of pair (i, j), i < j, in the row-major strict upper triangle.
constexpr std::size_t upper_triangle_index(std::size_t n, std::size_t i, std::size_t j) noexcept {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// Pairwise similarity evaluator for repeated use on same-shaped tables (the
/// permutation loops). Binary tables with at most 64 columns are packed into
/// bit masks; each pair then reduces to a popcount and a table lookup. Every
/// path yields values bit-identical to pairwise_similarity on defined pairs.
class SimilarityKernel {
 public:
  SimilarityKernel(SimilarityMeasure measure, ScoreKind kind, std::size_t dimension);

  SimilarityMeasure measure() const noexcept { return measure_; }

  /// n(n-1)/2 strict-upper-triangle values, row-major.
  void upper_triangle(const DenseMatrix& rows, std::vector<double>& out) const;

  /// Distribution of the strict-upper-triangle values.
  EmpiricalDistribution upper_triangle_distribution(const DenseMatrix& rows) const;

  /// Full symmetric table with unit diagonal. Rows split across threads.
  DenseMatrix full(const DenseMatrix& rows, unsigned threads = 1) const;

 private:
  struct Prepared {
    std::vector<std::uint64_t> masks;
    std::vector<std::uint32_t> popcounts;
    std::vector<double> norms_squared;
  };

  Prepared prepare(const DenseMatrix& rows) const;
  double pair(const DenseMatrix& rows, const Prepared& prep, std::size_t i, std::size_t j) const;
  std::size_t lut_key(const Prepared& prep, std::size_t i, std::size_t j) const;

  SimilarityMeasure measure_;
  std::size_t dimension_;
  bool packed_;
  std::vector<double> lut_;              // key -> similarity value
  std::vector<std::uint32_t> lut_rank_;  // key -> index into lut_distinct_
  std::vector<double> lut_distinct_;     // sorted distinct LUT values
};

}  // namespace benchbias

#endif  // BENCHBIAS_SIMILARITY_HPP
