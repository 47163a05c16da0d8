#ifndef BENCHBIAS_DATA_MODEL_HPP
#define BENCHBIAS_DATA_MODEL_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "benchbias/matrix.hpp"

namespace benchbias {

enum class ScoreKind { Binary, Continuous };

enum class SimilarityMeasure { Cosine, Hamming, Jaccard };

/// Only one distance is used anywhere: 1 - cosine similarity.
enum class DistanceMeasure { CosineDistance };

std::string_view to_string(ScoreKind kind) noexcept;
std::string_view to_string(SimilarityMeasure measure) noexcept;
std::optional<SimilarityMeasure> parse_similarity_measure(std::string_view name) noexcept;

/// Prompt x model score table. Rows are performance vectors.
///
/// Invariants (checked on construction): n >= 2, k >= 2, values in [0, 1],
/// Binary => every value is 0 or 1, ids unique on both axes.
class PerformanceMatrix {
 public:
  PerformanceMatrix(std::vector<std::string> prompt_ids, std::vector<std::string> model_ids,
                    DenseMatrix values, ScoreKind kind);

  /// Binary iff every value is exactly 0 or 1.
  static PerformanceMatrix with_detected_kind(std::vector<std::string> prompt_ids,
                                              std::vector<std::string> model_ids,
                                              DenseMatrix values);

  std::size_t prompt_count() const noexcept { return values_.rows(); }
  std::size_t model_count() const noexcept { return values_.cols(); }
  ScoreKind kind() const noexcept { return kind_; }

  const std::vector<std::string>& prompt_ids() const noexcept { return prompt_ids_; }
  const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
  const DenseMatrix& values() const noexcept { return values_; }

  std::span<const double> row(std::size_t prompt) const noexcept { return values_.row(prompt); }
  double operator()(std::size_t prompt, std::size_t model) const noexcept {
    return values_(prompt, model);
  }

  /// Same ids and kind, new cell values (validated again).
  PerformanceMatrix with_values(DenseMatrix values) const;

  /// Rows reordered so that row i of the result is row order[i] of this matrix.
  PerformanceMatrix reordered(std::span<const std::size_t> order) const;

  friend bool operator==(const PerformanceMatrix&, const PerformanceMatrix&) = default;

 private:
  std::vector<std::string> prompt_ids_;
  std::vector<std::string> model_ids_;
  DenseMatrix values_;
  ScoreKind kind_;
};

/// Prompt embeddings, one row per prompt. An empty matrix (zero rows) is
/// allowed; otherwise every row has dimension >= 1 and nonzero norm.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::vector<std::string> prompt_ids, DenseMatrix vectors);

  std::size_t prompt_count() const noexcept { return vectors_.rows(); }
  std::size_t dimension() const noexcept { return vectors_.cols(); }
  const std::vector<std::string>& prompt_ids() const noexcept { return prompt_ids_; }
  const DenseMatrix& vectors() const noexcept { return vectors_; }
  std::span<const double> row(std::size_t prompt) const noexcept { return vectors_.row(prompt); }

  EmbeddingMatrix reordered(std::span<const std::size_t> order) const;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::vector<std::string> prompt_ids_;
  DenseMatrix vectors_;
};

/// Dense symmetric n x n similarity table with unit diagonal.
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::vector<std::string> prompt_ids, DenseMatrix values,
                   SimilarityMeasure measure);

  std::size_t size() const noexcept { return values_.rows(); }
  SimilarityMeasure measure() const noexcept { return measure_; }
  const std::vector<std::string>& prompt_ids() const noexcept { return prompt_ids_; }
  const DenseMatrix& values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

 private:
  std::vector<std::string> prompt_ids_;
  DenseMatrix values_;
  SimilarityMeasure measure_;
};

/// Nonnegative prompt weights summing to one (within 1e-9).
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  WeightVector(std::vector<double> weights, std::string label);

  static WeightVector uniform(std::size_t n, std::string label = "uniform");

  std::size_t size() const noexcept { return weights_.size(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<double> weights_;
  std::string label_;
};

struct AlignedInputs {
  PerformanceMatrix performance;
  EmbeddingMatrix embeddings;
};

/// Reorders the embeddings to follow the performance matrix's prompt order.
/// Throws MismatchedPromptsError listing ids missing on either side.
AlignedInputs validate_alignment(const PerformanceMatrix& performance,
                                 const EmbeddingMatrix& embeddings);

/// Throws DuplicateIds naming the first repeated id.
void require_unique_ids(const std::vector<std::string>& ids, std::string_view what);

}  // namespace benchbias

#endif  // BENCHBIAS_DATA_MODEL_HPP
