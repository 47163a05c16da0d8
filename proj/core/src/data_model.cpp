#include "benchbias/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "benchbias/error.hpp"

namespace benchbias {

std::string_view to_string(ScoreKind kind) noexcept {
  return kind == ScoreKind::Binary ? "binary" : "continuous";
}

std::string_view to_string(SimilarityMeasure measure) noexcept {
  switch (measure) {
    case SimilarityMeasure::Cosine: return "cosine";
    case SimilarityMeasure::Hamming: return "hamming";
    case SimilarityMeasure::Jaccard: return "jaccard";
  }
  return "unknown";
}

std::optional<SimilarityMeasure> parse_similarity_measure(std::string_view name) noexcept {
  if (name == "cosine") return SimilarityMeasure::Cosine;
  if (name == "hamming") return SimilarityMeasure::Hamming;
  if (name == "jaccard") return SimilarityMeasure::Jaccard;
  return std::nullopt;
}

void require_unique_ids(const std::vector<std::string>& ids, std::string_view what) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::DuplicateIds, std::string(what) + " id '" + id + "' appears twice");
    }
  }
}

namespace {

void check_performance(const std::vector<std::string>& prompt_ids,
                       const std::vector<std::string>& model_ids, const DenseMatrix& values,
                       ScoreKind kind) {
  if (values.rows() < 2 || values.cols() < 2) {
    throw Error(ErrorCode::InvalidShape, "performance matrix must be at least 2x2, got " +
                                             std::to_string(values.rows()) + "x" +
                                             std::to_string(values.cols()));
  }
  if (prompt_ids.size() != values.rows() || model_ids.size() != values.cols()) {
    throw Error(ErrorCode::InvalidShape, "id lists do not match the value shape");
  }
  require_unique_ids(prompt_ids, "prompt");
  require_unique_ids(model_ids, "model");
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (std::size_t j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << "value " << v << " at prompt '" << prompt_ids[i] << "', model '" << model_ids[j]
            << "' is outside [0, 1]";
        throw Error(ErrorCode::RangeError, msg.str());
      }
      if (kind == ScoreKind::Binary && v != 0.0 && v != 1.0) {
        std::ostringstream msg;
        msg << "value " << v << " at prompt '" << prompt_ids[i] << "', model '" << model_ids[j]
            << "' is not binary";
        throw Error(ErrorCode::NonBinaryInput, msg.str());
      }
    }
  }
}

std::vector<std::string> pick(const std::vector<std::string>& ids,
                              std::span<const std::size_t> order) {
  std::vector<std::string> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(ids.at(i));
  return out;
}

DenseMatrix pick_rows(const DenseMatrix& m, std::span<const std::size_t> order) {
  DenseMatrix out(order.size(), m.cols());
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto src = m.row(order[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace

PerformanceMatrix::PerformanceMatrix(std::vector<std::string> prompt_ids,
                                     std::vector<std::string> model_ids, DenseMatrix values,
                                     ScoreKind kind)
    : prompt_ids_(std::move(prompt_ids)),
      model_ids_(std::move(model_ids)),
      values_(std::move(values)),
      kind_(kind) {
  check_performance(prompt_ids_, model_ids_, values_, kind_);
}

PerformanceMatrix PerformanceMatrix::with_detected_kind(std::vector<std::string> prompt_ids,
                                                        std::vector<std::string> model_ids,
                                                        DenseMatrix values) {
  const auto data = values.data();
  const bool binary =
      std::all_of(data.begin(), data.end(), [](double v) { return v == 0.0 || v == 1.0; });
  return PerformanceMatrix(std::move(prompt_ids), std::move(model_ids), std::move(values),
                           binary ? ScoreKind::Binary : ScoreKind::Continuous);
}

PerformanceMatrix PerformanceMatrix::with_values(DenseMatrix values) const {
  return PerformanceMatrix(prompt_ids_, model_ids_, std::move(values), kind_);
}

PerformanceMatrix PerformanceMatrix::reordered(std::span<const std::size_t> order) const {
  return PerformanceMatrix(pick(prompt_ids_, order), model_ids_, pick_rows(values_, order), kind_);
}

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> prompt_ids, DenseMatrix vectors)
    : prompt_ids_(std::move(prompt_ids)), vectors_(std::move(vectors)) {
  if (prompt_ids_.size() != vectors_.rows()) {
    throw Error(ErrorCode::InvalidShape, "embedding ids do not match the number of vectors");
  }
  require_unique_ids(prompt_ids_, "prompt");
  if (vectors_.rows() == 0) return;
  if (vectors_.cols() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "embedding dimension must be at least 1");
  }
  for (std::size_t i = 0; i < vectors_.rows(); ++i) {
    const auto r = vectors_.row(i);
    if (std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; })) {
      throw Error(ErrorCode::ZeroVector, "embedding for prompt '" + prompt_ids_[i] + "' is all zero");
    }
    if (!std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); })) {
      throw Error(ErrorCode::RangeError,
                  "embedding for prompt '" + prompt_ids_[i] + "' has a non-finite component");
    }
  }
}

EmbeddingMatrix EmbeddingMatrix::reordered(std::span<const std::size_t> order) const {
  return EmbeddingMatrix(pick(prompt_ids_, order), pick_rows(vectors_, order));
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> prompt_ids, DenseMatrix values,
                                   SimilarityMeasure measure)
    : prompt_ids_(std::move(prompt_ids)), values_(std::move(values)), measure_(measure) {
  const std::size_t n = values_.rows();
  if (values_.cols() != n || prompt_ids_.size() != n) {
    throw Error(ErrorCode::InvalidShape, "similarity matrix must be square and match its ids");
  }
  const double lo = measure_ == SimilarityMeasure::Cosine ? -1.0 - 1e-12 : 0.0;
  const double hi = measure_ == SimilarityMeasure::Cosine ? 1.0 + 1e-12 : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (values_(i, i) != 1.0) {
      throw Error(ErrorCode::RangeError, "diagonal entry " + std::to_string(i) + " is not 1");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = values_(i, j);
      if (v != values_(j, i)) {
        throw Error(ErrorCode::InvalidShape, "similarity matrix is not symmetric at (" +
                                               std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      if (!(v >= lo && v <= hi)) {
        throw Error(ErrorCode::RangeError, "similarity " + std::to_string(v) + " out of range");
      }
    }
  }
}

WeightVector::WeightVector(std::vector<double> weights, std::string label)
    : weights_(std::move(weights)), label_(std::move(label)) {
  if (weights_.empty()) throw Error(ErrorCode::EmptyInput, "weight vector is empty");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::RangeError, "weight " + std::to_string(w) + " is negative or not finite");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights sum to " << total << ", expected 1";
    throw Error(ErrorCode::RangeError, msg.str());
  }
}

WeightVector WeightVector::uniform(std::size_t n, std::string label) {
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)), std::move(label));
}

AlignedInputs validate_alignment(const PerformanceMatrix& performance,
                                 const EmbeddingMatrix& embeddings) {
  require_unique_ids(performance.prompt_ids(), "performance prompt");
  require_unique_ids(embeddings.prompt_ids(), "embedding prompt");

  std::unordered_map<std::string_view, std::size_t> emb_index;
  emb_index.reserve(embeddings.prompt_count());
  for (std::size_t i = 0; i < embeddings.prompt_count(); ++i) {
    emb_index.emplace(embeddings.prompt_ids()[i], i);
  }

  std::vector<std::string> missing_in_emb;
  std::vector<std::size_t> order;
  order.reserve(performance.prompt_count());
  for (const auto& id : performance.prompt_ids()) {
    auto it = emb_index.find(id);
    if (it == emb_index.end()) {
      missing_in_emb.push_back(id);
    } else {
      order.push_back(it->second);
    }
  }

  std::unordered_set<std::string_view> perf_ids(performance.prompt_ids().begin(),
                                                performance.prompt_ids().end());
  std::vector<std::string> missing_in_perf;
  for (const auto& id : embeddings.prompt_ids()) {
    if (!perf_ids.contains(id)) missing_in_perf.push_back(id);
  }

  if (!missing_in_emb.empty() || !missing_in_perf.empty()) {
    throw MismatchedPromptsError(std::move(missing_in_perf), std::move(missing_in_emb));
  }
  return AlignedInputs{performance, embeddings.reordered(order)};
}

}  // namespace benchbias
