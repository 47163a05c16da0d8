#include "benchbias/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "benchbias/error.hpp"
#include "benchbias/parallel.hpp"

namespace benchbias {

namespace {

double cosine_from_parts(double dot, double norm_sq_u, double norm_sq_v) {
  return std::clamp(dot / std::sqrt(norm_sq_u * norm_sq_v), -1.0, 1.0);
}

double squared_norm(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return s;
}

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

bool is_binary(double x) { return x == 0.0 || x == 1.0; }

void require_binary(std::span<const double> u) {
  for (double x : u) {
    if (!is_binary(x)) {
      throw Error(ErrorCode::NonBinaryInput, "entry " + std::to_string(x) + " is not 0 or 1");
    }
  }
}

struct BinaryCounts {
  std::size_t matches = 0;
  std::size_t intersection = 0;
  std::size_t union_size = 0;
};

BinaryCounts binary_counts(std::span<const double> u, std::span<const double> v) {
  BinaryCounts c;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const bool a = u[i] == 1.0;
    const bool b = v[i] == 1.0;
    c.matches += a == b;
    c.intersection += a && b;
    c.union_size += a || b;
  }
  return c;
}

double hamming_value(std::size_t matches, std::size_t length) {
  return static_cast<double>(matches) / static_cast<double>(length);
}

double jaccard_value(std::size_t intersection, std::size_t union_size) {
  return static_cast<double>(intersection) / static_cast<double>(union_size);
}

}  // namespace

double pairwise_similarity(std::span<const double> u, std::span<const double> v,
                           SimilarityMeasure measure) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::LengthMismatch, "vectors of length " + std::to_string(u.size()) +
                                               " and " + std::to_string(v.size()));
  }
  if (u.empty()) throw Error(ErrorCode::EmptyInput, "similarity of empty vectors");
  switch (measure) {
    case SimilarityMeasure::Cosine: {
      const double nu = squared_norm(u);
      const double nv = squared_norm(v);
      if (nu == 0.0 || nv == 0.0) {
        throw Error(ErrorCode::UndefinedSimilarity, "cosine similarity with a zero vector");
      }
      return cosine_from_parts(dot(u, v), nu, nv);
    }
    case SimilarityMeasure::Hamming: {
      require_binary(u);
      require_binary(v);
      return hamming_value(binary_counts(u, v).matches, u.size());
    }
    case SimilarityMeasure::Jaccard: {
      require_binary(u);
      require_binary(v);
      const auto c = binary_counts(u, v);
      if (c.union_size == 0) {
        throw Error(ErrorCode::UndefinedSimilarity, "Jaccard similarity of two zero vectors");
      }
      return jaccard_value(c.intersection, c.union_size);
    }
  }
  return 0.0;
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  return 1.0 - pairwise_similarity(u, v, SimilarityMeasure::Cosine);
}

bool measure_supports(SimilarityMeasure measure, ScoreKind kind) noexcept {
  return measure == SimilarityMeasure::Cosine || kind == ScoreKind::Binary;
}

SimilarityKernel::SimilarityKernel(SimilarityMeasure measure, ScoreKind kind,
                                   std::size_t dimension)
    : measure_(measure), dimension_(dimension), packed_(kind == ScoreKind::Binary && dimension <= 64) {
  if (!measure_supports(measure, kind)) {
    throw Error(ErrorCode::NonBinaryInput,
                std::string(to_string(measure)) + " similarity requires binary scores");
  }
  if (dimension == 0) throw Error(ErrorCode::EmptyInput, "similarity over zero-length vectors");
  if (!packed_) return;

  const std::size_t d1 = dimension + 1;
  switch (measure_) {
    case SimilarityMeasure::Cosine:
      lut_.assign(d1 * d1 * d1, 0.0);
      for (std::size_t inter = 0; inter < d1; ++inter) {
        for (std::size_t a = 0; a < d1; ++a) {
          for (std::size_t b = 0; b < d1; ++b) {
            const std::size_t key = (inter * d1 + a) * d1 + b;
            lut_[key] = (a == 0 || b == 0)
                            ? 0.0
                            : cosine_from_parts(static_cast<double>(inter), static_cast<double>(a),
                                                static_cast<double>(b));
          }
        }
      }
      break;
    case SimilarityMeasure::Hamming:
      lut_.resize(d1);
      for (std::size_t x = 0; x < d1; ++x) lut_[x] = hamming_value(dimension - x, dimension);
      break;
    case SimilarityMeasure::Jaccard:
      lut_.assign(d1 * d1, 0.0);
      for (std::size_t inter = 0; inter < d1; ++inter) {
        for (std::size_t u = 1; u < d1; ++u) lut_[inter * d1 + u] = jaccard_value(inter, u);
      }
      break;
  }
  lut_distinct_ = lut_;
  std::sort(lut_distinct_.begin(), lut_distinct_.end());
  lut_distinct_.erase(std::unique(lut_distinct_.begin(), lut_distinct_.end()), lut_distinct_.end());
  lut_rank_.resize(lut_.size());
  for (std::size_t key = 0; key < lut_.size(); ++key) {
    lut_rank_[key] = static_cast<std::uint32_t>(
        std::lower_bound(lut_distinct_.begin(), lut_distinct_.end(), lut_[key]) -
        lut_distinct_.begin());
  }
}

SimilarityKernel::Prepared SimilarityKernel::prepare(const DenseMatrix& rows) const {
  if (rows.cols() != dimension_) {
    throw Error(ErrorCode::LengthMismatch, "kernel built for dimension " + std::to_string(dimension_) +
                                               ", got " + std::to_string(rows.cols()));
  }
  Prepared prep;
  const std::size_t n = rows.rows();
  if (packed_) {
    prep.masks.resize(n);
    prep.popcounts.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t mask = 0;
      const auto r = rows.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (r[j] == 1.0) {
          mask |= std::uint64_t{1} << j;
        } else if (r[j] != 0.0) {
          throw Error(ErrorCode::NonBinaryInput, "binary kernel given a non-binary entry");
        }
      }
      prep.masks[i] = mask;
      prep.popcounts[i] = static_cast<std::uint32_t>(std::popcount(mask));
    }
  } else if (measure_ == SimilarityMeasure::Cosine) {
    prep.norms_squared.resize(n);
    for (std::size_t i = 0; i < n; ++i) prep.norms_squared[i] = squared_norm(rows.row(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) require_binary(rows.row(i));
  }
  return prep;
}

std::size_t SimilarityKernel::lut_key(const Prepared& prep, std::size_t i, std::size_t j) const {
  const std::size_t d1 = dimension_ + 1;
  const std::uint64_t a = prep.masks[i];
  const std::uint64_t b = prep.masks[j];
  switch (measure_) {
    case SimilarityMeasure::Cosine:
      return (static_cast<std::size_t>(std::popcount(a & b)) * d1 + prep.popcounts[i]) * d1 +
             prep.popcounts[j];
    case SimilarityMeasure::Hamming:
      return static_cast<std::size_t>(std::popcount(a ^ b));
    case SimilarityMeasure::Jaccard:
      return static_cast<std::size_t>(std::popcount(a & b)) * d1 +
             static_cast<std::size_t>(std::popcount(a | b));
  }
  return 0;
}

double SimilarityKernel::pair(const DenseMatrix& rows, const Prepared& prep, std::size_t i,
                              std::size_t j) const {
  if (packed_) return lut_[lut_key(prep, i, j)];
  const auto u = rows.row(i);
  const auto v = rows.row(j);
  switch (measure_) {
    case SimilarityMeasure::Cosine: {
      const double nu = prep.norms_squared[i];
      const double nv = prep.norms_squared[j];
      if (nu == 0.0 || nv == 0.0) return 0.0;
      return cosine_from_parts(dot(u, v), nu, nv);
    }
    case SimilarityMeasure::Hamming:
      return hamming_value(binary_counts(u, v).matches, dimension_);
    case SimilarityMeasure::Jaccard: {
      const auto c = binary_counts(u, v);
      return c.union_size == 0 ? 0.0 : jaccard_value(c.intersection, c.union_size);
    }
  }
  return 0.0;
}

void SimilarityKernel::upper_triangle(const DenseMatrix& rows, std::vector<double>& out) const {
  const auto prep = prepare(rows);
  const std::size_t n = rows.rows();
  out.resize(n * (n - (n > 0 ? 1 : 0)) / 2);
  std::size_t at = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out[at++] = pair(rows, prep, i, j);
  }
}

EmpiricalDistribution SimilarityKernel::upper_triangle_distribution(const DenseMatrix& rows) const {
  if (!packed_) {
    std::vector<double> values;
    upper_triangle(rows, values);
    return EmpiricalDistribution::from_samples(std::move(values));
  }
  const auto prep = prepare(rows);
  const std::size_t n = rows.rows();
  std::vector<std::uint64_t> counts(lut_distinct_.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) ++counts[lut_rank_[lut_key(prep, i, j)]];
  }
  return EmpiricalDistribution::from_sorted_counts(lut_distinct_, std::move(counts));
}

DenseMatrix SimilarityKernel::full(const DenseMatrix& rows, unsigned threads) const {
  const auto prep = prepare(rows);
  const std::size_t n = rows.rows();
  DenseMatrix out(n, n);
  parallel_for(n, threads, [&](std::size_t i, unsigned) {
    out(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = pair(rows, prep, i, j);
      out(i, j) = v;
      out(j, i) = v;
    }
  });
  return out;
}

SimilarityMatrix performance_similarity_matrix(const PerformanceMatrix& performance,
                                               SimilarityMeasure measure, unsigned threads) {
  const SimilarityKernel kernel(measure, performance.kind(), performance.model_count());
  return SimilarityMatrix(performance.prompt_ids(), kernel.full(performance.values(), threads),
                          measure);
}

SimilarityMatrix semantic_similarity_matrix(const EmbeddingMatrix& embeddings, unsigned threads) {
  if (embeddings.prompt_count() == 0) {
    return SimilarityMatrix({}, DenseMatrix{}, SimilarityMeasure::Cosine);
  }
  for (std::size_t i = 0; i < embeddings.prompt_count(); ++i) {
    if (squared_norm(embeddings.row(i)) == 0.0) {
      throw Error(ErrorCode::ZeroVector,
                  "embedding for prompt '" + embeddings.prompt_ids()[i] + "' is all zero");
    }
  }
  const SimilarityKernel kernel(SimilarityMeasure::Cosine, ScoreKind::Continuous,
                                embeddings.dimension());
  return SimilarityMatrix(embeddings.prompt_ids(), kernel.full(embeddings.vectors(), threads),
                          SimilarityMeasure::Cosine);
}

}  // namespace benchbias
