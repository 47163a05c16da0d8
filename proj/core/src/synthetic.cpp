#include "benchbias/synthetic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "benchbias/random.hpp"
#include "benchbias/similarity.hpp"

namespace benchbias::synthetic {

namespace {

std::vector<std::string> make_ids(const char* prefix, std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::size_t i = 0; i < count; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

PerformanceMatrix binary_matrix(DenseMatrix values) {
  return PerformanceMatrix(make_ids("p", values.rows()), make_ids("m", values.cols()), std::move(values),
                           ScoreKind::Binary);
}

double bernoulli(Rng& rng, double p) { return rng.uniform_open() < p ? 1.0 : 0.0; }

DenseMatrix cosine_table(const DenseMatrix& vectors) {
  const std::size_t n = vectors.rows();
  DenseMatrix t(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    t(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      t(i, j) = t(j, i) = pairwise_similarity(vectors.row(i), vectors.row(j), SimilarityMeasure::Cosine);
    }
  }
  return t;
}

DenseMatrix topic_embeddings(std::size_t groups, std::size_t per_group, std::size_t dimension,
                             double embedding_noise, Rng& rng) {
  DenseMatrix centres(groups, dimension);
  for (double& v : centres.data()) v = rng.normal();
  DenseMatrix vectors(groups * per_group, dimension);
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    const auto c = centres.row(i % groups);
    for (std::size_t d = 0; d < dimension; ++d) vectors(i, d) = c[d] + embedding_noise * rng.normal();
  }
  return vectors;
}

}  // namespace

PerformanceMatrix null_bernoulli(std::size_t n, std::size_t k, std::uint64_t seed, double rate_lo, double rate_hi) {
  Rng rng(seed);
  std::vector<double> rates(k);
  for (double& r : rates) r = rate_lo + (rate_hi - rate_lo) * rng.uniform_open();
  DenseMatrix values(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) values(i, j) = bernoulli(rng, rates[j]);
  }
  return binary_matrix(std::move(values));
}

PerformanceMatrix planted_blocks(std::size_t blocks, std::size_t rows_per_block, std::size_t k, double flip,
                                 std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix base(blocks, k);
  for (double& v : base.data()) v = bernoulli(rng, 0.5);
  DenseMatrix values(blocks * rows_per_block, k);
  for (std::size_t i = 0; i < values.rows(); ++i) {
    const auto b = base.row(i / rows_per_block);
    for (std::size_t j = 0; j < k; ++j) values(i, j) = bernoulli(rng, flip) != 0.0 ? 1.0 - b[j] : b[j];
  }
  return binary_matrix(std::move(values));
}

SimilarityTables planted_coupling(std::size_t n, std::uint64_t seed, double slope, double noise,
                                  std::size_t dimension) {
  Rng rng(seed);
  DenseMatrix vectors(n, dimension);
  for (double& v : vectors.data()) v = rng.normal();
  SimilarityTables t{cosine_table(vectors), DenseMatrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    t.performance(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      t.performance(i, j) = t.performance(j, i) = slope * t.semantic(i, j) + noise * rng.normal();
    }
  }
  return t;
}

SimilarityTables null_tables(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  SimilarityTables t{DenseMatrix(n, n), DenseMatrix(n, n)};
  for (auto* m : {&t.semantic, &t.performance}) {
    for (std::size_t i = 0; i < n; ++i) {
      (*m)(i, i) = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) (*m)(i, j) = (*m)(j, i) = rng.normal();
    }
  }
  return t;
}

GroupedFixture grouped(std::size_t groups, std::size_t per_group, std::size_t k, std::size_t dimension, double flip,
                       double embedding_noise, std::uint64_t seed) {
  Rng rng(seed);
  auto vectors = topic_embeddings(groups, per_group, dimension, embedding_noise, rng);
  DenseMatrix base(groups, k);
  for (double& v : base.data()) v = bernoulli(rng, 0.5);
  DenseMatrix values(groups * per_group, k);
  for (std::size_t i = 0; i < values.rows(); ++i) {
    const auto b = base.row(i % groups);
    for (std::size_t j = 0; j < k; ++j) values(i, j) = bernoulli(rng, flip) != 0.0 ? 1.0 - b[j] : b[j];
  }
  auto performance = binary_matrix(std::move(values));
  EmbeddingMatrix embeddings(performance.prompt_ids(), std::move(vectors));
  return {std::move(performance), std::move(embeddings)};
}

GroupedFixture grouped_null(std::size_t groups, std::size_t per_group, std::size_t k, std::size_t dimension,
                            double embedding_noise, std::uint64_t seed) {
  Rng rng(seed);
  auto vectors = topic_embeddings(groups, per_group, dimension, embedding_noise, rng);
  DenseMatrix values(groups * per_group, k);
  for (double& v : values.data()) v = bernoulli(rng, 0.5);
  auto performance = binary_matrix(std::move(values));
  EmbeddingMatrix embeddings(performance.prompt_ids(), std::move(vectors));
  return {std::move(performance), std::move(embeddings)};
}

}  // namespace benchbias::synthetic
