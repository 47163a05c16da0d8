#include "benchbias/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "benchbias/error.hpp"
#include "benchbias/random.hpp"

namespace benchbias {

std::string_view to_string(GrowthMethod method) noexcept {
  return method == GrowthMethod::MostInformative ? "most-informative" : "random";
}

namespace {

constexpr std::size_t kExactRecomputeLimit = 2000;

void exact_means(const PerformanceMatrix& performance, const std::vector<char>& selected,
                 std::size_t count, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < performance.prompt_count(); ++i) {
    if (!selected[i]) continue;
    const auto row = performance.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[j];
  }
  for (double& v : out) v /= static_cast<double>(count);
}

void check_order(std::span<const std::size_t> order, std::size_t n) {
  if (order.size() != n) throw Error(ErrorCode::LengthMismatch, "selection order must cover every prompt");
  std::vector<char> seen(n, 0);
  for (auto i : order) {
    if (i >= n || seen[i]) throw Error(ErrorCode::InvalidShape, "selection order is not a permutation");
    seen[i] = 1;
  }
}

}  // namespace

DenseMatrix running_means(const PerformanceMatrix& performance,
                          std::span<const std::size_t> order) {
  const std::size_t n = performance.prompt_count();
  const std::size_t k = performance.model_count();
  check_order(order, n);
  const std::size_t stride = n <= kExactRecomputeLimit ? 1 : (n + kExactRecomputeLimit - 1) / kExactRecomputeLimit;

  DenseMatrix out(n, k);
  std::vector<char> selected(n, 0);
  std::vector<double> sums(k, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    selected[order[t]] = 1;
    const auto row = performance.row(order[t]);
    for (std::size_t j = 0; j < k; ++j) sums[j] += row[j];
    const bool checkpoint = (t + 1) % stride == 0 || t + 1 == n;
    if (checkpoint) {
      exact_means(performance, selected, t + 1, out.row(t));
      // Restart the incremental sums from the exact values to keep drift bounded.
      for (std::size_t j = 0; j < k; ++j) sums[j] = out(t, j) * static_cast<double>(t + 1);
    } else {
      for (std::size_t j = 0; j < k; ++j) out(t, j) = sums[j] / static_cast<double>(t + 1);
    }
  }
  return out;
}

std::vector<std::size_t> informative_order(const DenseMatrix& embeddings, std::size_t first) {
  const std::size_t n = embeddings.rows();
  if (first >= n) throw Error(ErrorCode::RangeError, "starting prompt out of range");
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = embeddings.row(i);
    double s = 0.0;
    for (double x : r) s += x * x;
    if (s == 0.0) throw Error(ErrorCode::ZeroVector, "zero embedding row " + std::to_string(i));
    norms[i] = s;
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<char> selected(n, 0);
  // Summed cosine similarity to the selected set; the mean distance is
  // 1 - sum / |selected|, so the largest mean distance is the smallest sum.
  std::vector<double> similarity_sum(n, 0.0);
  std::size_t current = first;
  for (std::size_t step = 0; step < n; ++step) {
    order.push_back(current);
    selected[current] = 1;
    if (step + 1 == n) break;
    const auto c = embeddings.row(current);
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (selected[i]) continue;
      const auto r = embeddings.row(i);
      double dot = 0.0;
      for (std::size_t t = 0; t < r.size(); ++t) dot += r[t] * c[t];
      similarity_sum[i] += std::clamp(dot / std::sqrt(norms[i] * norms[current]), -1.0, 1.0);
      if (best == n || similarity_sum[i] < similarity_sum[best]) best = i;
    }
    current = best;
  }
  return order;
}

std::vector<std::size_t> random_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

GrowthCurve growth_curve_informative(const PerformanceMatrix& performance,
                                     const EmbeddingMatrix& embeddings, std::uint64_t seed) {
  const auto aligned = validate_alignment(performance, embeddings);
  Rng rng(seed);
  const auto first = static_cast<std::size_t>(rng.below(performance.prompt_count()));
  GrowthCurve curve;
  curve.method = GrowthMethod::MostInformative;
  curve.seed = seed;
  curve.selection_order = informative_order(aligned.embeddings.vectors(), first);
  curve.running_scores = running_means(performance, curve.selection_order);
  return curve;
}

GrowthCurve growth_curve_random(const PerformanceMatrix& performance, std::uint64_t seed) {
  GrowthCurve curve;
  curve.method = GrowthMethod::Random;
  curve.seed = seed;
  curve.selection_order = random_order(performance.prompt_count(), seed);
  curve.running_scores = running_means(performance, curve.selection_order);
  return curve;
}

}  // namespace benchbias
