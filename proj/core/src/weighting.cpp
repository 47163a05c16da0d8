#include "benchbias/weighting.hpp"

#include <algorithm>
#include <numeric>

#include "benchbias/error.hpp"

namespace benchbias {

namespace {

std::vector<std::vector<std::size_t>> cluster_members(const Clustering& clustering,
                                                      std::size_t n) {
  if (clustering.assignments.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "clustering covers " +
                                               std::to_string(clustering.assignments.size()) +
                                               " prompts, expected " + std::to_string(n));
  }
  std::vector<std::vector<std::size_t>> members(clustering.k);
  for (std::size_t i = 0; i < n; ++i) {
    if (clustering.assignments[i] >= clustering.k) {
      throw Error(ErrorCode::RangeError, "assignment label out of range");
    }
    members[clustering.assignments[i]].push_back(i);
  }
  return members;
}

void check_distances(const Clustering& clustering, std::span<const double> distances) {
  if (distances.size() != clustering.assignments.size()) {
    throw Error(ErrorCode::LengthMismatch, "one distance per prompt is required");
  }
  for (double d : distances) {
    if (!(d >= 0.0)) throw Error(ErrorCode::RangeError, "distances must be nonnegative");
  }
}

}  // namespace

std::vector<double> weighted_performance(const PerformanceMatrix& performance,
                                         const WeightVector& weights) {
  if (weights.size() != performance.prompt_count()) {
    throw Error(ErrorCode::LengthMismatch, "weight vector has " + std::to_string(weights.size()) +
                                               " entries for " +
                                               std::to_string(performance.prompt_count()) + " prompts");
  }
  std::vector<double> scores(performance.model_count(), 0.0);
  for (std::size_t i = 0; i < performance.prompt_count(); ++i) {
    const double w = weights[i];
    const auto row = performance.row(i);
    for (std::size_t j = 0; j < scores.size(); ++j) scores[j] += w * row[j];
  }
  return scores;
}

std::vector<double> column_means(const PerformanceMatrix& performance) {
  std::vector<double> sums(performance.model_count(), 0.0);
  for (std::size_t i = 0; i < performance.prompt_count(); ++i) {
    const auto row = performance.row(i);
    for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += row[j];
  }
  for (double& s : sums) s /= static_cast<double>(performance.prompt_count());
  return sums;
}

std::vector<double> medoid_subset_performance(const PerformanceMatrix& performance,
                                              const Clustering& clustering) {
  if (clustering.medoid_indices.empty()) throw Error(ErrorCode::EmptyInput, "clustering has no medoids");
  std::vector<double> scores(performance.model_count(), 0.0);
  for (auto m : clustering.medoid_indices) {
    if (m >= performance.prompt_count()) throw Error(ErrorCode::RangeError, "medoid index out of range");
    const auto row = performance.row(m);
    for (std::size_t j = 0; j < scores.size(); ++j) scores[j] += row[j];
  }
  for (double& s : scores) s /= static_cast<double>(clustering.medoid_indices.size());
  return scores;
}

SchemeWeights distance_weights(const Clustering& clustering, std::span<const double> distances) {
  check_distances(clustering, distances);
  const std::size_t n = distances.size();
  const auto members = cluster_members(clustering, n);
  std::vector<double> w(n, 0.0);
  std::vector<std::size_t> fallback;
  for (std::size_t j = 0; j < members.size(); ++j) {
    const auto& m = members[j];
    if (m.empty()) continue;
    const double mass = static_cast<double>(m.size()) / static_cast<double>(n);
    double total = 0.0;
    for (auto i : m) total += distances[i];
    if (total == 0.0) {
      fallback.push_back(j);
      for (auto i : m) w[i] = mass / static_cast<double>(m.size());
      continue;
    }
    for (auto i : m) w[i] = distances[i] / total * mass;
  }
  return {WeightVector(std::move(w), "distance"), std::move(fallback)};
}

SchemeWeights inverse_distance_weights(const Clustering& clustering,
                                       std::span<const double> distances,
                                       double epsilon_fraction) {
  check_distances(clustering, distances);
  if (!(epsilon_fraction > 0.0)) throw Error(ErrorCode::RangeError, "epsilon fraction must be positive");
  const std::size_t n = distances.size();
  const auto members = cluster_members(clustering, n);
  std::vector<double> w(n, 0.0);
  std::vector<std::size_t> fallback;
  for (std::size_t j = 0; j < members.size(); ++j) {
    const auto& m = members[j];
    if (m.empty()) continue;
    const double mass = static_cast<double>(m.size()) / static_cast<double>(n);
    double positive_sum = 0.0;
    std::size_t positive_count = 0;
    for (auto i : m) {
      if (distances[i] > 0.0) {
        positive_sum += distances[i];
        ++positive_count;
      }
    }
    if (positive_count == 0) {
      fallback.push_back(j);
      for (auto i : m) w[i] = mass / static_cast<double>(m.size());
      continue;
    }
    const double epsilon = epsilon_fraction * positive_sum / static_cast<double>(positive_count);
    double total = 0.0;
    for (auto i : m) total += 1.0 / (distances[i] + epsilon);
    for (auto i : m) w[i] = 1.0 / (distances[i] + epsilon) / total * mass;
  }
  return {WeightVector(std::move(w), "inverse-distance"), std::move(fallback)};
}

std::vector<int> rank_models(std::span<const double> scores) {
  std::vector<int> ranks(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto better = std::count_if(scores.begin(), scores.end(),
                                      [&](double s) { return s > scores[i]; });
    ranks[i] = static_cast<int>(better) + 1;
  }
  return ranks;
}

RankingReport make_ranking(std::string scheme, std::vector<double> scores,
                           std::span<const int> baseline_ranks) {
  RankingReport r;
  r.scheme = std::move(scheme);
  r.ranks = rank_models(scores);
  r.scores = std::move(scores);
  if (baseline_ranks.size() != r.ranks.size()) {
    throw Error(ErrorCode::LengthMismatch, "baseline ranking covers a different model count");
  }
  r.rank_delta.resize(r.ranks.size());
  for (std::size_t j = 0; j < r.ranks.size(); ++j) r.rank_delta[j] = baseline_ranks[j] - r.ranks[j];
  return r;
}

RankChangeReport rank_change_report(const PerformanceMatrix& performance,
                                    const Clustering& clustering) {
  RankChangeReport report;
  report.model_ids = performance.model_ids();

  auto baseline_scores = column_means(performance);
  const auto baseline_ranks = rank_models(baseline_scores);
  report.baseline = make_ranking("uniform", baseline_scores, baseline_ranks);

  report.schemes.push_back(
      make_ranking("medoid-only", medoid_subset_performance(performance, clustering), baseline_ranks));

  const auto distances = medoid_distances(performance.values(), clustering);
  auto by_distance = distance_weights(clustering, distances);
  auto ranking = make_ranking("distance", weighted_performance(performance, by_distance.weights),
                              baseline_ranks);
  ranking.fallback_clusters = std::move(by_distance.fallback_clusters);
  report.schemes.push_back(std::move(ranking));

  auto by_inverse = inverse_distance_weights(clustering, distances);
  ranking = make_ranking("inverse-distance", weighted_performance(performance, by_inverse.weights),
                         baseline_ranks);
  ranking.fallback_clusters = std::move(by_inverse.fallback_clusters);
  report.schemes.push_back(std::move(ranking));

  report.column_order.resize(report.model_ids.size());
  std::iota(report.column_order.begin(), report.column_order.end(), std::size_t{0});
  std::sort(report.column_order.begin(), report.column_order.end(), [&](std::size_t a, std::size_t b) {
    if (baseline_scores[a] != baseline_scores[b]) return baseline_scores[a] < baseline_scores[b];
    return report.model_ids[a] < report.model_ids[b];
  });
  return report;
}

}  // namespace benchbias
