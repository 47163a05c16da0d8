#ifndef BENCHBIAS_WEIGHTING_HPP
#define BENCHBIAS_WEIGHTING_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "benchbias/clustering.hpp"
#include "benchbias/data_model.hpp"

namespace benchbias {

/// score_j = sum_i w_i * Q[i, j]. Throws LengthMismatch.
std::vector<double> weighted_performance(const PerformanceMatrix& performance,
                                         const WeightVector& weights);

/// Plain column means, summed in prompt order.
std::vector<double> column_means(const PerformanceMatrix& performance);

/// Unweighted mean of the medoid rows.
std::vector<double> medoid_subset_performance(const PerformanceMatrix& performance,
                                              const Clustering& clustering);

struct SchemeWeights {
  WeightVector weights;
  std::vector<std::size_t> fallback_clusters;  // clusters weighted uniformly instead
};

/// w_i = d_i / sum_{C_j} d * |C_j| / n. A cluster whose distances sum to 0
/// falls back to uniform weights inside the cluster and is listed in
/// fallback_clusters.
SchemeWeights distance_weights(const Clustering& clustering, std::span<const double> distances);

/// Within-cluster weights proportional to 1 / (d_i + eps_j), where eps_j is
/// `epsilon_fraction` times the mean positive distance in the cluster. Same
/// cluster factor as distance_weights. Clusters without positive distances
/// are uniform inside.
SchemeWeights inverse_distance_weights(const Clustering& clustering,
                                       std::span<const double> distances,
                                       double epsilon_fraction = 0.01);

/// Competition ranking, 1 = highest score; equal scores share the better rank.
std::vector<int> rank_models(std::span<const double> scores);

struct RankingReport {
  std::string scheme;
  std::vector<double> scores;
  std::vector<int> ranks;
  std::vector<int> rank_delta;  // baseline rank - scheme rank; positive = moved up
  std::vector<std::size_t> fallback_clusters;
};

struct RankChangeReport {
  std::vector<std::string> model_ids;
  RankingReport baseline;
  std::vector<RankingReport> schemes;  // medoid-only, distance, inverse-distance
  /// Model indices by increasing baseline score (ties by model id): the
  /// column order of the rank-change table.
  std::vector<std::size_t> column_order;
};

RankingReport make_ranking(std::string scheme, std::vector<double> scores,
                           std::span<const int> baseline_ranks);

RankChangeReport rank_change_report(const PerformanceMatrix& performance,
                                    const Clustering& clustering);

}  // namespace benchbias

#endif  // BENCHBIAS_WEIGHTING_HPP
