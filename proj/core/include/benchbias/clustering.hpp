#ifndef BENCHBIAS_CLUSTERING_HPP
#define BENCHBIAS_CLUSTERING_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "benchbias/data_model.hpp"
#include "benchbias/matrix.hpp"

namespace benchbias {

/// Cosine distances below this are treated as coincident points.
inline constexpr double kCoincidentDistance = 1e-12;

struct Clustering {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;     // per prompt, in [0, k)
  DenseMatrix centroids;                    // k x d, unit rows
  std::vector<std::size_t> medoid_indices;  // per cluster
  std::vector<std::size_t> cluster_sizes;
  double silhouette = 0.0;
  std::vector<double> objective_history;    // sum of member-centroid cosines, per iteration
  std::size_t iterations = 0;
  bool converged = false;
};

struct KMeansOptions {
  std::size_t max_iterations = 100;
  double tolerance = 0.0;  // stop early when the objective gains less than this
};

/// Spherical k-means. Rows are normalized; assignment is argmax cosine to the
/// centroids (ties to the lower index); centroids are normalized member means.
/// Zero rows carry no direction: they join the cluster whose member mean has
/// the smallest norm and do not enter centroid means. An emptied cluster is
/// reseeded with the point farthest from its own centroid. Initialization
/// draws k distinct nonzero rows uniformly.
///
/// Throws InvalidK unless 2 <= k <= n, DegenerateInput if fewer than k rows
/// are nonzero.
Clustering spherical_kmeans(const DenseMatrix& vectors, std::size_t k, std::uint64_t seed,
                            const KMeansOptions& options = {});

/// Mean silhouette under cosine distance. Zero rows are at distance 1 from
/// everything; singleton clusters score 0; 0/0 scores 0.
/// Throws SingleCluster for fewer than two labels.
double silhouette_score(const DenseMatrix& vectors, std::span<const std::size_t> assignments);

/// Per cluster, the member with the least total cosine distance to the other
/// members (ties to the lower index).
std::vector<std::size_t> find_medoids(const DenseMatrix& vectors,
                                      std::span<const std::size_t> assignments, std::size_t k);

/// Cosine distance from each row to the medoid of its cluster (0 at the medoid).
std::vector<double> medoid_distances(const DenseMatrix& vectors, const Clustering& clustering);

struct KRange {
  std::size_t lo = 2;
  std::size_t hi = 10;
};

struct KSelection {
  Clustering best;
  std::vector<std::pair<std::size_t, double>> silhouette_by_k;  // best restart per k
};

/// Best-silhouette clustering over k in [lo, hi] (each k: best of `restarts`
/// seeded runs). Ties go to the smaller k. Throws InvalidK unless
/// 2 <= lo <= hi <= n - 1.
KSelection select_k_scored(const DenseMatrix& vectors, KRange range, std::uint64_t seed,
                           std::size_t restarts = 10, unsigned threads = 0);

Clustering select_k(const DenseMatrix& vectors, KRange range, std::uint64_t seed,
                    std::size_t restarts = 10, unsigned threads = 0);

struct ClusteringComparison {
  KSelection observed;
  KSelection permuted;
  double observed_silhouette = 0.0;
  double permuted_silhouette = 0.0;
};

/// select_k on the observed performance vectors and on one column-permuted
/// copy, with the same range and seed policy.
ClusteringComparison clustering_comparison(const PerformanceMatrix& performance, KRange range,
                                           std::uint64_t seed, std::size_t restarts = 10,
                                           unsigned threads = 0);

}  // namespace benchbias

#endif  // BENCHBIAS_CLUSTERING_HPP
