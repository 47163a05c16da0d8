#include "benchbias/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "benchbias/error.hpp"
#include "benchbias/parallel.hpp"
#include "benchbias/random.hpp"
#include "benchbias/stats.hpp"

namespace benchbias {

namespace {

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

struct UnitRows {
  DenseMatrix rows;
  std::vector<char> nonzero;
  std::size_t nonzero_count = 0;
};

UnitRows normalize_rows(const DenseMatrix& vectors) {
  UnitRows out{DenseMatrix(vectors.rows(), vectors.cols()), std::vector<char>(vectors.rows(), 0), 0};
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    const auto src = vectors.row(i);
    const double norm = std::sqrt(dot(src, src));
    if (norm == 0.0) continue;
    auto dst = out.rows.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] / norm;
    out.nonzero[i] = 1;
    ++out.nonzero_count;
  }
  return out;
}

// Cosine distance with the library-wide conventions: a zero vector has
// similarity 0 with everything else, and near-coincident points snap to 0.
double convention_distance(std::span<const double> u, std::span<const double> v) {
  const double nu = dot(u, u);
  const double nv = dot(v, v);
  if (nu == 0.0 || nv == 0.0) return 1.0;
  const double cosine = std::clamp(dot(u, v) / std::sqrt(nu * nv), -1.0, 1.0);
  const double d = 1.0 - cosine;
  return d < kCoincidentDistance ? 0.0 : d;
}

std::size_t label_count(std::span<const std::size_t> assignments) {
  if (assignments.empty()) return 0;
  return *std::max_element(assignments.begin(), assignments.end()) + 1;
}

// Core Lloyd-style loop; medoids and silhouette are filled in by callers.
Clustering run_kmeans(const UnitRows& unit, std::size_t k, std::uint64_t seed,
                      const KMeansOptions& options) {
  const std::size_t n = unit.rows.rows();
  const std::size_t d = unit.rows.cols();
  if (k < 2 || k > n) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");
  }
  if (unit.nonzero_count < k) {
    throw Error(ErrorCode::DegenerateInput, "only " + std::to_string(unit.nonzero_count) +
                                                " nonzero rows for k=" + std::to_string(k));
  }

  std::vector<std::size_t> candidates;
  candidates.reserve(unit.nonzero_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (unit.nonzero[i]) candidates.push_back(i);
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }

  Clustering c;
  c.k = k;
  c.centroids = DenseMatrix(k, d);
  for (std::size_t j = 0; j < k; ++j) {
    const auto src = unit.rows.row(candidates[j]);
    std::copy(src.begin(), src.end(), c.centroids.row(j).begin());
  }
  std::vector<double> coherence(k, 1.0);  // norm of the unnormalized member mean
  constexpr auto kUnassigned = std::numeric_limits<std::size_t>::max();
  c.assignments.assign(n, kUnassigned);

  std::vector<std::size_t> next(n);
  std::vector<std::size_t> nonzero_sizes(k);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    const auto weakest = static_cast<std::size_t>(
        std::min_element(coherence.begin(), coherence.end()) - coherence.begin());
    for (std::size_t i = 0; i < n; ++i) {
      if (!unit.nonzero[i]) {
        next[i] = weakest;
        continue;
      }
      const auto u = unit.rows.row(i);
      std::size_t best = 0;
      double best_sim = dot(u, c.centroids.row(0));
      for (std::size_t j = 1; j < k; ++j) {
        const double s = dot(u, c.centroids.row(j));
        if (s > best_sim) {
          best_sim = s;
          best = j;
        }
      }
      next[i] = best;
    }

    // Reseed empty clusters, counting only points that carry a direction.
    std::fill(nonzero_sizes.begin(), nonzero_sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (unit.nonzero[i]) ++nonzero_sizes[next[i]];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (nonzero_sizes[j] != 0) continue;
      std::size_t far = kUnassigned;
      double far_distance = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!unit.nonzero[i] || nonzero_sizes[next[i]] < 2) continue;
        const double dist = 1.0 - dot(unit.rows.row(i), c.centroids.row(next[i]));
        if (dist > far_distance) {
          far_distance = dist;
          far = i;
        }
      }
      --nonzero_sizes[next[far]];
      next[far] = j;
      nonzero_sizes[j] = 1;
      const auto src = unit.rows.row(far);
      std::copy(src.begin(), src.end(), c.centroids.row(j).begin());
    }

    const bool changed = next != c.assignments;
    c.assignments = next;

    DenseMatrix sums(k, d);
    for (std::size_t i = 0; i < n; ++i) {
      if (!unit.nonzero[i]) continue;
      auto dst = sums.row(c.assignments[i]);
      const auto src = unit.rows.row(i);
      for (std::size_t t = 0; t < d; ++t) dst[t] += src[t];
    }
    for (std::size_t j = 0; j < k; ++j) {
      const auto s = sums.row(j);
      const double norm = std::sqrt(dot(s, s));
      coherence[j] = norm / static_cast<double>(nonzero_sizes[j]);
      if (norm == 0.0) continue;  // members cancel out; keep the previous direction
      auto dst = c.centroids.row(j);
      for (std::size_t t = 0; t < d; ++t) dst[t] = s[t] / norm;
    }

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (unit.nonzero[i]) objective += dot(unit.rows.row(i), c.centroids.row(c.assignments[i]));
    }
    const double gain = c.objective_history.empty()
                            ? std::numeric_limits<double>::infinity()
                            : objective - c.objective_history.back();
    c.objective_history.push_back(objective);
    c.iterations = iter + 1;
    if (!changed || gain < options.tolerance) {
      c.converged = true;
      break;
    }
  }

  c.cluster_sizes.assign(k, 0);
  for (auto a : c.assignments) ++c.cluster_sizes[a];
  return c;
}

double silhouette_from_unit(const UnitRows& unit, std::span<const std::size_t> assignments) {
  const std::size_t n = unit.rows.rows();
  const std::size_t d = unit.rows.cols();
  if (assignments.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "assignment count does not match the number of rows");
  }
  const std::size_t k = label_count(assignments);
  if (k < 2) throw Error(ErrorCode::SingleCluster, "silhouette needs at least two clusters");

  std::vector<std::size_t> sizes(k, 0);
  DenseMatrix sums(k, d);
  for (std::size_t i = 0; i < n; ++i) {
    ++sizes[assignments[i]];
    auto dst = sums.row(assignments[i]);
    const auto src = unit.rows.row(i);
    for (std::size_t t = 0; t < d; ++t) dst[t] += src[t];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (sizes[j] == 0) {
      throw Error(ErrorCode::InvalidShape, "cluster " + std::to_string(j) + " has no members");
    }
  }

  const auto snap = [](double x) { return x < kCoincidentDistance ? 0.0 : x; };
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = assignments[i];
    if (sizes[own] == 1) continue;  // singleton: s = 0
    const auto u = unit.rows.row(i);
    const double self = dot(u, u);
    // Sum over members j != i of (1 - u_i . u_j).
    const double own_sum = static_cast<double>(sizes[own]) - dot(u, sums.row(own)) - (1.0 - self);
    const double a = snap(own_sum / static_cast<double>(sizes[own] - 1));
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      if (j == own) continue;
      const double mean = (static_cast<double>(sizes[j]) - dot(u, sums.row(j))) /
                          static_cast<double>(sizes[j]);
      b = std::min(b, mean);
    }
    b = snap(b);
    const double scale = std::max(a, b);
    if (scale > 0.0) total += (b - a) / scale;
  }
  return total / static_cast<double>(n);
}

void finish(const DenseMatrix& vectors, const UnitRows& unit, Clustering& c) {
  c.medoid_indices = find_medoids(vectors, c.assignments, c.k);
  c.silhouette = silhouette_from_unit(unit, c.assignments);
}

}  // namespace

Clustering spherical_kmeans(const DenseMatrix& vectors, std::size_t k, std::uint64_t seed,
                            const KMeansOptions& options) {
  const auto unit = normalize_rows(vectors);
  Clustering c = run_kmeans(unit, k, seed, options);
  finish(vectors, unit, c);
  return c;
}

double silhouette_score(const DenseMatrix& vectors, std::span<const std::size_t> assignments) {
  return silhouette_from_unit(normalize_rows(vectors), assignments);
}

std::vector<std::size_t> find_medoids(const DenseMatrix& vectors,
                                      std::span<const std::size_t> assignments, std::size_t k) {
  if (assignments.size() != vectors.rows()) {
    throw Error(ErrorCode::LengthMismatch, "assignment count does not match the number of rows");
  }
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] >= k) throw Error(ErrorCode::RangeError, "assignment label out of range");
    members[assignments[i]].push_back(i);
  }
  std::vector<std::size_t> medoids(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& m = members[j];
    if (m.empty()) throw Error(ErrorCode::InvalidShape, "cluster " + std::to_string(j) + " is empty");
    std::vector<double> totals(m.size(), 0.0);
    for (std::size_t a = 0; a < m.size(); ++a) {
      for (std::size_t b = a + 1; b < m.size(); ++b) {
        const double dist = convention_distance(vectors.row(m[a]), vectors.row(m[b]));
        totals[a] += dist;
        totals[b] += dist;
      }
    }
    medoids[j] = m[static_cast<std::size_t>(std::min_element(totals.begin(), totals.end()) - totals.begin())];
  }
  return medoids;
}

std::vector<double> medoid_distances(const DenseMatrix& vectors, const Clustering& clustering) {
  std::vector<double> out(vectors.rows(), 0.0);
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    const std::size_t medoid = clustering.medoid_indices.at(clustering.assignments.at(i));
    out[i] = i == medoid ? 0.0 : convention_distance(vectors.row(i), vectors.row(medoid));
  }
  return out;
}

KSelection select_k_scored(const DenseMatrix& vectors, KRange range, std::uint64_t seed,
                           std::size_t restarts, unsigned threads) {
  const std::size_t n = vectors.rows();
  if (range.lo < 2 || range.lo > range.hi || n < 3 || range.hi > n - 1) {
    throw Error(ErrorCode::InvalidK, "k range " + std::to_string(range.lo) + ".." +
                                         std::to_string(range.hi) + " outside [2, " +
                                         std::to_string(n > 0 ? n - 1 : 0) + "]");
  }
  if (restarts < 1) throw Error(ErrorCode::InvalidConfig, "restarts must be >= 1");

  const auto unit = normalize_rows(vectors);
  const std::size_t ks = range.hi - range.lo + 1;
  std::vector<Clustering> runs(ks * restarts);
  parallel_for(runs.size(), threads, [&](std::size_t task, unsigned) {
    const std::size_t k = range.lo + task / restarts;
    const std::size_t r = task % restarts;
    Clustering c = run_kmeans(unit, k, derive_seed(derive_seed(seed, k), r), KMeansOptions{});
    c.silhouette = silhouette_from_unit(unit, c.assignments);
    runs[task] = std::move(c);
  });

  KSelection selection;
  std::size_t best_task = 0;
  for (std::size_t ki = 0; ki < ks; ++ki) {
    std::size_t best_restart = ki * restarts;
    for (std::size_t r = 1; r < restarts; ++r) {
      if (runs[ki * restarts + r].silhouette > runs[best_restart].silhouette) {
        best_restart = ki * restarts + r;
      }
    }
    selection.silhouette_by_k.emplace_back(range.lo + ki, runs[best_restart].silhouette);
    if (ki == 0 || runs[best_restart].silhouette > runs[best_task].silhouette) best_task = best_restart;
  }
  selection.best = std::move(runs[best_task]);
  selection.best.medoid_indices = find_medoids(vectors, selection.best.assignments, selection.best.k);
  return selection;
}

Clustering select_k(const DenseMatrix& vectors, KRange range, std::uint64_t seed,
                    std::size_t restarts, unsigned threads) {
  return select_k_scored(vectors, range, seed, restarts, threads).best;
}

ClusteringComparison clustering_comparison(const PerformanceMatrix& performance, KRange range,
                                           std::uint64_t seed, std::size_t restarts,
                                           unsigned threads) {
  ClusteringComparison out;
  out.observed = select_k_scored(performance.values(), range, seed, restarts, threads);
  const auto shuffled = permute_columns(performance.values(), derive_seed(seed, "permuted-copy"));
  out.permuted = select_k_scored(shuffled, range, seed, restarts, threads);
  out.observed_silhouette = out.observed.best.silhouette;
  out.permuted_silhouette = out.permuted.best.silhouette;
  return out;
}

}  // namespace benchbias
