#ifndef BENCHBIAS_DISTRIBUTION_HPP
#define BENCHBIAS_DISTRIBUTION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace benchbias {

/// Empirical distribution stored as sorted distinct values with multiplicities.
///
/// Similarity tables built from binary scores take few distinct values, so
/// this form keeps hundreds of thousands of pairwise values in a few hundred
/// cells while still giving exact order statistics.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;

  static EmpiricalDistribution from_samples(std::vector<double> samples);
  /// values must be strictly increasing; zero counts are dropped.
  static EmpiricalDistribution from_sorted_counts(std::vector<double> values,
                                                  std::vector<std::uint64_t> counts);

  std::uint64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  double mean() const;
  /// Linear interpolation between order statistics at rank p * (total - 1).
  double quantile(double p) const;
  /// The r-th smallest sample, zero-based.
  double order_statistic(std::uint64_t r) const;

 private:
  std::vector<double> values_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
};

}  // namespace benchbias

#endif  // BENCHBIAS_DISTRIBUTION_HPP
