#include "benchbias/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "benchbias/error.hpp"

namespace benchbias {

EmpiricalDistribution EmpiricalDistribution::from_samples(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<double> values;
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 0; i < samples.size();) {
    std::size_t j = i + 1;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    values.push_back(samples[i]);
    counts.push_back(j - i);
    i = j;
  }
  return from_sorted_counts(std::move(values), std::move(counts));
}

EmpiricalDistribution EmpiricalDistribution::from_sorted_counts(std::vector<double> values,
                                                                std::vector<std::uint64_t> counts) {
  if (values.size() != counts.size()) {
    throw Error(ErrorCode::LengthMismatch, "values and counts differ in length");
  }
  EmpiricalDistribution d;
  d.values_.reserve(values.size());
  d.counts_.reserve(values.size());
  d.cumulative_.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) throw Error(ErrorCode::RangeError, "NaN in empirical distribution");
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw Error(ErrorCode::InvalidShape, "distribution values must be strictly increasing");
    }
    if (counts[i] == 0) continue;
    d.values_.push_back(values[i]);
    d.counts_.push_back(counts[i]);
    d.total_ += counts[i];
    d.cumulative_.push_back(d.total_);
  }
  return d;
}

double EmpiricalDistribution::mean() const {
  if (total_ == 0) throw Error(ErrorCode::EmptyInput, "mean of an empty distribution");
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) sum += values_[i] * static_cast<double>(counts_[i]);
  return sum / static_cast<double>(total_);
}

double EmpiricalDistribution::order_statistic(std::uint64_t r) const {
  if (r >= total_) throw Error(ErrorCode::RangeError, "order statistic beyond sample size");
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  return values_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double EmpiricalDistribution::quantile(double p) const {
  if (total_ == 0) throw Error(ErrorCode::EmptyInput, "quantile of an empty distribution");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::RangeError, "quantile level outside [0, 1]");
  const double position = p * static_cast<double>(total_ - 1);
  const auto lo = static_cast<std::uint64_t>(std::floor(position));
  const auto hi = static_cast<std::uint64_t>(std::ceil(position));
  const double lo_value = order_statistic(lo);
  if (hi == lo) return lo_value;
  const double hi_value = order_statistic(hi);
  return lo_value + (position - static_cast<double>(lo)) * (hi_value - lo_value);
}

}  // namespace benchbias
