#ifndef BENCHBIAS_REPORT_HPP
#define BENCHBIAS_REPORT_HPP

#include <span>
#include <string>
#include <vector>

#include "benchbias/clustering.hpp"
#include "benchbias/data_model.hpp"
#include "benchbias/growth.hpp"
#include "benchbias/regression.hpp"
#include "benchbias/sampling.hpp"
#include "benchbias/stats.hpp"
#include "benchbias/weighting.hpp"

// Serializers for every report type. JSON carries the nested report, CSV a
// flat table, SVG a heatmap. All output is a pure function of the input, so
// identical reports give identical bytes.
namespace benchbias {

std::string correlation_json(std::span<const CorrelationTestResult> results);
/// measure,statistic,observed,p_value,permutations,ks_statistic,ks_p_value
std::string correlation_csv(std::span<const CorrelationTestResult> results);

std::string clustering_json(const ClusteringComparison& comparison,
                            const std::vector<std::string>& prompt_ids);
/// prompt_id,cluster,is_medoid,distance_to_medoid for the observed clustering.
std::string clustering_csv(const ClusteringComparison& comparison,
                           const std::vector<std::string>& prompt_ids, const PerformanceMatrix& performance);

std::string rank_change_json(const RankChangeReport& report);
/// scheme,model_id,score,rank,rank_delta with models in column order.
std::string rank_change_csv(const RankChangeReport& report);
/// Schemes x models (column order) heatmap of rank deltas.
std::string rank_change_svg(const RankChangeReport& report);

std::string growth_json(const GrowthCurve& curve, const PerformanceMatrix& performance);
/// step,prompt_id,<model>... one row per step.
std::string growth_csv(const GrowthCurve& curve, const PerformanceMatrix& performance);

std::string score_distribution_json(const ScoreDistribution& distribution, const WinMatrix& wins);
/// model_id,uniform_score,min,max,mean,q01,...,q99
std::string score_distribution_csv(const ScoreDistribution& distribution);
/// model_id,<model>... rows beat columns.
std::string win_matrix_csv(const WinMatrix& wins);
std::string win_matrix_svg(const WinMatrix& wins);

std::string regression_json(const RegressionComparisonReport& report);
/// prompt_id,beta,standard_error,p_value,fdr,residual_variance,observations,degenerate
std::string regression_csv(const RegressionComparisonReport& report);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  double observed = 0.0;  // share of the observed sample in the bin
  double permuted = 0.0;  // share of the pooled permuted sample
};

/// Equal-width bins over [lo, hi]; the last bin is closed. Values outside
/// the range are clamped into the end bins.
std::vector<HistogramBin> paired_histogram(std::span<const double> observed, std::span<const double> permuted,
                                           double lo, double hi, std::size_t bins);

/// quantity,bin_lo,bin_hi,observed,permuted for betas and fdrs.
std::string regression_histogram_csv(const RegressionComparisonReport& report, std::size_t bins = 40);

struct HeatmapSpec {
  std::string title;
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  DenseMatrix values;
  double min = 0.0;
  double max = 1.0;
  bool diverging = false;  // blue-white-red around the midpoint
  int decimals = 2;
};

std::string heatmap_svg(const HeatmapSpec& spec);

}  // namespace benchbias

#endif  // BENCHBIAS_REPORT_HPP
