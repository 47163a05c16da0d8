#ifndef BENCHBIAS_PIPELINE_HPP
#define BENCHBIAS_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "benchbias/clustering.hpp"
#include "benchbias/data_model.hpp"
#include "benchbias/embedding_client.hpp"
#include "benchbias/regression.hpp"
#include "benchbias/stats.hpp"

namespace benchbias {

enum class Analysis {
  Correlation,
  Clustering,
  Weighting,
  GrowthRandom,
  GrowthInformative,
  Sampling,
  Regression,
};

inline constexpr Analysis kAllAnalyses[] = {Analysis::Correlation,  Analysis::Clustering,
                                            Analysis::Weighting,    Analysis::GrowthRandom,
                                            Analysis::GrowthInformative, Analysis::Sampling,
                                            Analysis::Regression};

std::string_view to_string(Analysis analysis) noexcept;
bool requires_embeddings(Analysis analysis) noexcept;

struct OutputFormats {
  bool json = true;
  bool csv = true;
  bool svg = true;
};

/// Parses "csv,json,svg" (any subset, any order).
OutputFormats parse_output_formats(std::string_view list);

/// Parses "LO..HI".
KRange parse_k_range(std::string_view text);

struct RunConfig {
  std::filesystem::path performance_path;
  std::optional<std::filesystem::path> embeddings_path;
  bool fetch_embeddings = false;
  std::optional<std::filesystem::path> prompts_path;  // texts for fetching
  std::filesystem::path embedding_cache = ".benchbias-cache";
  EmbeddingServiceConfig embedding_service;

  std::vector<SimilarityMeasure> measures;  // empty: every measure valid for the matrix kind
  std::vector<StatisticKind> statistics = {StatisticKind::Mean, StatisticKind::P75, StatisticKind::P95};
  std::size_t permutations = 1000;
  std::size_t samples = 100000;
  std::size_t restarts = 10;
  std::uint64_t seed = 1;
  std::optional<KRange> k_range;  // default [2, min(10, n - 1)]
  RegressionBaselineOptions regression;
  std::vector<Analysis> analyses = {std::begin(kAllAnalyses), std::end(kAllAnalyses)};

  std::filesystem::path out_dir = "benchbias-out";
  OutputFormats formats;
  unsigned threads = 0;

  /// Checks everything that does not need the data. Throws InvalidConfig.
  void validate() const;
  /// Data-dependent checks (k-range against n). Throws InvalidConfig.
  void validate_for(std::size_t prompt_count) const;
  KRange resolved_k_range(std::size_t prompt_count) const;
};

struct ReportFile {
  std::filesystem::path path;  // relative to the bundle directory
  std::string sha256;
};

struct ReportEntry {
  std::string analysis;
  std::vector<ReportFile> files;
};

struct ReportBundle {
  std::filesystem::path out_dir;
  std::vector<ReportEntry> entries;  // one per analysis that ran, in run order
  std::vector<std::string> skipped;  // requested analyses that needed embeddings
  std::filesystem::path manifest;

  const ReportEntry* find(std::string_view analysis) const noexcept;
};

/// Loads inputs named in the config and runs every requested analysis.
ReportBundle run_full_diagnostics(const RunConfig& config);

/// Same on in-memory inputs; `embeddings` may be null. Each analysis uses the
/// seed derive_seed(config.seed, <analysis name>).
ReportBundle run_diagnostics(const RunConfig& config, const PerformanceMatrix& performance,
                             const EmbeddingMatrix* embeddings);

/// Loads or fetches embeddings as the config asks; nullopt when none given.
std::optional<EmbeddingMatrix> resolve_embeddings(const RunConfig& config);

}  // namespace benchbias

#endif  // BENCHBIAS_PIPELINE_HPP
