#include "benchbias/pipeline.hpp"

#include <algorithm>
#include <charconv>

#include <json.hpp>

#include "benchbias/error.hpp"
#include "benchbias/growth.hpp"
#include "benchbias/hash.hpp"
#include "benchbias/io.hpp"
#include "benchbias/random.hpp"
#include "benchbias/report.hpp"
#include "benchbias/sampling.hpp"
#include "benchbias/similarity.hpp"
#include "benchbias/weighting.hpp"

namespace benchbias {

namespace fs = std::filesystem;

namespace {

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidConfig, "invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

class BundleWriter {
 public:
  BundleWriter(fs::path dir) : dir_(std::move(dir)) {}

  void begin(std::string analysis) { entries_.push_back(ReportEntry{std::move(analysis), {}}); }

  void write(const std::string& name, const std::string& contents) {
    write_text_file_atomic(dir_ / name, contents);
    entries_.back().files.push_back(ReportFile{name, sha256_hex(contents)});
  }

  std::vector<ReportEntry> take() { return std::move(entries_); }

 private:
  fs::path dir_;
  std::vector<ReportEntry> entries_;
};

template <class Fn>
void with_stage(std::string_view stage, Fn&& fn) {
  try {
    fn();
  } catch (const MismatchedPromptsError&) {
    throw;
  } catch (const PartialFailureError&) {
    throw;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), "analysis '" + std::string(stage) + "': " + e.what());
  }
}

std::vector<SimilarityMeasure> resolve_measures(const RunConfig& config, ScoreKind kind) {
  if (!config.measures.empty()) {
    for (auto m : config.measures) {
      if (!measure_supports(m, kind)) {
        throw Error(ErrorCode::InvalidConfig, std::string(to_string(m)) + " similarity needs a binary matrix");
      }
    }
    return config.measures;
  }
  if (kind == ScoreKind::Binary) return {SimilarityMeasure::Cosine, SimilarityMeasure::Hamming, SimilarityMeasure::Jaccard};
  return {SimilarityMeasure::Cosine};
}

}  // namespace

std::string_view to_string(Analysis analysis) noexcept {
  switch (analysis) {
    case Analysis::Correlation: return "correlation";
    case Analysis::Clustering: return "clustering";
    case Analysis::Weighting: return "weighting";
    case Analysis::GrowthRandom: return "growth_random";
    case Analysis::GrowthInformative: return "growth_informative";
    case Analysis::Sampling: return "sampling";
    case Analysis::Regression: return "regression";
  }
  return "unknown";
}

bool requires_embeddings(Analysis analysis) noexcept {
  return analysis == Analysis::GrowthInformative || analysis == Analysis::Regression;
}

OutputFormats parse_output_formats(std::string_view list) {
  OutputFormats f{false, false, false};
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    const auto item = list.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (item == "json") {
      f.json = true;
    } else if (item == "csv") {
      f.csv = true;
    } else if (item == "svg") {
      f.svg = true;
    } else if (!item.empty()) {
      throw Error(ErrorCode::InvalidConfig, "unknown output format '" + std::string(item) + "'");
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (!f.json && !f.csv && !f.svg) throw Error(ErrorCode::InvalidConfig, "no output format selected");
  return f;
}

KRange parse_k_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    throw Error(ErrorCode::InvalidConfig, "k-range must look like LO..HI, got '" + std::string(text) + "'");
  }
  return KRange{parse_size(text.substr(0, dots), "k-range"), parse_size(text.substr(dots + 2), "k-range")};
}

void RunConfig::validate() const {
  if (permutations < 1) throw Error(ErrorCode::InvalidConfig, "permutation count B must be >= 1");
  if (samples < 1) throw Error(ErrorCode::InvalidConfig, "simplex sample count must be >= 1");
  if (restarts < 1) throw Error(ErrorCode::InvalidConfig, "restart count must be >= 1");
  if (statistics.empty()) throw Error(ErrorCode::InvalidConfig, "no summary statistic selected");
  if (analyses.empty()) throw Error(ErrorCode::InvalidConfig, "no analysis selected");
  if (!formats.json && !formats.csv && !formats.svg) throw Error(ErrorCode::InvalidConfig, "no output format selected");
  if (k_range && (k_range->lo < 2 || k_range->lo > k_range->hi)) {
    throw Error(ErrorCode::InvalidConfig, "k-range must satisfy 2 <= LO <= HI");
  }
  if (fetch_embeddings && !prompts_path) {
    throw Error(ErrorCode::InvalidConfig, "fetching embeddings needs a prompts file");
  }
  if (fetch_embeddings && embeddings_path) {
    throw Error(ErrorCode::InvalidConfig, "give either an embeddings file or --fetch-embeddings, not both");
  }
}

KRange RunConfig::resolved_k_range(std::size_t prompt_count) const {
  if (k_range) return *k_range;
  return KRange{2, std::min<std::size_t>(10, prompt_count - 1)};
}

void RunConfig::validate_for(std::size_t prompt_count) const {
  validate();
  const auto range = resolved_k_range(prompt_count);
  if (range.lo < 2 || range.hi > prompt_count - 1 || range.lo > range.hi) {
    throw Error(ErrorCode::InvalidConfig, "k-range " + std::to_string(range.lo) + ".." + std::to_string(range.hi) +
                                              " outside [2, " + std::to_string(prompt_count - 1) + "]");
  }
}

const ReportEntry* ReportBundle::find(std::string_view analysis) const noexcept {
  for (const auto& e : entries) {
    if (e.analysis == analysis) return &e;
  }
  return nullptr;
}

std::optional<EmbeddingMatrix> resolve_embeddings(const RunConfig& config) {
  if (config.embeddings_path) return load_embeddings(*config.embeddings_path);
  if (config.fetch_embeddings) {
    return fetch_embeddings(load_prompt_texts(*config.prompts_path), config.embedding_service,
                            config.embedding_cache);
  }
  return std::nullopt;
}

ReportBundle run_full_diagnostics(const RunConfig& config) {
  config.validate();
  const auto performance = load_performance_matrix(config.performance_path);
  const auto embeddings = resolve_embeddings(config);
  return run_diagnostics(config, performance, embeddings ? &*embeddings : nullptr);
}

ReportBundle run_diagnostics(const RunConfig& config, const PerformanceMatrix& performance,
                             const EmbeddingMatrix* embeddings) {
  const std::size_t n = performance.prompt_count();
  config.validate_for(n);
  std::optional<AlignedInputs> aligned;
  if (embeddings) aligned = validate_alignment(performance, *embeddings);

  const auto wants = [&](Analysis a) {
    return std::find(config.analyses.begin(), config.analyses.end(), a) != config.analyses.end();
  };
  const auto seed_for = [&](Analysis a) { return derive_seed(config.seed, to_string(a)); };
  const auto& f = config.formats;

  ReportBundle bundle;
  bundle.out_dir = config.out_dir;
  fs::create_directories(config.out_dir);
  BundleWriter out(config.out_dir);

  // Clustering feeds weighting, so it is computed when either is requested.
  std::optional<ClusteringComparison> clustering;
  const auto get_clustering = [&]() -> const ClusteringComparison& {
    if (!clustering) {
      clustering = clustering_comparison(performance, config.resolved_k_range(n), seed_for(Analysis::Clustering),
                                         config.restarts, config.threads);
    }
    return *clustering;
  };

  for (Analysis analysis : kAllAnalyses) {
    if (!wants(analysis)) continue;
    const std::string name(to_string(analysis));
    if (requires_embeddings(analysis) && !aligned) {
      bundle.skipped.push_back(name);
      continue;
    }
    with_stage(name, [&] {
      switch (analysis) {
        case Analysis::Correlation: {
          const auto measures = resolve_measures(config, performance.kind());
          const auto results = run_prompt_correlation_test(performance, measures, config.statistics,
                                                           config.permutations, seed_for(analysis), config.threads);
          out.begin(name);
          if (f.json) out.write("correlation.json", correlation_json(results));
          if (f.csv) out.write("correlation.csv", correlation_csv(results));
          break;
        }
        case Analysis::Clustering: {
          const auto& c = get_clustering();
          out.begin(name);
          if (f.json) out.write("clustering.json", clustering_json(c, performance.prompt_ids()));
          if (f.csv) out.write("clustering.csv", clustering_csv(c, performance.prompt_ids(), performance));
          break;
        }
        case Analysis::Weighting: {
          const auto report = rank_change_report(performance, get_clustering().observed.best);
          out.begin(name);
          if (f.json) out.write("weighting.json", rank_change_json(report));
          if (f.csv) out.write("weighting.csv", rank_change_csv(report));
          if (f.svg) out.write("weighting.svg", rank_change_svg(report));
          break;
        }
        case Analysis::GrowthRandom: {
          const auto curve = growth_curve_random(performance, seed_for(analysis));
          out.begin(name);
          if (f.json) out.write("growth_random.json", growth_json(curve, performance));
          if (f.csv) out.write("growth_random.csv", growth_csv(curve, performance));
          break;
        }
        case Analysis::GrowthInformative: {
          const auto curve = growth_curve_informative(performance, aligned->embeddings, seed_for(analysis));
          out.begin(name);
          if (f.json) out.write("growth_informative.json", growth_json(curve, performance));
          if (f.csv) out.write("growth_informative.csv", growth_csv(curve, performance));
          break;
        }
        case Analysis::Sampling: {
          const auto sampled = sample_weighted_scores(performance, config.samples, seed_for(analysis), config.threads);
          const auto distribution = summarize_scores(performance, sampled);
          const auto wins = win_matrix_from_scores(sampled);
          out.begin(name);
          if (f.json) out.write("sampling.json", score_distribution_json(distribution, wins));
          if (f.csv) {
            out.write("sampling.csv", score_distribution_csv(distribution));
            out.write("win_matrix.csv", win_matrix_csv(wins));
          }
          if (f.svg) out.write("win_matrix.svg", win_matrix_svg(wins));
          break;
        }
        case Analysis::Regression: {
          const auto report = regression_permutation_baseline(performance, aligned->embeddings, config.permutations,
                                                              seed_for(analysis), config.regression, config.threads);
          out.begin(name);
          if (f.json) out.write("regression.json", regression_json(report));
          if (f.csv) {
            out.write("regression.csv", regression_csv(report));
            out.write("regression_histogram.csv", regression_histogram_csv(report));
          }
          break;
        }
      }
    });
  }

  bundle.entries = out.take();
  // An analysis whose formats produced no file (e.g. svg-only clustering)
  // still gets its entry, with an empty file list.
  nlohmann::ordered_json manifest;
  manifest["seed"] = config.seed;
  manifest["prompts"] = n;
  manifest["models"] = performance.model_count();
  auto& artifacts = manifest["artifacts"] = nlohmann::ordered_json::object();
  for (const auto& e : bundle.entries) {
    auto files = nlohmann::ordered_json::array();
    for (const auto& file : e.files) {
      files.push_back({{"path", file.path.generic_string()}, {"sha256", file.sha256}});
    }
    artifacts[e.analysis] = std::move(files);
  }
  manifest["skipped"] = bundle.skipped;
  bundle.manifest = config.out_dir / "manifest.json";
  write_text_file_atomic(bundle.manifest, manifest.dump(2) + "\n");
  return bundle;
}

}  // namespace benchbias
