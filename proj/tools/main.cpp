#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "benchbias/error.hpp"
#include "benchbias/io.hpp"
#include "benchbias/pipeline.hpp"
#include "benchbias/synthetic.hpp"

namespace bb = benchbias;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct Options {
  std::string performance;
  std::string embeddings;
  std::string prompts;
  std::string cache = ".benchbias-cache";
  bool fetch = false;
  std::string endpoint;
  std::string model;
  std::string token;
  std::size_t batch = 0;
  double timeout = 0.0;
  std::string measures;
  std::string statistics = "mean,p75,p95";
  std::size_t permutations = 1000;
  std::size_t samples = 100000;
  std::size_t restarts = 10;
  std::uint64_t seed = 1;
  std::string k_range;
  std::string out = "benchbias-out";
  std::string emit = "csv,json,svg";
  unsigned threads = 0;
  bool intercept = false;
  std::string regression_measure = "cosine";
};

void add_run_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--performance", o.performance, "Performance matrix CSV (prompt_id,<model>...)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--embeddings", o.embeddings, "Embeddings file (.jsonl or .csv)")->check(CLI::ExistingFile);
  cmd->add_flag("--fetch-embeddings", o.fetch, "Fetch embeddings from the embedding service");
  cmd->add_option("--prompts", o.prompts, "Prompt texts for fetching (.jsonl or .csv)")->check(CLI::ExistingFile);
  cmd->add_option("--embedding-cache", o.cache, "Embedding cache directory")->capture_default_str();
  cmd->add_option("--embed-endpoint", o.endpoint, "Embedding endpoint URL (env BENCHBIAS_EMBED_ENDPOINT)");
  cmd->add_option("--embed-model", o.model, "Embedding model name (env BENCHBIAS_EMBED_MODEL)");
  cmd->add_option("--embed-token", o.token, "Bearer token (env BENCHBIAS_EMBED_TOKEN)");
  cmd->add_option("--embed-batch", o.batch, "Prompts per request (env BENCHBIAS_EMBED_BATCH)");
  cmd->add_option("--embed-timeout", o.timeout, "Request timeout in seconds (env BENCHBIAS_EMBED_TIMEOUT)");
  cmd->add_option("--measures", o.measures, "Similarity measures: cosine,hamming,jaccard (default: all valid)");
  cmd->add_option("--statistics", o.statistics, "Summary statistics: mean,p75,p95")->capture_default_str();
  cmd->add_option("--permutations", o.permutations, "Permutation count B")->capture_default_str();
  cmd->add_option("--samples", o.samples, "Simplex weight samples")->capture_default_str();
  cmd->add_option("--restarts", o.restarts, "k-means restarts per k")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--k-range", o.k_range, "Cluster counts to try, LO..HI (default 2..min(10,n-1))");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--emit", o.emit, "Report formats: csv,json,svg")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_flag("--intercept", o.intercept, "Fit an intercept in the per-prompt regressions");
  cmd->add_option("--regression-measure", o.regression_measure, "Performance similarity for the regression")
      ->capture_default_str();
}

bb::RunConfig to_config(const Options& o, std::vector<bb::Analysis> analyses) {
  bb::RunConfig c;
  c.performance_path = o.performance;
  if (!o.embeddings.empty()) c.embeddings_path = o.embeddings;
  if (!o.prompts.empty()) c.prompts_path = o.prompts;
  c.fetch_embeddings = o.fetch;
  c.embedding_cache = o.cache;
  c.embedding_service = bb::EmbeddingServiceConfig::from_environment();
  if (!o.endpoint.empty()) c.embedding_service.endpoint = o.endpoint;
  if (!o.model.empty()) c.embedding_service.model = o.model;
  if (!o.token.empty()) c.embedding_service.token = o.token;
  if (o.batch != 0) c.embedding_service.batch_size = o.batch;
  if (o.timeout > 0) c.embedding_service.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout * 1000));
  for (const auto& m : split_list(o.measures)) {
    const auto parsed = bb::parse_similarity_measure(m);
    if (!parsed) throw bb::Error(bb::ErrorCode::InvalidConfig, "unknown similarity measure '" + m + "'");
    c.measures.push_back(*parsed);
  }
  c.statistics.clear();
  for (const auto& s : split_list(o.statistics)) {
    const auto parsed = bb::parse_statistic_kind(s);
    if (!parsed) throw bb::Error(bb::ErrorCode::InvalidConfig, "unknown statistic '" + s + "'");
    c.statistics.push_back(*parsed);
  }
  const auto rm = bb::parse_similarity_measure(o.regression_measure);
  if (!rm) throw bb::Error(bb::ErrorCode::InvalidConfig, "unknown similarity measure '" + o.regression_measure + "'");
  c.regression.performance_measure = *rm;
  c.regression.regression.intercept = o.intercept;
  c.permutations = o.permutations;
  c.samples = o.samples;
  c.restarts = o.restarts;
  c.seed = o.seed;
  if (!o.k_range.empty()) c.k_range = bb::parse_k_range(o.k_range);
  c.out_dir = o.out;
  c.formats = bb::parse_output_formats(o.emit);
  c.threads = o.threads;
  const bool needs_embeddings = std::all_of(analyses.begin(), analyses.end(), bb::requires_embeddings);
  if (needs_embeddings && !c.embeddings_path && !c.fetch_embeddings) {
    throw bb::Error(bb::ErrorCode::InvalidConfig, "this command needs --embeddings or --fetch-embeddings");
  }
  c.analyses = std::move(analyses);
  return c;
}

int run(const bb::RunConfig& config) {
  const auto bundle = bb::run_full_diagnostics(config);
  for (const auto& entry : bundle.entries) {
    for (const auto& f : entry.files) std::cout << entry.analysis << "\t" << (bundle.out_dir / f.path).string() << "\n";
  }
  for (const auto& s : bundle.skipped) std::cerr << "skipped " << s << ": no embeddings given\n";
  std::cout << "manifest\t" << bundle.manifest.string() << "\n";
  return 0;
}

int write_synthetic(const std::string& kind, const std::string& out, std::uint64_t seed) {
  namespace fs = std::filesystem;
  const fs::path dir(out);
  if (kind == "null") {
    bb::save_performance_matrix(bb::synthetic::null_bernoulli(30, 8, seed), dir / "performance.csv");
  } else if (kind == "blocks") {
    bb::save_performance_matrix(bb::synthetic::planted_blocks(5, 10, 10, 0.02, seed), dir / "performance.csv");
  } else if (kind == "grouped") {
    const auto f = bb::synthetic::grouped(20, 10, 12, 64, 0.05, 0.5, seed);
    bb::save_performance_matrix(f.performance, dir / "performance.csv");
    bb::write_text_file_atomic(dir / "embeddings.jsonl", bb::embeddings_to_jsonl(f.embeddings));
  } else {
    throw bb::Error(bb::ErrorCode::InvalidConfig, "unknown fixture kind '" + kind + "'");
  }
  std::cout << "wrote " << kind << " fixture to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributional bias diagnostics for LLM benchmark results"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "benchbias 0.1.0");

  Options o;
  struct Sub {
    const char* name;
    const char* help;
    std::vector<bb::Analysis> analyses;
  };
  using A = bb::Analysis;
  const std::vector<Sub> subs = {
      {"correlate", "Permutation and KS tests of performance-vector similarity", {A::Correlation}},
      {"cluster", "Spherical k-means on performance vectors vs a permuted copy", {A::Clustering}},
      {"weigh", "Rank changes under cluster-based prompt weights", {A::Weighting}},
      {"grow", "Running scores as prompts are added (random and most-informative)",
       {A::GrowthRandom, A::GrowthInformative}},
      {"sample", "Score spread and win matrix over random simplex weights", {A::Sampling}},
      {"regress", "Per-prompt regression of performance on semantic similarity", {A::Regression}},
      {"all", "Every analysis", {std::begin(bb::kAllAnalyses), std::end(bb::kAllAnalyses)}},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> commands;
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_run_options(cmd, o);
    commands.emplace_back(cmd, &s);
  }

  std::string synth_kind = "grouped";
  std::string synth_out = "fixture";
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "Write a synthetic fixture (null, blocks or grouped)");
  synth->add_option("--kind", synth_kind, "Fixture kind")->check(CLI::IsMember({"null", "blocks", "grouped"}))
      ->capture_default_str();
  synth->add_option("--out", synth_out, "Output directory")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return write_synthetic(synth_kind, synth_out, synth_seed);
    for (const auto& [cmd, sub] : commands) {
      if (cmd->parsed()) return run(to_config(o, sub->analyses));
    }
  } catch (const bb::PartialFailureError& e) {
    std::cerr << "error [" << bb::to_string(e.code()) << "]: " << e.what() << "\n";
    for (const auto& id : e.failed_ids()) std::cerr << "  failed: " << id << "\n";
    return 1;
  } catch (const bb::Error& e) {
    std::cerr << "error [" << bb::to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == bb::ErrorCode::InvalidConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
