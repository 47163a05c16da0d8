#include "benchbias/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "benchbias/io.hpp"

namespace benchbias {

using Json = nlohmann::ordered_json;

namespace {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const KsReport& ks) {
  return Json{{"statistic", ks.statistic},
              {"p_value", ks.p_value},
              {"size_a", ks.size_a},
              {"size_b", ks.size_b},
              {"approximate", ks.approximate}};
}

Json to_json(const SampleSummary& s) {
  return Json{{"count", s.count}, {"mean", s.mean},     {"min", s.min}, {"q25", s.q25},
              {"median", s.median}, {"q75", s.q75}, {"max", s.max}};
}

Json selection_json(const KSelection& selection, const std::vector<std::string>& prompt_ids) {
  const auto& c = selection.best;
  Json by_k = Json::array();
  for (const auto& [k, s] : selection.silhouette_by_k) by_k.push_back(Json{{"k", k}, {"silhouette", s}});
  Json medoids = Json::array();
  for (auto m : c.medoid_indices) medoids.push_back(prompt_ids[m]);
  Json members = Json::array();
  for (std::size_t j = 0; j < c.k; ++j) {
    Json ids = Json::array();
    for (std::size_t i = 0; i < c.assignments.size(); ++i) {
      if (c.assignments[i] == j) ids.push_back(prompt_ids[i]);
    }
    members.push_back(std::move(ids));
  }
  return Json{{"k", c.k},
              {"silhouette", c.silhouette},
              {"iterations", c.iterations},
              {"converged", c.converged},
              {"cluster_sizes", c.cluster_sizes},
              {"medoids", medoids},
              {"members", members},
              {"silhouette_by_k", by_k}};
}

Json ranking_json(const RankingReport& r, const std::vector<std::string>& model_ids) {
  Json models = Json::array();
  for (std::size_t j = 0; j < model_ids.size(); ++j) {
    models.push_back(Json{{"model_id", model_ids[j]},
                          {"score", r.scores[j]},
                          {"rank", r.ranks[j]},
                          {"rank_delta", r.rank_delta[j]}});
  }
  return Json{{"scheme", r.scheme}, {"fallback_clusters", r.fallback_clusters}, {"models", models}};
}

Json matrix_rows(const DenseMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    if (!s.empty() && s.front() == '-') s.erase(0, 1);
  }
  return s;
}

std::string rgb(double r, double g, double b) {
  const auto c = [](double x) { return static_cast<int>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c(r), c(g), c(b));
  return buf;
}

std::string cell_color(double t, bool diverging) {
  t = std::clamp(t, 0.0, 1.0);
  if (diverging) {
    if (t < 0.5) {
      const double u = t / 0.5;  // blue to white
      return rgb(0.13 + 0.87 * u, 0.4 + 0.6 * u, 0.67 + 0.33 * u);
    }
    const double u = (t - 0.5) / 0.5;  // white to red
    return rgb(1.0 - 0.3 * u, 1.0 - 0.9 * u, 1.0 - 0.85 * u);
  }
  return rgb(1.0 - 0.87 * t, 1.0 - 0.6 * t, 1.0 - 0.33 * t);
}

}  // namespace

std::string correlation_json(std::span<const CorrelationTestResult> results) {
  Json measures = Json::array();
  for (const auto& r : results) {
    Json tests = Json::array();
    for (const auto& t : r.tests) {
      tests.push_back(Json{{"statistic", std::string(to_string(t.statistic))},
                           {"observed", t.observed},
                           {"p_value", t.p_value},
                           {"permutations", t.permutations},
                           {"seed", t.seed},
                           {"permuted", t.permuted}});
    }
    measures.push_back(Json{{"measure", std::string(to_string(r.measure))}, {"tests", tests}, {"ks", to_json(r.ks)}});
  }
  return dump(Json{{"analysis", "correlation"}, {"measures", measures}});
}

std::string correlation_csv(std::span<const CorrelationTestResult> results) {
  std::string out = "measure,statistic,observed,p_value,permutations,ks_statistic,ks_p_value\n";
  for (const auto& r : results) {
    for (const auto& t : r.tests) {
      out += std::string(to_string(r.measure)) + "," + std::string(to_string(t.statistic)) + "," +
             format_double(t.observed) + "," + format_double(t.p_value) + "," + std::to_string(t.permutations) +
             "," + format_double(r.ks.statistic) + "," + format_double(r.ks.p_value) + "\n";
    }
  }
  return out;
}

std::string clustering_json(const ClusteringComparison& comparison, const std::vector<std::string>& prompt_ids) {
  return dump(Json{{"analysis", "clustering"},
                   {"observed_silhouette", comparison.observed_silhouette},
                   {"permuted_silhouette", comparison.permuted_silhouette},
                   {"observed", selection_json(comparison.observed, prompt_ids)},
                   {"permuted", selection_json(comparison.permuted, prompt_ids)}});
}

std::string clustering_csv(const ClusteringComparison& comparison, const std::vector<std::string>& prompt_ids,
                           const PerformanceMatrix& performance) {
  const auto& c = comparison.observed.best;
  const auto distances = medoid_distances(performance.values(), c);
  std::string out = "prompt_id,cluster,is_medoid,distance_to_medoid\n";
  for (std::size_t i = 0; i < prompt_ids.size(); ++i) {
    const bool medoid = c.medoid_indices[c.assignments[i]] == i;
    out += csv_escape(prompt_ids[i]) + "," + std::to_string(c.assignments[i]) + "," + (medoid ? "1" : "0") + "," +
           format_double(distances[i]) + "\n";
  }
  return out;
}

std::string rank_change_json(const RankChangeReport& report) {
  Json schemes = Json::array();
  for (const auto& s : report.schemes) schemes.push_back(ranking_json(s, report.model_ids));
  Json order = Json::array();
  for (auto j : report.column_order) order.push_back(report.model_ids[j]);
  return dump(Json{{"analysis", "weighting"},
                   {"column_order", order},
                   {"baseline", ranking_json(report.baseline, report.model_ids)},
                   {"schemes", schemes}});
}

std::string rank_change_csv(const RankChangeReport& report) {
  std::string out = "scheme,model_id,score,rank,rank_delta\n";
  const auto emit = [&](const RankingReport& r) {
    for (auto j : report.column_order) {
      out += csv_escape(r.scheme) + "," + csv_escape(report.model_ids[j]) + "," + format_double(r.scores[j]) + "," +
             std::to_string(r.ranks[j]) + "," + std::to_string(r.rank_delta[j]) + "\n";
    }
  };
  emit(report.baseline);
  for (const auto& s : report.schemes) emit(s);
  return out;
}

std::string rank_change_svg(const RankChangeReport& report) {
  HeatmapSpec spec;
  spec.title = "Rank change vs uniform weighting";
  for (auto j : report.column_order) spec.column_labels.push_back(report.model_ids[j]);
  spec.values = DenseMatrix(report.schemes.size(), report.column_order.size());
  int extent = 1;
  for (std::size_t s = 0; s < report.schemes.size(); ++s) {
    spec.row_labels.push_back(report.schemes[s].scheme);
    for (std::size_t c = 0; c < report.column_order.size(); ++c) {
      const int delta = report.schemes[s].rank_delta[report.column_order[c]];
      spec.values(s, c) = delta;
      extent = std::max(extent, std::abs(delta));
    }
  }
  spec.min = -extent;
  spec.max = extent;
  spec.diverging = true;
  spec.decimals = 0;
  return heatmap_svg(spec);
}

std::string growth_json(const GrowthCurve& curve, const PerformanceMatrix& performance) {
  Json order = Json::array();
  for (auto i : curve.selection_order) order.push_back(performance.prompt_ids()[i]);
  return dump(Json{{"analysis", std::string("growth_") + (curve.method == GrowthMethod::Random ? "random" : "informative")},
                   {"method", std::string(to_string(curve.method))},
                   {"seed", curve.seed},
                   {"model_ids", performance.model_ids()},
                   {"selection_order", order},
                   {"running_scores", matrix_rows(curve.running_scores)}});
}

std::string growth_csv(const GrowthCurve& curve, const PerformanceMatrix& performance) {
  std::string out = "step,prompt_id";
  for (const auto& m : performance.model_ids()) out += "," + csv_escape(m);
  out += "\n";
  for (std::size_t t = 0; t < curve.running_scores.rows(); ++t) {
    out += std::to_string(t + 1) + "," + csv_escape(performance.prompt_ids()[curve.selection_order[t]]);
    for (double v : curve.running_scores.row(t)) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string score_distribution_json(const ScoreDistribution& distribution, const WinMatrix& wins) {
  Json models = Json::array();
  for (std::size_t j = 0; j < distribution.models.size(); ++j) {
    const auto& m = distribution.models[j];
    Json q = Json::object();
    for (std::size_t l = 0; l < kScoreQuantileLevels.size(); ++l) {
      q[format_double(kScoreQuantileLevels[l])] = m.quantiles[l];
    }
    models.push_back(Json{{"model_id", distribution.model_ids[j]},
                          {"uniform_score", m.uniform_score},
                          {"min", m.min},
                          {"max", m.max},
                          {"mean", m.mean},
                          {"quantiles", q}});
  }
  return dump(Json{{"analysis", "sampling"},
                   {"sample_count", distribution.sample_count},
                   {"seed", distribution.seed},
                   {"models", models},
                   {"win_matrix", Json{{"model_ids", wins.model_ids}, {"fractions", matrix_rows(wins.fractions)}}}});
}

std::string score_distribution_csv(const ScoreDistribution& distribution) {
  std::string out = "model_id,uniform_score,min,max,mean";
  for (double l : kScoreQuantileLevels) out += ",q" + format_double(l);
  out += "\n";
  for (std::size_t j = 0; j < distribution.models.size(); ++j) {
    const auto& m = distribution.models[j];
    out += csv_escape(distribution.model_ids[j]) + "," + format_double(m.uniform_score) + "," + format_double(m.min) +
           "," + format_double(m.max) + "," + format_double(m.mean);
    for (double q : m.quantiles) out += "," + format_double(q);
    out += "\n";
  }
  return out;
}

std::string win_matrix_csv(const WinMatrix& wins) {
  std::string out = "model_id";
  for (const auto& m : wins.model_ids) out += "," + csv_escape(m);
  out += "\n";
  for (std::size_t i = 0; i < wins.model_ids.size(); ++i) {
    out += csv_escape(wins.model_ids[i]);
    for (double v : wins.fractions.row(i)) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string win_matrix_svg(const WinMatrix& wins) {
  HeatmapSpec spec;
  spec.title = "Share of sampled weightings where row beats column";
  spec.row_labels = wins.model_ids;
  spec.column_labels = wins.model_ids;
  spec.values = wins.fractions;
  return heatmap_svg(spec);
}

std::string regression_json(const RegressionComparisonReport& report) {
  std::size_t significant = 0;
  std::size_t fitted = 0;
  for (const auto& r : report.observed) {
    if (r.degenerate) continue;
    ++fitted;
    if (r.fdr < 0.05) ++significant;
  }
  return dump(Json{{"analysis", "regression"},
                   {"performance_measure", std::string(to_string(report.performance_measure))},
                   {"intercept", report.intercept},
                   {"permutations", report.permutations},
                   {"seed", report.seed},
                   {"fitted_prompts", fitted},
                   {"significant_at_0.05", significant},
                   {"observed_beta", to_json(report.observed_beta)},
                   {"observed_fdr", to_json(report.observed_fdr)},
                   {"permuted_beta", to_json(report.permuted_beta)},
                   {"permuted_fdr", to_json(report.permuted_fdr)},
                   {"beta_ks", to_json(report.beta_ks)},
                   {"fdr_ks", to_json(report.fdr_ks)}});
}

std::string regression_csv(const RegressionComparisonReport& report) {
  std::string out = "prompt_id,beta,standard_error,p_value,fdr,residual_variance,observations,degenerate\n";
  for (const auto& r : report.observed) {
    out += csv_escape(r.prompt_id) + "," + format_double(r.beta) + "," + format_double(r.standard_error) + "," +
           format_double(r.p_value) + "," + format_double(r.fdr) + "," + format_double(r.residual_variance) + "," +
           std::to_string(r.observation_count) + "," + (r.degenerate ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<HistogramBin> paired_histogram(std::span<const double> observed, std::span<const double> permuted,
                                           double lo, double hi, std::size_t bins) {
  std::vector<HistogramBin> out(std::max<std::size_t>(bins, 1));
  const double width = hi > lo ? (hi - lo) / static_cast<double>(out.size()) : 1.0;
  for (std::size_t b = 0; b < out.size(); ++b) {
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = b + 1 == out.size() ? hi : lo + width * static_cast<double>(b + 1);
  }
  const auto bin_of = [&](double v) {
    if (!(hi > lo)) return std::size_t{0};
    const double pos = std::floor((v - lo) / width);
    if (pos < 0) return std::size_t{0};
    return std::min(out.size() - 1, static_cast<std::size_t>(pos));
  };
  for (double v : observed) out[bin_of(v)].observed += 1.0;
  for (double v : permuted) out[bin_of(v)].permuted += 1.0;
  for (auto& b : out) {
    if (!observed.empty()) b.observed /= static_cast<double>(observed.size());
    if (!permuted.empty()) b.permuted /= static_cast<double>(permuted.size());
  }
  return out;
}

std::string regression_histogram_csv(const RegressionComparisonReport& report, std::size_t bins) {
  std::vector<double> betas;
  std::vector<double> fdrs;
  for (const auto& r : report.observed) {
    if (r.degenerate) continue;
    betas.push_back(r.beta);
    fdrs.push_back(r.fdr);
  }
  std::string out = "quantity,bin_lo,bin_hi,observed,permuted\n";
  const auto emit = [&](const char* name, const std::vector<HistogramBin>& h) {
    for (const auto& b : h) {
      out += std::string(name) + "," + format_double(b.lo) + "," + format_double(b.hi) + "," +
             format_double(b.observed) + "," + format_double(b.permuted) + "\n";
    }
  };
  const double lo = std::min(report.observed_beta.min, report.permuted_beta.min);
  const double hi = std::max(report.observed_beta.max, report.permuted_beta.max);
  emit("beta", paired_histogram(betas, report.permuted_betas, lo, hi, bins));
  emit("fdr", paired_histogram(fdrs, report.permuted_fdrs, 0.0, 1.0, bins));
  return out;
}

std::string heatmap_svg(const HeatmapSpec& spec) {
  constexpr int cell = 36;
  constexpr int left = 150;
  constexpr int top = 130;
  const int rows = static_cast<int>(spec.values.rows());
  const int cols = static_cast<int>(spec.values.cols());
  const int width = left + cols * cell + 20;
  const int height = top + rows * cell + 20;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"10\" y=\"18\" font-size=\"14\">" + xml_escape(spec.title) + "</text>\n";
  for (int c = 0; c < cols; ++c) {
    const int x = left + c * cell + cell / 2;
    out += "<text transform=\"translate(" + std::to_string(x) + "," + std::to_string(top - 6) +
           ") rotate(-60)\">" + xml_escape(spec.column_labels[static_cast<std::size_t>(c)]) + "</text>\n";
  }
  const double span = spec.max - spec.min;
  for (int r = 0; r < rows; ++r) {
    const int y = top + r * cell;
    out += "<text x=\"" + std::to_string(left - 6) + "\" y=\"" + std::to_string(y + cell / 2 + 4) +
           "\" text-anchor=\"end\">" + xml_escape(spec.row_labels[static_cast<std::size_t>(r)]) + "</text>\n";
    for (int c = 0; c < cols; ++c) {
      const double v = spec.values(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      const double t = span > 0 ? (v - spec.min) / span : 0.5;
      const int x = left + c * cell;
      out += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" +
             cell_color(t, spec.diverging) + "\" stroke=\"#ffffff\"/>\n";
      out += "<text x=\"" + std::to_string(x + cell / 2) + "\" y=\"" + std::to_string(y + cell / 2 + 4) +
             "\" text-anchor=\"middle\">" + fixed(v, spec.decimals) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace benchbias
