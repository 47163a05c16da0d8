#ifndef BENCHBIAS_IO_HPP
#define BENCHBIAS_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "benchbias/data_model.hpp"
#include "benchbias/matrix.hpp"

namespace benchbias {

enum class EmbeddingFormat { Auto, Csv, Jsonl };

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict parse of a whole field; nullopt-like failure is reported as false.
bool parse_double(std::string_view text, double& out) noexcept;

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over the target.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// RFC 4180 style record splitting: quoted fields, doubled quotes, LF or CRLF.
/// Returns rows of fields together with their 1-based line numbers.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::string_view text, const std::string& source);

std::string csv_escape(std::string_view field);

/// Header `prompt_id,<model>...`; one row per prompt. Kind is auto-detected.
PerformanceMatrix parse_performance_csv(std::string_view text, const std::string& source = "<memory>");
PerformanceMatrix load_performance_matrix(const std::filesystem::path& path);
std::string performance_to_csv(const PerformanceMatrix& performance);
void save_performance_matrix(const PerformanceMatrix& performance, const std::filesystem::path& path);

/// JSONL: {"prompt_id": ..., "vector": [...]} per line.
/// CSV: prompt_id followed by s values; a header row is optional.
EmbeddingMatrix parse_embeddings_jsonl(std::string_view text, const std::string& source = "<memory>");
EmbeddingMatrix parse_embeddings_csv(std::string_view text, const std::string& source = "<memory>");
/// Auto picks JSONL for .jsonl/.ndjson/.json and CSV otherwise.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path,
                                EmbeddingFormat format = EmbeddingFormat::Auto);
std::string embeddings_to_jsonl(const EmbeddingMatrix& embeddings);
std::string embeddings_to_csv(const EmbeddingMatrix& embeddings);

/// Prompt texts for embedding fetches: JSONL {"prompt_id", "text"} or CSV
/// with header `prompt_id,text`.
using PromptText = std::pair<std::string, std::string>;
std::vector<PromptText> load_prompt_texts(const std::filesystem::path& path);

}  // namespace benchbias

#endif  // BENCHBIAS_IO_HPP
