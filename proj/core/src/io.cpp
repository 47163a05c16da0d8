#include "benchbias/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "benchbias/error.hpp"

namespace benchbias {

namespace fs = std::filesystem;

namespace {

bool has_jsonl_extension(const fs::path& path) {
  const auto ext = path.extension().string();
  return ext == ".jsonl" || ext == ".ndjson" || ext == ".json";
}

double require_number(const std::string& field, const std::string& source, std::size_t line,
                      std::size_t column) {
  double value = 0.0;
  if (!parse_double(field, value)) {
    throw ParseError(source, line, column, "expected a number, got '" + field + "'");
  }
  if (!std::isfinite(value)) throw ParseError(source, line, column, "non-finite value");
  return value;
}

EmbeddingMatrix build_embeddings(std::vector<std::string> ids, const std::vector<std::vector<double>>& rows) {
  const std::size_t s = rows.empty() ? 0 : rows.front().size();
  DenseMatrix vectors(rows.size(), s);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), vectors.data().begin() + static_cast<std::ptrdiff_t>(i * s));
  }
  return EmbeddingMatrix(std::move(ids), std::move(vectors));
}

void check_dimension(std::size_t expected, std::size_t got, const std::string& source, std::size_t line) {
  if (got == 0) throw Error(ErrorCode::DimensionMismatch, source + ":" + std::to_string(line) + ": empty vector");
  if (expected != 0 && expected != got) {
    throw Error(ErrorCode::DimensionMismatch, source + ":" + std::to_string(line) + ": vector has " +
                                                  std::to_string(got) + " values, expected " +
                                                  std::to_string(expected));
  }
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

bool parse_double(std::string_view text, double& out) noexcept {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_text_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

std::vector<CsvRow> parse_csv(std::string_view text, const std::string& source) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  std::size_t line = 1;
  row.line = 1;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t quote_line = 0;

  const auto end_row = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    if (row_has_content || row.fields.size() > 1 || !row.fields.front().empty()) rows.push_back(std::move(row));
    row = CsvRow{};
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ParseError(source, line, row.fields.size() + 1, "stray quote");
        in_quotes = true;
        quote_line = line;
        row_has_content = true;
        break;
      case ',':
        row.fields.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        field.push_back(c);
        break;
      case '\n':
        end_row();
        ++line;
        row.line = line;
        break;
      default:
        if (row.fields.empty() && field.empty() && !row_has_content) row.line = line;
        field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(source, quote_line, 0, "unterminated quoted field");
  if (!field.empty() || !row.fields.empty() || row_has_content) end_row();
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

PerformanceMatrix parse_performance_csv(std::string_view text, const std::string& source) {
  const auto rows = parse_csv(text, source);
  if (rows.empty()) throw ParseError(source, 1, 0, "empty file");
  const auto& header = rows.front().fields;
  if (header.size() < 2) throw ParseError(source, rows.front().line, 0, "header needs prompt_id and model columns");
  std::vector<std::string> model_ids(header.begin() + 1, header.end());
  std::vector<std::string> prompt_ids;
  const std::size_t k = model_ids.size();
  DenseMatrix values(rows.size() - 1, k);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != k + 1) {
      throw ParseError(source, row.line, 0,
                       "expected " + std::to_string(k + 1) + " fields, got " + std::to_string(row.fields.size()));
    }
    if (row.fields.front().empty()) throw ParseError(source, row.line, 1, "empty prompt id");
    prompt_ids.push_back(row.fields.front());
    for (std::size_t c = 0; c < k; ++c) {
      const double v = require_number(row.fields[c + 1], source, row.line, c + 2);
      if (v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::RangeError, source + ":" + std::to_string(row.line) + ":" + std::to_string(c + 2) +
                                               ": value " + row.fields[c + 1] + " outside [0, 1]");
      }
      values(r - 1, c) = v;
    }
  }
  return PerformanceMatrix::with_detected_kind(std::move(prompt_ids), std::move(model_ids), std::move(values));
}

PerformanceMatrix load_performance_matrix(const fs::path& path) {
  return parse_performance_csv(read_text_file(path), path.string());
}

std::string performance_to_csv(const PerformanceMatrix& performance) {
  std::string out = "prompt_id";
  for (const auto& id : performance.model_ids()) out += "," + csv_escape(id);
  out += "\n";
  for (std::size_t i = 0; i < performance.prompt_count(); ++i) {
    out += csv_escape(performance.prompt_ids()[i]);
    for (double v : performance.row(i)) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

void save_performance_matrix(const PerformanceMatrix& performance, const fs::path& path) {
  write_text_file_atomic(path, performance_to_csv(performance));
}

EmbeddingMatrix parse_embeddings_jsonl(std::string_view text, const std::string& source) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto chunk = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line;
    if (!chunk.empty() && chunk.back() == '\r') chunk.remove_suffix(1);
    if (chunk.find_first_not_of(" \t") == std::string_view::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(chunk);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, line, e.byte, "invalid JSON");
    }
    if (!obj.is_object() || !obj.contains("prompt_id") || !obj.contains("vector")) {
      throw ParseError(source, line, 0, "expected an object with prompt_id and vector");
    }
    const auto& id = obj["prompt_id"];
    const auto& vec = obj["vector"];
    if (!(id.is_string() || id.is_number_integer())) throw ParseError(source, line, 0, "prompt_id must be a string");
    if (!vec.is_array()) throw ParseError(source, line, 0, "vector must be an array");
    std::vector<double> values;
    values.reserve(vec.size());
    for (const auto& x : vec) {
      if (!x.is_number()) throw ParseError(source, line, 0, "vector entries must be numbers");
      values.push_back(x.get<double>());
    }
    check_dimension(rows.empty() ? 0 : rows.front().size(), values.size(), source, line);
    ids.push_back(id.is_string() ? id.get<std::string>() : id.dump());
    rows.push_back(std::move(values));
  }
  return build_embeddings(std::move(ids), rows);
}

EmbeddingMatrix parse_embeddings_csv(std::string_view text, const std::string& source) {
  const auto csv = parse_csv(text, source);
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::size_t first = 0;
  if (!csv.empty()) {
    const auto& f = csv.front().fields;
    double probe = 0.0;
    if (f.front() == "prompt_id" || (f.size() > 1 && !parse_double(f[1], probe))) first = 1;
  }
  for (std::size_t r = first; r < csv.size(); ++r) {
    const auto& row = csv[r];
    if (row.fields.front().empty()) throw ParseError(source, row.line, 1, "empty prompt id");
    std::vector<double> values;
    values.reserve(row.fields.size() - 1);
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      values.push_back(require_number(row.fields[c], source, row.line, c + 1));
    }
    check_dimension(rows.empty() ? 0 : rows.front().size(), values.size(), source, row.line);
    ids.push_back(row.fields.front());
    rows.push_back(std::move(values));
  }
  return build_embeddings(std::move(ids), rows);
}

EmbeddingMatrix load_embeddings(const fs::path& path, EmbeddingFormat format) {
  if (format == EmbeddingFormat::Auto) {
    format = has_jsonl_extension(path) ? EmbeddingFormat::Jsonl : EmbeddingFormat::Csv;
  }
  const auto text = read_text_file(path);
  return format == EmbeddingFormat::Jsonl ? parse_embeddings_jsonl(text, path.string())
                                          : parse_embeddings_csv(text, path.string());
}

std::string embeddings_to_jsonl(const EmbeddingMatrix& embeddings) {
  std::string out;
  for (std::size_t i = 0; i < embeddings.prompt_count(); ++i) {
    out += "{\"prompt_id\":" + nlohmann::json(embeddings.prompt_ids()[i]).dump() + ",\"vector\":[";
    const auto row = embeddings.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      out += format_double(row[c]);
    }
    out += "]}\n";
  }
  return out;
}

std::string embeddings_to_csv(const EmbeddingMatrix& embeddings) {
  std::string out = "prompt_id";
  for (std::size_t c = 0; c < embeddings.dimension(); ++c) out += ",e" + std::to_string(c);
  out += "\n";
  for (std::size_t i = 0; i < embeddings.prompt_count(); ++i) {
    out += csv_escape(embeddings.prompt_ids()[i]);
    for (double v : embeddings.row(i)) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::vector<PromptText> load_prompt_texts(const fs::path& path) {
  const auto text = read_text_file(path);
  const auto source = path.string();
  std::vector<PromptText> prompts;
  if (has_jsonl_extension(path)) {
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, number, e.byte, "invalid JSON");
      }
      if (!obj.is_object() || !obj.contains("prompt_id") || !obj.contains("text") || !obj["text"].is_string()) {
        throw ParseError(source, number, 0, "expected an object with prompt_id and text");
      }
      const auto& id = obj["prompt_id"];
      prompts.emplace_back(id.is_string() ? id.get<std::string>() : id.dump(), obj["text"].get<std::string>());
    }
  } else {
    const auto rows = parse_csv(text, source);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& f = rows[r].fields;
      if (r == 0 && !f.empty() && f.front() == "prompt_id") continue;
      if (f.size() != 2) throw ParseError(source, rows[r].line, 0, "expected prompt_id,text");
      prompts.emplace_back(f[0], f[1]);
    }
  }
  std::vector<std::string> ids;
  ids.reserve(prompts.size());
  for (const auto& p : prompts) ids.push_back(p.first);
  require_unique_ids(ids, "prompt");
  return prompts;
}

}  // namespace benchbias
