#include <doctest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>

#include "benchbias/io.hpp"
#include "benchbias/random.hpp"
#include "benchbias/synthetic.hpp"
#include "test_support.hpp"

using namespace benchbias;
using testing::error_code_of;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
  const auto dir = fs::temp_directory_path() / ("benchbias_io_" + std::string(name));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double round-trips bit for bit") {
  Rng rng(17);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::bit_cast<double>(rng.next());
    if (!std::isfinite(v)) continue;
    double back = 0.0;
    REQUIRE(parse_double(format_double(v), back));
    REQUIRE(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  double x = 0.0;
  CHECK_FALSE(parse_double("1.5abc", x));
  CHECK_FALSE(parse_double("", x));
  CHECK_FALSE(parse_double("1 2", x));
  REQUIRE(parse_double(" 0.5 ", x));
  CHECK(x == 0.5);
}

TEST_CASE("csv splitting") {
  const auto rows = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n1,2,3\n\"multi\nline\",x,y\n", "t");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].fields == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(rows[1].line == 2);
  CHECK(rows[2].fields[0] == "multi\nline");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("plain") == "plain");
  CHECK(error_code_of([] { parse_csv("a,\"open\n", "t"); }) == ErrorCode::ParseError);
}

TEST_CASE("performance csv") {
  const auto q = parse_performance_csv("prompt_id,gpt,llama\nq1,1,0\nq2,0,1\nq3,1,1\n");
  CHECK(q.kind() == ScoreKind::Binary);
  CHECK(q.model_ids() == std::vector<std::string>{"gpt", "llama"});
  CHECK(q.prompt_ids() == std::vector<std::string>{"q1", "q2", "q3"});
  CHECK(q(1, 1) == 1.0);

  const auto c = parse_performance_csv("prompt_id,a,b\nq1,0.25,1\nq2,0.5,0\n");
  CHECK(c.kind() == ScoreKind::Continuous);

  SUBCASE("out of range") {
    try {
      parse_performance_csv("prompt_id,a,b\nq1,0.2,1.5\nq2,0,1\n", "perf.csv");
      FAIL("expected RangeError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::RangeError);
      CHECK(std::string(e.what()).find("perf.csv:2:3") != std::string::npos);
    }
  }
  SUBCASE("parse error location") {
    try {
      parse_performance_csv("prompt_id,a,b\nq1,0.2,1\nq2,zero,1\n", "perf.csv");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.source() == "perf.csv");
      CHECK(e.line() == 3);
      CHECK(e.column() == 2);
    }
    try {
      parse_performance_csv("prompt_id,a,b\nq1,0.2\nq2,0,1\n", "perf.csv");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("duplicate ids") {
    CHECK(error_code_of([] { parse_performance_csv("prompt_id,a,b\nq1,0,1\nq1,1,0\n"); }) ==
          ErrorCode::DuplicateIds);
  }
}

TEST_CASE("performance round trip through a file") {
  const auto dir = scratch_dir("perf");
  Rng rng(3);
  DenseMatrix v(9, 4);
  for (double& x : v.data()) x = rng.uniform_open();
  const PerformanceMatrix q(testing::ids("p", 9), {"a", "b,c", "d\"e", "f"}, v, ScoreKind::Continuous);
  save_performance_matrix(q, dir / "q.csv");
  CHECK(load_performance_matrix(dir / "q.csv") == q);
  const auto bin = synthetic::null_bernoulli(12, 5, 2);
  save_performance_matrix(bin, dir / "b.csv");
  CHECK(load_performance_matrix(dir / "b.csv") == bin);
  CHECK_FALSE(fs::exists(dir / "b.csv.tmp"));
  CHECK(error_code_of([&] { load_performance_matrix(dir / "missing.csv"); }) == ErrorCode::IoError);
}

TEST_CASE("embeddings") {
  const auto e = parse_embeddings_jsonl("{\"prompt_id\":\"a\",\"vector\":[1,0]}\n\n{\"prompt_id\":7,\"vector\":[0.5,0.5]}\n");
  CHECK(e.prompt_ids() == std::vector<std::string>{"a", "7"});
  CHECK(e.dimension() == 2);
  CHECK(e.row(1)[0] == 0.5);

  const auto with_header = parse_embeddings_csv("prompt_id,e0,e1\na,1,0\nb,0,1\n");
  const auto bare = parse_embeddings_csv("a,1,0\nb,0,1\n");
  CHECK(with_header.prompt_ids() == bare.prompt_ids());
  CHECK(with_header.vectors() == bare.vectors());

  CHECK(error_code_of([] { parse_embeddings_jsonl("{\"prompt_id\":\"a\",\"vector\":[1,0]}\n{\"prompt_id\":\"b\",\"vector\":[1]}\n"); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(error_code_of([] { parse_embeddings_csv("a,1,0\nb,0,0\n"); }) == ErrorCode::ZeroVector);
  try {
    parse_embeddings_jsonl("{\"prompt_id\":\"a\",\"vector\":[1,0]}\n{\"prompt_id\":\"b\" \"vector\"}\n", "e.jsonl");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.line() == 2);
  }

  const auto dir = scratch_dir("emb");
  const auto g = synthetic::grouped(3, 4, 5, 6, 0.1, 0.3, 1).embeddings;
  write_text_file_atomic(dir / "g.jsonl", embeddings_to_jsonl(g));
  write_text_file_atomic(dir / "g.csv", embeddings_to_csv(g));
  write_text_file_atomic(dir / "g.txt", embeddings_to_jsonl(g));
  CHECK(load_embeddings(dir / "g.jsonl").vectors() == g.vectors());
  CHECK(load_embeddings(dir / "g.csv").vectors() == g.vectors());
  CHECK(load_embeddings(dir / "g.txt", EmbeddingFormat::Jsonl).vectors() == g.vectors());
}

TEST_CASE("prompt texts") {
  const auto dir = scratch_dir("texts");
  write_text_file_atomic(dir / "t.jsonl", "{\"prompt_id\":\"a\",\"text\":\"What is 2+2?\"}\n{\"prompt_id\":\"b\",\"text\":\"Name a \\\"prime\\\"\"}\n");
  write_text_file_atomic(dir / "t.csv", "prompt_id,text\na,\"What is 2+2?\"\nb,\"Name a \"\"prime\"\"\"\n");
  const auto j = load_prompt_texts(dir / "t.jsonl");
  const auto c = load_prompt_texts(dir / "t.csv");
  REQUIRE(j.size() == 2);
  CHECK(j == c);
  CHECK(j[1].second == "Name a \"prime\"");
}
