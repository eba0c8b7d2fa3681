#include <zlib.h>

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"
#include "embedshape/embedding/embedding.hpp"
#include "helpers.hpp"

using namespace embedshape;

namespace {

EmbeddingSet parse(const std::string& text, std::size_t max_tokens) {
  std::istringstream in(text);
  return parse_embedding(in, max_tokens);
}

EmbeddingSet from_rows(std::vector<std::vector<double>> rows) {
  EmbeddingSet e;
  e.dim = rows.at(0).size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    e.tokens.push_back("t" + std::to_string(i));
    e.vectors.insert(e.vectors.end(), rows[i].begin(), rows[i].end());
  }
  return e;
}

}  // namespace

TEST_CASE("parse truncates to max_tokens") {
  const auto e = parse("3 2\na 0 1\nb 1 0\nc 1 1\n", 2);
  CHECK(e.tokens == std::vector<std::string>{"a", "b"});
  CHECK(e.dim == 2);
  CHECK(e.vectors == std::vector<double>{0, 1, 1, 0});
}

TEST_CASE("parse single row") {
  const auto e = parse("1 2\nx 0.5 -0.5\n", 10);
  CHECK(e.size() == 1);
  CHECK(e.vectors == std::vector<double>{0.5, -0.5});
}

TEST_CASE("duplicate tokens keep the first occurrence and do not count") {
  const auto e = parse("2 2\na 0 1\na 1 0\n", 2);
  CHECK(e.tokens == std::vector<std::string>{"a"});
  CHECK(e.vectors == std::vector<double>{0, 1});

  const auto f = parse("3 1\na 1\na 2\nb 3\n", 2);
  CHECK(f.tokens == std::vector<std::string>{"a", "b"});
  CHECK(f.vectors == std::vector<double>{1, 3});
}

TEST_CASE("tokens may contain spaces") {
  const auto e = parse("1 2\nnew york 1 2\n", 5);
  CHECK(e.tokens.at(0) == "new york");
}

TEST_CASE("values round-trip exactly through standard decimal parsing") {
  const auto e = parse("1 3\nw 0.1 1e-300 -2.5e10\n", 1);
  CHECK(e.vectors[0] == 0.1);
  CHECK(e.vectors[1] == 1e-300);
  CHECK(e.vectors[2] == -2.5e10);
}

TEST_CASE("malformed input raises ParseError with line numbers") {
  CHECK_THROWS_AS(parse("", 1), ParseError);
  CHECK_THROWS_AS(parse("abc 2\n", 1), ParseError);
  CHECK_THROWS_AS(parse("0 2\n", 1), ParseError);
  CHECK_THROWS_AS(parse("2\n", 1), ParseError);
  try {
    parse("2 2\na 0 1\nb 1\n", 5);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse("1 2\na nan 1\n", 5);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("1 2\na inf 1\n", 5), ParseError);
  CHECK_THROWS_AS(parse("1 2\na x 1\n", 5), ParseError);
  CHECK_THROWS_AS(parse("1 2\na 1 2\n", 0), ConfigError);
}

TEST_CASE("gzip and plain files load identically") {
  const auto dir = testing::scratch_dir("embedding_gz");
  const std::string text = "3 2\na 0 1\nb 1 0\nc 1 1\n";
  write_file_atomic(dir / "plain.vec", text);
  gzFile gz = gzopen((dir / "packed.vec.gz").c_str(), "wb");
  REQUIRE(gz != nullptr);
  gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
  gzclose(gz);
  const auto a = load_embedding(dir / "plain.vec", 3);
  const auto b = load_embedding(dir / "packed.vec.gz", 3);
  CHECK(a.tokens == b.tokens);
  CHECK(a.vectors == b.vectors);
  CHECK_THROWS_AS(load_embedding(dir / "missing.vec", 3), IoError);
}

TEST_CASE("write_embedding round-trips") {
  EmbeddingSet e = from_rows({{0.1, 1.0 / 3.0}, {-7.25, 1e-17}});
  std::ostringstream out;
  write_embedding(out, e);
  const auto back = parse(out.str(), 10);
  CHECK(back.tokens == e.tokens);
  CHECK(back.vectors == e.vectors);
}

TEST_CASE("euclidean distance") {
  const auto d = pairwise_distances(from_rows({{0, 0}, {3, 4}}), Metric::Euclidean);
  CHECK(d(0, 1) == 5.0);
  CHECK(d(1, 0) == 5.0);
  CHECK(d(0, 0) == 0.0);
}

TEST_CASE("cosine distance") {
  CHECK(pairwise_distances(from_rows({{1, 0}, {0, 1}}), Metric::Cosine)(0, 1) == 1.0);
  CHECK(pairwise_distances(from_rows({{1, 0}, {2, 0}}), Metric::Cosine)(0, 1) == 0.0);
  CHECK(pairwise_distances(from_rows({{1, 0}, {-1, 0}}), Metric::Cosine)(0, 1) == 2.0);
  CHECK_THROWS_AS(pairwise_distances(from_rows({{1, 0}, {0, 0}}), Metric::Cosine), DegenerateInputError);
}

TEST_CASE("distance matrices satisfy their invariants and are job-count independent") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> rows(40, std::vector<double>(7));
  for (auto& r : rows)
    for (auto& x : r) x = g(rng);
  const auto e = from_rows(rows);
  for (Metric m : {Metric::Euclidean, Metric::Cosine}) {
    const auto one = pairwise_distances(e, m, 1);
    const auto many = pairwise_distances(e, m, 4);
    CHECK(one == many);
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(one(i, i) == 0.0);
      for (std::size_t j = 0; j < one.size(); ++j) {
        CHECK(one(i, j) == one(j, i));
        CHECK(one(i, j) >= 0.0);
      }
    }
  }
}

TEST_CASE("metric names") {
  CHECK(parse_metric("euclidean") == Metric::Euclidean);
  CHECK(parse_metric("cosine") == Metric::Cosine);
  CHECK(std::string(metric_name(Metric::Cosine)) == "cosine");
  CHECK_THROWS_AS(parse_metric("manhattan"), ConfigError);
}

TEST_CASE("DistanceMatrix validation") {
  CHECK_THROWS_AS(DistanceMatrix({"a", "b"}, {0, 1, 2, 0}), InvalidMatrixError);
  CHECK_THROWS_AS(DistanceMatrix({"a", "b"}, {1, 1, 1, 0}), InvalidMatrixError);
  CHECK_THROWS_AS(DistanceMatrix({"a", "a"}, {0, 1, 1, 0}), InvalidMatrixError);
  CHECK_THROWS_AS(DistanceMatrix({"a", "b"}, {0, -1, -1, 0}), InvalidMatrixError);
  CHECK_THROWS_AS(DistanceMatrix({"a", "b"}, {0, NAN, NAN, 0}), InvalidMatrixError);
  CHECK_THROWS_AS(DistanceMatrix({"a", "b"}, {0, 1, 1}), InvalidMatrixError);
  CHECK_NOTHROW(DistanceMatrix({"a", "b"}, {0, 1, 1, 0}));
}

TEST_CASE("matrix CSV and binary formats round-trip") {
  std::mt19937_64 rng(5);
  auto m = testing::random_matrix(9, rng);
  std::stringstream csv;
  write_matrix_csv(csv, m);
  CHECK(read_matrix_csv(csv) == m);
  CHECK(decode_matrix_binary(encode_matrix_binary(m)) == m);

  const auto dir = testing::scratch_dir("matrix_io");
  save_matrix(dir / "m.bin", m);
  save_matrix(dir / "m.csv", m);
  CHECK(load_matrix(dir / "m.bin") == m);
  CHECK(load_matrix(dir / "m.csv") == m);

  std::string bytes = encode_matrix_binary(m);
  CHECK_THROWS_AS(decode_matrix_binary(bytes.substr(0, bytes.size() - 3)), ParseError);
  CHECK_THROWS_AS(decode_matrix_binary("XXXX"), ParseError);
}

TEST_CASE("select reorders rows and columns together") {
  DistanceMatrix m({"a", "b", "c"}, {0, 1, 2, 1, 0, 3, 2, 3, 0});
  const std::size_t idx[] = {2, 0};
  const auto s = m.select(idx);
  CHECK(s.labels() == std::vector<std::string>{"c", "a"});
  CHECK(s(0, 1) == 2.0);
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
