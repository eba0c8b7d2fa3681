#include "embedshape/embedding/embedding.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <streambuf>
#include <unordered_set>

#include "embedshape/common/error.hpp"
#include "embedshape/common/numfmt.hpp"
#include "embedshape/common/parallel.hpp"

namespace embedshape {

const char* metric_name(Metric m) {
  return m == Metric::Euclidean ? "euclidean" : "cosine";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "cosine") return Metric::Cosine;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Field boundaries of a whitespace-separated line.
void split_fields(std::string_view line, std::vector<std::pair<std::size_t, std::size_t>>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i == line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    out.emplace_back(start, i);
  }
}

std::size_t parse_positive(std::string_view text, std::size_t line_no, const char* what) {
  std::size_t value = 0;
  if (text.empty()) throw ParseError(std::string("missing ") + what, line_no);
  for (char c : text) {
    if (c < '0' || c > '9') throw ParseError(std::string("bad ") + what + " in header", line_no);
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  if (value == 0) throw ParseError(std::string(what) + " must be positive", line_no);
  return value;
}

// std::streambuf over a zlib gzFile. gzread passes non-gzip input through
// unchanged, which gives magic-byte detection for free.
class GzStreamBuf : public std::streambuf {
 public:
  explicit GzStreamBuf(const std::filesystem::path& path)
      : file_(gzopen(path.c_str(), "rb")) {
    if (!file_) throw IoError("cannot open " + path.string());
    gzbuffer(file_, 1 << 17);
  }
  ~GzStreamBuf() override {
    if (file_) gzclose(file_);
  }
  GzStreamBuf(const GzStreamBuf&) = delete;
  GzStreamBuf& operator=(const GzStreamBuf&) = delete;

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    const int n = gzread(file_, buffer_.data(), static_cast<unsigned>(buffer_.size()));
    if (n < 0) {
      int errnum = 0;
      throw IoError(std::string("gzip read failed: ") + gzerror(file_, &errnum));
    }
    if (n == 0) return traits_type::eof();
    setg(buffer_.data(), buffer_.data(), buffer_.data() + n);
    return traits_type::to_int_type(*gptr());
  }

 private:
  gzFile file_;
  std::array<char, 1 << 16> buffer_{};
};

}  // namespace

EmbeddingSet parse_embedding(std::istream& in, std::size_t max_tokens, std::string language_id) {
  if (max_tokens == 0) throw ConfigError("max_tokens must be positive");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);

  std::vector<std::pair<std::size_t, std::size_t>> fields;
  split_fields(line, fields);
  if (fields.size() != 2) throw ParseError("header must be 'count dim'", line_no);
  const std::string_view header(line);
  const std::size_t count =
      parse_positive(header.substr(fields[0].first, fields[0].second - fields[0].first), 1, "count");
  const std::size_t dim =
      parse_positive(header.substr(fields[1].first, fields[1].second - fields[1].first), 1, "dim");

  EmbeddingSet emb;
  emb.language_id = std::move(language_id);
  emb.dim = dim;
  const std::size_t want = std::min(max_tokens, count);
  emb.tokens.reserve(want);
  emb.vectors.reserve(want * dim);
  std::unordered_set<std::string> seen;
  std::size_t rows_read = 0;

  while (emb.tokens.size() < want && rows_read < count && std::getline(in, line)) {
    ++line_no;
    ++rows_read;
    split_fields(line, fields);
    if (fields.size() < dim + 1) {
      throw ParseError("expected a token and " + std::to_string(dim) + " values, got " +
                           std::to_string(fields.size()) + " fields",
                       line_no);
    }
    const std::size_t first_value = fields.size() - dim;
    std::string token(line.substr(fields[0].first, fields[first_value - 1].second - fields[0].first));
    if (!seen.insert(token).second) continue;
    const std::string_view sv(line);
    for (std::size_t k = first_value; k < fields.size(); ++k) {
      const auto field = sv.substr(fields[k].first, fields[k].second - fields[k].first);
      double v;
      if (!parse_double(field, v)) throw ParseError("bad number '" + std::string(field) + "'", line_no);
      if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(field) + "'", line_no);
      emb.vectors.push_back(v);
    }
    emb.tokens.push_back(std::move(token));
  }
  if (in.bad()) throw IoError("read error after line " + std::to_string(line_no));
  if (emb.tokens.size() < want && rows_read < count) {
    throw ParseError("truncated input: header declares " + std::to_string(count) +
                         " rows, found " + std::to_string(rows_read),
                     line_no);
  }
  if (emb.tokens.empty()) throw ParseError("no embedding rows", line_no);
  return emb;
}

EmbeddingSet load_embedding(const std::filesystem::path& path, std::size_t max_tokens,
                            std::string language_id) {
  GzStreamBuf buf(path);
  std::istream in(&buf);
  try {
    return parse_embedding(in, max_tokens, std::move(language_id));
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

void write_embedding(std::ostream& out, const EmbeddingSet& emb) {
  out << emb.size() << ' ' << emb.dim << '\n';
  for (std::size_t i = 0; i < emb.size(); ++i) {
    out << emb.tokens[i];
    for (double v : emb.row(i)) out << ' ' << format_double(v);
    out << '\n';
  }
}

DistanceMatrix pairwise_distances(const EmbeddingSet& emb, Metric metric, int jobs) {
  const std::size_t n = emb.size();
  const std::size_t d = emb.dim;
  std::vector<double> norms;
  if (metric == Metric::Cosine) {
    norms.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (double v : emb.row(i)) s += v * v;
      norms[i] = std::sqrt(s);
      if (norms[i] == 0.0)
        throw DegenerateInputError("zero vector for token '" + emb.tokens[i] +
                                   "' has no cosine distance");
    }
  }
  std::vector<double> entries(n * n, 0.0);
  parallel_for(n, jobs, [&](std::size_t i) {
    const double* a = emb.vectors.data() + i * d;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* b = emb.vectors.data() + j * d;
      double value;
      if (metric == Metric::Euclidean) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double diff = a[k] - b[k];
          s += diff * diff;
        }
        value = std::sqrt(s);
      } else {
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += a[k] * b[k];
        value = std::clamp(1.0 - dot / (norms[i] * norms[j]), 0.0, 2.0);
      }
      entries[i * n + j] = value;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) entries[j * n + i] = entries[i * n + j];
  return DistanceMatrix::unchecked(emb.tokens, std::move(entries));
}

}  // namespace embedshape
