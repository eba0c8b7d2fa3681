#include "embedshape/embedding/distance_matrix.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"
#include "embedshape/common/numfmt.hpp"

namespace embedshape {

void validate_distance_matrix(std::span<const std::string> labels,
                              std::span<const double> entries) {
  const std::size_t n = labels.size();
  if (entries.size() != n * n) {
    throw InvalidMatrixError("expected " + std::to_string(n * n) + " entries for " +
                             std::to_string(n) + " labels, got " +
                             std::to_string(entries.size()));
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw InvalidMatrixError("duplicate label '" + l + "'");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i * n + i] != 0.0)
      throw InvalidMatrixError("nonzero diagonal at '" + labels[i] + "'");
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = entries[i * n + j];
      const double b = entries[j * n + i];
      if (!std::isfinite(a) || !std::isfinite(b))
        throw InvalidMatrixError("non-finite entry at (" + labels[i] + ", " + labels[j] + ")");
      if (a < 0.0 || b < 0.0)
        throw InvalidMatrixError("negative entry at (" + labels[i] + ", " + labels[j] + ")");
      if (a != b)
        throw InvalidMatrixError("matrix is not symmetric at (" + labels[i] + ", " +
                                 labels[j] + ")");
    }
  }
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<double> entries) {
  validate_distance_matrix(labels, entries);
  labels_ = std::move(labels);
  entries_ = std::move(entries);
}

DistanceMatrix DistanceMatrix::unchecked(std::vector<std::string> labels,
                                         std::vector<double> entries) {
  DistanceMatrix m;
  m.labels_ = std::move(labels);
  m.entries_ = std::move(entries);
  return m;
}

DistanceMatrix DistanceMatrix::select(std::span<const std::size_t> indices) const {
  std::vector<std::string> labels;
  labels.reserve(indices.size());
  std::vector<double> entries(indices.size() * indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a) {
    labels.push_back(labels_.at(indices[a]));
    for (std::size_t b = 0; b < indices.size(); ++b)
      entries[a * indices.size() + b] = (*this)(indices[a], indices[b]);
  }
  return DistanceMatrix(std::move(labels), std::move(entries));
}

void write_matrix_csv(std::ostream& out, const DistanceMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out << ',';
    out << csv_escape(m.label(i));
  }
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

DistanceMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty matrix CSV");
  std::vector<std::string> labels = csv_split_line(line);
  if (labels.size() == 1 && labels[0].empty()) labels.clear();
  const std::size_t n = labels.size();
  std::vector<double> entries;
  entries.reserve(n * n);
  std::size_t line_no = 1;
  for (std::size_t i = 0; i < n; ++i) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError("missing matrix row", line_no);
    auto fields = csv_split_line(line);
    if (fields.size() != n)
      throw ParseError("expected " + std::to_string(n) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    for (const auto& f : fields) {
      double v;
      if (!parse_double(f, v)) throw ParseError("bad number '" + f + "'", line_no);
      entries.push_back(v);
    }
  }
  return DistanceMatrix(std::move(labels), std::move(entries));
}

namespace {

constexpr char kMagic[4] = {'E', 'S', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  std::uint64_t u(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::string_view take(std::size_t len) {
    need(len);
    auto s = bytes_.substr(pos_, len);
    pos_ += len;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t len) const {
    if (bytes_.size() - pos_ < len) throw ParseError("truncated binary matrix");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_matrix_binary(const DistanceMatrix& m) {
  std::string out(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, m.size());
  for (const auto& l : m.labels()) {
    put_u32(out, static_cast<std::uint32_t>(l.size()));
    out += l;
  }
  out.reserve(out.size() + 8 * m.entries().size());
  for (double v : m.entries()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

DistanceMatrix decode_matrix_binary(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(4) != std::string_view(kMagic, 4)) throw ParseError("not a binary matrix");
  if (r.u(4) != kVersion) throw ParseError("unsupported binary matrix version");
  const std::uint64_t n = r.u(8);
  if (n > (bytes.size() / 8)) throw ParseError("binary matrix size field is corrupt");
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = r.u(4);
    labels.emplace_back(r.take(len));
  }
  std::vector<double> entries(n * n);
  for (auto& v : entries) v = std::bit_cast<double>(r.u(8));
  if (!r.done()) throw ParseError("trailing bytes after binary matrix");
  return DistanceMatrix(std::move(labels), std::move(entries));
}

DistanceMatrix load_matrix(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 4 && bytes.compare(0, 4, kMagic, 4) == 0) return decode_matrix_binary(bytes);
  std::istringstream in(bytes);
  try {
    return read_matrix_csv(in);
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

void save_matrix(const std::filesystem::path& path, const DistanceMatrix& m) {
  if (path.extension() == ".bin") {
    write_file_atomic(path, encode_matrix_binary(m));
    return;
  }
  std::ostringstream out;
  write_matrix_csv(out, m);
  write_file_atomic(path, out.str());
}

}  // namespace embedshape
