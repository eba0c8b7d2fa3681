#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace embedshape {

// Symmetric, nonnegative, zero-diagonal square matrix over unique labels.
// Used for token-to-token and language-to-language distances alike.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  // Validates every invariant; throws InvalidMatrixError on violation.
  DistanceMatrix(std::vector<std::string> labels, std::vector<double> entries);

  // Skips validation. Callers must guarantee the invariants by construction.
  static DistanceMatrix unchecked(std::vector<std::string> labels, std::vector<double> entries);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * labels_.size() + j];
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {entries_.data() + i * labels_.size(), labels_.size()};
  }
  const std::vector<double>& entries() const noexcept { return entries_; }

  // Simultaneous row/column selection in the given order.
  DistanceMatrix select(std::span<const std::size_t> indices) const;

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> entries_;
};

// Throws InvalidMatrixError naming the first violated invariant.
void validate_distance_matrix(std::span<const std::string> labels, std::span<const double> entries);

// CSV: header row of labels, then one row of n values per label.
void write_matrix_csv(std::ostream& out, const DistanceMatrix& m);
DistanceMatrix read_matrix_csv(std::istream& in);

// Binary cache: "ESDM" magic, u32 version, u64 n, n length-prefixed labels,
// then n*n little-endian IEEE-754 doubles row-major.
std::string encode_matrix_binary(const DistanceMatrix& m);
DistanceMatrix decode_matrix_binary(std::string_view bytes);

// Picks the format from the leading magic bytes.
DistanceMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const DistanceMatrix& m);

}  // namespace embedshape
