#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embedshape/embedding/distance_matrix.hpp"

namespace embedshape {

// Tokens in file (frequency) order and their vectors, row-major V x dim.
struct EmbeddingSet {
  std::string language_id;
  std::vector<std::string> tokens;
  std::size_t dim = 0;
  std::vector<double> vectors;

  std::size_t size() const noexcept { return tokens.size(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {vectors.data() + i * dim, dim};
  }
};

enum class Metric { Euclidean, Cosine };

const char* metric_name(Metric m);
Metric parse_metric(std::string_view name);

// Reads a FastText-style ".vec" stream: a "count dim" header, then one token
// followed by dim reals per line. The token is everything before the last dim
// fields, so tokens may contain spaces. Repeated tokens keep their first
// occurrence and do not count toward max_tokens.
EmbeddingSet parse_embedding(std::istream& in, std::size_t max_tokens,
                             std::string language_id = {});

// Same, from a file that may be gzip-compressed (detected by magic bytes).
// Reading stops as soon as max_tokens rows are collected.
EmbeddingSet load_embedding(const std::filesystem::path& path, std::size_t max_tokens,
                            std::string language_id = {});

// Writes the ".vec" text form with shortest round-trip numbers.
void write_embedding(std::ostream& out, const EmbeddingSet& emb);

// Token-by-token distances. Cosine rejects zero vectors with
// DegenerateInputError and clamps rounding residue into [0, 2].
DistanceMatrix pairwise_distances(const EmbeddingSet& emb, Metric metric, int jobs = 1);

}  // namespace embedshape
