#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "embedshape/embedding/embedding.hpp"

namespace embedshape {

// Languages as seeded Gaussian mixtures: each draws from one of n_templates
// mixture templates (contiguous groups of languages share one), with its own
// jitter of the component centres.
struct SyntheticSpec {
  std::size_t n_languages = 8;
  std::size_t n_templates = 2;
  std::size_t tokens = 200;
  std::size_t dim = 16;
  std::size_t components = 4;
  double template_spread = 3.0;  // std of component centres
  double component_std = 1.0;
  double language_noise = 0.3;   // std of per-language centre jitter
  std::uint64_t seed = 0;
};

std::vector<EmbeddingSet> synthesize_languages(const SyntheticSpec& spec);

// Template group of language i.
std::size_t synthetic_group(const SyntheticSpec& spec, std::size_t language);

// Writes <id>.vec per language, reference.nwk (one flat clade per template)
// and config.json running the grid on them; returns the config path.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticSpec& spec);

}  // namespace embedshape
