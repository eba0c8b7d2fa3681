#include "embedshape/pipeline/synthetic.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"
#include "embedshape/common/rng.hpp"

namespace embedshape {
namespace {

// Stream offsets keep template and language draws independent.
constexpr std::uint64_t kTemplateStream = 1ULL << 32;

std::string language_id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "syn%02zu", i);
  return buf;
}

}  // namespace

std::size_t synthetic_group(const SyntheticSpec& spec, std::size_t language) {
  return language * spec.n_templates / spec.n_languages;
}

std::vector<EmbeddingSet> synthesize_languages(const SyntheticSpec& spec) {
  if (spec.n_languages == 0 || spec.n_templates == 0 || spec.n_templates > spec.n_languages || spec.tokens < 2 ||
      spec.dim == 0 || spec.components == 0)
    throw ConfigError("invalid synthetic dataset parameters");

  std::vector<std::vector<double>> templates(spec.n_templates);
  for (std::size_t t = 0; t < spec.n_templates; ++t) {
    Rng rng(spec.seed, kTemplateStream + t);
    templates[t].resize(spec.components * spec.dim);
    for (double& v : templates[t]) v = spec.template_spread * rng.normal();
  }

  std::vector<EmbeddingSet> out;
  for (std::size_t i = 0; i < spec.n_languages; ++i) {
    Rng rng(spec.seed, i);
    std::vector<double> centres = templates[synthetic_group(spec, i)];
    for (double& v : centres) v += spec.language_noise * rng.normal();
    EmbeddingSet emb;
    emb.language_id = language_id(i);
    emb.dim = spec.dim;
    for (std::size_t k = 0; k < spec.tokens; ++k) {
      emb.tokens.push_back("tok" + std::to_string(k));
      const std::size_t c = k % spec.components;
      for (std::size_t j = 0; j < spec.dim; ++j)
        emb.vectors.push_back(centres[c * spec.dim + j] + spec.component_std * rng.normal());
    }
    out.push_back(std::move(emb));
  }
  return out;
}

std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticSpec& spec) {
  const auto languages = synthesize_languages(spec);
  nlohmann::ordered_json config;
  config["languages"] = nlohmann::ordered_json::array();
  std::vector<std::string> clades(spec.n_templates);
  for (std::size_t i = 0; i < languages.size(); ++i) {
    std::ostringstream vec;
    write_embedding(vec, languages[i]);
    const std::string file = languages[i].language_id + ".vec";
    write_file_atomic(dir / file, vec.str());
    config["languages"].push_back({{"id", languages[i].language_id}, {"path", file}});
    auto& clade = clades[synthetic_group(spec, i)];
    clade += (clade.empty() ? "" : ",") + languages[i].language_id;
  }
  std::string newick = "(";
  for (std::size_t t = 0; t < clades.size(); ++t) newick += (t ? ",(" : "(") + clades[t] + ")";
  newick += ");\n";
  write_file_atomic(dir / "reference.nwk", newick);

  config["reference_tree"] = "reference.nwk";
  config["token_count"] = spec.tokens;
  config["degrees"] = {0, 1};
  config["n_permutations"] = 2000;
  config["seed"] = spec.seed;
  config["cache_dir"] = "cache";
  config["output_dir"] = "out";
  const auto path = dir / "config.json";
  write_file_atomic(path, config.dump(2) + "\n");
  return path;
}

}  // namespace embedshape
