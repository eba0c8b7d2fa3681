#include "embedshape/pipeline/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <unordered_set>

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"

namespace embedshape {
namespace {

using json = nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "languages",      "reference_tree", "token_count",     "metrics",     "degrees",
    "diagram_distances", "tree_algorithms", "tree_metrics", "language_counts", "n_permutations",
    "seed",           "sw_slices",      "image",           "ph",          "qap",
    "plots",          "cache_dir",      "output_dir",      "jobs"};

template <class T>
T get(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <class T, class Parse>
std::vector<T> get_list(const json& doc, const char* key, std::vector<T> fallback, Parse parse) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("config key '") + key + "' must be a non-empty list");
  std::vector<T> out;
  for (const auto& item : v) {
    T parsed = parse(item);
    if (std::find(out.begin(), out.end(), parsed) != out.end())
      throw ConfigError(std::string("config key '") + key + "' lists a value twice");
    out.push_back(parsed);
  }
  return out;
}

std::string as_string(const json& v, const char* what) {
  if (!v.is_string()) throw ConfigError(std::string(what) + " must be a string");
  return v.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

void read_image(const json& doc, const char* key, ImageConfig& c) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (v.contains("grid")) c.rows = c.cols = v.at("grid").get<int>();
  if (v.contains("range")) {
    const auto r = v.at("range").get<std::vector<double>>();
    if (r.size() != 2) throw ConfigError("image range must be [min, max]");
    c.range_min = r[0];
    c.range_max = r[1];
  }
  if (v.contains("sigma")) c.sigma = v.at("sigma").get<double>();
  if (!(c.sigma > 0.0)) throw ConfigError(std::string("image.") + key + ".sigma must be positive");
  if (!(c.range_max > c.range_min)) throw ConfigError(std::string("image.") + key + ".range must be increasing");
  if (c.rows < 1) throw ConfigError(std::string("image.") + key + ".grid must be positive");
}

nlohmann::ordered_json image_json(const ImageConfig& c) {
  return {{"grid", c.cols}, {"range", {c.range_min, c.range_max}}, {"sigma", c.sigma}};
}

}  // namespace

ImageConfig RunConfig::image_config(Metric m, int degree) const {
  ImageConfig c = m == Metric::Euclidean ? image_euclidean : image_cosine;
  if (degree == 0) c.rows = 1;
  return c;
}

std::vector<std::size_t> RunConfig::effective_language_counts() const {
  if (language_counts.empty()) return {languages.size()};
  return language_counts;
}

std::size_t RunConfig::planned_trees() const {
  return metrics.size() * degrees.size() * diagram_distances.size() * tree_algorithms.size() *
         effective_language_counts().size();
}

std::size_t RunConfig::planned_reports() const { return planned_trees() * tree_metrics.size(); }

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");

  RunConfig c;
  if (!doc.contains("languages") || !doc.at("languages").is_array() || doc.at("languages").empty())
    throw ConfigError("config needs a non-empty 'languages' list");
  std::unordered_set<std::string> ids;
  for (const auto& item : doc.at("languages")) {
    if (!item.is_object() || !item.contains("id") || !item.contains("path"))
      throw ConfigError("each language needs 'id' and 'path'");
    LanguageInput lang{as_string(item.at("id"), "language id"),
                       resolve(base_dir, as_string(item.at("path"), "language path"))};
    if (lang.id.empty() || lang.id.front() == '.' || lang.id.find_first_of("/\\") != std::string::npos)
      throw ConfigError("language id '" + lang.id + "' is not usable as a file name");
    if (!ids.insert(lang.id).second) throw ConfigError("duplicate language id '" + lang.id + "'");
    c.languages.push_back(std::move(lang));
  }
  if (!doc.contains("reference_tree")) throw ConfigError("config needs 'reference_tree'");
  c.reference_tree_path = resolve(base_dir, as_string(doc.at("reference_tree"), "reference_tree"));

  c.token_count = get<std::size_t>(doc, "token_count", c.token_count);
  if (c.token_count < 2) throw ConfigError("token_count must be at least 2");
  c.metrics = get_list(doc, "metrics", c.metrics, [](const json& v) { return parse_metric(as_string(v, "metric")); });
  c.degrees = get_list(doc, "degrees", c.degrees, [](const json& v) {
    if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 2)
      throw ConfigError("degrees must be integers in 0..2");
    return v.get<int>();
  });
  c.diagram_distances = get_list(doc, "diagram_distances", c.diagram_distances,
                                 [](const json& v) { return parse_diagram_method(as_string(v, "diagram distance")); });
  c.tree_algorithms = get_list(doc, "tree_algorithms", c.tree_algorithms,
                               [](const json& v) { return parse_tree_algorithm(as_string(v, "tree algorithm")); });
  c.tree_metrics = get_list(doc, "tree_metrics", c.tree_metrics,
                            [](const json& v) { return parse_tree_distance(as_string(v, "tree metric")); });
  c.language_counts = get_list(doc, "language_counts", std::vector<std::size_t>{}, [&](const json& v) {
    if (!v.is_number_unsigned() || v.get<std::size_t>() < 1) throw ConfigError("language_counts must be positive integers");
    if (v.get<std::size_t>() > c.languages.size())
      throw ConfigError("language count " + std::to_string(v.get<std::size_t>()) + " exceeds the " +
                        std::to_string(c.languages.size()) + " configured languages");
    return v.get<std::size_t>();
  });
  c.n_permutations = get<std::size_t>(doc, "n_permutations", c.n_permutations);
  if (c.n_permutations < 1) throw ConfigError("n_permutations must be positive");
  c.seed = get<std::uint64_t>(doc, "seed", c.seed);
  c.sw_slices = get<int>(doc, "sw_slices", c.sw_slices);
  if (c.sw_slices < 1) throw ConfigError("sw_slices must be positive");
  if (doc.contains("image")) {
    read_image(doc.at("image"), "euclidean", c.image_euclidean);
    read_image(doc.at("image"), "cosine", c.image_cosine);
  }
  if (doc.contains("ph")) {
    const json& ph = doc.at("ph");
    if (ph.contains("threshold") && !ph.at("threshold").is_null()) {
      c.ph_threshold = ph.at("threshold").get<double>();
      if (!(*c.ph_threshold > 0.0)) throw ConfigError("ph.threshold must be positive");
    }
    c.ph_cap_at_threshold = get<bool>(ph, "cap_at_threshold", false);
  }
  if (doc.contains("qap")) {
    const json& q = doc.at("qap");
    c.qap.enabled = get<bool>(q, "enabled", c.qap.enabled);
    c.qap.restarts = get<std::size_t>(q, "restarts", c.qap.restarts);
    c.qap.stall_limit = get<std::size_t>(q, "stall_limit", c.qap.stall_limit);
    c.qap.n_permutations = get<std::size_t>(q, "n_permutations", c.qap.n_permutations);
    if (c.qap.restarts < 1 || c.qap.stall_limit < 1 || c.qap.n_permutations < 1)
      throw ConfigError("qap parameters must be positive");
  }
  c.plots = get<bool>(doc, "plots", c.plots);
  c.cache_dir = resolve(base_dir, get<std::string>(doc, "cache_dir", c.cache_dir.string()));
  c.output_dir = resolve(base_dir, get<std::string>(doc, "output_dir", c.output_dir.string()));
  c.jobs = get<int>(doc, "jobs", c.jobs);
  if (c.jobs < 1) throw ConfigError("jobs must be positive");
  if (const char* env = std::getenv("EMBEDSHAPE_CACHE"); env && *env) c.cache_dir = std::filesystem::path(env);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(doc, std::filesystem::absolute(path).parent_path());
}

nlohmann::ordered_json run_config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["languages"] = nlohmann::ordered_json::array();
  for (const auto& l : c.languages) j["languages"].push_back({{"id", l.id}, {"path", l.embedding_path.string()}});
  j["reference_tree"] = c.reference_tree_path.string();
  j["token_count"] = c.token_count;
  for (auto m : c.metrics) j["metrics"].push_back(metric_name(m));
  j["degrees"] = c.degrees;
  for (auto m : c.diagram_distances) j["diagram_distances"].push_back(diagram_method_name(m));
  for (auto a : c.tree_algorithms) j["tree_algorithms"].push_back(tree_algorithm_name(a));
  for (auto k : c.tree_metrics) j["tree_metrics"].push_back(tree_distance_name(k));
  j["language_counts"] = c.effective_language_counts();
  j["n_permutations"] = c.n_permutations;
  j["seed"] = c.seed;
  j["sw_slices"] = c.sw_slices;
  j["image"] = {{"euclidean", image_json(c.image_euclidean)}, {"cosine", image_json(c.image_cosine)}};
  j["ph"] = {{"threshold", c.ph_threshold ? nlohmann::ordered_json(*c.ph_threshold) : nlohmann::ordered_json(nullptr)},
             {"cap_at_threshold", c.ph_cap_at_threshold}};
  j["qap"] = {{"enabled", c.qap.enabled},
              {"restarts", c.qap.restarts},
              {"stall_limit", c.qap.stall_limit},
              {"n_permutations", c.qap.n_permutations}};
  j["plots"] = c.plots;
  j["cache_dir"] = c.cache_dir.string();
  j["output_dir"] = c.output_dir.string();
  return j;
}

std::vector<RunConfig> subset_languages(const RunConfig& config, const std::vector<std::size_t>& counts) {
  std::vector<RunConfig> out;
  for (std::size_t count : counts) {
    if (count < 1 || count > config.languages.size())
      throw ConfigError("language count " + std::to_string(count) + " is outside 1.." +
                        std::to_string(config.languages.size()));
    RunConfig derived = config;
    derived.languages.resize(count);
    derived.language_counts = {count};
    out.push_back(std::move(derived));
  }
  return out;
}

PhyloTree restrict_reference(const PhyloTree& reference, const std::vector<std::string>& languages) {
  const auto leaves = reference.leaf_labels();
  const std::unordered_set<std::string> present(leaves.begin(), leaves.end());
  for (const auto& id : languages)
    if (!present.contains(id)) throw LabelMismatchError("language '" + id + "' is not a leaf of the reference tree");
  return reference.restrict_to(languages);
}

}  // namespace embedshape
