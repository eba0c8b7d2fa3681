#include "embedshape/common/error.hpp"
#include "embedshape/common/rng.hpp"
#include "embedshape/significance/significance.hpp"

namespace embedshape {

nlohmann::ordered_json report_to_json(const SignificanceReport& r) {
  nlohmann::ordered_json j;
  j["metric_kind"] = r.metric_kind;
  j["observed"] = r.observed;
  j["perm_mean"] = r.perm_mean;
  j["perm_std"] = r.perm_std;
  j["z_score"] = r.z_defined ? nlohmann::ordered_json(r.z_score) : nlohmann::ordered_json(nullptr);
  j["z_defined"] = r.z_defined;
  j["rank"] = r.rank;
  j["n_strictly_better"] = r.n_strictly_better;
  j["n_ties"] = r.n_ties;
  j["n_permutations"] = r.n_permutations;
  j["rank_p_value"] = r.rank_p_value;
  j["higher_is_better"] = r.higher_is_better;
  j["seed"] = r.seed;
  j["generator"] = kGeneratorId;
  j["version"] = EMBEDSHAPE_VERSION;
  j["metadata"] = r.metadata;
  return j;
}

SignificanceReport report_from_json(const nlohmann::ordered_json& j) {
  try {
    SignificanceReport r;
    r.metric_kind = j.at("metric_kind").get<std::string>();
    r.observed = j.at("observed").get<double>();
    r.perm_mean = j.at("perm_mean").get<double>();
    r.perm_std = j.at("perm_std").get<double>();
    r.z_defined = j.at("z_defined").get<bool>();
    if (r.z_defined) r.z_score = j.at("z_score").get<double>();
    r.rank = j.at("rank").get<std::size_t>();
    r.n_strictly_better = j.at("n_strictly_better").get<std::size_t>();
    r.n_ties = j.at("n_ties").get<std::size_t>();
    r.n_permutations = j.at("n_permutations").get<std::size_t>();
    r.rank_p_value = j.at("rank_p_value").get<double>();
    r.higher_is_better = j.value("higher_is_better", false);
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("metadata")) r.metadata = j.at("metadata");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed significance report: ") + e.what());
  }
}

nlohmann::ordered_json labeling_to_json(const LabelingResult& r) {
  nlohmann::ordered_json j;
  j["correlation"] = r.correlation;
  j["restarts"] = r.restarts;
  j["flips_accepted"] = r.flips_accepted;
  nlohmann::ordered_json assignment = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < r.positions.size(); ++i) assignment[r.positions[i]] = r.permutation[i];
  j["assignment"] = assignment;
  return j;
}

}  // namespace embedshape
