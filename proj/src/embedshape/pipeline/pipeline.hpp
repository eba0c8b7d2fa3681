#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "embedshape/pipeline/config.hpp"

namespace embedshape {

enum class Stage { Ingest, Diagrams, LanguageDistances, Trees, Evaluate, Qap, All };

const char* stage_name(Stage s);

// Runs the grid up to `stop` (All = evaluation plus QAP when enabled),
// reusing cached artifacts keyed by content hashes. Failures are recorded per
// (combination, tree metric) and never abort the run. Writes and returns the
// manifest (output_dir/manifest.json).
nlohmann::ordered_json run_pipeline(const RunConfig& config, Stage stop = Stage::All);

// Hash of the parameters that determine outputs (paths to caches and
// outputs, and job counts, are excluded).
std::string config_hash(const RunConfig& config);

}  // namespace embedshape
