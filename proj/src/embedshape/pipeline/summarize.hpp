#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "embedshape/significance/significance.hpp"

namespace embedshape {

inline constexpr double kPThresholds[] = {0.1, 0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001};

// One-sided normal tail P(Z > z) multiplied by the number of tests, capped at 1.
double bonferroni_p(double z, std::size_t n_tests);

// p reported for a rank: never below 1/n, where no permutation beat the
// observed value.
double floored_p_value(const SignificanceReport& r);

struct Summary {
  nlohmann::ordered_json json;
  std::string markdown;
};

// Tables over tree-distance reports: counts beyond z thresholds 1..6 and
// within the rank-p thresholds, per tree metric; mean z per parameter in
// three blocks (metric and degree, diagram distance, tree algorithm); and
// the Bonferroni-corrected tail probability of the largest z.
// Throws EmptyInputError when no report is given.
Summary summarize_reports(std::span<const SignificanceReport> reports);

// Reports from a manifest file or from every report JSON under a directory,
// in path order.
std::vector<SignificanceReport> load_reports(const std::filesystem::path& source);

}  // namespace embedshape
