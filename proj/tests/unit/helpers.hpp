#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "embedshape/embedding/distance_matrix.hpp"

namespace testing {

inline std::vector<std::string> numbered(std::size_t n, const std::string& prefix = "p") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Symmetric matrix with U(0,1) off-diagonal entries.
inline embedshape::DistanceMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e[i * n + j] = e[j * n + i] = u(rng);
  return embedshape::DistanceMatrix(numbered(n), std::move(e));
}

inline embedshape::DistanceMatrix euclidean_matrix(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      e[i * n + j] = std::sqrt(s);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e[j * n + i] = e[i * n + j];
  return embedshape::DistanceMatrix(numbered(n), std::move(e));
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("embedshape_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
