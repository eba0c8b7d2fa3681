#include "embedshape/ph/simplices.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "embedshape/common/error.hpp"

namespace embedshape {

bool canonical_less(const FilteredSimplex& a, const FilteredSimplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
  return a.vertices < b.vertices;
}

std::vector<FilteredSimplex> enumerate_simplices(const DistanceMatrix& distances, int max_dim,
                                                 double threshold) {
  if (max_dim < 0 || max_dim > 3) throw ConfigError("max_dim must be in 0..3");
  const int n = static_cast<int>(distances.size());
  std::vector<FilteredSimplex> out;
  FilteredSimplex current;

  // Depth-first extension by larger vertices keeps every tuple sorted and
  // prunes as soon as a pairwise distance exceeds the threshold.
  auto extend = [&](auto&& self, double value) -> void {
    out.push_back({current.vertices, value});
    if (current.dim() == max_dim) return;
    for (int v = current.vertices.back() + 1; v < n; ++v) {
      double next = value;
      bool ok = true;
      for (int u : current.vertices) {
        const double d = distances(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
        if (d > threshold) {
          ok = false;
          break;
        }
        next = std::max(next, d);
      }
      if (!ok) continue;
      current.vertices.push_back(v);
      self(self, next);
      current.vertices.pop_back();
    }
  };
  if (threshold >= 0.0) {
    for (int v = 0; v < n; ++v) {
      current.vertices.assign(1, v);
      extend(extend, 0.0);
    }
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

namespace {

// Symmetric difference of two sorted index columns.
void add_column(std::vector<std::size_t>& target, const std::vector<std::size_t>& source,
                std::vector<std::size_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

std::string describe(const FilteredSimplex& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s.vertices[i]);
  }
  return out + "}";
}

}  // namespace

PersistencePairing reduce_boundary_matrix(std::span<const FilteredSimplex> simplices) {
  const std::size_t m = simplices.size();
  std::map<std::vector<int>, std::size_t> position;
  int top_dim = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (simplices[i].vertices.empty())
      throw InconsistentComplexError("empty simplex at position " + std::to_string(i));
    if (!position.emplace(simplices[i].vertices, i).second)
      throw InconsistentComplexError("duplicate simplex " + describe(simplices[i]));
    top_dim = std::max(top_dim, simplices[i].dim());
  }

  // Boundary columns as sorted row indices.
  std::vector<std::vector<std::size_t>> boundary(m);
  std::vector<int> face;
  for (std::size_t j = 0; j < m; ++j) {
    const auto& s = simplices[j];
    if (s.dim() == 0) continue;
    for (std::size_t drop = 0; drop < s.vertices.size(); ++drop) {
      face.clear();
      for (std::size_t k = 0; k < s.vertices.size(); ++k)
        if (k != drop) face.push_back(s.vertices[k]);
      auto it = position.find(face);
      if (it == position.end() || it->second > j) {
        FilteredSimplex f{face, 0.0};
        throw InconsistentComplexError("face " + describe(f) + " of " + describe(s) +
                                       (it == position.end() ? " is missing"
                                                             : " appears after its coface"));
      }
      boundary[j].push_back(it->second);
    }
    std::sort(boundary[j].begin(), boundary[j].end());
  }

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pivot_owner(m, kNone);
  std::vector<bool> cleared(m, false);
  std::vector<bool> paired(m, false);
  std::vector<std::size_t> scratch;
  PersistencePairing result;

  for (int dim = top_dim; dim >= 1; --dim) {
    for (std::size_t j = 0; j < m; ++j) {
      if (simplices[j].dim() != dim || cleared[j]) continue;
      auto& column = boundary[j];
      while (!column.empty() && pivot_owner[column.back()] != kNone)
        add_column(column, boundary[pivot_owner[column.back()]], scratch);
      if (column.empty()) continue;
      const std::size_t low = column.back();
      pivot_owner[low] = j;
      cleared[low] = true;
      paired[low] = paired[j] = true;
      result.pairs.emplace_back(low, j);
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    if (!paired[i]) result.unpaired.push_back(i);
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

std::vector<PersistenceDiagram> diagrams_from_pairing(std::span<const FilteredSimplex> simplices,
                                                      const PersistencePairing& pairing,
                                                      int max_degree) {
  std::vector<PersistenceDiagram> out;
  for (int d = 0; d <= max_degree; ++d) out.push_back({d, {}});
  for (auto [b, d] : pairing.pairs) {
    const int degree = simplices[b].dim();
    if (degree > max_degree) continue;
    const double birth = simplices[b].value;
    const double death = simplices[d].value;
    if (birth < death) out[static_cast<std::size_t>(degree)].bars.push_back({birth, death});
  }
  for (auto& diagram : out) diagram.normalize();
  return out;
}

}  // namespace embedshape
