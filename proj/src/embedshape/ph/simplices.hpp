#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "embedshape/embedding/distance_matrix.hpp"
#include "embedshape/ph/persistence_diagram.hpp"

namespace embedshape {

// A simplex of the Vietoris-Rips filtration: its value is the largest
// pairwise distance among its vertices (0 for a vertex).
struct FilteredSimplex {
  std::vector<int> vertices;  // strictly increasing
  double value = 0.0;

  int dim() const noexcept { return static_cast<int>(vertices.size()) - 1; }
  friend bool operator==(const FilteredSimplex&, const FilteredSimplex&) = default;
};

// The canonical reduction order: value, then dimension, then vertex tuple.
bool canonical_less(const FilteredSimplex& a, const FilteredSimplex& b);

// Every simplex of dimension <= max_dim (at most 3) whose value is
// <= threshold, in canonical order.
std::vector<FilteredSimplex> enumerate_simplices(const DistanceMatrix& distances, int max_dim,
                                                 double threshold);

struct PersistencePairing {
  // (birth index, death index) into the simplex list.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  // Simplices that create essential classes.
  std::vector<std::size_t> unpaired;
};

// Standard Z/2 column reduction of the boundary matrix of an explicitly listed
// complex, highest dimension first with clearing. The list must be closed
// under faces and in canonical order; a face that is missing or listed after
// its coface raises InconsistentComplexError.
PersistencePairing reduce_boundary_matrix(std::span<const FilteredSimplex> simplices);

// Finite, positive-persistence bars of each degree 0..max_degree.
std::vector<PersistenceDiagram> diagrams_from_pairing(std::span<const FilteredSimplex> simplices,
                                                      const PersistencePairing& pairing,
                                                      int max_degree);

}  // namespace embedshape
