#pragma once

#include <optional>
#include <vector>

#include "embedshape/embedding/distance_matrix.hpp"
#include "embedshape/ph/persistence_diagram.hpp"

namespace embedshape {

struct VrOptions {
  int max_degree = 1;  // 0, 1 or 2
  // Caps the filtration; the effective cap is min(threshold, enclosing radius).
  std::optional<double> threshold;
  // Report classes still alive at the cap as dying at the cap instead of
  // dropping them.
  bool cap_at_threshold = false;
};

// Smallest r such that some point is within r of every other point. Above it
// the Vietoris-Rips complex is a cone and all homology is trivial.
double enclosing_radius(const DistanceMatrix& distances);

double effective_threshold(const DistanceMatrix& distances, const VrOptions& options);

// Vietoris-Rips persistence diagrams in degrees 0..max_degree. Degree 0 comes
// from a Kruskal pass; higher degrees from persistent cohomology with
// implicitly generated coboundaries, clearing and emergent-pair shortcuts.
// Essential and zero-length bars are excluded.
std::vector<PersistenceDiagram> vr_persistence(const DistanceMatrix& distances,
                                               const VrOptions& options);

}  // namespace embedshape
