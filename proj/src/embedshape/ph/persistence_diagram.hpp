#pragma once

#include <iosfwd>
#include <vector>

namespace embedshape {

struct Bar {
  double birth = 0.0;
  double death = 0.0;
  double persistence() const noexcept { return death - birth; }
  friend auto operator<=>(const Bar&, const Bar&) = default;
};

// Finite bars of one homological degree. Bars with birth == death and
// essential (never-dying) classes are not stored.
struct PersistenceDiagram {
  int degree = 0;
  std::vector<Bar> bars;

  bool empty() const noexcept { return bars.empty(); }
  std::size_t size() const noexcept { return bars.size(); }
  // Bars sorted by (birth, death); multiset comparison is then ==.
  void normalize();
  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;
};

// CSV with header "degree,birth,death", rows sorted by degree, birth, death,
// shortest round-trip decimal numbers. Reading returns diagrams for degrees
// 0..max(max_degree, largest degree present).
void write_diagrams_csv(std::ostream& out, const std::vector<PersistenceDiagram>& diagrams);
std::vector<PersistenceDiagram> read_diagrams_csv(std::istream& in, int max_degree = -1);

}  // namespace embedshape
