#include "embedshape/ph/vietoris_rips.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>

#include "embedshape/common/error.hpp"

namespace embedshape {

double enclosing_radius(const DistanceMatrix& distances) {
  const std::size_t n = distances.size();
  if (n == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = distances.row(i);
    best = std::min(best, *std::max_element(row.begin(), row.end()));
  }
  return best;
}

double effective_threshold(const DistanceMatrix& distances, const VrOptions& options) {
  const double r = enclosing_radius(distances);
  if (options.threshold) {
    if (!(*options.threshold > 0.0)) throw ConfigError("threshold must be positive");
    return std::min(*options.threshold, r);
  }
  return r;
}

namespace {

using index_t = std::int64_t;

// Simplices are addressed by their rank in the combinatorial number system:
// vertices v_0 > v_1 > ... > v_{k-1} map to sum_i C(v_i, k - i).
class Binomials {
 public:
  Binomials(index_t n, int k_max) : k_(k_max), table_((n + 1) * (k_max + 1), 0) {
    for (index_t i = 0; i <= n; ++i) {
      at(i, 0) = 1;
      for (int j = 1; j <= std::min<index_t>(i, k_max); ++j) {
        const index_t left = at(i - 1, j - 1);
        const index_t up = j <= i - 1 ? at(i - 1, j) : 0;
        if (up > std::numeric_limits<index_t>::max() - left)
          throw ConfigError("too many points for simplex indexing at this degree");
        at(i, j) = left + up;
      }
    }
  }
  index_t operator()(index_t n, int k) const { return (k > n) ? 0 : table_[n * (k_ + 1) + k]; }

 private:
  index_t& at(index_t n, int k) { return table_[n * (k_ + 1) + k]; }
  int k_;
  std::vector<index_t> table_;
};

struct Entry {
  double diam;
  index_t index;
};

// Priority order: the top is the earliest simplex in the filtration order
// (diameter ascending, index descending), i.e. the pivot of a coboundary
// column.
struct LaterInFiltration {
  bool operator()(const Entry& a, const Entry& b) const {
    return a.diam > b.diam || (a.diam == b.diam && a.index < b.index);
  }
};

using Heap = std::priority_queue<Entry, std::vector<Entry>, LaterInFiltration>;

std::optional<Entry> pop_pivot(Heap& heap) {
  while (!heap.empty()) {
    Entry pivot = heap.top();
    heap.pop();
    if (heap.empty() || heap.top().index != pivot.index) return pivot;
    heap.pop();  // coefficients are in Z/2: equal entries cancel
  }
  return std::nullopt;
}

std::optional<Entry> get_pivot(Heap& heap) {
  auto pivot = pop_pivot(heap);
  if (pivot) heap.push(*pivot);
  return pivot;
}

class CohomologyReducer {
 public:
  CohomologyReducer(const DistanceMatrix& d, int max_degree, double threshold, bool cap)
      : dist_(d),
        n_(static_cast<index_t>(d.size())),
        threshold_(threshold),
        cap_(cap),
        binom_(n_, max_degree + 2) {}

  std::vector<PersistenceDiagram> run(int max_degree) {
    std::vector<PersistenceDiagram> out;
    for (int k = 0; k <= max_degree; ++k) out.push_back({k, {}});

    std::vector<Entry> simplices;  // every simplex of the current dimension
    std::vector<Entry> columns;    // those still to reduce, after clearing
    degree_zero(simplices, columns, out[0]);

    std::unordered_map<index_t, std::size_t> pivots;
    for (int dim = 1; dim <= max_degree; ++dim) {
      reduce(dim, columns, pivots, out[static_cast<std::size_t>(dim)]);
      if (dim < max_degree) assemble_next(dim, simplices, columns, pivots);
    }
    for (auto& diagram : out) diagram.normalize();
    return out;
  }

 private:
  double d(index_t i, index_t j) const {
    return dist_(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }

  // Largest v <= top with C(v, k) <= idx.
  index_t max_vertex(index_t idx, int k, index_t top) const {
    index_t lo = k - 1, hi = top;
    while (lo < hi) {
      const index_t mid = hi - (hi - lo) / 2;
      if (binom_(mid, k) <= idx) lo = mid;
      else hi = mid - 1;
    }
    return lo;
  }

  // Vertices in decreasing order.
  void vertices_of(index_t idx, int dim, std::vector<index_t>& out) const {
    out.clear();
    index_t top = n_ - 1;
    for (int k = dim + 1; k >= 1; --k) {
      const index_t v = max_vertex(idx, k, top);
      out.push_back(v);
      idx -= binom_(v, k);
      top = v - 1;
    }
  }

  // Calls visit(cofacet) for every cofacet within the threshold, in
  // decreasing index order. With only_larger, only vertices above the
  // current maximum are inserted, which generates each cofacet exactly once
  // across all faces.
  template <class Visit>
  void for_each_cofacet(const Entry& simplex, int dim, bool only_larger, Visit&& visit) {
    vertices_of(simplex.index, dim, verts_);
    const int k = dim + 1;
    // above[m]: contribution of the m largest vertices, shifted up one slot.
    above_.assign(static_cast<std::size_t>(k) + 1, 0);
    below_.assign(static_cast<std::size_t>(k) + 1, 0);
    for (int i = 0; i < k; ++i) above_[i + 1] = above_[i] + binom_(verts_[i], k + 1 - i);
    for (int i = k - 1; i >= 0; --i) below_[i] = below_[i + 1] + binom_(verts_[i], k - i);

    int m = 0;  // vertices of the simplex greater than w
    const index_t stop = only_larger ? verts_[0] + 1 : 0;
    for (index_t w = n_ - 1; w >= stop; --w) {
      if (m < k && verts_[m] == w) {
        ++m;
        continue;
      }
      double diam = simplex.diam;
      bool inside = true;
      for (index_t v : verts_) {
        const double e = d(w, v);
        if (e > threshold_) {
          inside = false;
          break;
        }
        diam = std::max(diam, e);
      }
      if (!inside) continue;
      const index_t idx = above_[m] + binom_(w, k + 1 - m) + below_[m];
      if (!visit(Entry{diam, idx})) return;
    }
  }

  void degree_zero(std::vector<Entry>& edges, std::vector<Entry>& columns,
                   PersistenceDiagram& diagram) {
    edges.clear();
    for (index_t j = 1; j < n_; ++j)
      for (index_t i = 0; i < j; ++i)
        if (d(i, j) <= threshold_) edges.push_back({d(i, j), binom_(j, 2) + i});
    std::vector<Entry> order = edges;
    std::sort(order.begin(), order.end(),
              [](const Entry& a, const Entry& b) { return LaterInFiltration{}(b, a); });

    std::vector<index_t> parent(static_cast<std::size_t>(n_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](index_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    index_t components = n_;
    columns.clear();
    for (const Entry& e : order) {
      vertices_of(e.index, 1, verts_);
      const index_t a = find(verts_[0]), b = find(verts_[1]);
      if (a != b) {
        parent[std::max(a, b)] = std::min(a, b);
        --components;
        if (e.diam > 0.0) diagram.bars.push_back({0.0, e.diam});
      } else {
        columns.push_back(e);
      }
    }
    if (cap_ && threshold_ > 0.0)
      for (index_t c = 1; c < components; ++c) diagram.bars.push_back({0.0, threshold_});
    std::reverse(columns.begin(), columns.end());
  }

  void reduce(int dim, const std::vector<Entry>& columns,
              std::unordered_map<index_t, std::size_t>& pivots, PersistenceDiagram& diagram) {
    pivots.clear();
    pivots.reserve(columns.size());
    std::vector<std::vector<Entry>> reduction(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const Entry column = columns[j];
      Heap coboundary;
      Heap working_reduction;

      // Build the coboundary, stopping early when the earliest cofacet is an
      // unclaimed pivot with the same diameter (an emergent pair).
      std::optional<Entry> pivot;
      bool check_emergent = true;
      bool emergent = false;
      for_each_cofacet(column, dim, false, [&](const Entry& c) {
        if (check_emergent && c.diam == column.diam) {
          if (!pivots.contains(c.index)) {
            pivot = c;
            emergent = true;
            return false;
          }
          check_emergent = false;
        }
        coboundary.push(c);
        return true;
      });
      if (!emergent) pivot = get_pivot(coboundary);

      for (;;) {
        if (!pivot) {
          if (cap_ && column.diam < threshold_) diagram.bars.push_back({column.diam, threshold_});
          break;
        }
        auto it = pivots.find(pivot->index);
        if (it == pivots.end()) {
          if (pivot->diam > column.diam) diagram.bars.push_back({column.diam, pivot->diam});
          pivots.emplace(pivot->index, j);
          while (auto e = pop_pivot(working_reduction)) reduction[j].push_back(*e);
          break;
        }
        const std::size_t other = it->second;
        auto add = [&](const Entry& s) {
          working_reduction.push(s);
          for_each_cofacet(s, dim, false, [&](const Entry& c) {
            coboundary.push(c);
            return true;
          });
        };
        add(columns[other]);
        for (const Entry& s : reduction[other]) add(s);
        pivot = get_pivot(coboundary);
      }
    }
  }

  void assemble_next(int dim, std::vector<Entry>& simplices, std::vector<Entry>& columns,
                     const std::unordered_map<index_t, std::size_t>& pivots) {
    std::vector<Entry> next;
    columns.clear();
    for (const Entry& s : simplices) {
      for_each_cofacet(s, dim, true, [&](const Entry& c) {
        next.push_back(c);
        if (!pivots.contains(c.index)) columns.push_back(c);
        return true;
      });
    }
    simplices.swap(next);
    // Reverse filtration order: diameter descending, index ascending.
    std::sort(columns.begin(), columns.end(), LaterInFiltration{});
  }

  const DistanceMatrix& dist_;
  index_t n_;
  double threshold_;
  bool cap_;
  Binomials binom_;
  std::vector<index_t> verts_;
  std::vector<index_t> above_, below_;
};

}  // namespace

std::vector<PersistenceDiagram> vr_persistence(const DistanceMatrix& distances,
                                               const VrOptions& options) {
  if (distances.size() == 0) throw EmptyInputError("distance matrix has no points");
  if (options.max_degree < 0 || options.max_degree > 2)
    throw ConfigError("max_degree must be 0, 1 or 2");
  const double threshold = effective_threshold(distances, options);
  CohomologyReducer reducer(distances, options.max_degree, threshold, options.cap_at_threshold);
  return reducer.run(options.max_degree);
}

}  // namespace embedshape
