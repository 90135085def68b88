#pragma once

#include <cstdint>
#include <iterator>
#include <vector>

#include <Eigen/Dense>

#include "polyinf/data_model.hpp"
#include "polyinf/feasible_set.hpp"

namespace polyinf {

enum class VertexAlgorithm {
  /// Subset enumeration for dim <= 6, double description above.
  kAuto,
  /// Intersect every dim-subset of hyperplanes and keep the feasible points.
  kHyperplaneSubsets,
  /// Incremental double description on the homogenized cone.
  kDoubleDescription,
};

struct VertexOptions {
  double tol = 1e-9;
  VertexAlgorithm algorithm = VertexAlgorithm::kAuto;
};

/// Vertices of a bounded, non-empty row polyhedron. Throws UnsupportedError
/// for unbounded rows and std::domain_error for empty ones.
std::vector<VectorXd> enumerate_row_vertices(const RowPolyhedron& row,
                                             const VertexOptions& opts = {});

/// Per-row vertex lists of a bounded feasible set. The vertices of the set
/// itself are all combinations that pick one vertex per row.
struct VertexSet {
  int n = 0;
  int m = 0;
  std::vector<std::vector<VectorXd>> per_row;

  /// Number of product vertices L = prod_j L_j.
  std::uint64_t count() const;

  /// Product vertex k in lexicographic order (row 0 most significant).
  SystemPair system_at(std::uint64_t k) const;
  /// [A B] of product vertex k.
  MatrixXd stacked_at(std::uint64_t k) const;

  class Iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = SystemPair;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = SystemPair;

    Iterator(const VertexSet* set, std::uint64_t k) : set_(set), k_(k) {}
    SystemPair operator*() const { return set_->system_at(k_); }
    Iterator& operator++() {
      ++k_;
      return *this;
    }
    Iterator operator++(int) {
      Iterator old = *this;
      ++k_;
      return old;
    }
    bool operator==(const Iterator& o) const { return k_ == o.k_ && set_ == o.set_; }
    bool operator!=(const Iterator& o) const { return !(*this == o); }

   private:
    const VertexSet* set_;
    std::uint64_t k_;
  };

  Iterator begin() const { return {this, 0}; }
  Iterator end() const { return {this, count()}; }
};

/// Enumerates every row of a bounded set; throws UnsupportedError otherwise.
VertexSet enumerate_vertices(const FeasibleSet& set, const VertexOptions& opts = {});

/// A view over all product vertices as SystemPair values.
inline const VertexSet& product_vertices(const VertexSet& vs) { return vs; }

/// Orthonormal basis (columns) of ker G'. Computed with a rank-revealing LU,
/// independently of the singular-value test in build_feasible_set.
MatrixXd recession_directions(const RowPolyhedron& row, double tol = 1e-10);

/// Drops one-sided inequalities implied by the others (LP test per
/// inequality). Dropped sides become +-infinity; instruments with both sides
/// dropped are removed from G.
RowPolyhedron remove_redundant(const RowPolyhedron& row, double tol = 1e-9);

}  // namespace polyinf
