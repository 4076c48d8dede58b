#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "toricflow/delzant.hpp"

namespace toricflow {

enum class NodeClass : unsigned char {
  kInterior,      // min_i l_i >= h/2
  kNearBoundary,  // 0 < min_i l_i < h/2
  kBoundary,      // min_i l_i == 0 (on the boundary)
  kOutside,       // min_i l_i < 0
};

/// One finite-difference tap: node offset along an axis and its coefficient
/// (h-powers already folded in).
struct Stencil1D {
  std::vector<std::pair<int, double>> taps;
  bool ok = false;
};

/// Uniform axis-aligned lattice over the bounding box of P, lexicographic
/// node order (axis 0 most significant). Immutable after construction.
class PolytopeGrid {
 public:
  PolytopeGrid(std::shared_ptr<const DelzantPolytope> poly, double h);

  const DelzantPolytope& polytope() const { return *poly_; }
  std::shared_ptr<const DelzantPolytope> polytope_ptr() const { return poly_; }
  double h() const { return h_; }
  int dim() const { return poly_->dim(); }
  const Vec& lo() const { return lo_; }
  const std::vector<int>& dims() const { return dims_; }
  int node_count() const { return total_; }

  int index(const std::vector<int>& k) const;
  std::vector<int> multi_index(int node) const;
  Vec coord(int node) const;
  NodeClass node_class(int node) const { return klass_[node]; }
  double min_l(int node) const { return min_l_[node]; }
  bool in_polytope(int node) const {
    return klass_[node] != NodeClass::kOutside;
  }

  /// Offset a node by +-steps along one axis; -1 when leaving the lattice.
  int neighbor(int node, int axis, int steps) const;

  const std::vector<int>& interior_nodes() const { return interior_; }
  const std::vector<int>& inpoly_nodes() const { return inpoly_; }
  /// Compact index over in-polytope nodes (f storage order); -1 outside.
  int inpoly_id(int node) const { return inpoly_id_[node]; }

  /// Cut-cell midpoint weights for interior nodes, aligned with
  /// interior_nodes(); raw (not volume-renormalized).
  const std::vector<double>& weights() const { return weights_; }
  double weight_sum() const { return weight_sum_; }
  /// Quadrature coverage ratio sum(w)/mu(P).
  double coverage() const { return weight_sum_ / volume_; }
  double volume() const { return volume_; }
  /// Weight renormalized so the total equals mu(P) exactly.
  double mu_weight(int which_interior) const {
    return weights_[which_interior] * volume_ / weight_sum_;
  }

  /// Derivative stencils along an axis; `usable(node)` gates which lattice
  /// neighbors may be tapped. Centered first, then one-sided fallbacks.
  Stencil1D d1_stencil(int node, int axis,
                       const std::function<bool(int)>& usable) const;
  Stencil1D d2_stencil(int node, int axis,
                       const std::function<bool(int)>& usable) const;

  int multi_axis(int node, int axis) const {
    return (node / strides_[axis]) % dims_[axis];
  }

 private:
  std::shared_ptr<const DelzantPolytope> poly_;
  double h_;
  Vec lo_, hi_;
  std::vector<int> dims_;
  std::vector<int> strides_;
  int total_ = 0;
  std::vector<NodeClass> klass_;
  std::vector<double> min_l_;
  std::vector<int> interior_;
  std::vector<int> inpoly_;
  std::vector<int> inpoly_id_;
  std::vector<double> weights_;
  double weight_sum_ = 0.0;
  double volume_ = 0.0;

  double cell_volume_clipped(int node) const;
  void check_interior_connected() const;
};

/// Lattice extended by one ghost ring beyond the bounding box, used to give
/// every in-polytope node a complete centered-stencil neighborhood. Field
/// values on unset nodes come from axis-wise polynomial extrapolation.
struct ExtendedLattice {
  int n = 0;
  std::vector<int> dims;
  std::vector<int> strides;
  int total = 0;

  explicit ExtendedLattice(const PolytopeGrid& g);
  /// Index of a grid multi-index (each component shifted by the ghost ring).
  int index(const std::vector<int>& k) const {
    int id = 0;
    for (int a = 0; a < n; ++a) id += (k[a] + 1) * strides[a];
    return id;
  }
  int shift(int id, int axis, int steps) const {
    return id + steps * strides[axis];
  }
  int axis_pos(int id, int axis) const {
    return (id / strides[axis]) % dims[axis];
  }
};

/// Fill unset entries by extrapolation along the axes, highest order the
/// data supports first (`order` = max stencil width - 1; 3 = cubic). Several
/// passes handle staircase corners. Directions are averaged.
void fill_lattice_ghosts(const ExtendedLattice& ext, std::vector<double>& v,
                         std::vector<char>& set, int order);

}  // namespace toricflow
