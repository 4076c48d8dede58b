#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "toricflow/hermite.hpp"

namespace toricflow {

/// Symplectic potential u(x) = (1/2) sum_i l_i ln l_i + f(x) with Guillemin
/// boundary behavior. The singular canonical part is always evaluated in
/// closed form; only the smooth correction f lives on the grid (and is
/// interpolated off-node). Immutable after construction.
class SymplecticPotential {
 public:
  SymplecticPotential(std::shared_ptr<const PolytopeGrid> grid,
                      std::vector<double> smooth_part);
  /// Canonical potential: f == 0.
  static SymplecticPotential canonical(std::shared_ptr<const PolytopeGrid> grid);
  /// f sampled from a callable over in-polytope nodes.
  static SymplecticPotential from_function(
      std::shared_ptr<const PolytopeGrid> grid,
      const std::function<double(const Vec&)>& f);

  const PolytopeGrid& grid() const { return *grid_; }
  std::shared_ptr<const PolytopeGrid> grid_ptr() const { return grid_; }
  const DelzantPolytope& polytope() const { return grid_->polytope(); }
  bool canonical_only() const { return canonical_only_; }

  const std::vector<double>& smooth_part() const { return f_; }
  double f_at(int node) const { return f_[grid_->inpoly_id(node)]; }

  // Closed-form canonical pieces (x strictly interior for grad/hess).
  double canonical_value(const Vec& x) const;
  Vec canonical_gradient(const Vec& x) const;
  Mat canonical_hessian(const Vec& x) const;

  // Smooth evaluation anywhere in the interior: canonical + interpolated f.
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  /// u at a lattice node (canonical is finite on the closed polytope).
  double value_node(int node) const;

  /// Node Hessian: analytic canonical + finite differences of f. Node must
  /// have min_l > 0.
  Mat hessian_node(int node) const;
  /// The finite-difference Hessian of the smooth part alone, defined at every
  /// in-polytope node. Uniform centered stencils over a cubic ghost extension
  /// of f; stencil-shape changes near staircase boundaries would otherwise
  /// feed first-order kinks into the inverse-Hessian field.
  Mat f_hessian_node(int node) const;

  /// u - u(x0) - <grad u(x0), x - x0>; normalized so u(x0)=0, grad u(x0)=0.
  SymplecticPotential normalized_at(const Vec& x0) const;
  /// u + c applied through the smooth part.
  SymplecticPotential shifted(double c) const;

  /// True when hessian_node is positive definite at every node with
  /// min_l > 0; `where` (optional) receives the first offending node.
  bool convex_on_grid(int* where = nullptr) const;

 private:
  std::shared_ptr<const PolytopeGrid> grid_;
  std::vector<double> f_;
  bool canonical_only_ = false;
  // Built on first off-node evaluation; flow stages never need it.
  mutable std::shared_ptr<const HermiteField> interp_;
  // Ghost-extended f for node Hessians, built on first use.
  mutable std::shared_ptr<const std::vector<double>> ext_f_;

  const HermiteField& interp() const;
  const std::vector<double>& ext_f() const;
  double f_d2(int node, int a, int b) const;
};

/// Snapshot file: grid header + flat f array, full 17-digit round-trip.
struct SnapshotFile {
  std::string polytope_name;  // preset name or "custom"
  std::string polytope_text;
  double h = 0.0;
  double t = 0.0;
  double newton_tol = 1e-10;  // solver tolerance the run's analyses used
  std::vector<double> f;
};

std::string write_snapshot(const SymplecticPotential& sp, double t,
                           const std::string& polytope_name,
                           double newton_tol = 1e-10);
SnapshotFile parse_snapshot(const std::string& text);
/// Rebuild grid + potential from a parsed snapshot.
SymplecticPotential load_snapshot(const SnapshotFile& s,
                                  std::shared_ptr<const PolytopeGrid>* grid_out = nullptr);

std::string format_double(double v);

}  // namespace toricflow
