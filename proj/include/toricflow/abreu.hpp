#pragma once

#include <vector>

#include "toricflow/potential.hpp"

namespace toricflow {

/// Scalar curvature R_u = -sum_ij d2 W^ij / dx_i dx_j and the inverse-Hessian
/// field W = (D^2 u)^{-1}, both aligned with the grid's in-polytope node list.
/// W extends continuously to the boundary (degenerate along active normals);
/// R near the boundary uses one-sided stencils.
struct CurvatureField {
  std::vector<Mat> W;
  std::vector<double> R;
  double max_W_norm = 0.0;  // largest operator norm over nodes
};

/// W at every in-polytope node. Interior and near-boundary nodes invert the
/// node Hessian; boundary nodes take the constrained limit of the inverse
/// (rows/columns along active facet normals vanish).
std::vector<Mat> inverse_hessian_field(const SymplecticPotential& sp);

CurvatureField scalar_curvature(const SymplecticPotential& sp);

struct MeanCurvature {
  double interior_quadrature = 0.0;  // method A: weighted mean of R over P
  double boundary_formula = 0.0;     // method B: 2 sigma(dP) / mu(P)
};

MeanCurvature mean_curvature(const SymplecticPotential& sp,
                             const CurvatureField& field);

/// Ca(u) = integral over P of (Rbar - R_u)^2, with Rbar from method A and
/// volume-exact interior weights.
double calabi_energy(const SymplecticPotential& sp, const CurvatureField& field);
double calabi_energy(const SymplecticPotential& sp);

}  // namespace toricflow
