#pragma once

#include <optional>
#include <vector>

#include "toricflow/potential.hpp"

namespace toricflow {

struct NewtonOptions {
  double tol = 1e-10;  // gradient-residual norm
  int max_iters = 50;
  double boundary_fraction = 0.95;  // step cap toward the facets
};

/// One conjugate solve: psi(xi) = <xi, x*> - u(x*) with grad u(x*) = xi.
struct LegendrePoint {
  Vec xi;
  Vec xstar;
  double psi = 0.0;
  double residual = 0.0;
  int iters = 0;
  bool converged = false;
};

/// Kahler potential psi sampled on a xi set, with moment images x = grad psi.
struct KahlerPotentialSamples {
  std::vector<LegendrePoint> points;

  bool all_converged() const;
  /// Largest violation of psi(a) >= psi(b) + <x*(b), a - b> over sample
  /// pairs (supporting-hyperplane form of convexity; <= tol for exact data).
  double convexity_violation() const;
  /// Largest distance below 0 of min_i l_i(x*) (moment images must stay in
  /// the closed polytope).
  double moment_image_violation(const DelzantPolytope& p) const;
  /// max |psi + u(x*) - <xi, x*>| over samples, u supplied by caller.
  double max_fenchel_residual(const SymplecticPotential& sp) const;
};

/// phi(xi) = psi(xi) - psi0(xi) for two potentials over an aligned xi set.
struct RelativePotentialSamples {
  std::vector<Vec> xi;
  std::vector<double> phi;
  const KahlerPotentialSamples* from = nullptr;
  const KahlerPotentialSamples* reference = nullptr;
};

/// Solve grad u(x) = xi for each xi by damped Newton on the strictly concave
/// objective <xi,x> - u(x). Solves run in input order; each warm-starts from
/// the previous solution (first from the barycenter).
KahlerPotentialSamples legendre_to_complex(const SymplecticPotential& sp,
                                           const std::vector<Vec>& xi_set,
                                           const NewtonOptions& opts = {});

RelativePotentialSamples relative_potential(const KahlerPotentialSamples& from,
                                            const KahlerPotentialSamples& reference);

/// Default xi sample set: grad u0 at the interior grid nodes.
std::vector<Vec> default_xi_set(const SymplecticPotential& reference);

}  // namespace toricflow
