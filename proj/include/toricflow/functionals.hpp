#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toricflow/abreu.hpp"
#include "toricflow/legendre.hpp"

namespace toricflow {

/// Pushforward normalization: integral over X of G(m(z)) w^n equals
/// kappa * integral over P of G d-mu for the reference metric. kappa is the
/// measured quadrature coverage; the residual is the spread across
/// change-of-variable routes.
struct MeasureConvention {
  double kappa = 0.0;
  double residual = 0.0;
};

/// Complex-side samples of one metric on the engine's xi grid.
struct MomentData {
  KahlerPotentialSamples samples;
  std::vector<Mat> H;        // D^2 psi(xi) = W at the moment image
  std::vector<double> detH;
};

/// Scalar functionals of one snapshot, keyed for CSV/JSON emission.
struct FunctionalReport {
  double I_direct = 0.0;
  double I_gradient = 0.0;
  double J = 0.0;
  double D = 0.0;
  double entropy = 0.0;
  double Ca = 0.0;
  double Rbar_A = 0.0;
  double Rbar_B = 0.0;
  double max_phi = 0.0;
  double min_phi = 0.0;
  double min_u = 0.0;
  double L2_u = 0.0;
  double L1_phi_omega = 0.0;
  double L1_phi_omegaphi = 0.0;
  double L2_phi_omegaphi = 0.0;
  double toric_distance_to_ref = 0.0;

  std::string to_json() const;
};

/// Full per-snapshot analysis: the report plus the sample-level data the
/// estimate audits consume.
struct SnapshotAnalysis {
  FunctionalReport report;
  RelativePotentialSamples rel;
  std::vector<Vec> grad_phi;  // x*_phi - x*_0 per xi sample
  MomentData data;
  std::vector<double> u_minus_ref;  // (u - u0) at in-polytope nodes
};

/// All complex-side integrals run over the xi grid induced by the reference
/// potential (xi_k = grad u0 at interior nodes) with Jacobian cell weights;
/// X is never meshed. Immutable after construction; analyses are pure.
class FunctionalEngine {
 public:
  FunctionalEngine(SymplecticPotential reference, NewtonOptions opts = {});

  const SymplecticPotential& reference() const { return ref_; }
  const PolytopeGrid& grid() const { return ref_.grid(); }
  const std::vector<Vec>& xi_set() const { return xi_; }
  const MeasureConvention& convention() const { return kappa_; }
  const MomentData& reference_data() const { return ref_data_; }
  /// Reference-volume weight of sample k (mass kappa * mu(P) in total).
  double omega_weight(int k) const { return w_[k]; }
  /// xi-space cell volume of sample k.
  double dxi(int k) const { return dxi_[k]; }
  int sample_count() const { return static_cast<int>(xi_.size()); }

  MomentData moment_data(const SymplecticPotential& sp) const;
  SnapshotAnalysis analyze(const SymplecticPotential& sp,
                           const CurvatureField* field = nullptr) const;

  double toric_distance(const SymplecticPotential& a,
                        const SymplecticPotential& b) const;

 private:
  SymplecticPotential ref_;
  NewtonOptions opts_;
  std::vector<Vec> xi_;
  std::vector<double> w_;     // cut-cell mu weights (raw)
  std::vector<double> dxi_;   // det D2u0(x_k) * w_k
  MomentData ref_data_;
  MeasureConvention kappa_;
  // Faces where the covered patch of interior cells ends. The gradient
  // route discharges the divergence flux through them; everything reference-
  // side is evaluated in closed form at the face midpoint, and analyze()
  // runs one extra conjugate solve per face.
  struct PatchFace {
    Vec x_face;   // face midpoint in polytope coordinates
    Vec xi;       // grad u0 there
    double psi0;  // reference Kahler potential there
    Mat H0;       // D^2 psi0 there
    Vec area;     // cof(D^2 u0) nu h^{n-1}, outward
  };
  std::vector<PatchFace> patch_faces_;
};

/// Symmetrized mixed adjugates Adj_i(A, B) with i copies of A, from the
/// Bernstein expansion of adj(tA + (1-t)B); size-n result, degree n-1.
std::vector<Mat> mixed_adjugates(const Mat& A, const Mat& B);

/// Plain quadrature norm; p = infinity returns max |field|.
double lp_norm(const std::vector<double>& field,
               const std::vector<double>& weights, double p);

}  // namespace toricflow
