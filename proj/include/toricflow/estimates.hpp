#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toricflow/functionals.hpp"

namespace toricflow {

/// One inequality audit: pass iff margin = rhs - lhs >= -slack, where the
/// inequality under test is lhs <= rhs.
struct AuditResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double slack = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string note;

  static AuditResult of(std::string name, double lhs, double rhs, double slack);
  static AuditResult skip(std::string name, std::string reason);
};

std::string audits_to_json(const std::vector<AuditResult>& audits);

/// Everything the per-snapshot audit suite needs. sp_half/an_half may be
/// null (dyadic partner missing); sp_0/an_0 are the run's initial state.
struct AuditContext {
  const FunctionalEngine* engine = nullptr;
  const SymplecticPotential* sp_t = nullptr;
  const SnapshotAnalysis* an_t = nullptr;
  const SymplecticPotential* sp_0 = nullptr;
  const SnapshotAnalysis* an_0 = nullptr;
  const SymplecticPotential* sp_half = nullptr;
  const SnapshotAnalysis* an_half = nullptr;
  double D0 = 0.0;
  double tol_D = 0.02;
};

// Identity-grade slack: 1e-6 * (1 + |lhs| + |rhs|).
double identity_slack(double lhs, double rhs);

/// (2pi)^n/n! * integral of (u_phi - u)^2 dmu >= max over the two phi^2
/// integrals; returned as the kappa-calibrated variant plus the
/// paper-constant variant (reported, see the convention note in README).
std::vector<AuditResult> audit_two_integral_bound(const FunctionalEngine& eng,
                                                  const SnapshotAnalysis& an,
                                                  const SymplecticPotential& sp);

/// d(0, phi) >= max(...) / sqrt(C(P)); kappa and paper-constant variants.
std::vector<AuditResult> audit_chen_distance(const FunctionalEngine& eng,
                                             const SnapshotAnalysis& an,
                                             const SymplecticPotential& sp);

/// min over samples of (n + Laplace_omega phi) > 0, cross-checked against the
/// smallest eigenvalue of the evolved complex Hessian.
AuditResult audit_trace_positivity(const FunctionalEngine& eng,
                                   const SnapshotAnalysis& an);

/// L1(phi, omega_phi) <= L1(phi, omega) + I + 2 |I_direct - I_gradient|.
AuditResult audit_L1_chain(const SnapshotAnalysis& an);

/// integral |grad sqrt(|phi|)|^2_phi dVol_phi <= (n+1)/(4 c0) J; skipped when
/// |phi| >= c0 fails on the samples.
AuditResult audit_gradient_energy(const FunctionalEngine& eng,
                                  const SnapshotAnalysis& an, double c0);

std::vector<AuditResult> audit_sandwich(const SnapshotAnalysis& an, int dim);
AuditResult audit_I_two_route(const SnapshotAnalysis& an);

/// max phi(t) vs max_x (u(0,x) - u(t,x)) (upper) and the two-integral
/// corollary lower bound; phi here is relative to the run's initial metric.
std::vector<AuditResult> audit_max_phi_bounds(const AuditContext& ctx);

/// d(u(t/2), u(0)) >= d(u(t), u(t/2)) and the L2 triangle chain
/// 2 ||u(t/2)|| + ||u(0)|| >= ||u(t)||.
std::vector<AuditResult> audit_distance_monotone(const AuditContext& ctx,
                                                 double rel_slack = 0.01);

AuditResult audit_D_conservation(const AuditContext& ctx);

/// The full per-snapshot suite in fixed order.
std::vector<AuditResult> run_audit_suite(const AuditContext& ctx);

// ---------------------------------------------------------------------------
// Sobolev quotients and the Moser ladder.

/// Metric samples for complex-side norms: H = D^2 psi per xi sample and the
/// volume weights det(H) * dxi.
struct MetricSamples {
  std::vector<Mat> H;
  std::vector<double> vol;
};

MetricSamples reference_metric(const FunctionalEngine& eng);
MetricSamples evolved_metric(const FunctionalEngine& eng,
                             const SnapshotAnalysis& an);

/// ||f||_{2n/(n-1)} / (||grad f||_2 + ||f||_2) under the metric volume;
/// n = 1 uses the sup norm upstairs.
double sobolev_quotient(const std::vector<double>& values,
                        const std::vector<Vec>& gradients,
                        const MetricSamples& metric, int dim);

struct SobolevEstimate {
  double c_s = 0.0;
  int probe_count = 0;
};

/// Versioned probe family (v1): constant, coordinates, squares, seeded
/// Gaussian bumps at grid centers, plus the current phi when given.
SobolevEstimate estimate_sobolev(const FunctionalEngine& eng,
                                 const MetricSamples& metric,
                                 std::uint64_t seed, int bump_count = 5,
                                 const SnapshotAnalysis* an = nullptr);

struct MoserRung {
  double p = 0.0;     // the L^p exponent of this rung
  double norm = 0.0;  // ||phi1||_p under the unit-normalized measure
  double c_hat = 0.0; // empirical constant solving the rung bound exactly
};

struct MoserReport {
  std::vector<MoserRung> rungs;
  double sup_norm = 0.0;
  double final_gap = 0.0;  // (sup - last norm) / sup
  bool capped = false;
};

/// Norm ladder p -> p n/(n-1) from p = 2 up to p_max, unit-normalized
/// measure. phi1 must be >= 1 (as in the iteration it mirrors).
MoserReport moser_ladder(const std::vector<double>& phi1,
                         const MetricSamples& metric, double p_max, int dim);

}  // namespace toricflow
