#include "toricflow/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

namespace toricflow {

namespace {

double two_pi_pow_over_fact(int n) {
  double v = 1.0;
  for (int i = 1; i <= n; ++i) v *= 2.0 * M_PI / i;
  return v;
}

double l2_mu_norm(const FunctionalEngine& eng, const std::vector<double>& node_vals) {
  const PolytopeGrid& g = eng.grid();
  double acc = 0.0;
  const auto& interior = g.interior_nodes();
  for (size_t k = 0; k < interior.size(); ++k) {
    const double v = node_vals[g.inpoly_id(interior[k])];
    acc += g.mu_weight(static_cast<int>(k)) * v * v;
  }
  return std::sqrt(acc);
}

}  // namespace

double identity_slack(double lhs, double rhs) {
  return 1e-6 * (1.0 + std::abs(lhs) + std::abs(rhs));
}

AuditResult AuditResult::of(std::string name, double lhs, double rhs,
                            double slack) {
  AuditResult a;
  a.name = std::move(name);
  a.lhs = lhs;
  a.rhs = rhs;
  a.margin = rhs - lhs;
  a.slack = slack;
  a.pass = a.margin >= -slack;
  return a;
}

AuditResult AuditResult::skip(std::string name, std::string reason) {
  AuditResult a;
  a.name = std::move(name);
  a.skipped = true;
  a.pass = true;
  a.note = std::move(reason);
  return a;
}

std::string audits_to_json(const std::vector<AuditResult>& audits) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : audits) {
    nlohmann::json j;
    j["name"] = a.name;
    j["lhs"] = a.lhs;
    j["rhs"] = a.rhs;
    j["margin"] = a.margin;
    j["pass"] = a.pass;
    j["slack"] = a.slack;
    if (a.skipped) j["skipped"] = true;
    if (!a.note.empty()) j["note"] = a.note;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::vector<AuditResult> audit_two_integral_bound(const FunctionalEngine& eng,
                                                  const SnapshotAnalysis& an,
                                                  const SymplecticPotential&) {
  const int n = eng.grid().dim();
  const double l2 = l2_mu_norm(eng, an.u_minus_ref);
  double pos = 0.0, neg = 0.0;
  for (int k = 0; k < eng.sample_count(); ++k) {
    const double phi = an.rel.phi[k];
    if (phi > 0.0)
      pos += phi * phi * an.data.detH[k] * eng.dxi(k);
    else if (phi < 0.0)
      neg += phi * phi * eng.omega_weight(k);
  }
  const double rhs = std::max(pos, neg);
  const double lhs_kappa = eng.convention().kappa * l2 * l2;
  const double lhs_paper = two_pi_pow_over_fact(n) * l2 * l2;
  std::vector<AuditResult> out;
  // The inequality reads lhs >= rhs; audits are stated as lhs <= rhs, so swap.
  auto mk = [&](const char* name, double bound) {
    AuditResult a = AuditResult::of(name, rhs, bound,
                                    0.02 * (std::abs(rhs) + std::abs(bound)) +
                                        identity_slack(rhs, bound));
    return a;
  };
  out.push_back(mk("two_integral_bound", lhs_kappa));
  auto paper = mk("two_integral_bound_paper_const", lhs_paper);
  paper.note = "paper constant (2pi)^n/n!; see measure-convention note";
  out.push_back(std::move(paper));
  return out;
}

std::vector<AuditResult> audit_chen_distance(const FunctionalEngine& eng,
                                             const SnapshotAnalysis& an,
                                             const SymplecticPotential&) {
  const int n = eng.grid().dim();
  const double muP = eng.grid().volume();
  double pos = 0.0, neg = 0.0;
  for (int k = 0; k < eng.sample_count(); ++k) {
    const double phi = an.rel.phi[k];
    if (phi > 0.0)
      pos += phi * an.data.detH[k] * eng.dxi(k);
    else if (phi < 0.0)
      neg += -phi * eng.omega_weight(k);
  }
  const double num = std::max(pos, neg);
  const double d = an.report.toric_distance_to_ref;
  std::vector<AuditResult> out;
  auto mk = [&](const char* name, double cP) {
    const double rhs_val = num / std::sqrt(cP);
    return AuditResult::of(name, rhs_val, d,
                           0.02 * (std::abs(rhs_val) + std::abs(d)) +
                               identity_slack(rhs_val, d));
  };
  out.push_back(mk("chen_distance", eng.convention().kappa * muP));
  auto paper = mk("chen_distance_paper_const", std::pow(2.0 * M_PI, n) * muP);
  paper.note = "paper constant (2pi)^n Vol(P); see measure-convention note";
  out.push_back(std::move(paper));
  return out;
}

AuditResult audit_trace_positivity(const FunctionalEngine& eng,
                                   const SnapshotAnalysis& an) {
  const int n = eng.grid().dim();
  double min_trace = std::numeric_limits<double>::infinity();
  double min_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < eng.sample_count(); ++k) {
    const Mat H0inv = eng.reference_data().H[k].inverse();
    const Mat D2phi = an.data.H[k] - eng.reference_data().H[k];
    min_trace = std::min(min_trace, n + (H0inv * D2phi).trace());
    Eigen::SelfAdjointEigenSolver<Mat> es(an.data.H[k], Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  AuditResult a = AuditResult::of("trace_positivity", 0.0, min_trace, 1e-12 * n);
  a.note = "min eig of evolved metric = " + format_double(min_eig);
  a.pass = a.pass && min_eig > 0.0;
  return a;
}

AuditResult audit_L1_chain(const SnapshotAnalysis& an) {
  const double lhs = an.report.L1_phi_omegaphi;
  const double rhs = an.report.L1_phi_omega + an.report.I_direct +
                     2.0 * std::abs(an.report.I_direct - an.report.I_gradient);
  return AuditResult::of("L1_chain", lhs, rhs,
                         0.02 * (std::abs(lhs) + std::abs(rhs)) +
                             identity_slack(lhs, rhs));
}

AuditResult audit_gradient_energy(const FunctionalEngine& eng,
                                  const SnapshotAnalysis& an, double c0) {
  if (!(c0 > 0.0))
    return AuditResult::skip("gradient_energy", "c0 precondition fails");
  double min_abs = std::numeric_limits<double>::infinity();
  for (double phi : an.rel.phi) min_abs = std::min(min_abs, std::abs(phi));
  if (min_abs < c0)
    return AuditResult::skip("gradient_energy",
                             "c0 precondition fails: min |phi| = " +
                                 format_double(min_abs));
  const int n = eng.grid().dim();
  double lhs = 0.0;
  for (int k = 0; k < eng.sample_count(); ++k) {
    const Vec& gp = an.grad_phi[k];
    const double grad2 = gp.dot(an.data.H[k].inverse() * gp);
    lhs += grad2 / (4.0 * std::abs(an.rel.phi[k])) * an.data.detH[k] *
           eng.dxi(k);
  }
  const double rhs = (n + 1.0) / (4.0 * c0) * an.report.J;
  return AuditResult::of("gradient_energy", lhs, rhs,
                         0.02 * (std::abs(lhs) + std::abs(rhs)) +
                             identity_slack(lhs, rhs));
}

std::vector<AuditResult> audit_sandwich(const SnapshotAnalysis& an, int dim) {
  const double I = an.report.I_gradient;
  const double J = an.report.J;
  std::vector<AuditResult> out;
  out.push_back(AuditResult::of("sandwich_lower", I / (dim + 1.0), J,
                                identity_slack(I, J)));
  out.push_back(AuditResult::of("sandwich_upper", J, dim * I / (dim + 1.0),
                                identity_slack(I, J)));
  return out;
}

AuditResult audit_I_two_route(const SnapshotAnalysis& an) {
  const double lhs = std::abs(an.report.I_direct - an.report.I_gradient);
  const double rhs = 0.02 * (std::abs(an.report.I_direct) + 1e-9);
  return AuditResult::of("I_two_route", lhs, rhs, 0.0);
}

std::vector<AuditResult> audit_max_phi_bounds(const AuditContext& ctx) {
  const FunctionalEngine& eng = *ctx.engine;
  std::vector<AuditResult> out;
  // phi relative to the run's initial metric.
  double max_phi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < eng.sample_count(); ++k)
    max_phi = std::max(max_phi, ctx.an_t->rel.phi[k] - ctx.an_0->rel.phi[k]);
  double max_du = -std::numeric_limits<double>::infinity();
  double l2 = 0.0;
  const PolytopeGrid& g = eng.grid();
  for (int id : g.inpoly_nodes()) {
    const double du =
        ctx.sp_0->value_node(id) - ctx.sp_t->value_node(id);
    max_du = std::max(max_du, du);
  }
  const auto& interior = g.interior_nodes();
  for (size_t k = 0; k < interior.size(); ++k) {
    const double du = ctx.sp_t->value_node(interior[k]) -
                      ctx.sp_0->value_node(interior[k]);
    l2 += g.mu_weight(static_cast<int>(k)) * du * du;
  }
  out.push_back(AuditResult::of("max_phi_upper", max_phi, max_du,
                                identity_slack(max_phi, max_du)));
  const double lower = -std::sqrt(l2 / g.volume());
  out.push_back(AuditResult::of(
      "max_phi_lower", lower, max_phi,
      0.02 * (std::abs(lower) + std::abs(max_phi)) +
          identity_slack(lower, max_phi)));
  return out;
}

std::vector<AuditResult> audit_distance_monotone(const AuditContext& ctx,
                                                 double rel_slack) {
  std::vector<AuditResult> out;
  if (!ctx.sp_half) {
    out.push_back(AuditResult::skip("distance_monotone", "no t/2 snapshot"));
    return out;
  }
  const FunctionalEngine& eng = *ctx.engine;
  const double lhs = eng.toric_distance(*ctx.sp_t, *ctx.sp_half);
  const double rhs = eng.toric_distance(*ctx.sp_half, *ctx.sp_0);
  out.push_back(AuditResult::of(
      "distance_monotone", lhs, rhs,
      rel_slack * std::max(std::abs(lhs), std::abs(rhs)) +
          identity_slack(lhs, rhs)));
  // Triangle chain on plain L2 norms of the potentials.
  const double n_t = ctx.an_t->report.L2_u;
  const double n_half = ctx.an_half->report.L2_u;
  const double n_0 = ctx.an_0->report.L2_u;
  out.push_back(AuditResult::of("distance_triangle", n_t, 2.0 * n_half + n_0,
                                identity_slack(n_t, 2.0 * n_half + n_0)));
  return out;
}

AuditResult audit_D_conservation(const AuditContext& ctx) {
  const double lhs = std::abs(ctx.an_t->report.D - ctx.D0);
  const double rhs = ctx.tol_D * (1.0 + std::abs(ctx.D0));
  return AuditResult::of("D_conservation", lhs, rhs, 0.0);
}

std::vector<AuditResult> run_audit_suite(const AuditContext& ctx) {
  std::vector<AuditResult> out;
  auto add = [&](std::vector<AuditResult> v) {
    for (auto& a : v) out.push_back(std::move(a));
  };
  add(audit_two_integral_bound(*ctx.engine, *ctx.an_t, *ctx.sp_t));
  add(audit_chen_distance(*ctx.engine, *ctx.an_t, *ctx.sp_t));
  out.push_back(audit_trace_positivity(*ctx.engine, *ctx.an_t));
  out.push_back(audit_L1_chain(*ctx.an_t));
  add(audit_sandwich(*ctx.an_t, ctx.engine->grid().dim()));
  out.push_back(audit_I_two_route(*ctx.an_t));
  out.push_back(audit_D_conservation(ctx));
  add(audit_max_phi_bounds(ctx));
  add(audit_distance_monotone(ctx));
  double min_abs = std::numeric_limits<double>::infinity();
  for (double phi : ctx.an_t->rel.phi) min_abs = std::min(min_abs, std::abs(phi));
  out.push_back(audit_gradient_energy(
      *ctx.engine, *ctx.an_t, min_abs >= 1e-8 ? 0.9 * min_abs : 0.0));
  return out;
}

MetricSamples reference_metric(const FunctionalEngine& eng) {
  MetricSamples m;
  m.H = eng.reference_data().H;
  m.vol.reserve(eng.sample_count());
  for (int k = 0; k < eng.sample_count(); ++k) m.vol.push_back(eng.omega_weight(k));
  return m;
}

MetricSamples evolved_metric(const FunctionalEngine& eng,
                             const SnapshotAnalysis& an) {
  MetricSamples m;
  m.H = an.data.H;
  m.vol.reserve(eng.sample_count());
  for (int k = 0; k < eng.sample_count(); ++k)
    m.vol.push_back(an.data.detH[k] * eng.dxi(k));
  return m;
}

double sobolev_quotient(const std::vector<double>& values,
                        const std::vector<Vec>& gradients,
                        const MetricSamples& metric, int dim) {
  const double p_up = dim > 1
                          ? 2.0 * dim / (dim - 1.0)
                          : std::numeric_limits<double>::infinity();
  const double num = lp_norm(values, metric.vol, p_up);
  double grad2 = 0.0;
  for (size_t k = 0; k < values.size(); ++k)
    grad2 += gradients[k].dot(metric.H[k].inverse() * gradients[k]) *
             metric.vol[k];
  const double den = std::sqrt(grad2) + lp_norm(values, metric.vol, 2.0);
  if (den <= 0.0)
    throw std::invalid_argument("sobolev quotient of the zero field");
  return num / den;
}

SobolevEstimate estimate_sobolev(const FunctionalEngine& eng,
                                 const MetricSamples& metric,
                                 std::uint64_t seed, int bump_count,
                                 const SnapshotAnalysis* an) {
  const int m = eng.sample_count();
  const int n = eng.grid().dim();
  SobolevEstimate est;
  auto consider = [&](const std::vector<double>& vals,
                      const std::vector<Vec>& grads) {
    est.c_s = std::max(est.c_s, sobolev_quotient(vals, grads, metric, n));
    ++est.probe_count;
  };
  std::vector<double> vals(m);
  std::vector<Vec> grads(m, Vec::Zero(n));
  // probe family v1: constant
  std::fill(vals.begin(), vals.end(), 1.0);
  consider(vals, grads);
  // coordinates and squares
  for (int a = 0; a < n; ++a) {
    for (int k = 0; k < m; ++k) {
      vals[k] = eng.xi_set()[k][a];
      grads[k] = Vec::Zero(n);
      grads[k][a] = 1.0;
    }
    consider(vals, grads);
    for (int k = 0; k < m; ++k) {
      vals[k] = eng.xi_set()[k][a] * eng.xi_set()[k][a];
      grads[k] = Vec::Zero(n);
      grads[k][a] = 2.0 * eng.xi_set()[k][a];
    }
    consider(vals, grads);
  }
  // seeded Gaussian bumps centered at sample points
  std::mt19937_64 rng(seed);
  double spread = 0.0;
  for (int k = 0; k < m; ++k) spread = std::max(spread, eng.xi_set()[k].norm());
  const double sigma = std::max(spread / 4.0, 0.25);
  std::uniform_int_distribution<int> pick(0, m - 1);
  for (int b = 0; b < bump_count; ++b) {
    const Vec c = eng.xi_set()[pick(rng)];
    for (int k = 0; k < m; ++k) {
      const Vec d = eng.xi_set()[k] - c;
      vals[k] = std::exp(-d.squaredNorm() / (2.0 * sigma * sigma));
      grads[k] = -vals[k] / (sigma * sigma) * d;
    }
    consider(vals, grads);
  }
  if (an) consider(an->rel.phi, an->grad_phi);
  return est;
}

MoserReport moser_ladder(const std::vector<double>& phi1,
                         const MetricSamples& metric, double p_max, int dim) {
  for (double v : phi1)
    if (v < 1.0 - 1e-9)
      throw std::invalid_argument("moser ladder needs phi1 >= 1");
  MoserReport rep;
  double total = 0.0;
  for (double w : metric.vol) total += w;
  std::vector<double> prob(metric.vol);
  for (double& w : prob) w /= total;
  rep.sup_norm = lp_norm(phi1, prob, std::numeric_limits<double>::infinity());
  const double factor = dim > 1 ? static_cast<double>(dim) / (dim - 1.0) : 0.0;
  double p = 2.0;
  while (true) {
    MoserRung rung;
    rung.p = p;
    rung.norm = lp_norm(phi1, prob, p);
    rep.rungs.push_back(rung);
    if (dim == 1) break;  // the exponent recursion degenerates; single rung
    const double next = p * factor;
    if (next > p_max + 1e-9) break;
    if (next > 1024.0) {
      rep.capped = true;
      break;
    }
    p = next;
  }
  for (size_t j = 0; j + 1 < rep.rungs.size(); ++j) {
    const double q = rep.rungs[j].p;
    rep.rungs[j].c_hat =
        std::pow(rep.rungs[j + 1].norm / rep.rungs[j].norm, q) / q;
  }
  rep.final_gap = (rep.sup_norm - rep.rungs.back().norm) / rep.sup_norm;
  return rep;
}

}  // namespace toricflow
