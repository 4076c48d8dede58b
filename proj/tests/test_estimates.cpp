#include <doctest.h>

#include <cmath>
#include <memory>

#include "toricflow/estimates.hpp"
#include "toricflow/flow.hpp"

using namespace toricflow;

namespace {

std::shared_ptr<const PolytopeGrid> make_grid(const std::string& preset, double h) {
  auto p = std::make_shared<DelzantPolytope>(DelzantPolytope::preset(preset));
  return std::make_shared<PolytopeGrid>(p, h);
}

double bump1d(const Vec& x) {
  return 0.01 * x[0] * x[0] * (1 - x[0]) * (1 - x[0]);
}

struct Fixture {
  std::shared_ptr<const PolytopeGrid> g;
  std::unique_ptr<FunctionalEngine> eng;
  SymplecticPotential sp;
  SnapshotAnalysis an;

  Fixture(const std::string& preset, double h,
          const std::function<double(const Vec&)>& f)
      : g(make_grid(preset, h)),
        eng(std::make_unique<FunctionalEngine>(SymplecticPotential::canonical(g))),
        sp(SymplecticPotential::from_function(g, f)),
        an(eng->analyze(sp)) {}
};

}  // namespace

TEST_SUITE_BEGIN("estimates");

TEST_CASE("two-integral bound: zero, constant, and perturbed cases") {
  Fixture zero("interval", 1.0 / 16, [](const Vec&) { return 0.0; });
  for (const auto& a : audit_two_integral_bound(*zero.eng, zero.an, zero.sp)) {
    CHECK(a.pass);
    CHECK(std::abs(a.lhs) < 1e-14);
  }

  const double c = 0.4;
  Fixture shift("interval", 1.0 / 16, [&](const Vec&) { return -c; });
  const auto shift_audits =
      audit_two_integral_bound(*shift.eng, shift.an, shift.sp);
  // rhs of the audit is the kappa-calibrated lemma bound; phi = c saturates
  // it: both sides c^2 kappa mu(P).
  const double kmu = shift.eng->convention().kappa * shift.g->volume();
  CHECK(shift_audits[0].pass);
  CHECK(shift_audits[0].lhs == doctest::Approx(c * c * kmu).epsilon(1e-6));
  CHECK(shift_audits[0].rhs == doctest::Approx(c * c * kmu).epsilon(1e-6));
  CHECK(shift_audits[1].pass);  // paper constant is larger, holds a fortiori

  Fixture pert("interval", 1.0 / 32, bump1d);
  for (const auto& a : audit_two_integral_bound(*pert.eng, pert.an, pert.sp))
    CHECK(a.pass);
}

TEST_CASE("Chen distance bound: constant case saturates the kappa variant") {
  const double c = 0.25;
  Fixture shift("square", 1.0 / 8, [&](const Vec&) { return -c; });
  const auto audits = audit_chen_distance(*shift.eng, shift.an, shift.sp);
  REQUIRE(audits.size() == 2);
  const double kmu = shift.eng->convention().kappa * shift.g->volume();
  CHECK(audits[0].pass);
  CHECK(audits[0].rhs == doctest::Approx(c * std::sqrt(kmu)).epsilon(1e-8));
  CHECK(audits[0].lhs == doctest::Approx(c * std::sqrt(kmu)).epsilon(1e-8));
  CHECK(audits[1].pass);

  Fixture pert("square", 1.0 / 8, [](const Vec& x) {
    return 0.02 * x[0] * x[0] * (1 - x[0]) * (1 - x[0]) * x[1] * (1 - x[1]);
  });
  for (const auto& a : audit_chen_distance(*pert.eng, pert.an, pert.sp))
    CHECK(a.pass);
}

TEST_CASE("trace positivity: min over samples is n for phi = const") {
  Fixture shift("square", 1.0 / 8, [](const Vec&) { return -0.3; });
  const auto a = audit_trace_positivity(*shift.eng, shift.an);
  CHECK(a.pass);
  CHECK(a.rhs == doctest::Approx(2.0).epsilon(1e-9));  // n + 0

  Fixture pert("interval", 1.0 / 16, bump1d);
  const auto b = audit_trace_positivity(*pert.eng, pert.an);
  CHECK(b.pass);
  CHECK(b.rhs > 0.0);
  CHECK(b.note.find("min eig") != std::string::npos);
}

TEST_CASE("L1 chain holds on trivial and perturbed data") {
  Fixture zero("interval", 1.0 / 16, [](const Vec&) { return 0.0; });
  CHECK(audit_L1_chain(zero.an).pass);
  Fixture shift("interval", 1.0 / 16, [](const Vec&) { return -0.2; });
  CHECK(audit_L1_chain(shift.an).pass);
  Fixture pert("interval", 1.0 / 32, bump1d);
  CHECK(audit_L1_chain(pert.an).pass);
}

TEST_CASE("gradient energy: constant passes, zero-crossing phi skips") {
  const double c = 0.3;
  Fixture shift("interval", 1.0 / 16, [&](const Vec&) { return -c; });
  const auto a = audit_gradient_energy(*shift.eng, shift.an, 0.9 * c);
  CHECK(a.pass);
  CHECK_FALSE(a.skipped);
  CHECK(std::abs(a.lhs) < 1e-12);

  // c + small wiggle stays away from zero: inequality with real margin
  Fixture wig("interval", 1.0 / 16, [&](const Vec& x) {
    return -c - 0.01 * x[0] * x[0] * (1 - x[0]) * (1 - x[0]);
  });
  const auto b = audit_gradient_energy(*wig.eng, wig.an, 0.5 * c);
  CHECK(b.pass);
  CHECK_FALSE(b.skipped);
  CHECK(b.lhs > 0.0);
  CHECK(b.margin > 0.0);

  // phi touching zero: skipped with reason
  Fixture pert("interval", 1.0 / 16, bump1d);
  double min_abs = std::numeric_limits<double>::infinity();
  for (double phi : pert.an.rel.phi) min_abs = std::min(min_abs, std::abs(phi));
  const auto s = audit_gradient_energy(*pert.eng, pert.an, 10.0 * min_abs);
  CHECK(s.skipped);
  CHECK(s.pass);
  CHECK(s.note.find("c0 precondition") != std::string::npos);
}

TEST_CASE("max-phi bounds saturate for a constant shift") {
  auto g = make_grid("interval", 1.0 / 16);
  FunctionalEngine eng(SymplecticPotential::canonical(g));
  const double c = 0.15;
  auto sp0 = SymplecticPotential::canonical(g);
  auto spc = sp0.shifted(-c);  // u - c: phi = +c
  const auto an0 = eng.analyze(sp0);
  const auto anc = eng.analyze(spc);
  AuditContext ctx;
  ctx.engine = &eng;
  ctx.sp_t = &spc;
  ctx.an_t = &anc;
  ctx.sp_0 = &sp0;
  ctx.an_0 = &an0;
  const auto audits = audit_max_phi_bounds(ctx);
  REQUIRE(audits.size() == 2);
  // upper: max phi = c equals max(u(0) - u(t)) = c
  CHECK(audits[0].pass);
  CHECK(audits[0].lhs == doctest::Approx(c).epsilon(1e-9));
  CHECK(audits[0].rhs == doctest::Approx(c).epsilon(1e-9));
  CHECK(audits[1].pass);
}

TEST_CASE("distance monotonicity audits a real trajectory") {
  FlowConfig cfg;
  cfg.t_end = 0.004;
  cfg.cfl = 1.0;
  cfg.snapshot_count = 4;
  const auto rr = run_flow(SymplecticPotential::from_function(
                               make_grid("interval", 1.0 / 32), bump1d),
                           cfg);
  REQUIRE(rr.completed);
  int seen = 0;
  for (const auto& s : rr.snapshots)
    for (const auto& a : s.audits)
      if ((a.name == "distance_monotone" || a.name == "distance_triangle") &&
          !a.skipped) {
        CHECK(a.pass);
        ++seen;
      }
  CHECK(seen >= 4);  // snapshots 2 and 4 carry both audits
}

TEST_CASE("triangle chain holds for arbitrary potentials") {
  auto g = make_grid("interval", 1.0 / 16);
  FunctionalEngine eng(SymplecticPotential::canonical(g));
  auto a = SymplecticPotential::from_function(
      g, [](const Vec& x) { return 0.05 * std::sin(5 * x[0]); });
  auto b = SymplecticPotential::from_function(
      g, [](const Vec& x) { return -0.03 * x[0] * x[0]; });
  auto c0 = SymplecticPotential::canonical(g);
  const auto an_a = eng.analyze(a);
  const auto an_b = eng.analyze(b);
  const auto an_c = eng.analyze(c0);
  // 2 ||u_half|| + ||u_0|| >= ||u_t|| for any triple
  CHECK(2 * an_b.report.L2_u + an_c.report.L2_u >= an_a.report.L2_u - 1e-12);
}

TEST_CASE("sobolev quotient: analytic values and scale invariance") {
  auto g = make_grid("square", 1.0 / 8);
  FunctionalEngine eng(SymplecticPotential::canonical(g));
  const auto metric = reference_metric(eng);
  const int m = eng.sample_count();
  double vol = 0.0;
  for (double w : metric.vol) vol += w;

  std::vector<double> ones(m, 1.0);
  std::vector<Vec> zeros(m, Vec::Zero(2));
  // ||1||_{2n/(n-1)} / ||1||_2 = Vol^{-1/(2n)} for n = 2
  const double want = std::pow(vol, -0.25);
  CHECK(sobolev_quotient(ones, zeros, metric, 2) ==
        doctest::Approx(want).epsilon(1e-12));

  std::vector<double> f(m), f2(m);
  std::vector<Vec> df(m), df2(m);
  for (int k = 0; k < m; ++k) {
    f[k] = eng.xi_set()[k][0];
    df[k] = Vec::Zero(2);
    df[k][0] = 1.0;
    f2[k] = 2.0 * f[k];
    df2[k] = 2.0 * df[k];
  }
  CHECK(sobolev_quotient(f, df, metric, 2) ==
        doctest::Approx(sobolev_quotient(f2, df2, metric, 2)).epsilon(1e-12));
  CHECK_THROWS(sobolev_quotient(std::vector<double>(m, 0.0), zeros, metric, 2));
}

TEST_CASE("sobolev estimate is a running max over the probe family") {
  auto g = make_grid("square", 1.0 / 8);
  FunctionalEngine eng(SymplecticPotential::canonical(g));
  const auto metric = reference_metric(eng);
  const auto few = estimate_sobolev(eng, metric, 7, 2);
  const auto more = estimate_sobolev(eng, metric, 7, 9);
  CHECK(more.probe_count > few.probe_count);
  CHECK(more.c_s >= few.c_s - 1e-15);
  CHECK(few.c_s > 0.0);
  // deterministic for a fixed seed
  CHECK(estimate_sobolev(eng, metric, 7, 5).c_s ==
        estimate_sobolev(eng, metric, 7, 5).c_s);
}

TEST_CASE("moser ladder: flat field, exponent recursion, sup convergence") {
  auto g = make_grid("square", 1.0 / 8);
  FunctionalEngine eng(SymplecticPotential::canonical(g));
  const auto metric = reference_metric(eng);
  const int m = eng.sample_count();

  const auto flat = moser_ladder(std::vector<double>(m, 1.0), metric, 64, 2);
  for (const auto& r : flat.rungs) CHECK(r.norm == doctest::Approx(1.0));
  // equality at C(p+1) = 1 means c_hat = 1/(p+1)
  for (size_t j = 0; j + 1 < flat.rungs.size(); ++j)
    CHECK(flat.rungs[j].c_hat == doctest::Approx(1.0 / flat.rungs[j].p));
  // n = 2: exponents 2, 4, 8, 16, 32, 64
  REQUIRE(flat.rungs.size() == 6);
  for (size_t j = 0; j < flat.rungs.size(); ++j)
    CHECK(flat.rungs[j].p == doctest::Approx(std::pow(2.0, j + 1)));

  std::vector<double> phi1(m);
  for (int k = 0; k < m; ++k)
    phi1[k] = 1.0 + 0.5 * eng.xi_set()[k].squaredNorm() /
                        (1.0 + eng.xi_set()[k].squaredNorm());
  const auto rep = moser_ladder(phi1, metric, 64, 2);
  for (size_t j = 1; j < rep.rungs.size(); ++j)
    CHECK(rep.rungs[j].norm >= rep.rungs[j - 1].norm - 1e-14);
  CHECK(rep.final_gap >= 0.0);
  CHECK(rep.final_gap < 0.05);
  CHECK_FALSE(rep.capped);
  CHECK_THROWS(moser_ladder(std::vector<double>(m, 0.5), metric, 64, 2));
}

TEST_CASE("audit JSON carries the contract fields") {
  const AuditResult a = AuditResult::of("demo", 1.0, 2.0, 0.1);
  const std::string j = audits_to_json({a});
  for (const char* key : {"name", "lhs", "rhs", "margin", "pass", "slack"})
    CHECK(j.find(key) != std::string::npos);
  CHECK(a.pass);
  CHECK(a.margin == doctest::Approx(1.0));
  const AuditResult s = AuditResult::skip("other", "why not");
  CHECK(s.skipped);
  CHECK(s.pass);
}

TEST_SUITE_END();
