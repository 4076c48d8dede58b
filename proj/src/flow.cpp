#include "toricflow/flow.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace toricflow {

namespace {

// R-bar minus R at every in-polytope node. Throws on convexity loss.
std::vector<double> flow_rhs(const PolytopeGrid& g,
                             std::shared_ptr<const PolytopeGrid> gptr,
                             const std::vector<double>& f) {
  SymplecticPotential sp(gptr, f);
  const CurvatureField field = scalar_curvature(sp);
  const double rbar = mean_curvature(sp, field).interior_quadrature;
  std::vector<double> out(f.size());
  for (size_t i = 0; i < f.size(); ++i) out[i] = rbar - field.R[i];
  (void)g;
  return out;
}

}  // namespace

FlowState make_flow_state(SymplecticPotential initial) {
  FlowState s{0.0, std::move(initial), {}, 0.0, 0, 0.0};
  s.curvature = scalar_curvature(s.potential);
  s.energy = calabi_energy(s.potential, s.curvature);
  return s;
}

double select_dt(const FlowState& state, double cfl, double remaining) {
  const double h = state.potential.grid().h();
  const double wmax = state.curvature.max_W_norm;
  const double dt = cfl * h * h * h * h / ((1.0 + wmax) * (1.0 + wmax));
  return remaining > 0.0 ? std::min(dt, remaining) : dt;
}

StepResult step(const FlowState& state, double dt, double eps_mono) {
  StepResult res{state, false, 0, {}};
  if (dt == 0.0) {
    res.accepted = true;
    return res;
  }
  const auto gptr = state.potential.grid_ptr();
  const PolytopeGrid& g = *gptr;
  const std::vector<double>& f0 = state.potential.smooth_part();
  try {
    auto blend = [&](const std::vector<double>& k, double c) {
      std::vector<double> f(f0.size());
      for (size_t i = 0; i < f.size(); ++i) f[i] = f0[i] + c * k[i];
      return f;
    };
    const std::vector<double> k1 = flow_rhs(g, gptr, f0);
    const std::vector<double> k2 = flow_rhs(g, gptr, blend(k1, dt / 2));
    const std::vector<double> k3 = flow_rhs(g, gptr, blend(k2, dt / 2));
    const std::vector<double> k4 = flow_rhs(g, gptr, blend(k3, dt));
    std::vector<double> f1(f0.size());
    for (size_t i = 0; i < f1.size(); ++i)
      f1[i] = f0[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    SymplecticPotential next(gptr, std::move(f1));
    CurvatureField field = scalar_curvature(next);
    const double energy = calabi_energy(next, field);
    if (energy > state.energy + eps_mono) {
      res.reject_reason = "energy increase " + format_double(energy - state.energy);
      return res;
    }
    res.state.potential = std::move(next);
    res.state.curvature = std::move(field);
    res.state.energy = energy;
    res.state.t = state.t + dt;
    res.state.steps_accepted = state.steps_accepted + 1;
    res.state.last_dt = dt;
    res.accepted = true;
    return res;
  } catch (const std::exception& e) {
    res.reject_reason = e.what();  // convexity loss inside a stage
    return res;
  }
}

const char* kSeriesHeader =
    "t,dt,Ca,Rbar_A,Rbar_B,D,I,J,max_phi,min_u,L2_u,L1_phi_omega,"
    "L1_phi_omegaphi,entropy,audit_flags";

std::string RunResult::csv() const {
  std::ostringstream os;
  os << kSeriesHeader << '\n';
  for (const auto& s : snapshots) {
    const FunctionalReport& r = s.report;
    std::string flags = "ok";
    for (const auto& a : s.audits)
      if (!a.pass) flags = flags == "ok" ? a.name : flags + "|" + a.name;
    os << format_double(s.t) << ',' << format_double(s.dt) << ','
       << format_double(r.Ca) << ',' << format_double(r.Rbar_A) << ','
       << format_double(r.Rbar_B) << ',' << format_double(r.D) << ','
       << format_double(r.I_direct) << ',' << format_double(r.J) << ','
       << format_double(r.max_phi) << ',' << format_double(r.min_u) << ','
       << format_double(r.L2_u) << ',' << format_double(r.L1_phi_omega) << ','
       << format_double(r.L1_phi_omegaphi) << ','
       << format_double(r.entropy) << ',' << flags << '\n';
  }
  return os.str();
}

RunResult run_flow(const SymplecticPotential& initial, const FlowConfig& cfg) {
  if (cfg.t_end < 0.0) throw std::invalid_argument("t_end must be >= 0");
  if (cfg.snapshot_count < 1)
    throw std::invalid_argument("snapshot count must be >= 1");
  RunResult out;
  FlowState state = make_flow_state(initial);
  out.eps_mono = cfg.eps_mono_coeff * (1.0 + state.energy);

  // Snapshot machinery. Analyses are kept per snapshot index so dyadic
  // audits (t vs t/2) can resolve their partners exactly.
  FunctionalEngine* engine = nullptr;
  std::vector<SnapshotAnalysis> analyses;
  std::vector<SymplecticPotential> potentials;
  std::unique_ptr<FunctionalEngine> engine_holder;
  if (cfg.collect_analysis) {
    engine_holder = std::make_unique<FunctionalEngine>(
        SymplecticPotential::canonical(initial.grid_ptr()), cfg.newton);
    engine = engine_holder.get();
  }
  double D0 = 0.0;

  auto emit = [&](int index, bool at_boundary = true) {
    FlowSnapshot snap;
    snap.index = index;
    snap.t = state.t;
    snap.dt = state.last_dt;
    snap.f = state.potential.smooth_part();
    if (engine) {
      analyses.push_back(engine->analyze(state.potential, &state.curvature));
      potentials.push_back(state.potential);
      const SnapshotAnalysis& an = analyses.back();
      snap.report = an.report;
      if (index == 0) D0 = an.report.D;
      AuditContext ctx;
      ctx.engine = engine;
      ctx.sp_t = &potentials.back();
      ctx.an_t = &an;
      ctx.sp_0 = &potentials.front();
      ctx.an_0 = &analyses.front();
      const int half = index / 2;
      if (at_boundary && index % 2 == 0 && index > 0 &&
          half < static_cast<int>(analyses.size())) {
        ctx.sp_half = &potentials[half];
        ctx.an_half = &analyses[half];
      }
      ctx.D0 = D0;
      if (cfg.run_audits) {
        snap.audits = run_audit_suite(ctx);
        for (const auto& a : snap.audits)
          if (!a.pass) snap.audits_pass = false;
        out.all_audits_pass = out.all_audits_pass && snap.audits_pass;
      }
    } else {
      snap.report.Ca = state.energy;
    }
    out.snapshots.push_back(std::move(snap));
  };

  emit(0);
  if (cfg.t_end == 0.0) {
    out.completed = true;
    out.final_t = 0.0;
    out.final_energy = state.energy;
    for (double v : state.potential.smooth_part())
      out.final_sup_f = std::max(out.final_sup_f, std::abs(v));
    return out;
  }

  int next_boundary = 1;
  const auto boundary_t = [&](int k) {
    return cfg.t_end * static_cast<double>(k) / cfg.snapshot_count;
  };
  bool step_budget_hit = false;
  while (state.t < cfg.t_end - 1e-15 * cfg.t_end) {
    if (cfg.max_steps > 0 && state.steps_accepted >= cfg.max_steps) {
      step_budget_hit = true;
      break;
    }
    const double target = boundary_t(next_boundary);
    double dt = select_dt(state, cfg.cfl, target - state.t);
    bool accepted = false;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
      StepResult sr = step(state, dt, out.eps_mono);
      if (sr.accepted) {
        state = std::move(sr.state);
        accepted = true;
        break;
      }
      ++out.rejections;
      out.abort_reason = sr.reject_reason;
      dt *= 0.5;
    }
    if (!accepted) {
      out.aborted = true;
      out.abort_reason = "step rejected after max halvings: " + out.abort_reason;
      break;
    }
    ++out.steps;
    if (std::abs(state.t - target) <= 1e-12 * (1.0 + std::abs(target))) {
      state.t = target;  // pin the boundary exactly
      emit(next_boundary);
      ++next_boundary;
    }
  }
  if (step_budget_hit &&
      (out.snapshots.empty() || out.snapshots.back().t < state.t))
    emit(next_boundary, /*at_boundary=*/false);

  out.completed = !out.aborted;
  out.final_t = state.t;
  out.final_energy = state.energy;
  for (double v : state.potential.smooth_part())
    out.final_sup_f = std::max(out.final_sup_f, std::abs(v));
  return out;
}

}  // namespace toricflow
