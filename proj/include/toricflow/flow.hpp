#pragma once

#include <functional>
#include <string>
#include <vector>

#include "toricflow/estimates.hpp"

namespace toricflow {

struct FlowConfig {
  double cfl = 0.1;
  double t_end = 0.0;
  int snapshot_count = 16;   // snapshot boundaries at t_end * k / count
  long max_steps = 0;        // 0 = no step limit
  int max_halvings = 8;
  double eps_mono_coeff = 1e-10;  // eps_mono = coeff * (1 + Ca(0))
  NewtonOptions newton;
  bool collect_analysis = true;  // functional reports per snapshot
  bool run_audits = true;        // audit suite per snapshot
};

struct FlowState {
  double t = 0.0;
  SymplecticPotential potential;
  CurvatureField curvature;
  double energy = 0.0;
  long steps_accepted = 0;
  double last_dt = 0.0;
};

FlowState make_flow_state(SymplecticPotential initial);

/// dt = cfl h^4 / (1 + max node operator norm of W)^2, clamped to remaining.
double select_dt(const FlowState& state, double cfl, double remaining);

struct StepResult {
  FlowState state;
  bool accepted = false;
  int halvings = 0;
  std::string reject_reason;
};

/// One classical RK4 step on the smooth part; rejects (without advancing)
/// on convexity loss or an energy increase beyond eps_mono.
StepResult step(const FlowState& state, double dt, double eps_mono);

struct FlowSnapshot {
  int index = 0;
  double t = 0.0;
  double dt = 0.0;  // dt in effect when the snapshot was taken
  std::vector<double> f;
  FunctionalReport report;
  std::vector<AuditResult> audits;
  bool audits_pass = true;
};

struct RunResult {
  std::vector<FlowSnapshot> snapshots;
  bool completed = false;
  bool aborted = false;
  std::string abort_reason;
  long steps = 0;
  long rejections = 0;
  bool energy_monotone = true;
  double eps_mono = 0.0;
  double final_t = 0.0;
  double final_sup_f = 0.0;
  double final_energy = 0.0;
  bool all_audits_pass = true;

  std::string csv() const;
};

/// Integrate to t_end (or the step limit), emitting snapshots at the dyadic-
/// friendly boundaries t_end k / N; dt is clamped so boundaries are hit
/// exactly. Deterministic for a fixed config.
RunResult run_flow(const SymplecticPotential& initial, const FlowConfig& cfg);

extern const char* kSeriesHeader;

}  // namespace toricflow
