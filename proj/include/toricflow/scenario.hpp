#pragma once

#include <cstdint>
#include <string>

#include "toricflow/flow.hpp"

namespace toricflow {

/// Flat key-value run description; every knob the CLI exposes.
struct Scenario {
  std::string name = "run";
  std::string preset = "interval";
  std::string polytope_file;  // overrides preset when set
  double h = 1.0 / 32;
  double amp = 0.0;
  std::string profile = "none";  // none | facet2 (product of squared l_i)
  double t_end = 0.0;
  double cfl = 0.1;
  int snapshots = 16;
  long max_steps = 0;
  double newton_tol = 1e-10;
  int max_halvings = 8;
  std::uint64_t seed = 1;
  bool deterministic = true;
  bool audits = true;
  std::string out_dir = "out";
};

/// Parse `key value` / `key = value` lines; '#' starts a comment. Unknown or
/// malformed keys throw with the key named.
Scenario parse_scenario(const std::string& text);
std::string scenario_to_text(const Scenario& s);

/// Build the polytope, grid, and perturbed initial potential. Throws on
/// invalid polytopes and on perturbations that break convexity at load.
SymplecticPotential build_initial(const Scenario& s);

FlowConfig flow_config_of(const Scenario& s);

}  // namespace toricflow
