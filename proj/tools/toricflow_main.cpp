// toricflow: Calabi-flow simulation and inequality audits on Delzant
// polytopes, driven from the symplectic side.
//
// Subcommands:
//   run        integrate a scenario, write series.csv + snapshots + audits
//   verify     re-run the audit suite offline on stored snapshots
//   fit-decay  exponential-decay fit of the Ca column of a series CSV
//   presets    list the built-in polytopes

#include <algorithm>
#include <optional>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "toricflow/decay.hpp"
#include "toricflow/scenario.hpp"

namespace fs = std::filesystem;
using namespace toricflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFlowAbort = 1;
constexpr int kExitAuditFailure = 2;
constexpr int kExitConfigError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

std::string snap_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%04d.snap", index);
  return buf;
}

std::string audit_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "audit_%04d.json", index);
  return buf;
}

int cmd_run(const Scenario& scn) {
  SymplecticPotential initial = build_initial(scn);
  const FlowConfig cfg = flow_config_of(scn);
  const RunResult rr = run_flow(initial, cfg);

  fs::create_directories(scn.out_dir);
  write_file(fs::path(scn.out_dir) / "series.csv", rr.csv());
  write_file(fs::path(scn.out_dir) / "scenario.txt", scenario_to_text(scn));
  const std::string pname =
      scn.polytope_file.empty() ? scn.preset : std::string("custom");
  for (const auto& snap : rr.snapshots) {
    SymplecticPotential sp(initial.grid_ptr(), snap.f);
    write_file(fs::path(scn.out_dir) / snap_name(snap.index),
               write_snapshot(sp, snap.t, pname, scn.newton_tol));
    if (scn.audits)
      write_file(fs::path(scn.out_dir) / audit_name(snap.index),
                 audits_to_json(snap.audits));
  }

  std::cout << "run: " << rr.snapshots.size() << " snapshots, " << rr.steps
            << " steps, " << rr.rejections << " rejections, final t = "
            << format_double(rr.final_t)
            << ", Ca = " << format_double(rr.final_energy) << "\n";
  if (rr.aborted) {
    std::cerr << "flow aborted: " << rr.abort_reason << "\n";
    return kExitFlowAbort;
  }
  if (scn.audits && !rr.all_audits_pass) {
    for (const auto& snap : rr.snapshots)
      for (const auto& a : snap.audits)
        if (!a.pass)
          std::cerr << "audit failed at t = " << format_double(snap.t) << ": "
                    << a.name << " (margin " << format_double(a.margin)
                    << ")\n";
    return kExitAuditFailure;
  }
  if (scn.audits) std::cout << "all audits passed\n";
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& files) {
  if (files.empty()) {
    std::cerr << "verify: no snapshot files given\n";
    return kExitConfigError;
  }
  struct Loaded {
    SnapshotFile meta;
    std::string path;
  };
  std::vector<Loaded> snaps;
  for (const auto& f : files) snaps.push_back({parse_snapshot(read_file(f)), f});
  std::sort(snaps.begin(), snaps.end(),
            [](const Loaded& a, const Loaded& b) { return a.meta.t < b.meta.t; });
  for (const auto& s : snaps)
    if (s.meta.polytope_text != snaps.front().meta.polytope_text ||
        s.meta.h != snaps.front().meta.h) {
      std::cerr << "verify: snapshots disagree on polytope or grid\n";
      return kExitConfigError;
    }

  std::shared_ptr<const PolytopeGrid> grid;
  std::vector<SymplecticPotential> sps;
  for (const auto& s : snaps) {
    if (!grid)
      sps.push_back(load_snapshot(s.meta, &grid));
    else
      sps.emplace_back(grid, s.meta.f);
  }
  NewtonOptions opts;
  opts.tol = snaps.front().meta.newton_tol;
  FunctionalEngine engine(SymplecticPotential::canonical(grid), opts);
  // A corrupted snapshot (convexity lost) cannot be analyzed; report it as a
  // failing Hessian audit instead of bailing out.
  std::vector<std::optional<SnapshotAnalysis>> analyses(sps.size());
  std::vector<int> bad_node(sps.size(), -1);
  int anchor = -1;
  for (size_t i = 0; i < sps.size(); ++i) {
    int where = -1;
    if (!sps[i].convex_on_grid(&where)) {
      bad_node[i] = where;
      continue;
    }
    analyses[i] = engine.analyze(sps[i]);
    if (anchor < 0) anchor = static_cast<int>(i);
  }

  bool all_pass = true;
  std::printf("%-30s %14s %14s %12s  %s\n", "audit", "lhs", "rhs", "margin",
              "status");
  for (size_t i = 0; i < sps.size(); ++i) {
    std::printf("# snapshot t = %s (%s)\n",
                format_double(snaps[i].meta.t).c_str(), snaps[i].path.c_str());
    if (!analyses[i]) {
      AuditResult a = AuditResult::of("hessian_convexity", 0.0, -1.0, 0.0);
      a.note = "hessian not positive definite";
      std::printf("%-30s %14.6e %14.6e %12.3e  FAIL (%s)\n", a.name.c_str(),
                  a.lhs, a.rhs, a.margin, a.note.c_str());
      // trace positivity is the complex-side face of the same defect
      std::printf("%-30s %14s %14s %12s  FAIL\n", "trace_positivity", "-", "-",
                  "-");
      all_pass = false;
      continue;
    }
    if (anchor < 0) continue;
    AuditContext ctx;
    ctx.engine = &engine;
    ctx.sp_t = &sps[i];
    ctx.an_t = &*analyses[i];
    ctx.sp_0 = &sps[anchor];
    ctx.an_0 = &*analyses[anchor];
    ctx.D0 = analyses[anchor]->report.D;
    const double half_t = snaps[i].meta.t / 2.0;
    for (size_t j = 0; j < i; ++j)
      if (snaps[i].meta.t > 0.0 && analyses[j] &&
          std::abs(snaps[j].meta.t - half_t) <=
              1e-9 * (1.0 + std::abs(half_t))) {
        ctx.sp_half = &sps[j];
        ctx.an_half = &*analyses[j];
        break;
      }
    const auto audits = run_audit_suite(ctx);
    for (const auto& a : audits) {
      std::printf("%-30s %14.6e %14.6e %12.3e  %s\n", a.name.c_str(), a.lhs,
                  a.rhs, a.margin,
                  a.skipped ? "skip" : (a.pass ? "pass" : "FAIL"));
      if (!a.pass) all_pass = false;
    }
  }
  if (!all_pass) {
    std::cerr << "verify: audit failures\n";
    return kExitAuditFailure;
  }
  std::cout << "verify: all audits passed\n";
  return kExitOk;
}

int cmd_fit_decay(const std::string& csv_path) {
  const std::string csv = read_file(csv_path);
  const auto t = csv_column(csv, "t");
  const auto ca = csv_column(csv, "Ca");
  const DecayFit fit = fit_decay(t, ca);
  std::cout << "lambda " << format_double(fit.lambda) << "\n"
            << "r2 " << format_double(fit.r2) << "\n"
            << "samples " << fit.samples_used << "\n";
  return kExitOk;
}

int cmd_presets() {
  for (const auto& name : DelzantPolytope::preset_names()) {
    const auto p = DelzantPolytope::preset(name);
    std::cout << name << " (dim " << p.dim() << ", " << p.facet_count()
              << " facets, volume " << format_double(p.volume()) << ")\n";
    std::istringstream facets(p.to_text());
    std::string line;
    while (std::getline(facets, line)) std::cout << "  " << line << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calabi flow on Delzant polytopes: simulation and audits"};
  app.set_help_flag("--help", "print help");  // frees -h / --h for the grid
  app.require_subcommand(1);

  Scenario scn;
  std::string scenario_file;
  auto* run = app.add_subcommand("run", "integrate a flow scenario");
  run->set_help_flag("--help", "print help");
  run->add_option("--scenario", scenario_file, "scenario file (flat key-value)");
  run->add_option("--preset", scn.preset, "polytope preset");
  run->add_option("--polytope-file", scn.polytope_file, "facet file");
  run->add_option("--h", scn.h, "grid spacing");
  run->add_option("--t-end", scn.t_end, "flow horizon");
  run->add_option("--cfl", scn.cfl, "time-step coefficient");
  run->add_option("--amp", scn.amp, "initial perturbation amplitude");
  run->add_option("--profile", scn.profile, "perturbation profile (none|facet2)");
  run->add_option("--snapshots", scn.snapshots, "snapshot count");
  run->add_option("--max-steps", scn.max_steps, "accepted-step budget (0 = off)");
  run->add_option("--seed", scn.seed, "seed for probe families");
  run->add_option("--newton-tol", scn.newton_tol, "conjugate-solve tolerance");
  run->add_option("--out-dir", scn.out_dir, "output directory");
  run->add_flag("--deterministic,!--no-deterministic", scn.deterministic,
                "deterministic mode (always on; flag kept for scripts)");
  run->add_flag("--audits,!--no-audits", scn.audits, "run the audit suite");

  std::vector<std::string> verify_files;
  auto* verify = app.add_subcommand("verify", "re-audit stored snapshots");
  verify->add_option("files", verify_files, "snapshot files");

  std::string fit_csv;
  auto* fit = app.add_subcommand("fit-decay", "fit exp decay of the Ca column");
  fit->add_option("csv", fit_csv, "series CSV")->required();

  auto* presets = app.add_subcommand("presets", "list built-in polytopes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) {
      if (!scenario_file.empty()) {
        Scenario merged = parse_scenario(read_file(scenario_file));
        if (run->count("--preset")) merged.preset = scn.preset;
        if (run->count("--polytope-file"))
          merged.polytope_file = scn.polytope_file;
        if (run->count("--h")) merged.h = scn.h;
        if (run->count("--t-end")) merged.t_end = scn.t_end;
        if (run->count("--cfl")) merged.cfl = scn.cfl;
        if (run->count("--amp")) merged.amp = scn.amp;
        if (run->count("--profile")) merged.profile = scn.profile;
        if (run->count("--snapshots")) merged.snapshots = scn.snapshots;
        if (run->count("--max-steps")) merged.max_steps = scn.max_steps;
        if (run->count("--seed")) merged.seed = scn.seed;
        if (run->count("--newton-tol")) merged.newton_tol = scn.newton_tol;
        if (run->count("--out-dir")) merged.out_dir = scn.out_dir;
        if (run->count("--audits") || run->count("--no-audits"))
          merged.audits = scn.audits;
        scn = merged;
      }
      return cmd_run(scn);
    }
    if (verify->parsed()) return cmd_verify(verify_files);
    if (fit->parsed()) return cmd_fit_decay(fit_csv);
    if (presets->parsed()) return cmd_presets();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFlowAbort;
  }
  return kExitConfigError;
}
