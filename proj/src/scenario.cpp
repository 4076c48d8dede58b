#include "toricflow/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace toricflow {

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw std::invalid_argument("scenario key '" + key + "': bad boolean '" + v + "'");
}

template <typename T, typename Fn>
T parse_num(const std::string& v, const std::string& key, Fn fn) {
  try {
    size_t used = 0;
    const T out = fn(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("scenario key '" + key + "': bad value '" + v +
                                "'");
  }
}

double to_double(const std::string& v, const std::string& key) {
  return parse_num<double>(v, key, [](const std::string& s, size_t* u) {
    return std::stod(s, u);
  });
}
long to_long(const std::string& v, const std::string& key) {
  return parse_num<long>(v, key, [](const std::string& s, size_t* u) {
    return std::stol(s, u);
  });
}
int to_int(const std::string& v, const std::string& key) {
  return static_cast<int>(to_long(v, key));
}
std::uint64_t to_u64(const std::string& v, const std::string& key) {
  return parse_num<std::uint64_t>(v, key, [](const std::string& s, size_t* u) {
    return std::stoull(s, u);
  });
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key)) continue;
    ls >> value;
    if (value == "=") ls >> value;
    if (value.empty()) {
      std::ostringstream os;
      os << "scenario line " << lineno << ": key '" << key << "' has no value";
      throw std::invalid_argument(os.str());
    }
    if (key == "name")
      s.name = value;
    else if (key == "preset")
      s.preset = value;
    else if (key == "polytope_file")
      s.polytope_file = value;
    else if (key == "h")
      s.h = to_double(value, key);
    else if (key == "amp")
      s.amp = to_double(value, key);
    else if (key == "profile")
      s.profile = value;
    else if (key == "t_end")
      s.t_end = to_double(value, key);
    else if (key == "cfl")
      s.cfl = to_double(value, key);
    else if (key == "snapshots")
      s.snapshots = to_int(value, key);
    else if (key == "max_steps")
      s.max_steps = to_long(value, key);
    else if (key == "newton_tol")
      s.newton_tol = to_double(value, key);
    else if (key == "max_halvings")
      s.max_halvings = to_int(value, key);
    else if (key == "seed")
      s.seed = to_u64(value, key);
    else if (key == "deterministic")
      s.deterministic = parse_bool(value, key);
    else if (key == "audits")
      s.audits = parse_bool(value, key);
    else if (key == "out_dir")
      s.out_dir = value;
    else
      throw std::invalid_argument("unknown scenario key '" + key + "'");
  }
  if (s.h <= 0.0) throw std::invalid_argument("scenario key 'h': must be > 0");
  if (s.t_end < 0.0)
    throw std::invalid_argument("scenario key 't_end': must be >= 0");
  if (s.snapshots < 1)
    throw std::invalid_argument("scenario key 'snapshots': must be >= 1");
  if (s.profile != "none" && s.profile != "facet2")
    throw std::invalid_argument("scenario key 'profile': unknown profile '" +
                                s.profile + "'");
  return s;
}

std::string scenario_to_text(const Scenario& s) {
  std::ostringstream os;
  os << "name " << s.name << '\n';
  if (!s.polytope_file.empty())
    os << "polytope_file " << s.polytope_file << '\n';
  else
    os << "preset " << s.preset << '\n';
  os << "h " << format_double(s.h) << '\n';
  os << "amp " << format_double(s.amp) << '\n';
  os << "profile " << s.profile << '\n';
  os << "t_end " << format_double(s.t_end) << '\n';
  os << "cfl " << format_double(s.cfl) << '\n';
  os << "snapshots " << s.snapshots << '\n';
  os << "max_steps " << s.max_steps << '\n';
  os << "newton_tol " << format_double(s.newton_tol) << '\n';
  os << "max_halvings " << s.max_halvings << '\n';
  os << "seed " << s.seed << '\n';
  os << "deterministic " << (s.deterministic ? "true" : "false") << '\n';
  os << "audits " << (s.audits ? "true" : "false") << '\n';
  os << "out_dir " << s.out_dir << '\n';
  return os.str();
}

SymplecticPotential build_initial(const Scenario& s) {
  std::shared_ptr<const DelzantPolytope> poly;
  if (!s.polytope_file.empty()) {
    std::ifstream in(s.polytope_file);
    if (!in)
      throw std::invalid_argument("cannot open polytope file '" +
                                  s.polytope_file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    poly = std::make_shared<DelzantPolytope>(DelzantPolytope::parse(buf.str()));
  } else {
    poly = std::make_shared<DelzantPolytope>(DelzantPolytope::preset(s.preset));
  }
  const auto validity = poly->validate();
  if (!validity.valid)
    throw std::invalid_argument("polytope is not Delzant: " +
                                validity.errors.front());
  auto grid = std::make_shared<PolytopeGrid>(poly, s.h);
  SymplecticPotential sp = [&] {
    if (s.amp == 0.0 || s.profile == "none")
      return SymplecticPotential::canonical(grid);
    // facet2: amp * prod_i l_i(x)^2, flat to second order on the boundary
    return SymplecticPotential::from_function(grid, [&](const Vec& x) {
      double p = s.amp;
      for (const Facet& f : poly->facets()) {
        const double l = f.eval(x);
        p *= l * l;
      }
      return p;
    });
  }();
  int where = -1;
  if (!sp.convex_on_grid(&where))
    throw std::invalid_argument(
        "initial perturbation breaks convexity at a grid node; lower 'amp'");
  return sp;
}

FlowConfig flow_config_of(const Scenario& s) {
  FlowConfig cfg;
  cfg.cfl = s.cfl;
  cfg.t_end = s.t_end;
  cfg.snapshot_count = s.snapshots;
  cfg.max_steps = s.max_steps;
  cfg.max_halvings = s.max_halvings;
  cfg.newton.tol = s.newton_tol;
  cfg.collect_analysis = true;
  cfg.run_audits = s.audits;
  return cfg;
}

}  // namespace toricflow
