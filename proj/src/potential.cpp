#include "toricflow/potential.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace toricflow {

namespace {
constexpr double kBoundaryTol = 1e-12;

double xlogx(double t) { return t > kBoundaryTol ? t * std::log(t) : 0.0; }
}  // namespace

SymplecticPotential::SymplecticPotential(
    std::shared_ptr<const PolytopeGrid> grid, std::vector<double> smooth_part)
    : grid_(std::move(grid)), f_(std::move(smooth_part)) {
  if (f_.size() != grid_->inpoly_nodes().size())
    throw std::invalid_argument("smooth part size != in-polytope node count");
  for (double v : f_)
    if (!std::isfinite(v))
      throw std::invalid_argument("smooth part has non-finite values");
  canonical_only_ = true;
  for (double v : f_)
    if (v != 0.0) {
      canonical_only_ = false;
      break;
    }
}

const HermiteField& SymplecticPotential::interp() const {
  if (!interp_) interp_ = std::make_shared<HermiteField>(grid_, f_);
  return *interp_;
}

SymplecticPotential SymplecticPotential::canonical(
    std::shared_ptr<const PolytopeGrid> grid) {
  std::vector<double> z(grid->inpoly_nodes().size(), 0.0);
  return SymplecticPotential(std::move(grid), std::move(z));
}

SymplecticPotential SymplecticPotential::from_function(
    std::shared_ptr<const PolytopeGrid> grid,
    const std::function<double(const Vec&)>& f) {
  std::vector<double> v;
  v.reserve(grid->inpoly_nodes().size());
  for (int id : grid->inpoly_nodes()) v.push_back(f(grid->coord(id)));
  return SymplecticPotential(std::move(grid), std::move(v));
}

double SymplecticPotential::canonical_value(const Vec& x) const {
  double s = 0.0;
  for (const Facet& fa : polytope().facets()) s += xlogx(fa.eval(x));
  return 0.5 * s;
}

Vec SymplecticPotential::canonical_gradient(const Vec& x) const {
  Vec g = Vec::Zero(grid_->dim());
  for (const Facet& fa : polytope().facets()) {
    const double l = fa.eval(x);
    if (l <= 0.0)
      throw std::runtime_error("canonical gradient evaluated at l <= 0");
    g += 0.5 * (1.0 + std::log(l)) * fa.normal.cast<double>();
  }
  return g;
}

Mat SymplecticPotential::canonical_hessian(const Vec& x) const {
  Mat h = Mat::Zero(grid_->dim(), grid_->dim());
  for (const Facet& fa : polytope().facets()) {
    const double l = fa.eval(x);
    if (l <= 0.0)
      throw std::runtime_error("canonical hessian evaluated at l <= 0");
    const Vec n = fa.normal.cast<double>();
    h += (0.5 / l) * n * n.transpose();
  }
  return h;
}

double SymplecticPotential::value(const Vec& x) const {
  return canonical_value(x) + interp().value(x);
}

Vec SymplecticPotential::gradient(const Vec& x) const {
  return canonical_gradient(x) + interp().gradient(x);
}

Mat SymplecticPotential::hessian(const Vec& x) const {
  return canonical_hessian(x) + interp().hessian(x);
}

double SymplecticPotential::value_node(int node) const {
  return canonical_value(grid_->coord(node)) + f_at(node);
}

const std::vector<double>& SymplecticPotential::ext_f() const {
  if (!ext_f_) {
    const ExtendedLattice ext(*grid_);
    auto v = std::make_shared<std::vector<double>>(ext.total, 0.0);
    std::vector<char> set(ext.total, 0);
    for (size_t i = 0; i < f_.size(); ++i) {
      const int eid = ext.index(grid_->multi_index(grid_->inpoly_nodes()[i]));
      (*v)[eid] = f_[i];
      set[eid] = 1;
    }
    fill_lattice_ghosts(ext, *v, set, /*order=*/3);
    ext_f_ = std::move(v);
  }
  return *ext_f_;
}

double SymplecticPotential::f_d2(int node, int a, int b) const {
  const ExtendedLattice ext(*grid_);
  const std::vector<double>& v = ext_f();
  const int eid = ext.index(grid_->multi_index(node));
  const double h2 = grid_->h() * grid_->h();
  if (a == b)
    return (v[ext.shift(eid, a, 1)] - 2.0 * v[eid] + v[ext.shift(eid, a, -1)]) /
           h2;
  const int pp = ext.shift(ext.shift(eid, a, 1), b, 1);
  const int pm = ext.shift(ext.shift(eid, a, 1), b, -1);
  const int mp = ext.shift(ext.shift(eid, a, -1), b, 1);
  const int mm = ext.shift(ext.shift(eid, a, -1), b, -1);
  return (v[pp] - v[pm] - v[mp] + v[mm]) / (4.0 * h2);
}

Mat SymplecticPotential::f_hessian_node(int node) const {
  const int n = grid_->dim();
  Mat h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      const double v = f_d2(node, a, b);
      h(a, b) = v;
      h(b, a) = v;
    }
  return h;
}

Mat SymplecticPotential::hessian_node(int node) const {
  if (grid_->min_l(node) <= 0.0)
    throw std::runtime_error("node hessian requested on the boundary");
  return canonical_hessian(grid_->coord(node)) + f_hessian_node(node);
}

SymplecticPotential SymplecticPotential::normalized_at(const Vec& x0) const {
  if (polytope().min_l(x0) <= 0.0)
    throw std::invalid_argument("normalization point must be interior");
  const double u0 = value(x0);
  const Vec g0 = gradient(x0);
  std::vector<double> nf(f_.size());
  for (size_t i = 0; i < f_.size(); ++i) {
    const Vec x = grid_->coord(grid_->inpoly_nodes()[i]);
    nf[i] = f_[i] - u0 - g0.dot(x - x0);
  }
  return SymplecticPotential(grid_, std::move(nf));
}

SymplecticPotential SymplecticPotential::shifted(double c) const {
  std::vector<double> nf = f_;
  for (double& v : nf) v += c;
  return SymplecticPotential(grid_, std::move(nf));
}

bool SymplecticPotential::convex_on_grid(int* where) const {
  for (int id : grid_->inpoly_nodes()) {
    if (grid_->min_l(id) <= 0.0) continue;
    const Mat h = hessian_node(id);
    Eigen::LLT<Mat> llt(h);
    if (llt.info() != Eigen::Success) {
      if (where) *where = id;
      return false;
    }
  }
  return true;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string write_snapshot(const SymplecticPotential& sp, double t,
                           const std::string& polytope_name,
                           double newton_tol) {
  const PolytopeGrid& g = sp.grid();
  std::ostringstream os;
  os << "# toricflow snapshot v1\n";
  os << "polytope " << polytope_name << '\n';
  os << "dim " << g.dim() << '\n';
  os << "facets " << g.polytope().facet_count() << '\n';
  std::istringstream facets(g.polytope().to_text());
  std::string line;
  while (std::getline(facets, line)) os << "facet " << line << '\n';
  os << "h " << format_double(g.h()) << '\n';
  os << "t " << format_double(t) << '\n';
  os << "newton_tol " << format_double(newton_tol) << '\n';
  os << "nodes " << g.inpoly_nodes().size() << '\n';
  for (double v : sp.smooth_part()) os << format_double(v) << '\n';
  return os.str();
}

SnapshotFile parse_snapshot(const std::string& text) {
  SnapshotFile s;
  std::istringstream in(text);
  std::string line;
  std::ostringstream facet_text;
  long nodes = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "polytope")
      ls >> s.polytope_name;
    else if (key == "dim" || key == "facets") {
      // facet count is implied by the facet lines; dim by their width
    } else if (key == "facet") {
      std::string rest;
      std::getline(ls, rest);
      facet_text << rest << '\n';
    } else if (key == "h")
      ls >> s.h;
    else if (key == "t")
      ls >> s.t;
    else if (key == "newton_tol")
      ls >> s.newton_tol;
    else if (key == "nodes") {
      ls >> nodes;
      break;
    } else
      throw std::invalid_argument("snapshot: unknown header key '" + key + "'");
  }
  if (nodes < 0) throw std::invalid_argument("snapshot: missing node count");
  s.polytope_text = facet_text.str();
  s.f.reserve(nodes);
  double v;
  while (in >> v) s.f.push_back(v);
  if (static_cast<long>(s.f.size()) != nodes)
    throw std::invalid_argument("snapshot: value count does not match header");
  return s;
}

SymplecticPotential load_snapshot(const SnapshotFile& s,
                                  std::shared_ptr<const PolytopeGrid>* grid_out) {
  auto poly = std::make_shared<DelzantPolytope>(DelzantPolytope::parse(s.polytope_text));
  auto grid = std::make_shared<PolytopeGrid>(poly, s.h);
  if (grid_out) *grid_out = grid;
  return SymplecticPotential(grid, s.f);
}

}  // namespace toricflow
