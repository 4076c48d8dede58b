#include "toricflow/legendre.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace toricflow {

namespace {

// Largest s in (0, s_cap] keeping x + s*d strictly inside P, shrunk by the
// boundary fraction.
double safeguard_step(const DelzantPolytope& p, const Vec& x, const Vec& d,
                      double frac) {
  double s = 1.0;
  for (const Facet& f : p.facets()) {
    const double dn = f.normal.cast<double>().dot(d);
    if (dn < 0.0) {
      const double lim = -f.eval(x) / dn;  // l(x + lim*d) = 0
      s = std::min(s, frac * lim);
    }
  }
  return s;
}

LegendrePoint solve_one(const SymplecticPotential& sp, const Vec& xi,
                        const Vec& start, const NewtonOptions& opts) {
  LegendrePoint out;
  out.xi = xi;
  const DelzantPolytope& p = sp.polytope();
  Vec x = start;
  auto objective = [&](const Vec& y) { return xi.dot(y) - sp.value(y); };
  double res = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const Vec g = xi - sp.gradient(x);
    res = g.norm();
    if (res <= opts.tol) break;
    const Mat H = sp.hessian(x);
    Eigen::LDLT<Mat> ldlt(H);
    Vec d;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive())
      d = ldlt.solve(g);
    else
      d = g;  // gradient ascent fallback; the safeguard keeps it interior
    double s = safeguard_step(p, x, d, opts.boundary_fraction);
    const double base = objective(x);
    const double slope = g.dot(d);
    // Near the optimum the predicted gain drops below double resolution;
    // line-searching there just stalls.
    if (slope > 1e-13 * (1.0 + std::abs(base))) {
      int backtracks = 0;
      while (backtracks < 60 && objective(x + s * d) < base + 1e-4 * s * slope) {
        s *= 0.5;
        ++backtracks;
      }
      if (!(s > 0.0) || backtracks >= 60) break;
    }
    x += s * d;
  }
  out.xstar = x;
  out.psi = xi.dot(x) - sp.value(x);
  out.residual = (xi - sp.gradient(x)).norm();
  out.iters = it;
  out.converged = out.residual <= opts.tol;
  return out;
}

}  // namespace

KahlerPotentialSamples legendre_to_complex(const SymplecticPotential& sp,
                                           const std::vector<Vec>& xi_set,
                                           const NewtonOptions& opts) {
  KahlerPotentialSamples out;
  out.points.reserve(xi_set.size());
  const Vec bary = sp.polytope().barycenter();
  Vec warm = bary;
  bool warm_ok = false;
  std::ostringstream failures;
  int nfail = 0;
  for (const Vec& xi : xi_set) {
    LegendrePoint pt = solve_one(sp, xi, warm_ok ? warm : bary, opts);
    if (!pt.converged && warm_ok) pt = solve_one(sp, xi, bary, opts);
    if (pt.converged) {
      warm = pt.xstar;
      warm_ok = true;
    } else {
      ++nfail;
      if (nfail <= 4) failures << " xi=(" << pt.xi.transpose() << ")";
    }
    out.points.push_back(std::move(pt));
  }
  if (nfail > 0) {
    std::ostringstream os;
    os << "legendre solve failed at " << nfail << " of " << xi_set.size()
       << " targets:" << failures.str();
    throw std::runtime_error(os.str());
  }
  return out;
}

bool KahlerPotentialSamples::all_converged() const {
  for (const auto& p : points)
    if (!p.converged) return false;
  return true;
}

double KahlerPotentialSamples::convexity_violation() const {
  const size_t n = points.size();
  const size_t stride = n > 1500 ? n / 1000 + 1 : 1;
  double worst = 0.0;
  for (size_t i = 0; i < n; i += stride)
    for (size_t j = 0; j < n; j += stride) {
      if (i == j) continue;
      const auto& a = points[i];
      const auto& b = points[j];
      const double support = b.psi + b.xstar.dot(a.xi - b.xi);
      worst = std::max(worst, support - a.psi);
    }
  return worst;
}

double KahlerPotentialSamples::moment_image_violation(
    const DelzantPolytope& p) const {
  double worst = 0.0;
  for (const auto& pt : points) worst = std::max(worst, -p.min_l(pt.xstar));
  return worst;
}

double KahlerPotentialSamples::max_fenchel_residual(
    const SymplecticPotential& sp) const {
  double worst = 0.0;
  for (const auto& pt : points)
    worst = std::max(worst,
                     std::abs(pt.psi + sp.value(pt.xstar) - pt.xi.dot(pt.xstar)));
  return worst;
}

RelativePotentialSamples relative_potential(
    const KahlerPotentialSamples& from, const KahlerPotentialSamples& reference) {
  if (from.points.size() != reference.points.size())
    throw std::invalid_argument("relative potential: misaligned sample sets");
  RelativePotentialSamples out;
  out.from = &from;
  out.reference = &reference;
  out.xi.reserve(from.points.size());
  out.phi.reserve(from.points.size());
  for (size_t i = 0; i < from.points.size(); ++i) {
    if ((from.points[i].xi - reference.points[i].xi).norm() > 1e-12)
      throw std::invalid_argument("relative potential: xi sets differ");
    out.xi.push_back(from.points[i].xi);
    out.phi.push_back(from.points[i].psi - reference.points[i].psi);
  }
  return out;
}

std::vector<Vec> default_xi_set(const SymplecticPotential& reference) {
  std::vector<Vec> xi;
  const PolytopeGrid& g = reference.grid();
  xi.reserve(g.interior_nodes().size());
  for (int id : g.interior_nodes()) xi.push_back(reference.gradient(g.coord(id)));
  return xi;
}

}  // namespace toricflow
