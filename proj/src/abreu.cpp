#include "toricflow/abreu.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace toricflow {

namespace {

constexpr double kActiveTol = 1e-12;

// Limit of (B + sum_a t n_a n_a^T)^{-1} as t -> infinity: condition the
// inverse on each active normal in turn.
Mat constrained_inverse(const Mat& B, const std::vector<Vec>& active) {
  Mat C = B.inverse();
  for (const Vec& n : active) {
    const Vec cn = C * n;
    const double d = n.dot(cn);
    if (d <= 0.0) throw std::runtime_error("constrained inverse: degenerate pivot");
    C -= (cn * cn.transpose()) / d;
  }
  return 0.5 * (C + C.transpose());
}

}  // namespace

std::vector<Mat> inverse_hessian_field(const SymplecticPotential& sp) {
  const PolytopeGrid& g = sp.grid();
  const int n = g.dim();
  std::vector<Mat> W;
  W.reserve(g.inpoly_nodes().size());
  for (int id : g.inpoly_nodes()) {
    const Vec x = g.coord(id);
    if (g.min_l(id) > kActiveTol) {
      const Mat H = sp.hessian_node(id);
      Eigen::LDLT<Mat> ldlt(H);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        std::ostringstream os;
        os << "hessian not positive definite at node (" << x.transpose() << ")";
        throw std::runtime_error(os.str());
      }
      Mat Winv = ldlt.solve(Mat::Identity(n, n));
      W.push_back(0.5 * (Winv + Winv.transpose()));
      continue;
    }
    // Boundary node: split facets into active (l = 0) and inactive.
    std::vector<Vec> active;
    Mat B = Mat::Zero(n, n);
    for (const Facet& f : sp.polytope().facets()) {
      const double l = f.eval(x);
      const Vec nv = f.normal.cast<double>();
      if (l <= kActiveTol)
        active.push_back(nv);
      else
        B += (0.5 / l) * nv * nv.transpose();
    }
    // If the active normals already span R^n the limit is zero.
    Mat span = Mat::Zero(n, static_cast<int>(active.size()));
    for (size_t i = 0; i < active.size(); ++i) span.col(static_cast<int>(i)) = active[i];
    if (static_cast<int>(active.size()) >= n &&
        Eigen::FullPivLU<Mat>(span * span.transpose()).isInvertible()) {
      W.push_back(Mat::Zero(n, n));
      continue;
    }
    B += sp.f_hessian_node(id);
    W.push_back(constrained_inverse(B, active));
  }
  return W;
}

CurvatureField scalar_curvature(const SymplecticPotential& sp) {
  const PolytopeGrid& g = sp.grid();
  const int n = g.dim();
  CurvatureField out;
  out.W = inverse_hessian_field(sp);
  for (const Mat& w : out.W) {
    Eigen::SelfAdjointEigenSolver<Mat> es(w, Eigen::EigenvaluesOnly);
    out.max_W_norm = std::max(out.max_W_norm, es.eigenvalues().maxCoeff());
  }

  // W extends smoothly across the boundary (boundary nodes carry the exact
  // constrained limit); differencing a ghost-extended field with one uniform
  // centered stencil family avoids the consistency jumps that ad-hoc
  // one-sided stencils introduce along staircase boundaries.
  const ExtendedLattice ext(g);
  const double h2 = g.h() * g.h();
  std::vector<std::vector<double>> Wab(n * n, std::vector<double>(ext.total, 0.0));
  std::vector<char> seeded(ext.total, 0);
  for (size_t i = 0; i < g.inpoly_nodes().size(); ++i) {
    const int id = g.inpoly_nodes()[i];
    const int eid = ext.index(g.multi_index(id));
    seeded[eid] = 1;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) Wab[a * n + b][eid] = out.W[i](a, b);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      std::vector<char> set = seeded;
      fill_lattice_ghosts(ext, Wab[a * n + b], set, /*order=*/2);
      if (a != b) Wab[b * n + a] = Wab[a * n + b];
    }

  // Direct differencing where min_l > 0: those rings consist of real data
  // and first-generation ghosts. Boundary-class nodes (vertex corners in
  // particular) sit next to multi-generation ghosts, so R itself is
  // continued onto them from inside instead.
  const int npts = static_cast<int>(g.inpoly_nodes().size());
  out.R.assign(npts, 0.0);
  std::vector<char> r_ok(npts, 0);
  for (int i = 0; i < npts; ++i) {
    const int id = g.inpoly_nodes()[i];
    if (g.min_l(id) <= kActiveTol) continue;
    const int eid = ext.index(g.multi_index(id));
    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
      const auto& w = Wab[a * n + a];
      sum += (w[ext.shift(eid, a, 1)] - 2.0 * w[eid] + w[ext.shift(eid, a, -1)]) / h2;
    }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const auto& w = Wab[a * n + b];
        const int pp = ext.shift(ext.shift(eid, a, 1), b, 1);
        const int pm = ext.shift(ext.shift(eid, a, 1), b, -1);
        const int mp = ext.shift(ext.shift(eid, a, -1), b, 1);
        const int mm = ext.shift(ext.shift(eid, a, -1), b, -1);
        sum += 2.0 * (w[pp] - w[pm] - w[mp] + w[mm]) / (4.0 * h2);
      }
    out.R[i] = -sum;
    r_ok[i] = 1;
  }
  bool progress = true;
  while (progress) {
    progress = false;
    bool missing = false;
    for (int i = 0; i < npts; ++i) {
      if (r_ok[i]) continue;
      const int id = g.inpoly_nodes()[i];
      bool done = false;
      for (int a = 0; a < n && !done; ++a)
        for (int s : {1, -1}) {
          const int n1 = g.neighbor(id, a, s);
          const int n2 = n1 >= 0 ? g.neighbor(n1, a, s) : -1;
          if (n1 >= 0 && n2 >= 0 && g.in_polytope(n1) && g.in_polytope(n2) &&
              r_ok[g.inpoly_id(n1)] && r_ok[g.inpoly_id(n2)]) {
            out.R[i] = 2.0 * out.R[g.inpoly_id(n1)] - out.R[g.inpoly_id(n2)];
            r_ok[i] = 1;
            done = true;
            progress = true;
            break;
          }
        }
      if (!done) missing = true;
    }
    if (!missing) break;
  }
  for (int i = 0; i < npts; ++i)
    if (!r_ok[i])
      throw std::runtime_error("grid too coarse: curvature stencil unavailable");
  return out;
}

MeanCurvature mean_curvature(const SymplecticPotential& sp,
                             const CurvatureField& field) {
  const PolytopeGrid& g = sp.grid();
  MeanCurvature mc;
  double num = 0.0, den = 0.0;
  const auto& interior = g.interior_nodes();
  for (size_t k = 0; k < interior.size(); ++k) {
    const double w = g.weights()[k];
    num += w * field.R[g.inpoly_id(interior[k])];
    den += w;
  }
  mc.interior_quadrature = num / den;
  const DelzantPolytope& p = sp.polytope();
  mc.boundary_formula = 2.0 * p.sigma_total() / p.volume();
  return mc;
}

double calabi_energy(const SymplecticPotential& sp, const CurvatureField& field) {
  const PolytopeGrid& g = sp.grid();
  const double rbar = mean_curvature(sp, field).interior_quadrature;
  double acc = 0.0;
  const auto& interior = g.interior_nodes();
  for (size_t k = 0; k < interior.size(); ++k) {
    const double r = field.R[g.inpoly_id(interior[k])];
    acc += g.mu_weight(static_cast<int>(k)) * (rbar - r) * (rbar - r);
  }
  return acc;
}

double calabi_energy(const SymplecticPotential& sp) {
  return calabi_energy(sp, scalar_curvature(sp));
}

}  // namespace toricflow
