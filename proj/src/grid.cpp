#include "toricflow/grid.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace toricflow {

namespace {

constexpr double kClassTol = 1e-12;

// Clip a convex polygon (vertex loop) against half-plane l(x) >= 0.
std::vector<Vec> clip_halfplane(const std::vector<Vec>& poly, const Vec& n,
                                double c) {
  std::vector<Vec> out;
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % m];
    const double la = n.dot(a) + c;
    const double lb = n.dot(b) + c;
    if (la >= 0.0) out.push_back(a);
    if ((la > 0.0 && lb < 0.0) || (la < 0.0 && lb > 0.0)) {
      const double t = la / (la - lb);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

double polygon_area(const std::vector<Vec>& poly) {
  double s = 0.0;
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % m];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * std::abs(s);
}

}  // namespace

PolytopeGrid::PolytopeGrid(std::shared_ptr<const DelzantPolytope> poly, double h)
    : poly_(std::move(poly)), h_(h) {
  if (!(h_ > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  poly_->bounding_box(lo_, hi_);
  const int n = poly_->dim();
  dims_.resize(n);
  for (int a = 0; a < n; ++a) {
    dims_[a] = static_cast<int>(std::round((hi_[a] - lo_[a]) / h_)) + 1;
    if (dims_[a] < 2) throw std::invalid_argument("grid too coarse: h exceeds polytope extent");
  }
  strides_.assign(n, 1);
  for (int a = n - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * dims_[a + 1];
  total_ = strides_[0] * dims_[0];

  klass_.resize(total_);
  min_l_.resize(total_);
  inpoly_id_.assign(total_, -1);
  for (int id = 0; id < total_; ++id) {
    const Vec x = coord(id);
    const double ml = poly_->min_l(x);
    min_l_[id] = ml;
    if (ml >= h_ / 2.0 - kClassTol)
      klass_[id] = NodeClass::kInterior;
    else if (ml > kClassTol)
      klass_[id] = NodeClass::kNearBoundary;
    else if (ml > -kClassTol)
      klass_[id] = NodeClass::kBoundary;
    else
      klass_[id] = NodeClass::kOutside;
    if (klass_[id] != NodeClass::kOutside) {
      inpoly_id_[id] = static_cast<int>(inpoly_.size());
      inpoly_.push_back(id);
      if (klass_[id] == NodeClass::kInterior) interior_.push_back(id);
    }
  }
  if (interior_.empty())
    throw std::invalid_argument("grid too coarse: no interior nodes");
  check_interior_connected();

  volume_ = poly_->volume();
  weights_.reserve(interior_.size());
  for (int id : interior_) {
    const double w = cell_volume_clipped(id);
    weights_.push_back(w);
    weight_sum_ += w;
  }
}

int PolytopeGrid::index(const std::vector<int>& k) const {
  int id = 0;
  for (size_t a = 0; a < k.size(); ++a) id += k[a] * strides_[a];
  return id;
}

std::vector<int> PolytopeGrid::multi_index(int node) const {
  std::vector<int> k(dims_.size());
  for (size_t a = 0; a < dims_.size(); ++a) {
    k[a] = node / strides_[a];
    node -= k[a] * strides_[a];
  }
  return k;
}

Vec PolytopeGrid::coord(int node) const {
  const auto k = multi_index(node);
  Vec x(static_cast<int>(k.size()));
  for (size_t a = 0; a < k.size(); ++a) x[a] = lo_[a] + h_ * k[a];
  return x;
}

int PolytopeGrid::neighbor(int node, int axis, int steps) const {
  const int ka = (node / strides_[axis]) % dims_[axis];
  const int kn = ka + steps;
  if (kn < 0 || kn >= dims_[axis]) return -1;
  return node + steps * strides_[axis];
}

double PolytopeGrid::cell_volume_clipped(int node) const {
  const int n = dim();
  const Vec x = coord(node);
  if (n == 1) {
    double a = x[0] - h_ / 2.0, b = x[0] + h_ / 2.0;
    for (const Facet& f : poly_->facets()) {
      const double nf = static_cast<double>(f.normal[0]);
      // nf * t + c >= 0
      if (nf > 0)
        a = std::max(a, -f.offset / nf);
      else if (nf < 0)
        b = std::min(b, -f.offset / nf);
    }
    return std::max(0.0, b - a);
  }
  if (n == 2) {
    std::vector<Vec> cell = {x + (Vec(2) << -h_ / 2, -h_ / 2).finished(),
                             x + (Vec(2) << h_ / 2, -h_ / 2).finished(),
                             x + (Vec(2) << h_ / 2, h_ / 2).finished(),
                             x + (Vec(2) << -h_ / 2, h_ / 2).finished()};
    for (const Facet& f : poly_->facets()) {
      cell = clip_halfplane(cell, f.normal.cast<double>(), f.offset);
      if (cell.size() < 3) return 0.0;
    }
    return polygon_area(cell);
  }
  // n >= 3: deterministic subcell count. Adequate for diagnostics; the
  // preset suite is 1D/2D.
  const int m = 6;
  const double sub = h_ / m;
  std::vector<int> k(n, 0);
  double inside = 0.0;
  while (true) {
    Vec p = x;
    for (int a = 0; a < n; ++a) p[a] += -h_ / 2 + (k[a] + 0.5) * sub;
    if (poly_->contains(p)) inside += 1.0;
    int a = n - 1;
    while (a >= 0 && ++k[a] == m) k[a--] = 0;
    if (a < 0) break;
  }
  return inside * std::pow(sub, n);
}

void PolytopeGrid::check_interior_connected() const {
  std::vector<char> seen(total_, 0);
  std::deque<int> q = {interior_.front()};
  seen[q.front()] = 1;
  size_t visited = 0;
  while (!q.empty()) {
    const int id = q.front();
    q.pop_front();
    ++visited;
    for (int a = 0; a < dim(); ++a)
      for (int s : {-1, 1}) {
        const int nb = neighbor(id, a, s);
        if (nb >= 0 && !seen[nb] && klass_[nb] == NodeClass::kInterior) {
          seen[nb] = 1;
          q.push_back(nb);
        }
      }
  }
  if (visited != interior_.size())
    throw std::invalid_argument("grid too coarse: interior nodes disconnected");
}

Stencil1D PolytopeGrid::d1_stencil(int node, int axis,
                                   const std::function<bool(int)>& usable) const {
  auto ok = [&](int steps) {
    const int nb = neighbor(node, axis, steps);
    return nb >= 0 && usable(nb);
  };
  Stencil1D s;
  if (ok(-1) && ok(1)) {
    s.taps = {{-1, -0.5 / h_}, {1, 0.5 / h_}};
    s.ok = true;
  } else if (ok(1) && ok(2)) {
    s.taps = {{0, -1.5 / h_}, {1, 2.0 / h_}, {2, -0.5 / h_}};
    s.ok = true;
  } else if (ok(-1) && ok(-2)) {
    s.taps = {{0, 1.5 / h_}, {-1, -2.0 / h_}, {-2, 0.5 / h_}};
    s.ok = true;
  } else if (ok(1)) {
    s.taps = {{0, -1.0 / h_}, {1, 1.0 / h_}};
    s.ok = true;
  } else if (ok(-1)) {
    s.taps = {{0, 1.0 / h_}, {-1, -1.0 / h_}};
    s.ok = true;
  }
  return s;
}

ExtendedLattice::ExtendedLattice(const PolytopeGrid& g)
    : n(g.dim()), dims(g.dims()) {
  for (int& d : dims) d += 2;
  strides.assign(n, 1);
  for (int a = n - 2; a >= 0; --a) strides[a] = strides[a + 1] * dims[a + 1];
  total = strides[0] * dims[0];
}

void fill_lattice_ghosts(const ExtendedLattice& ext, std::vector<double>& v,
                         std::vector<char>& set, int order) {
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<std::pair<int, double>> updates;
    for (int id = 0; id < ext.total; ++id) {
      if (set[id]) continue;
      // Mixing orders would let a one-point copy pollute directions where a
      // genuine polynomial extrapolation exists, so keep the best order only.
      double sum[4] = {0.0, 0.0, 0.0, 0.0};
      int cnt[4] = {0, 0, 0, 0};
      for (int a = 0; a < ext.n; ++a)
        for (int s : {-1, 1}) {
          const int pos = ext.axis_pos(id, a);
          auto ok = [&](int step) {
            const int kk = pos + s * step;
            return kk >= 0 && kk < ext.dims[a] &&
                   set[ext.shift(id, a, s * step)];
          };
          auto tap = [&](int step) { return v[ext.shift(id, a, s * step)]; };
          if (order >= 3 && ok(1) && ok(2) && ok(3) && ok(4)) {
            sum[3] += 4.0 * tap(1) - 6.0 * tap(2) + 4.0 * tap(3) - tap(4);
            ++cnt[3];
          } else if (order >= 2 && ok(1) && ok(2) && ok(3)) {
            sum[2] += 3.0 * tap(1) - 3.0 * tap(2) + tap(3);
            ++cnt[2];
          } else if (ok(1) && ok(2)) {
            sum[1] += 2.0 * tap(1) - tap(2);
            ++cnt[1];
          } else if (ok(1)) {
            sum[0] += tap(1);
            ++cnt[0];
          }
        }
      for (int o = 3; o >= 0; --o)
        if (cnt[o] > 0) {
          updates.emplace_back(id, sum[o] / cnt[o]);
          break;
        }
    }
    for (const auto& [id, val] : updates) {
      v[id] = val;
      set[id] = 1;
      progress = true;
    }
    bool all = true;
    for (int id = 0; id < ext.total; ++id)
      if (!set[id]) all = false;
    if (all) break;
  }
}

Stencil1D PolytopeGrid::d2_stencil(int node, int axis,
                                   const std::function<bool(int)>& usable) const {
  auto ok = [&](int steps) {
    const int nb = neighbor(node, axis, steps);
    return nb >= 0 && usable(nb);
  };
  const double h2 = h_ * h_;
  Stencil1D s;
  if (ok(-1) && ok(1)) {
    s.taps = {{-1, 1.0 / h2}, {0, -2.0 / h2}, {1, 1.0 / h2}};
    s.ok = true;
  } else if (ok(1) && ok(2) && ok(3)) {
    s.taps = {{0, 2.0 / h2}, {1, -5.0 / h2}, {2, 4.0 / h2}, {3, -1.0 / h2}};
    s.ok = true;
  } else if (ok(-1) && ok(-2) && ok(-3)) {
    s.taps = {{0, 2.0 / h2}, {-1, -5.0 / h2}, {-2, 4.0 / h2}, {-3, -1.0 / h2}};
    s.ok = true;
  } else if (ok(1) && ok(2)) {
    s.taps = {{0, 1.0 / h2}, {1, -2.0 / h2}, {2, 1.0 / h2}};
    s.ok = true;
  } else if (ok(-1) && ok(-2)) {
    s.taps = {{0, 1.0 / h2}, {-1, -2.0 / h2}, {-2, 1.0 / h2}};
    s.ok = true;
  }
  return s;
}

}  // namespace toricflow
