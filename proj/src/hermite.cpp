#include "toricflow/hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace toricflow {

HermiteField::HermiteField(std::shared_ptr<const PolytopeGrid> grid,
                           const std::vector<double>& inpoly_values)
    : grid_(std::move(grid)), n_(grid_->dim()) {
  if (static_cast<int>(inpoly_values.size()) !=
      static_cast<int>(grid_->inpoly_nodes().size()))
    throw std::invalid_argument("hermite: value count != in-polytope node count");
  const int total = grid_->node_count();
  std::vector<double> v(total, 0.0);
  std::vector<char> filled(total, 0);
  for (size_t i = 0; i < grid_->inpoly_nodes().size(); ++i) {
    const int id = grid_->inpoly_nodes()[i];
    v[id] = inpoly_values[i];
    filled[id] = 1;
  }
  // Ghost fill: layer-by-layer linear extrapolation from filled neighbors.
  while (true) {
    std::vector<std::pair<int, double>> updates;
    for (int id = 0; id < total; ++id) {
      if (filled[id]) continue;
      double sum = 0.0;
      int cnt = 0;
      for (int a = 0; a < n_; ++a)
        for (int s : {-1, 1}) {
          const int n1 = grid_->neighbor(id, a, s);
          if (n1 < 0 || !filled[n1]) continue;
          const int n2 = grid_->neighbor(id, a, 2 * s);
          if (n2 >= 0 && filled[n2])
            sum += 2.0 * v[n1] - v[n2];
          else
            sum += v[n1];
          ++cnt;
        }
      if (cnt > 0) updates.emplace_back(id, sum / cnt);
    }
    if (updates.empty()) break;
    for (const auto& [id, val] : updates) {
      v[id] = val;
      filled[id] = 1;
    }
  }

  pow3_.resize(n_ + 1);
  pow3_[0] = 1;
  for (int a = 0; a < n_; ++a) pow3_[a + 1] = 3 * pow3_[a];
  data_.resize(pow3_[n_]);
  data_[0] = std::move(v);
  // Build every mixed-derivative tensor by lowering one axis order at a time.
  for (int alpha = 1; alpha < pow3_[n_]; ++alpha) {
    int axis = -1, order = 0;
    for (int a = 0; a < n_; ++a) {
      const int d = (alpha / pow3_[a]) % 3;
      if (d > 0) {
        axis = a;
        order = d;
        break;
      }
    }
    const int src = alpha - pow3_[axis] * order;
    differentiate(data_[src], axis, order, data_[alpha]);
  }
}

void HermiteField::differentiate(const std::vector<double>& src, int axis,
                                 int order, std::vector<double>& dst) const {
  const int total = grid_->node_count();
  const double h = grid_->h();
  dst.assign(total, 0.0);
  for (int id = 0; id < total; ++id) {
    auto at = [&](int off) -> const double* {
      const int nb = grid_->neighbor(id, axis, off);
      return nb >= 0 ? &src[nb] : nullptr;
    };
    const double* p1 = at(1);
    const double* m1 = at(-1);
    const double* p2 = at(2);
    const double* m2 = at(-2);
    if (order == 1) {
      if (p2 && m2)
        dst[id] = (-*p2 + 8.0 * *p1 - 8.0 * *m1 + *m2) / (12.0 * h);
      else if (p1 && m1)
        dst[id] = (*p1 - *m1) / (2.0 * h);
      else if (p1)
        dst[id] = p2 ? (-3.0 * src[id] + 4.0 * *p1 - *p2) / (2.0 * h)
                     : (*p1 - src[id]) / h;
      else if (m1)
        dst[id] = m2 ? (3.0 * src[id] - 4.0 * *m1 + *m2) / (2.0 * h)
                     : (src[id] - *m1) / h;
    } else {
      const double h2 = h * h;
      if (p2 && m2)
        dst[id] =
            (-*p2 + 16.0 * *p1 - 30.0 * src[id] + 16.0 * *m1 - *m2) / (12.0 * h2);
      else if (p1 && m1)
        dst[id] = (*p1 - 2.0 * src[id] + *m1) / h2;
      else if (p1 && p2) {
        const double* p3 = at(3);
        dst[id] = p3 ? (2.0 * src[id] - 5.0 * *p1 + 4.0 * *p2 - *p3) / h2
                     : (src[id] - 2.0 * *p1 + *p2) / h2;
      } else if (m1 && m2) {
        const double* m3 = at(-3);
        dst[id] = m3 ? (2.0 * src[id] - 5.0 * *m1 + 4.0 * *m2 - *m3) / h2
                     : (src[id] - 2.0 * *m1 + *m2) / h2;
      }
    }
  }
}

Jet HermiteField::eval(const Vec& x) const {
  const double h = grid_->h();
  const auto& dims = grid_->dims();
  std::vector<int> cell(n_);
  Vec t(n_);
  for (int a = 0; a < n_; ++a) {
    double s = (x[a] - grid_->lo()[a]) / h;
    int c = static_cast<int>(std::floor(s));
    c = std::max(0, std::min(c, dims[a] - 2));
    cell[a] = c;
    t[a] = s - c;
  }
  const int corners = 1 << n_;
  const int levels = pow3_[n_];
  // work[corner_mask * levels + alpha]; each axis pass collapses that axis's
  // corner bit and derivative digit via the quintic Hermite basis.
  std::vector<Jet> work(static_cast<size_t>(corners) * levels, Jet(n_));
  for (int cm = 0; cm < corners; ++cm) {
    std::vector<int> k(n_);
    for (int a = 0; a < n_; ++a) k[a] = cell[a] + ((cm >> a) & 1);
    const int node = grid_->index(k);
    for (int alpha = 0; alpha < levels; ++alpha)
      work[static_cast<size_t>(cm) * levels + alpha] =
          Jet::constant(n_, data_[alpha][node]);
  }
  int corner_done = 0;
  std::vector<char> level_done(n_, 0);
  for (int a = 0; a < n_; ++a) {
    Jet ta(n_);
    ta.v = t[a];
    ta.g[a] = 1.0 / h;
    const Jet one = Jet::constant(n_, 1.0);
    const Jet t2 = ta * ta;
    const Jet t3 = t2 * ta;
    const Jet t4 = t3 * ta;
    const Jet t5 = t4 * ta;
    // Quintic Hermite basis: C^2 match of value/slope/curvature at both ends.
    const Jet H00 = one + (-10.0) * t3 + 15.0 * t4 + (-6.0) * t5;
    const Jet H10 = ta + (-6.0) * t3 + 8.0 * t4 + (-3.0) * t5;
    const Jet H20 = 0.5 * t2 + (-1.5) * t3 + 1.5 * t4 + (-0.5) * t5;
    const Jet H01 = 10.0 * t3 + (-15.0) * t4 + 6.0 * t5;
    const Jet H11 = (-4.0) * t3 + 7.0 * t4 + (-3.0) * t5;
    const Jet H21 = 0.5 * t3 + (-1.0) * t4 + 0.5 * t5;
    const int bit = 1 << a;
    const int p3a = pow3_[a];
    for (int cm = 0; cm < corners; ++cm) {
      if (cm & (bit | corner_done)) continue;
      for (int alpha = 0; alpha < levels; ++alpha) {
        if ((alpha / p3a) % 3 != 0) continue;
        bool stale = false;
        for (int b = 0; b < a; ++b)
          if ((alpha / pow3_[b]) % 3 != 0) stale = true;
        if (stale) continue;
        auto W = [&](int corner, int lev) -> const Jet& {
          return work[static_cast<size_t>(corner) * levels + alpha +
                      lev * p3a];
        };
        work[static_cast<size_t>(cm) * levels + alpha] =
            H00 * W(cm, 0) + h * (H10 * W(cm, 1)) +
            (h * h) * (H20 * W(cm, 2)) + H01 * W(cm | bit, 0) +
            h * (H11 * W(cm | bit, 1)) + (h * h) * (H21 * W(cm | bit, 2));
      }
    }
    corner_done |= bit;
  }
  return work[0];
}

}  // namespace toricflow
