#pragma once

#include <memory>
#include <vector>

#include "toricflow/grid.hpp"

namespace toricflow {

/// Second-order jet (value, gradient, Hessian) for propagating derivatives
/// through the tensor-product Hermite evaluation.
struct Jet {
  double v = 0.0;
  Vec g;
  Mat H;

  explicit Jet(int n) : g(Vec::Zero(n)), H(Mat::Zero(n, n)) {}
  static Jet constant(int n, double c) {
    Jet j(n);
    j.v = c;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    g += o.g;
    H += o.H;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator*(double s, Jet a) {
    a.v *= s;
    a.g *= s;
    a.H *= s;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(static_cast<int>(a.g.size()));
    r.v = a.v * b.v;
    r.g = a.v * b.g + b.v * a.g;
    r.H = a.v * b.H + b.v * a.H + a.g * b.g.transpose() +
          b.g * a.g.transpose();
    return r;
  }
};

/// C^2 tensor-product quintic Hermite interpolant of a node field over the
/// grid's full bounding-box lattice. Node data (values, slopes, curvatures
/// and their mixed products) come from fourth-order centered differences,
/// one-sided at lattice edges, so off-node Hessians are O(h^4) accurate in
/// the lattice interior. Outside-polytope lattice nodes are filled by linear
/// extrapolation so cut cells have complete corner data.
class HermiteField {
 public:
  HermiteField(std::shared_ptr<const PolytopeGrid> grid,
               const std::vector<double>& inpoly_values);

  double value(const Vec& x) const { return eval(x).v; }
  Vec gradient(const Vec& x) const { return eval(x).g; }
  Mat hessian(const Vec& x) const { return eval(x).H; }
  Jet eval(const Vec& x) const;

  /// Full-lattice data after ghost filling (lattice node id -> value).
  const std::vector<double>& lattice_values() const { return data_[0]; }

 private:
  std::shared_ptr<const PolytopeGrid> grid_;
  int n_;
  std::vector<int> pow3_;
  // data_[alpha] = mixed partial with per-axis derivative order alpha_a in
  // {0,1,2}, alpha packed base-3 (axis 0 least significant digit).
  std::vector<std::vector<double>> data_;

  void differentiate(const std::vector<double>& src, int axis, int order,
                     std::vector<double>& dst) const;
};

}  // namespace toricflow
