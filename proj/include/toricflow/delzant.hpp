#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace toricflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;

/// One half-space l(x) = <x, normal> + offset >= 0 with primitive integer normal.
struct Facet {
  IVec normal;
  double offset = 0.0;

  double eval(const Vec& x) const { return normal.cast<double>().dot(x) + offset; }
  double normal_length() const { return normal.cast<double>().norm(); }
};

/// Per-vertex row of a validity report: which facets meet there and the
/// determinant of their normal matrix (must be +-1 for a Delzant polytope).
struct VertexCheck {
  Vec vertex;
  std::vector<int> incident_facets;
  long long normal_det = 0;  // exact integer determinant
  bool ok = false;
  std::string message;
};

struct ValidityReport {
  bool valid = false;
  std::vector<VertexCheck> vertices;
  std::vector<std::string> errors;
};

/// Convex polytope P = {x : l_i(x) >= 0} in H-representation. Vertices are
/// enumerated once at construction and cached. Immutable afterwards.
class DelzantPolytope {
 public:
  DelzantPolytope(int dim, std::vector<Facet> facets);

  int dim() const { return dim_; }
  int facet_count() const { return static_cast<int>(facets_.size()); }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<Vec>& vertices() const { return vertices_; }

  double l(int i, const Vec& x) const { return facets_[i].eval(x); }
  /// min_i l_i(x); > 0 iff x is interior.
  double min_l(const Vec& x) const;
  bool contains(const Vec& x, double tol = 0.0) const { return min_l(x) >= -tol; }

  Vec barycenter() const;
  void bounding_box(Vec& lo, Vec& hi) const;

  /// Full Delzant validation: primitivity, vertex incidence, Z^n bases.
  ValidityReport validate() const;

  /// Euclidean volume mu(P).
  double volume() const;
  /// Boundary measure: per-facet d-sigma mass = Euclidean area / |n_i|.
  std::vector<double> facet_sigma_masses() const;
  double sigma_total() const;

  /// Homothety about `center` with ratio lambda in (0,1]. Result keeps the
  /// facet normals; offsets move, so it is generally not Delzant.
  DelzantPolytope shrink(const Vec& center, double lambda) const;

  static DelzantPolytope preset(const std::string& name);
  static std::vector<std::string> preset_names();

  /// Text format: one facet per line "n_1 ... n_n c".
  static DelzantPolytope parse(const std::string& text, int dim_hint = -1);
  std::string to_text() const;

 private:
  int dim_;
  std::vector<Facet> facets_;
  std::vector<Vec> vertices_;

  void enumerate_vertices();
};

}  // namespace toricflow
