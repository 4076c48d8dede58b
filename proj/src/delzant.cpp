#include "toricflow/delzant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace toricflow {

namespace {

constexpr double kGeomTol = 1e-9;

long long gcd_ll(long long a, long long b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Exact integer determinant by fraction-free Gaussian elimination (Bareiss).
long long int_det(std::vector<std::vector<long long>> m) {
  const int n = static_cast<int>(m.size());
  long long prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int piv = -1;
      for (int r = k + 1; r < n; ++r)
        if (m[r][k] != 0) {
          piv = r;
          break;
        }
      if (piv < 0) return 0;
      std::swap(m[k], m[piv]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

// Next k-combination of {0..m-1} in lexicographic order.
bool next_combination(std::vector<int>& idx, int m) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < m - (k - i)) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// (d-1)-volume of a facet's vertex set, computed recursively: project onto an
// orthonormal chart of the facet's affine hull, then decompose in the chart.
double polytope_volume_of_vertices(std::vector<Vec> verts);

double facet_area(const std::vector<Vec>& verts, int ambient_dim) {
  if (verts.empty()) return 0.0;
  if (ambient_dim == 1) return 1.0;  // a 0-dimensional facet is one point
  // Orthonormal basis of the affine hull via Gram-Schmidt on vertex offsets.
  const Vec origin = verts[0];
  std::vector<Vec> basis;
  for (const Vec& v : verts) {
    Vec d = v - origin;
    for (const Vec& b : basis) d -= b.dot(d) * b;
    if (d.norm() > kGeomTol) basis.push_back(d.normalized());
  }
  const int fdim = static_cast<int>(basis.size());
  if (fdim != ambient_dim - 1) return 0.0;  // degenerate facet
  std::vector<Vec> chart;
  chart.reserve(verts.size());
  for (const Vec& v : verts) {
    Vec c(fdim);
    for (int j = 0; j < fdim; ++j) c[j] = basis[j].dot(v - origin);
    chart.push_back(std::move(c));
  }
  return polytope_volume_of_vertices(chart);
}

double polytope_volume_of_vertices(std::vector<Vec> verts) {
  if (verts.empty()) return 0.0;
  const int n = static_cast<int>(verts[0].size());
  if (n == 0) return 1.0;
  if (n == 1) {
    double lo = verts[0][0], hi = verts[0][0];
    for (const Vec& v : verts) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    return hi - lo;
  }
  if (n == 2) {
    // Convex position: sort around centroid, then shoelace.
    Vec c = Vec::Zero(2);
    for (const Vec& v : verts) c += v;
    c /= static_cast<double>(verts.size());
    std::sort(verts.begin(), verts.end(), [&](const Vec& a, const Vec& b) {
      return std::atan2(a[1] - c[1], a[0] - c[0]) <
             std::atan2(b[1] - c[1], b[0] - c[0]);
    });
    double area2 = 0.0;
    const int m = static_cast<int>(verts.size());
    for (int i = 0; i < m; ++i) {
      const Vec& a = verts[i];
      const Vec& b = verts[(i + 1) % m];
      area2 += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * std::abs(area2);
  }
  throw std::runtime_error("facet volume: dimension > 2 charts not supported");
}

}  // namespace

DelzantPolytope::DelzantPolytope(int dim, std::vector<Facet> facets)
    : dim_(dim), facets_(std::move(facets)) {
  if (dim_ < 1) throw std::invalid_argument("polytope dimension must be >= 1");
  if (static_cast<int>(facets_.size()) < dim_ + 1)
    throw std::invalid_argument("too few facets for a bounded polytope");
  for (const Facet& f : facets_)
    if (f.normal.size() != dim_)
      throw std::invalid_argument("facet normal has wrong dimension");
  enumerate_vertices();
  if (vertices_.empty())
    throw std::invalid_argument("facet data defines no bounded vertex set");
}

void DelzantPolytope::enumerate_vertices() {
  const int d = facet_count();
  std::vector<int> idx(dim_);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    Mat A(dim_, dim_);
    Vec b(dim_);
    for (int r = 0; r < dim_; ++r) {
      A.row(r) = facets_[idx[r]].normal.cast<double>().transpose();
      b[r] = -facets_[idx[r]].offset;
    }
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible()) continue;
    Vec v = lu.solve(b);
    if (!contains(v, kGeomTol)) continue;
    bool dup = false;
    for (const Vec& w : vertices_)
      if ((w - v).norm() < kGeomTol) {
        dup = true;
        break;
      }
    if (!dup) vertices_.push_back(v);
  } while (next_combination(idx, d));
  // Deterministic lexicographic order.
  std::sort(vertices_.begin(), vertices_.end(), [](const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] < b[i] - kGeomTol) return true;
      if (a[i] > b[i] + kGeomTol) return false;
    }
    return false;
  });
}

double DelzantPolytope::min_l(const Vec& x) const {
  double m = std::numeric_limits<double>::infinity();
  for (const Facet& f : facets_) m = std::min(m, f.eval(x));
  return m;
}

Vec DelzantPolytope::barycenter() const {
  Vec c = Vec::Zero(dim_);
  for (const Vec& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

void DelzantPolytope::bounding_box(Vec& lo, Vec& hi) const {
  lo = vertices_[0];
  hi = vertices_[0];
  for (const Vec& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
}

ValidityReport DelzantPolytope::validate() const {
  ValidityReport rep;
  for (int i = 0; i < facet_count(); ++i) {
    const IVec& n = facets_[i].normal;
    long long g = 0;
    for (int j = 0; j < dim_; ++j) g = gcd_ll(g, n[j]);
    if (g != 1) {
      std::ostringstream os;
      os << "facet " << i << ": normal is not primitive (gcd = " << g << ")";
      rep.errors.push_back(os.str());
    }
  }
  const Vec c = barycenter();
  if (min_l(c) <= 0.0)
    rep.errors.push_back("barycenter is not interior: empty interior?");
  for (const Vec& v : vertices_) {
    VertexCheck vc;
    vc.vertex = v;
    for (int i = 0; i < facet_count(); ++i)
      if (std::abs(l(i, v)) < kGeomTol) vc.incident_facets.push_back(i);
    if (static_cast<int>(vc.incident_facets.size()) != dim_) {
      std::ostringstream os;
      os << "vertex with " << vc.incident_facets.size()
         << " incident facets (need exactly " << dim_ << ")";
      vc.message = os.str();
      rep.errors.push_back(os.str());
    } else {
      std::vector<std::vector<long long>> m(dim_, std::vector<long long>(dim_));
      for (int r = 0; r < dim_; ++r)
        for (int cidx = 0; cidx < dim_; ++cidx)
          m[r][cidx] = facets_[vc.incident_facets[r]].normal[cidx];
      vc.normal_det = int_det(m);
      vc.ok = (vc.normal_det == 1 || vc.normal_det == -1);
      if (!vc.ok) {
        std::ostringstream os;
        os << "vertex normal matrix determinant " << vc.normal_det
           << " is not +-1";
        vc.message = os.str();
        rep.errors.push_back(os.str());
      }
    }
    rep.vertices.push_back(std::move(vc));
  }
  rep.valid = rep.errors.empty();
  return rep;
}

double DelzantPolytope::volume() const {
  // Pyramid decomposition from the barycenter: V = sum_i h_i Area_i / n.
  const Vec o = barycenter();
  const std::vector<double> areas = [&] {
    std::vector<double> a(facet_count());
    for (int i = 0; i < facet_count(); ++i) {
      std::vector<Vec> fv;
      for (const Vec& v : vertices_)
        if (std::abs(l(i, v)) < kGeomTol) fv.push_back(v);
      a[i] = facet_area(fv, dim_);
    }
    return a;
  }();
  double vol = 0.0;
  for (int i = 0; i < facet_count(); ++i) {
    const double height = l(i, o) / facets_[i].normal_length();
    vol += height * areas[i];
  }
  return vol / static_cast<double>(dim_);
}

std::vector<double> DelzantPolytope::facet_sigma_masses() const {
  std::vector<double> masses(facet_count());
  for (int i = 0; i < facet_count(); ++i) {
    std::vector<Vec> fv;
    for (const Vec& v : vertices_)
      if (std::abs(l(i, v)) < kGeomTol) fv.push_back(v);
    const double area = facet_area(fv, dim_);
    if (area <= 0.0 && dim_ > 1)
      throw std::runtime_error("degenerate facet in sigma measure");
    masses[i] = area / facets_[i].normal_length();
  }
  return masses;
}

double DelzantPolytope::sigma_total() const {
  const auto m = facet_sigma_masses();
  return std::accumulate(m.begin(), m.end(), 0.0);
}

DelzantPolytope DelzantPolytope::shrink(const Vec& center, double lambda) const {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("shrink ratio must be in (0, 1]");
  if (min_l(center) <= 0.0)
    throw std::invalid_argument("shrink center must be interior");
  // y = o + lambda(x - o) with x in P  <=>  <y,n_i> + lambda c_i + (lambda-1)<o,n_i> >= 0.
  std::vector<Facet> fs = facets_;
  for (Facet& f : fs) {
    const double no = f.normal.cast<double>().dot(center);
    f.offset = lambda * f.offset + (lambda - 1.0) * no;
  }
  return DelzantPolytope(dim_, std::move(fs));
}

DelzantPolytope DelzantPolytope::preset(const std::string& name) {
  auto fac = [](std::initializer_list<int> n, double c) {
    Facet f;
    f.normal = IVec(static_cast<int>(n.size()));
    int i = 0;
    for (int v : n) f.normal[i++] = v;
    f.offset = c;
    return f;
  };
  if (name == "interval")
    return DelzantPolytope(1, {fac({1}, 0.0), fac({-1}, 1.0)});
  if (name == "square")
    return DelzantPolytope(
        2, {fac({1, 0}, 0.0), fac({0, 1}, 0.0), fac({-1, 0}, 1.0), fac({0, -1}, 1.0)});
  if (name == "simplex")
    return DelzantPolytope(2, {fac({1, 0}, 0.0), fac({0, 1}, 0.0), fac({-1, -1}, 1.0)});
  throw std::invalid_argument("unknown polytope preset: " + name);
}

std::vector<std::string> DelzantPolytope::preset_names() {
  return {"interval", "square", "simplex"};
}

DelzantPolytope DelzantPolytope::parse(const std::string& text, int dim_hint) {
  std::istringstream in(text);
  std::vector<Facet> fs;
  std::string line;
  int dim = dim_hint;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (vals.empty()) continue;
    if (dim < 0) dim = static_cast<int>(vals.size()) - 1;
    if (static_cast<int>(vals.size()) != dim + 1) {
      std::ostringstream os;
      os << "polytope line " << lineno << ": expected " << dim + 1
         << " numbers, got " << vals.size();
      throw std::invalid_argument(os.str());
    }
    Facet f;
    f.normal = IVec(dim);
    for (int i = 0; i < dim; ++i) {
      const double r = std::round(vals[i]);
      if (std::abs(vals[i] - r) > 1e-9) {
        std::ostringstream os;
        os << "polytope line " << lineno << ": normal component " << vals[i]
           << " is not an integer";
        throw std::invalid_argument(os.str());
      }
      f.normal[i] = static_cast<int>(r);
    }
    f.offset = vals[dim];
    fs.push_back(std::move(f));
  }
  if (fs.empty()) throw std::invalid_argument("polytope text has no facets");
  return DelzantPolytope(dim, std::move(fs));
}

std::string DelzantPolytope::to_text() const {
  std::ostringstream os;
  for (const Facet& f : facets_) {
    for (int i = 0; i < dim_; ++i) os << f.normal[i] << ' ';
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", f.offset);
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace toricflow
