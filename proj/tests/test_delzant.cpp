#include <doctest.h>

#include <cmath>

#include "toricflow/delzant.hpp"

using namespace toricflow;

namespace {

Vec pt(std::initializer_list<double> v) {
  Vec x(static_cast<int>(v.size()));
  int i = 0;
  for (double t : v) x[i++] = t;
  return x;
}

// Independent volume oracle: count midpoints of a fine lattice inside P.
double volume_by_counting(const DelzantPolytope& p, int m = 1200) {
  Vec lo, hi;
  p.bounding_box(lo, hi);
  const int n = p.dim();
  if (n == 1) {
    const double step = (hi[0] - lo[0]) / m;
    int cnt = 0;
    for (int i = 0; i < m; ++i)
      if (p.contains(pt({lo[0] + (i + 0.5) * step}))) ++cnt;
    return cnt * step;
  }
  const double sx = (hi[0] - lo[0]) / m, sy = (hi[1] - lo[1]) / m;
  long cnt = 0;
  Vec x(2);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      x[0] = lo[0] + (i + 0.5) * sx;
      x[1] = lo[1] + (j + 0.5) * sy;
      if (p.contains(x)) ++cnt;
    }
  return cnt * sx * sy;
}

}  // namespace

TEST_SUITE_BEGIN("polytope");

TEST_CASE("presets are valid Delzant polytopes with unit determinants") {
  for (const auto& name : DelzantPolytope::preset_names()) {
    const auto p = DelzantPolytope::preset(name);
    const auto rep = p.validate();
    CHECK_MESSAGE(rep.valid, name);
    for (const auto& vc : rep.vertices) {
      CHECK(std::llabs(vc.normal_det) == 1);
      CHECK(static_cast<int>(vc.incident_facets.size()) == p.dim());
    }
  }
}

TEST_CASE("vertex enumeration finds the expected corners") {
  CHECK(DelzantPolytope::preset("interval").vertices().size() == 2);
  CHECK(DelzantPolytope::preset("square").vertices().size() == 4);
  CHECK(DelzantPolytope::preset("simplex").vertices().size() == 3);
  const auto sq = DelzantPolytope::preset("square");
  CHECK((sq.vertices()[0] - pt({0, 0})).norm() == doctest::Approx(0.0));
  CHECK((sq.vertices()[3] - pt({1, 1})).norm() == doctest::Approx(0.0));
}

TEST_CASE("non-primitive normal is rejected") {
  Facet f1{(IVec(2) << 2, 0).finished(), 0.0};
  Facet f2{(IVec(2) << 0, 1).finished(), 0.0};
  Facet f3{(IVec(2) << -1, 0).finished(), 1.0};
  Facet f4{(IVec(2) << 0, -1).finished(), 1.0};
  DelzantPolytope p(2, {f1, f2, f3, f4});
  const auto rep = p.validate();
  CHECK_FALSE(rep.valid);
  bool found = false;
  for (const auto& e : rep.errors)
    if (e.find("primitive") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("single-normal scaling of any preset fails validation") {
  for (const auto& name : DelzantPolytope::preset_names()) {
    const auto p = DelzantPolytope::preset(name);
    auto facets = p.facets();
    facets[0].normal *= 3;
    facets[0].offset *= 3.0;  // same geometric half-space, bad lattice data
    DelzantPolytope q(p.dim(), facets);
    CHECK_FALSE(q.validate().valid);
  }
}

TEST_CASE("boundary measure and volume on the presets") {
  const auto interval = DelzantPolytope::preset("interval");
  auto m = interval.facet_sigma_masses();
  CHECK(m[0] == doctest::Approx(1.0));
  CHECK(m[1] == doctest::Approx(1.0));
  CHECK(interval.sigma_total() == doctest::Approx(2.0));
  CHECK(interval.volume() == doctest::Approx(1.0));

  const auto square = DelzantPolytope::preset("square");
  for (double mass : square.facet_sigma_masses())
    CHECK(mass == doctest::Approx(1.0));
  CHECK(square.sigma_total() == doctest::Approx(4.0));
  CHECK(square.volume() == doctest::Approx(1.0));

  // Hypotenuse: Euclidean length sqrt(2), |n| = sqrt(2), sigma mass 1.
  const auto simplex = DelzantPolytope::preset("simplex");
  auto sm = simplex.facet_sigma_masses();
  CHECK(sm[2] == doctest::Approx(1.0));
  CHECK(simplex.sigma_total() == doctest::Approx(3.0));
  CHECK(simplex.volume() == doctest::Approx(0.5));
}

TEST_CASE("volume agrees with a counting oracle to 0.5%") {
  for (const auto& name : DelzantPolytope::preset_names()) {
    const auto p = DelzantPolytope::preset(name);
    const double ref = volume_by_counting(p);
    CHECK(std::abs(p.volume() - ref) / ref < 0.005);
  }
}

TEST_CASE("shrink: examples and monotonicity") {
  const auto square = DelzantPolytope::preset("square");
  const auto half = square.shrink(square.barycenter(), 0.5);
  Vec lo, hi;
  half.bounding_box(lo, hi);
  CHECK(lo[0] == doctest::Approx(0.25));
  CHECK(hi[1] == doctest::Approx(0.75));
  CHECK(half.volume() == doctest::Approx(0.25));

  const auto same = square.shrink(square.barycenter(), 1.0);
  CHECK(same.volume() == doctest::Approx(1.0));

  const auto interval = DelzantPolytope::preset("interval");
  const auto ih = interval.shrink(pt({0.5}), 0.5);
  Vec ilo, ihi;
  ih.bounding_box(ilo, ihi);
  CHECK(ilo[0] == doctest::Approx(0.25));
  CHECK(ihi[0] == doctest::Approx(0.75));

  // lambda1 < lambda2 => shrink(lambda1) inside shrink(lambda2)
  const auto simplex = DelzantPolytope::preset("simplex");
  const Vec c = simplex.barycenter();
  const auto s1 = simplex.shrink(c, 0.3);
  const auto s2 = simplex.shrink(c, 0.8);
  for (const Vec& v : s1.vertices()) CHECK(s2.contains(v, 1e-12));

  CHECK_THROWS(square.shrink(pt({2.0, 2.0}), 0.5));
  CHECK_THROWS(square.shrink(square.barycenter(), 0.0));
}

TEST_CASE("text format round-trips") {
  for (const auto& name : DelzantPolytope::preset_names()) {
    const auto p = DelzantPolytope::preset(name);
    const auto q = DelzantPolytope::parse(p.to_text());
    CHECK(q.dim() == p.dim());
    CHECK(q.facet_count() == p.facet_count());
    CHECK(q.volume() == doctest::Approx(p.volume()));
  }
  CHECK_THROWS(DelzantPolytope::parse("1 0 0\n0 1\n"));
  CHECK_THROWS(DelzantPolytope::parse(""));
}

TEST_SUITE_END();
