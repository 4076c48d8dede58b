#include <doctest.h>

#include <cmath>
#include <memory>

#include "toricflow/potential.hpp"

using namespace toricflow;

namespace {
std::shared_ptr<const PolytopeGrid> make_grid(const std::string& preset, double h) {
  auto p = std::make_shared<DelzantPolytope>(DelzantPolytope::preset(preset));
  return std::make_shared<PolytopeGrid>(p, h);
}

Vec pt(std::initializer_list<double> v) {
  Vec x(static_cast<int>(v.size()));
  int i = 0;
  for (double t : v) x[i++] = t;
  return x;
}
}  // namespace

TEST_SUITE_BEGIN("potential");

TEST_CASE("canonical interval values and derivatives") {
  auto sp = SymplecticPotential::canonical(make_grid("interval", 1.0 / 16));
  // u(1/2) = -(ln 2)/2
  CHECK(sp.value(pt({0.5})) == doctest::Approx(-0.34657359027997264).epsilon(1e-12));
  // u'(x) = (ln x - ln(1-x))/2, so u'(1/2) = 0
  CHECK(sp.gradient(pt({0.5}))[0] == doctest::Approx(0.0));
  CHECK(sp.gradient(pt({0.25}))[0] ==
        doctest::Approx(0.5 * std::log(0.25 / 0.75)).epsilon(1e-12));
  // u'' = 1/(2x(1-x))
  CHECK(sp.hessian(pt({0.5}))(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sp.hessian(pt({0.25}))(0, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("canonical square and simplex Hessians") {
  auto sq = SymplecticPotential::canonical(make_grid("square", 1.0 / 8));
  const Mat h = sq.hessian(pt({0.5, 0.5}));
  CHECK(h(0, 0) == doctest::Approx(2.0));
  CHECK(h(1, 1) == doctest::Approx(2.0));
  CHECK(h(0, 1) == doctest::Approx(0.0));

  auto sx = SymplecticPotential::canonical(make_grid("simplex", 1.0 / 8));
  const Mat hs = sx.hessian(pt({1.0 / 3, 1.0 / 3}));
  // (1/2)[diag(1/x,1/y) + ones/l] at the barycenter: [[3, 1.5], [1.5, 3]]
  CHECK(hs(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(hs(0, 1) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(hs(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("node Hessian: quadratic smooth part adds exactly one") {
  auto g = make_grid("interval", 1.0 / 16);
  auto canon = SymplecticPotential::canonical(g);
  auto sp = SymplecticPotential::from_function(
      g, [](const Vec& x) { return 0.5 * x[0] * x[0]; });
  for (int id : g->interior_nodes()) {
    const double base = canon.hessian_node(id)(0, 0);
    CHECK(sp.hessian_node(id)(0, 0) == doctest::Approx(base + 1.0).epsilon(1e-9));
  }
}

TEST_CASE("canonical node Hessian matches the closed form at nodes") {
  auto g = make_grid("interval", 1.0 / 16);
  auto sp = SymplecticPotential::canonical(g);
  for (int id : g->interior_nodes()) {
    const double x = g->coord(id)[0];
    CHECK(sp.hessian_node(id)(0, 0) ==
          doctest::Approx(1.0 / (2.0 * x * (1.0 - x))).epsilon(1e-12));
  }
}

TEST_CASE("discrete convexity holds for canonical presets") {
  for (const auto& name : {"interval", "square", "simplex"}) {
    auto sp = SymplecticPotential::canonical(make_grid(name, 1.0 / 16));
    CHECK(sp.convex_on_grid());
  }
}

TEST_CASE("convexity loss is detected") {
  auto g = make_grid("interval", 1.0 / 16);
  auto sp = SymplecticPotential::from_function(
      g, [](const Vec& x) { return -4.0 * x[0] * x[0]; });
  int where = -1;
  CHECK_FALSE(sp.convex_on_grid(&where));
  CHECK(where >= 0);
}

TEST_CASE("normalize_at_point pins value and gradient, keeps Hessian") {
  auto g = make_grid("interval", 1.0 / 16);
  auto sp = SymplecticPotential::from_function(
      g, [](const Vec& x) { return 0.02 * std::sin(2.0 * x[0]); });
  const Vec x0 = pt({0.5});
  const auto n1 = sp.normalized_at(x0);
  CHECK(n1.value(x0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(n1.gradient(x0)[0] == doctest::Approx(0.0).epsilon(1e-10));
  // convexity makes the normalized potential nonnegative
  for (int id : g->interior_nodes())
    CHECK(n1.value_node(id) >= -1e-10);
  // idempotent
  const auto n2 = n1.normalized_at(x0);
  for (size_t i = 0; i < n1.smooth_part().size(); ++i)
    CHECK(n2.smooth_part()[i] == doctest::Approx(n1.smooth_part()[i]).epsilon(1e-12));
  // Hessian unchanged at every interior node
  for (int id : g->interior_nodes())
    CHECK(n1.hessian_node(id)(0, 0) ==
          doctest::Approx(sp.hessian_node(id)(0, 0)).epsilon(1e-12));
}

TEST_CASE("snapshot files round-trip bit-exactly") {
  auto g = make_grid("simplex", 1.0 / 8);
  auto sp = SymplecticPotential::from_function(g, [](const Vec& x) {
    return 0.01 * x[0] * x[1] * (1.0 - x[0] - x[1]);
  });
  const std::string text = write_snapshot(sp, 0.125, "simplex");
  const SnapshotFile s = parse_snapshot(text);
  CHECK(s.polytope_name == "simplex");
  CHECK(s.h == g->h());
  CHECK(s.t == 0.125);
  REQUIRE(s.f.size() == sp.smooth_part().size());
  for (size_t i = 0; i < s.f.size(); ++i) CHECK(s.f[i] == sp.smooth_part()[i]);
  std::shared_ptr<const PolytopeGrid> g2;
  const auto sp2 = load_snapshot(s, &g2);
  CHECK(g2->inpoly_nodes().size() == g->inpoly_nodes().size());
  CHECK(write_snapshot(sp2, s.t, s.polytope_name) == text);
}

TEST_CASE("malformed snapshots are rejected") {
  CHECK_THROWS(parse_snapshot("bogus 1\n"));
  CHECK_THROWS(parse_snapshot("polytope p\nfacet 1 0\nfacet -1 1\nh 0.25\nt 0\nnodes 99\n1 2 3\n"));
}

TEST_SUITE_END();
