#include <doctest.h>

#include <cmath>
#include <memory>

#include "toricflow/legendre.hpp"

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

TEST_SUITE_BEGIN("legendre");

TEST_CASE("interval canonical: xi=0 maps to the midpoint") {
  auto sp = SymplecticPotential::canonical(make_grid("interval", 1.0 / 16));
  const auto ks = legendre_to_complex(sp, {pt({0.0})});
  REQUIRE(ks.all_converged());
  CHECK(ks.points[0].xstar[0] == doctest::Approx(0.5).epsilon(1e-10));
  // psi(0) = -u(1/2) = (ln 2)/2
  CHECK(ks.points[0].psi == doctest::Approx(0.34657359027997264).epsilon(1e-12));
}

TEST_CASE("simplex canonical: xi=0 maps to the barycenter") {
  auto sp = SymplecticPotential::canonical(make_grid("simplex", 1.0 / 16));
  const auto ks = legendre_to_complex(sp, {pt({0.0, 0.0})});
  REQUIRE(ks.all_converged());
  CHECK(ks.points[0].xstar[0] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  CHECK(ks.points[0].xstar[1] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  // psi(0) = -u(1/3,1/3) = (ln 3)/2
  CHECK(ks.points[0].psi == doctest::Approx(0.5493061443340548).epsilon(1e-10));
}

TEST_CASE("self-dual quadratic: psi(xi) ~ |xi|^2/2 on a large box") {
  // u = |x|^2/2 realized as canonical + (|x|^2/2 - canonical) on [-4,4];
  // the smooth part is exact at nodes, so psi deviates only by
  // interpolation error of the off-node correction.
  Facet f1{(IVec(1) << 1).finished(), 4.0};
  Facet f2{(IVec(1) << -1).finished(), 4.0};
  auto poly = std::make_shared<DelzantPolytope>(1, std::vector<Facet>{f1, f2});
  auto grid = std::make_shared<PolytopeGrid>(poly, 0.25);
  auto canon = SymplecticPotential::canonical(grid);
  auto sp = SymplecticPotential::from_function(grid, [&](const Vec& x) {
    const double l1 = x[0] + 4.0, l2 = 4.0 - x[0];
    const double can = 0.5 * (l1 * std::log(std::max(l1, 1e-300)) +
                              l2 * std::log(std::max(l2, 1e-300)));
    return 0.5 * x[0] * x[0] - can;
  });
  for (double xi : {-1.0, -0.35, 0.0, 0.6, 1.2}) {
    const auto ks = legendre_to_complex(sp, {pt({xi})});
    REQUIRE(ks.all_converged());
    CHECK(std::abs(ks.points[0].psi - 0.5 * xi * xi) < 5e-4);
    CHECK(std::abs(ks.points[0].xstar[0] - xi) < 1e-3);
  }
}

TEST_CASE("Fenchel identity holds at solver tolerance on the default xi set") {
  for (const auto& name : {"interval", "square", "simplex"}) {
    auto sp = SymplecticPotential::canonical(make_grid(name, 1.0 / 16));
    const auto xi = default_xi_set(sp);
    const auto ks = legendre_to_complex(sp, xi);
    REQUIRE(ks.all_converged());
    CHECK(ks.max_fenchel_residual(sp) < 1e-12);
    CHECK(ks.convexity_violation() < 1e-10);
    CHECK(ks.moment_image_violation(sp.polytope()) <= 0.0);
  }
}

TEST_CASE("legendre round-trip: dual solve recovers u at interior nodes") {
  // xi := grad u(x_k), then u_rec = <xi, x_k> - psi(xi) must match u(x_k).
  for (const auto& name : {"interval", "square", "simplex"}) {
    auto g = make_grid(name, 1.0 / 16);
    auto sp = SymplecticPotential::canonical(g);
    const auto xi = default_xi_set(sp);
    const auto ks = legendre_to_complex(sp, xi);
    double worst = 0.0;
    int i = 0;
    for (int id : g->interior_nodes()) {
      const Vec x = g->coord(id);
      const double u_rec = ks.points[i].xi.dot(x) - ks.points[i].psi;
      worst = std::max(worst, std::abs(u_rec - sp.value_node(id)));
      ++i;
    }
    CHECK(worst <= 1e-9);  // 10 * newton_tol
  }
}

TEST_CASE("relative potential of a constant shift is the constant") {
  auto g = make_grid("interval", 1.0 / 16);
  auto sp0 = SymplecticPotential::canonical(g);
  const double c = 0.37;
  auto sp = sp0.shifted(-c);  // u - c  =>  psi + c
  const auto xi = default_xi_set(sp0);
  const auto k0 = legendre_to_complex(sp0, xi);
  const auto k1 = legendre_to_complex(sp, xi);
  const auto rel = relative_potential(k1, k0);
  for (double v : rel.phi) CHECK(std::abs(v - c) <= 2e-10);
}

TEST_CASE("relative potential of sp vs itself vanishes") {
  auto g = make_grid("square", 1.0 / 8);
  auto sp = SymplecticPotential::from_function(
      g, [](const Vec& x) { return 0.01 * x[0] * x[1]; });
  const auto xi = default_xi_set(SymplecticPotential::canonical(g));
  const auto ka = legendre_to_complex(sp, xi);
  const auto kb = legendre_to_complex(sp, xi);
  const auto rel = relative_potential(ka, kb);
  for (double v : rel.phi) CHECK(v == 0.0);
}

TEST_CASE("affine tilt translates the dual: psi_a(xi) = psi0(xi - a)") {
  auto g = make_grid("interval", 1.0 / 32);
  auto sp0 = SymplecticPotential::canonical(g);
  const Vec a = pt({0.4});
  auto spa = SymplecticPotential::from_function(
      g, [&](const Vec& x) { return a.dot(x); });
  for (double xiv : {-0.8, -0.1, 0.3, 1.1}) {
    const auto lhs = legendre_to_complex(spa, {pt({xiv})});
    const auto rhs = legendre_to_complex(sp0, {pt({xiv - a[0]})});
    REQUIRE(lhs.all_converged());
    REQUIRE(rhs.all_converged());
    CHECK(lhs.points[0].psi == doctest::Approx(rhs.points[0].psi).epsilon(1e-9));
  }
}

TEST_SUITE_END();
