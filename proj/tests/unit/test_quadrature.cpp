#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "generators.hpp"
#include "spfem/fem.hpp"
#include "spfem/quadrature.hpp"

using namespace spfem;

namespace {

// Independent oracle on [0,1]^2: nested Boost integrators, no triangles involved.
double square_integral(const std::function<double(double, double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double y) { return ts.integrate([&](double x) { return f(x, y); }, 0.0, 1.0); }, 0.0, 1.0);
}

double smooth_square_integral(const std::function<double(double, double)>& f) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  return gk::integrate([&](double y) { return gk::integrate([&](double x) { return f(x, y); }, 0.0, 1.0, 8, 1e-14); },
                       0.0, 1.0, 8, 1e-14);
}

// int over the reference triangle (0,0),(1,0),(0,1) of x^a y^b = a! b! / (a + b + 2)!
double monomial_exact(int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); }

double rule_monomial(const QuadratureRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double x = r.nodes[k][1], y = r.nodes[k][2];
    s += r.weights[k] * std::pow(x, a) * std::pow(y, b);
  }
  return 0.5 * s;
}

MeshPtr square_mesh(double h) {
  return std::make_shared<const Mesh>(triangulate_structured(ConvexPolygon::unit_square(), h));
}

}  // namespace

TEST_CASE("triangle rules: structure and exactness") {
  for (int d = 1; d <= 10; ++d) {
    CAPTURE(d);
    const auto r = triangle_rule(d);
    CHECK(r.exactness_degree >= d);
    double sum = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      CHECK(r.weights[k] > 0.0);
      for (double b : r.nodes[k]) CHECK(b > 0.0);
      CHECK(r.nodes[k][0] + r.nodes[k][1] + r.nodes[k][2] == doctest::Approx(1.0).epsilon(1e-15));
      sum += r.weights[k];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        CAPTURE(a);
        CAPTURE(b);
        const double exact = monomial_exact(a, b);
        CHECK(std::abs(rule_monomial(r, a, b) - exact) <= 1e-13 * exact);
      }
  }
  CHECK_THROWS_AS(triangle_rule(0), Error);
  CHECK_THROWS_AS(triangle_rule(11), Error);
}

TEST_CASE("triangle rules: low-degree shapes") {
  const auto r1 = triangle_rule(1);
  REQUIRE(r1.size() == 1);
  CHECK(r1.weights[0] == 1.0);
  CHECK(r1.nodes[0][0] == doctest::Approx(1.0 / 3));
  const auto r2 = triangle_rule(2);
  REQUIRE(r2.size() == 3);
  for (const auto& n : r2.nodes) {
    const double mx = std::max({n[0], n[1], n[2]});
    CHECK(mx == doctest::Approx(2.0 / 3));
  }
  CHECK(rule_monomial(triangle_rule(3), 2, 1) == doctest::Approx(1.0 / 60).epsilon(1e-14));
}

TEST_CASE("segment rules") {
  const auto r1 = segment_rule(1);
  REQUIRE(r1.size() == 1);
  CHECK(r1.nodes[0] == 0.5);
  const auto r3 = segment_rule(3);
  REQUIRE(r3.size() == 2);
  CHECK(r3.nodes[0] == doctest::Approx((3 - std::sqrt(3.0)) / 6).epsilon(1e-15));
  CHECK(r3.nodes[1] == doctest::Approx((3 + std::sqrt(3.0)) / 6).epsilon(1e-15));
  CHECK(r3.weights[0] * std::pow(r3.nodes[0], 3) + r3.weights[1] * std::pow(r3.nodes[1], 3) ==
        doctest::Approx(0.25).epsilon(1e-15));
  for (int d = 1; d <= 20; ++d) {
    const auto r = segment_rule(d);
    for (int m = 0; m <= d; ++m) {
      double s = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * std::pow(r.nodes[k], m);
      CHECK(s == doctest::Approx(1.0 / (m + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(segment_rule(0), Error);
}

TEST_CASE("weighted seminorm: unit gradient and tensor-Gauss oracles") {
  const auto mesh = square_mesh(std::sqrt(2.0) / 8);
  const auto u = interpolate(mesh, 1, [](Point2 x) { return x.x; });
  const auto origin = FeatureSet::point({0, 0});
  const auto unit = PowerWeight(0.0, origin);
  CHECK(weighted_seminorm(u, unit, 2.0, GradedScheme::plain()).value == doctest::Approx(1.0).epsilon(1e-14));

  const auto scheme = GradedScheme::graded(origin);
  const double oracle_pos = square_integral([](double x, double y) { return std::hypot(x, y); });
  const double oracle_neg = square_integral([](double x, double y) { return 1.0 / std::hypot(x, y); });
  // cross-check the oracle against closed forms
  CHECK(oracle_pos == doctest::Approx((std::sqrt(2.0) + std::asinh(1.0)) / 3).epsilon(1e-12));
  CHECK(oracle_neg == doctest::Approx(2.0 * std::asinh(1.0)).epsilon(1e-12));
  CHECK(oracle_pos == doctest::Approx(0.765196).epsilon(1e-6));
  CHECK(oracle_neg == doctest::Approx(1.762747).epsilon(1e-6));

  const auto pos = weighted_seminorm(u, PowerWeight(1.0, origin), 2.0, scheme);
  const auto neg = weighted_seminorm(u, PowerWeight(-1.0, origin), 2.0, scheme);
  CHECK(std::abs(pos.value * pos.value - oracle_pos) <= 1e-3 * oracle_pos);
  CHECK(std::abs(neg.value * neg.value - oracle_neg) <= 1e-3 * oracle_neg);
  CHECK(pos.diagnostic <= 0.01);
  CHECK(neg.diagnostic <= 0.01);
}

TEST_CASE("weighted norm: constants and the centre-distance oracle") {
  const auto mesh = square_mesh(std::sqrt(2.0) / 8);
  const auto one = interpolate(mesh, 1, [](Point2) { return 1.0; });
  const auto centre = FeatureSet::point({0.5, 0.5});
  CHECK(weighted_norm(one, PowerWeight(0.0, centre), 2.0, GradedScheme::plain()).value ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(weighted_norm(FEFunction(mesh, 1), PowerWeight(1.0, centre), 2.0, GradedScheme::graded(centre)).value == 0.0);
  const double oracle =
      std::sqrt(smooth_square_integral([](double x, double y) { return std::hypot(x - 0.5, y - 0.5); }));
  CHECK(oracle == doctest::Approx(std::sqrt((std::sqrt(2.0) + std::asinh(1.0)) / 6)).epsilon(1e-10));
  const auto v = weighted_norm(one, PowerWeight(1.0, centre), 2.0, GradedScheme::graded(centre));
  CHECK(v.value == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("weighted seminorm squared equals the stiffness form") {
  const auto mesh = square_mesh(0.2);
  const auto sys = assemble_stiffness(mesh);
  gen::Rng rng(8);
  std::vector<double> values(mesh->num_vertices());
  for (auto& x : values) x = rng.uniform(-1, 1);
  const FEFunction u(mesh, 1, values);
  const auto ku = sys.full.multiply(values);
  double quad = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) quad += values[k] * ku[k];
  const double s = weighted_seminorm(u, PowerWeight(0.0, FeatureSet::point({0, 0})), 2.0, GradedScheme::plain(1)).value;
  CHECK(s * s == doctest::Approx(quad).epsilon(1e-10));
}

TEST_CASE("graded scheme: level zero equals the base rule, diagnostics converge") {
  const auto mesh = square_mesh(std::sqrt(2.0) / 4);
  const auto target = FeatureSet::segment({{0.2, 0.5}, {0.8, 0.5}});
  auto g0 = GradedScheme::graded(target, 0);
  const auto f = [](std::size_t, const std::array<double, 3>&, Point2 x) { return x.x * x.x + x.y; };
  const auto a = integrate(*mesh, g0, f);
  const auto b = integrate(*mesh, GradedScheme::plain(), f);
  CHECK(a.value == b.value);
  CHECK(a.coarser == a.value);
  // integrable singular weights: point lambda > -2 and segment lambda > -1
  const auto u = interpolate(mesh, 1, [](Point2 x) { return x.x + 2.0 * x.y; });
  CHECK(weighted_seminorm(u, PowerWeight(-1.5, FeatureSet::point({0.5, 0.5})), 2.0,
                          GradedScheme::graded(FeatureSet::point({0.5, 0.5})))
            .diagnostic <= 0.01);
  CHECK(weighted_seminorm(u, PowerWeight(-0.5, target), 2.0, GradedScheme::graded(target)).diagnostic <= 0.01);
}

TEST_CASE("integrate rejects non-finite integrands") {
  const auto mesh = square_mesh(0.5);
  CHECK_THROWS_AS(integrate(*mesh, GradedScheme::plain(),
                            [](std::size_t, const std::array<double, 3>&, Point2) { return std::nan(""); }),
                  Error);
}

TEST_CASE("compensated_sum") {
  CHECK(compensated_sum({1.0, 1e100, 1.0, -1e100}) == 2.0);
  CHECK(compensated_sum({}) == 0.0);
}

TEST_CASE("property: norm homogeneity and monotonicity in lambda") {
  gen::Rng rng(31);
  const auto mesh = square_mesh(0.25);
  for (int c = 0; c < 10; ++c) {
    CAPTURE(c);
    std::vector<double> values(mesh->num_vertices());
    for (auto& x : values) x = rng.uniform(-1, 1);
    const double scale = rng.uniform(-3, 3);
    std::vector<double> scaled = values;
    for (auto& x : scaled) x *= scale;
    const FEFunction u(mesh, 1, values), v(mesh, 1, scaled);
    // dist <= 0.99 on the square, so dist^lambda decreases in lambda
    const auto f = FeatureSet::point({rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)});
    const auto scheme = GradedScheme::graded(f, 4);
    const double p = rng.coin() ? 2.0 : 4.0;
    const double l1 = rng.uniform(-1.5, 1.0), l2 = l1 + rng.uniform(0.0, 1.0);
    const double n1 = weighted_norm(u, PowerWeight(l1, f), p, scheme).value;
    CHECK(weighted_norm(v, PowerWeight(l1, f), p, scheme).value == doctest::Approx(std::abs(scale) * n1).epsilon(1e-12));
    CHECK(n1 >= weighted_norm(u, PowerWeight(l2, f), p, scheme).value * (1 - 1e-12));
    // c w in place of w scales the norm by c^(1/p)
    const double wscale = rng.uniform(0.5, 4.0);
    const PowerWeight w(l1, f);
    const auto cw = weighted_lp_norm(*mesh, w, p, scheme, [&](std::size_t t, const std::array<double, 3>& b, Point2) {
      return std::pow(wscale, 1.0 / p) * std::abs(u.value(t, b));
    });
    CHECK(cw.value == doctest::Approx(std::pow(wscale, 1.0 / p) * n1).epsilon(1e-12));
  }
}
