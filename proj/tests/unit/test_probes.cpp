#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

#include "spfem/fe_function.hpp"
#include "spfem/probes.hpp"

using namespace spfem;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<MeshPtr> square_family(double h, int count) {
  return refinement_family(triangulate_structured(ConvexPolygon::unit_square(), h), count);
}

Vec2 grad_sin(Point2 x) {
  return {kPi * std::cos(kPi * x.x) * std::sin(kPi * x.y), kPi * std::sin(kPi * x.x) * std::cos(kPi * x.y)};
}

}  // namespace

TEST_CASE("trend helpers and json") {
  CHECK(last_relative_change({1.0, 2.0, 4.0}) == doctest::Approx(0.5));
  CHECK(last_relative_change({0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(last_relative_change({1.0}), Error);
  ConstantReport r;
  r.name = "demo";
  r.params = {{"gamma", 0.5}};
  r.trend = {1.0, 1.1};
  r.measured_constant = 1.1;
  r.argmax = "x";
  const auto j = nlohmann::json::parse(to_json(r));
  for (const char* key : {"name", "params", "measured_constant", "argmax", "trend"}) CHECK(j.contains(key));
  CHECK(j["params"]["gamma"] == 0.5);
}

TEST_CASE("green gradient probe: preconditions") {
  const auto fam = square_family(0.1, 2);
  const std::vector<Point2> src{{0.3, 0.3}};
  CHECK_THROWS_AS(verify_green_gradient_bound(fam, src, {{0.7, 0.7}}, 0.1), Error);  // below 4 h_max
  CHECK_THROWS_AS(verify_green_gradient_bound(fam, src, {{0.35, 0.3}}, 0.25), Error);  // pair too close
  CHECK_THROWS_AS(verify_green_gradient_bound(fam, src, {}, 0.25), Error);
}

TEST_CASE("green gradient probe: more observers never lower the constant") {
  const auto fam = square_family(std::sqrt(2.0) / 8, 3);
  const std::vector<Point2> src{{0.3, 0.3}, {0.7, 0.6}};
  const std::vector<Point2> few{{0.8, 0.2}, {0.2, 0.8}};
  auto many = few;
  many.push_back({0.9, 0.9});
  many.push_back({0.3, 0.65});
  const auto a = verify_green_gradient_bound(fam, src, few, 0.3);
  const auto b = verify_green_gradient_bound(fam, src, many, 0.3);
  REQUIRE(a.bound.trend.size() == 3);
  for (std::size_t g = 0; g < 3; ++g) CHECK(b.bound.trend[g] >= a.bound.trend[g]);
  CHECK(b.bound.measured_constant >= a.bound.measured_constant);
  CHECK(a.symmetry_error <= 1e-6);
  CHECK(a.bound.sample_count > 0);
}

TEST_CASE("hoelder probe: admissible exponents and grid") {
  const auto sq = ConvexPolygon::unit_square();
  const auto grid = default_gamma_grid(sq);
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == doctest::Approx(0.05));
  CHECK(grid.back() == doctest::Approx(0.95));
  const auto fam = square_family(std::sqrt(2.0) / 8, 3);
  const std::vector<std::pair<Point2, Point2>> pairs{{{0.7, 0.6}, {0.8, 0.75}}};
  CHECK_THROWS_AS(verify_green_holder_bound(fam, sq, {0.4, 0.45}, pairs, {1.0}), Error);
  CHECK_THROWS_AS(verify_green_holder_bound(fam, sq, {0.4, 0.45}, {{{0.7, 0.6}, {0.7, 0.6}}}, {0.5}), Error);
  const auto r = verify_green_holder_bound(fam, sq, {0.4, 0.45}, pairs, {0.25, 0.5});
  REQUIRE(r.per_gamma.size() == 2);
  for (const auto& c : r.per_gamma) {
    CHECK(c.trend.size() == 3);
    CHECK(std::isfinite(c.measured_constant));
    CHECK(c.measured_constant > 0.0);
  }
}

TEST_CASE("localization probe: zero data is excluded, boundary points rejected") {
  const auto fam = square_family(0.2, 3);
  const auto zero = verify_localization(fam, [](Point2) { return Vec2{}; }, {{0.4, 0.4}}, {1.0});
  CHECK(zero.per_lambda[0].measured_constant == 0.0);
  CHECK(zero.per_lambda[0].excluded == 3);
  CHECK_THROWS_AS(verify_localization(fam, grad_sin, {{0.0, 0.4}}, {1.0}), Error);
  CHECK_THROWS_AS(verify_localization(fam, grad_sin, {{0.4, 0.4}}, {0.0}), Error);
}

TEST_CASE("localization probe: V_h data bounded by the coarsest interpolation constant") {
  // u in V_h of the coarsest mesh: u_h = u on every nested refinement
  const auto fam = square_family(std::sqrt(2.0) / 4, 3);
  std::vector<double> nodal(fam[0]->num_vertices(), 0.0);
  for (std::size_t v = 0; v < nodal.size(); ++v)
    if (fam[0]->vertex(v) == Point2{0.5, 0.5}) nodal[v] = 1.0;
  const FEFunction hat(fam[0], 1, nodal);
  const VectorField grad_hat = [&](Point2 x) { return hat.gradient_at(x); };
  const std::vector<Point2> z{{0.45, 0.55}, {0.6, 0.55}, {0.52, 0.4}};
  // C_interp: |grad u(z)|^2 over the first term alone, (h^2 / |T_z|)^2, on the coarsest mesh
  double c_interp = 0.0;
  for (const auto& p : z) {
    const double h = fam[0]->h_max();
    c_interp = std::max(c_interp, std::pow(h * h / fam[0]->area(fam[0]->locate(p)), 2));
  }
  const auto all = verify_localization(fam, grad_hat, z, {1.0});
  CHECK(all.per_lambda[0].measured_constant > 0.0);
  CHECK(all.per_lambda[0].measured_constant <= c_interp * (1 + 1e-9));
}

TEST_CASE("sharp maximal lemma probe") {
  const auto mesh = square_family(0.1, 1)[0];
  const auto sq = ConvexPolygon::unit_square();
  const auto zero = verify_sharp_maximal_lemma(mesh, sq, [](Point2) { return Vec2{}; }, 2.0, {16, 32});
  CHECK(zero.measured_constant == 0.0);
  const auto r = verify_sharp_maximal_lemma(mesh, sq, grad_sin, 2.0, {32, 64});
  CHECK(std::isfinite(r.measured_constant));
  CHECK(r.last_change() < 0.3);
  CHECK_THROWS_AS(verify_sharp_maximal_lemma(mesh, sq, grad_sin, 1.0, {32}), Error);
}

TEST_CASE("mean oscillation lemma probe") {
  const auto sq = ConvexPolygon::unit_square();
  const PowerWeight unit(0.0, FeatureSet::point({0.5, 0.5}));
  const auto c = verify_mean_oscillation_lemma([](Point2) { return 3.0; }, unit, 2.0, sq, {16, 32});
  for (double v : c.trend) CHECK(v == 0.0);
  const auto lin = verify_mean_oscillation_lemma([](Point2 x) { return x.x + 2 * x.y; }, unit, 2.0, sq, {64, 128});
  CHECK(lin.last_change() < 0.15);
  const PowerWeight to_jump(1.0, FeatureSet::segment({{0.5, 0.0}, {0.5, 1.0}}));
  const auto jump =
      verify_mean_oscillation_lemma([](Point2 x) { return x.x > 0.5 ? 1.0 : 0.0; }, to_jump, 2.0, sq, {32, 64});
  for (double v : jump.trend) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}
