#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "generators.hpp"
#include "spfem/mesh.hpp"

using namespace spfem;

namespace {

constexpr double kPi = std::numbers::pi;

double total_area(const Mesh& m) {
  double a = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) a += m.area(t);
  return a;
}

}  // namespace

TEST_CASE("polygon: square angles and corner exponents") {
  const auto sq = ConvexPolygon::unit_square();
  CHECK(sq.size() == 4);
  for (double w : sq.interior_angles()) CHECK(w == doctest::Approx(kPi / 2));
  for (double s : sq.corner_exponents()) CHECK(s == doctest::Approx(2.0));
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.is_axis_aligned_rectangle());
  CHECK(sq.signed_distance({0.5, 0.5}) == doctest::Approx(0.5));
  CHECK(sq.signed_distance({1.5, 0.5}) < 0.0);
}

TEST_CASE("polygon: rejects bad input") {
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), Error);
  // clockwise
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), Error);
  // reflex vertex
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.5}, {2, 2}, {0, 2}}), Error);
  // collinear
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}, {1, 1}}), Error);
  // repeated
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), Error);
}

TEST_CASE("triangulate_structured: unit square counts") {
  const auto sq = ConvexPolygon::unit_square();
  const Mesh coarse = triangulate_structured(sq, std::sqrt(2.0) / 2);
  CHECK(coarse.num_triangles() == 8);
  CHECK(coarse.num_vertices() == 9);
  CHECK(coarse.h_max() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  const Mesh finer = triangulate_structured(sq, std::sqrt(2.0) / 4);
  CHECK(finer.num_triangles() == 32);
  CHECK(finer.num_vertices() == 25);
}

TEST_CASE("triangulate_structured: regular pentagon") {
  const auto pent = ConvexPolygon::regular(5, 1.0);
  const Mesh m = triangulate_structured(pent, 0.3);
  CHECK(m.h_max() <= 0.3);
  CHECK(m.min_angle() >= 20.0 * kPi / 180.0);
  CHECK(check_conformity(m, pent).conforming);
  CHECK(total_area(m) == doctest::Approx(pent.area()).epsilon(1e-12));
}

TEST_CASE("triangulate_structured: errors") {
  const auto sq = ConvexPolygon::unit_square();
  CHECK_THROWS_AS(triangulate_structured(sq, 0.0), Error);
  CHECK_THROWS_AS(triangulate_structured(sq, 5.0), Error);
}

TEST_CASE("refine_uniform: counts, halving, ratio preserved") {
  const auto sq = ConvexPolygon::unit_square();
  const Mesh m0 = triangulate_structured(sq, std::sqrt(2.0) / 2);
  const Mesh m1 = refine_uniform(m0);
  CHECK(m1.num_triangles() == 32);
  CHECK(m1.h_max() == m0.h_max() / 2);
  CHECK(m1.h_max() / m1.h_min() == doctest::Approx(m0.h_max() / m0.h_min()).epsilon(1e-15));
  const Mesh m2 = refine_uniform(m1);
  CHECK(m2.h_max() == m0.h_max() / 4);
  CHECK(m2.generation() == 2);
}

TEST_CASE("refine_uniform: boundary flags on edge midpoints") {
  const auto sq = ConvexPolygon::unit_square();
  const Mesh m = refine_uniform(triangulate_structured(sq, std::sqrt(2.0) / 2));
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const Point2 x = m.vertex(v);
    const bool on_boundary = x.x == 0.0 || x.x == 1.0 || x.y == 0.0 || x.y == 1.0;
    CHECK(m.is_boundary_vertex(v) == on_boundary);
  }
}

TEST_CASE("quasi_uniformity_metrics: structured square") {
  const Mesh m = triangulate_structured(ConvexPolygon::unit_square(), std::sqrt(2.0) / 8);
  const auto q = quasi_uniformity_metrics(m);
  CHECK(q.min_angle == doctest::Approx(kPi / 4));
  CHECK(q.h_min <= q.h_max);
  CHECK(q.ratio == doctest::Approx(1.0));
  const auto r = quasi_uniformity_metrics(refine_uniform(m));
  CHECK(r.ratio == doctest::Approx(q.ratio).epsilon(1e-15));
}

TEST_CASE("locate: barycenter, shared vertex, outside") {
  const Mesh m = triangulate_structured(ConvexPolygon::unit_square(), std::sqrt(2.0) / 4);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(m.locate(m.barycenter(t)) == t);
  // the centre vertex is shared by several triangles: the lowest incident index wins
  std::size_t lowest = m.num_triangles();
  for (std::size_t t = 0; t < m.num_triangles() && lowest == m.num_triangles(); ++t)
    for (auto v : m.triangle(t))
      if (m.vertex(v) == Point2{0.5, 0.5}) lowest = t;
  CHECK(m.locate({0.5, 0.5}) == lowest);
  CHECK_THROWS_AS(m.locate({1.001, 0.5}), Error);
  CHECK_FALSE(m.try_locate({-0.001, 0.5}).has_value());
}

TEST_CASE("mesh text format round-trips bit-exactly") {
  const auto pent = ConvexPolygon::regular(5, 1.0, {0.1, -0.2});
  const Mesh m = triangulate_structured(pent, 0.4);
  std::stringstream s;
  write_mesh(s, m);
  const Mesh back = read_mesh(s);
  REQUIRE(back.num_vertices() == m.num_vertices());
  REQUIRE(back.num_triangles() == m.num_triangles());
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    CHECK(back.vertex(v) == m.vertex(v));
    CHECK(back.is_boundary_vertex(v) == m.is_boundary_vertex(v));
  }
  for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(back.triangle(t) == m.triangle(t));
}

TEST_CASE("property: generated and refined meshes are conforming with exact area") {
  gen::Rng rng(20240101);
  for (int c = 0; c < 25; ++c) {
    CAPTURE(c);
    const auto poly = gen::convex_polygon(rng);
    const double h = poly.diameter() / rng.uniform(2.5, 8.0);
    const auto family = refinement_family(triangulate_structured(poly, h), 3);
    for (std::size_t g = 0; g < family.size(); ++g) {
      const Mesh& m = *family[g];
      CHECK(check_conformity(m, poly).conforming);
      CHECK(std::abs(total_area(m) - poly.area()) <= 1e-12 * poly.area());
      CHECK(m.h_max() <= h / std::pow(2.0, static_cast<double>(g)) * (1 + 1e-14));
      for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const auto c3 = m.corners(t);
        CHECK(signed_area2(c3[0], c3[1], c3[2]) > 0.0);
      }
    }
    // ratio is preserved by red refinement
    CHECK(family[2]->h_max() / family[2]->h_min() ==
          doctest::Approx(family[0]->h_max() / family[0]->h_min()).epsilon(1e-12));
  }
}

TEST_CASE("property: locate agrees with barycentric coordinates") {
  gen::Rng rng(7);
  const auto poly = gen::convex_polygon(rng);
  const Mesh m = triangulate_structured(poly, poly.diameter() / 10);
  for (int k = 0; k < 1000; ++k) {
    const Point2 x = gen::interior_point(rng, poly);
    const auto t = m.locate(x);
    const auto c = m.corners(t);
    const auto b = barycentric(x, c[0], c[1], c[2]);
    CAPTURE(k);
    for (double bi : b) CHECK(bi >= -1e-12);
  }
}

TEST_CASE("structured family: h_max halves exactly") {
  const auto family = refinement_family(triangulate_structured(ConvexPolygon::unit_square(), 0.2), 4);
  for (std::size_t g = 1; g < family.size(); ++g) CHECK(family[g]->h_max() == family[0]->h_max() / std::pow(2.0, g));
}
