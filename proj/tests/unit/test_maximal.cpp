#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "spfem/maximal.hpp"
#include "spfem/probes.hpp"

using namespace spfem;

TEST_CASE("square family sides") {
  CHECK(maximal_square_sides(8, 8) == std::vector<int>{1, 2, 4, 8});
  CHECK(maximal_square_sides(12, 20) == std::vector<int>{1, 2, 4, 8, 12});
}

TEST_CASE("hl_maximal: constants") {
  const auto f = GridSampling::sample({{0, 0}, {1, 1}}, 16, 16, [](Point2) { return -0.75; });
  const auto m = hl_maximal(f);
  for (double v : m.values()) CHECK(v == 0.75);
}

TEST_CASE("hl_maximal: indicator of one cell") {
  std::vector<double> v(64, 0.0);
  v[0] = 1.0;  // cell (0, 0)
  const GridSampling f({{0, 0}, {1, 1}}, 8, 8, v);
  const auto m = hl_maximal(f);
  CHECK(m.at(0, 0) == 1.0);
  // the far corner only sees squares that contain the cell through the full box
  CHECK(m.at(7, 7) == doctest::Approx(1.0 / 64).epsilon(1e-15));
  CHECK(m.at(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("sharp_maximal_local: constant, linear scaling, bound by 2M") {
  const Box box{{0, 0}, {1, 1}};
  const auto sq = ConvexPolygon::unit_square();
  const auto c = sharp_maximal_local(GridSampling::sample(box, 32, 32, [](Point2) { return 0.3; }), sq);
  for (double v : c.field.values()) CHECK(v == 0.0);

  // on a linear field the oscillation is proportional to the largest admissible side
  const auto lin = [](Point2 x) { return 2.0 * x.x - x.y; };
  const auto a = sharp_maximal_local(GridSampling::sample(box, 16, 16, lin), sq);
  const auto b = sharp_maximal_local(GridSampling::sample({{0, 0}, {0.5, 0.5}}, 16, 16, lin),
                                     ConvexPolygon::rectangle({0, 0}, {0.5, 0.5}));
  for (int i = 0; i < 16; i += 5)
    for (int j = 0; j < 16; j += 3) CHECK(b.field.at(i, j) == doctest::Approx(0.5 * a.field.at(i, j)).epsilon(0.1));

  gen::Rng rng(11);
  const GridSampling f(box, 24, 24, gen::grid_values(rng, 24, 24));
  const auto sharp = sharp_maximal_local(f, sq);
  const auto hl = hl_maximal(f);
  for (std::size_t k = 0; k < f.values().size(); ++k) CHECK(sharp.field.values()[k] <= 2.0 * hl.values()[k] + 1e-15);
}

TEST_CASE("sharp_maximal_local: cells outside are flagged") {
  const auto tri = ConvexPolygon({{0, 0}, {1, 0}, {0, 1}});
  const auto f = GridSampling::sample({{0, 0}, {1, 1}}, 16, 16, [](Point2 x) { return x.x * x.y; });
  const auto s = sharp_maximal_local(f, tri);
  CHECK(s.outside[f.index(15, 15)] == 1);
  CHECK(s.field.at(15, 15) == 0.0);
  CHECK(s.outside[f.index(1, 1)] == 0);
}

TEST_CASE("property: maximal operator algebra on random grids") {
  gen::Rng rng(2718);
  for (int c = 0; c < 40; ++c) {
    CAPTURE(c);
    const int nx = rng.integer(8, 20), ny = rng.integer(8, 20);
    const Box box{{0, 0}, {1.0 * nx, 1.0 * ny}};
    const auto fv = gen::grid_values(rng, nx, ny);
    std::vector<double> gv(fv.size());
    for (std::size_t k = 0; k < fv.size(); ++k) gv[k] = (rng.coin() ? 1.0 : -1.0) * (std::abs(fv[k]) + rng.uniform(0, 0.5));
    const double scale = (rng.coin() ? 1.0 : -1.0) * std::ldexp(1.0, rng.integer(-3, 3));
    std::vector<double> cf(fv.size());
    for (std::size_t k = 0; k < fv.size(); ++k) cf[k] = scale * fv[k];

    const auto mf = hl_maximal(GridSampling(box, nx, ny, fv));
    const auto mg = hl_maximal(GridSampling(box, nx, ny, gv));
    const auto mc = hl_maximal(GridSampling(box, nx, ny, cf));
    for (std::size_t k = 0; k < fv.size(); ++k) {
      CHECK(mf.values()[k] >= std::abs(fv[k]));
      CHECK(mf.values()[k] <= mg.values()[k]);
      CHECK(mc.values()[k] == std::abs(scale) * mf.values()[k]);
    }
  }
}

TEST_CASE("check_maximal_algebra passes and is seed-deterministic") {
  const auto a = check_maximal_algebra(3, 20);
  const auto b = check_maximal_algebra(3, 20);
  CHECK(a.grids == 20);
  CHECK(a.passed());
  CHECK(b.passed());
}
