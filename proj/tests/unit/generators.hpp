#pragma once

// Small seeded generators for the property tests. Every case is derived from
// a fixed seed so failures are reproducible; the failing case index is
// reported through doctest's CAPTURE.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "spfem/mesh.hpp"
#include "spfem/weights.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Convex polygon with 3..8 vertices on a jittered circle. Angular gaps are
/// kept below pi so the polygon is strictly convex.
inline spfem::ConvexPolygon convex_polygon(Rng& rng) {
  const int n = rng.integer(3, 8);
  std::vector<double> angles;
  const double base = 2.0 * std::numbers::pi / n;
  for (int k = 0; k < n; ++k) angles.push_back(k * base + rng.uniform(-0.3, 0.3) * base);
  const spfem::Point2 c{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  const double r = rng.uniform(0.5, 2.0);
  std::vector<spfem::Point2> v;
  for (double a : angles) v.push_back(c + spfem::Vec2{r * std::cos(a), r * std::sin(a)});
  return spfem::ConvexPolygon(std::move(v));
}

/// Uniform point in the bounding box, rejected until at least `margin` inside.
inline spfem::Point2 interior_point(Rng& rng, const spfem::ConvexPolygon& poly, double margin = 0.0) {
  const auto b = poly.bounding_box();
  for (;;) {
    const spfem::Point2 x{rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y)};
    if (poly.signed_distance(x) > margin) return x;
  }
}

/// One to three points and up to two segments inside the polygon.
inline spfem::FeatureSet feature_set(Rng& rng, const spfem::ConvexPolygon& poly) {
  std::vector<spfem::Point2> pts;
  std::vector<spfem::Segment> segs;
  const int np = rng.integer(1, 3);
  for (int k = 0; k < np; ++k) pts.push_back(interior_point(rng, poly));
  const int ns = rng.integer(0, 2);
  for (int k = 0; k < ns; ++k) {
    spfem::Segment s{interior_point(rng, poly), interior_point(rng, poly)};
    if (spfem::distance(s.a, s.b) > 1e-3) segs.push_back(s);
  }
  return spfem::FeatureSet(std::move(pts), std::move(segs));
}

/// Grid values in [-1, 1].
inline std::vector<double> grid_values(Rng& rng, int nx, int ny) {
  std::vector<double> v(static_cast<std::size_t>(nx) * ny);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace gen
