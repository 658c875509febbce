#include "spfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace spfem {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_at(Point2 prev, Point2 at, Point2 next) {
  const Vec2 u = prev - at;
  const Vec2 v = next - at;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

}  // namespace

// ---------------------------------------------------------------------------
// ConvexPolygon

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw Error("polygon needs at least 3 vertices");
  double turning = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 prev = vertices_[(k + n - 1) % n];
    const Point2 at = vertices_[k];
    const Point2 next = vertices_[(k + 1) % n];
    if (at == next) throw Error("polygon has repeated vertex " + std::to_string(k));
    const double turn = cross(at - prev, next - at);
    if (turn < 0.0) {
      throw Error("polygon is not convex or not counterclockwise at vertex " + std::to_string(k) + " " +
                  to_string(at));
    }
    if (turn == 0.0) throw Error("polygon has a straight angle at vertex " + std::to_string(k));
    const double omega = angle_at(prev, at, next);
    angles_.push_back(omega);
    exponents_.push_back(kPi / omega);
    turning += kPi - omega;
  }
  if (std::abs(turning - 2.0 * kPi) > 1e-9) throw Error("polygon boundary winds more than once");
}

ConvexPolygon ConvexPolygon::unit_square() { return rectangle({0.0, 0.0}, {1.0, 1.0}); }

ConvexPolygon ConvexPolygon::rectangle(Point2 lo, Point2 hi) {
  return ConvexPolygon({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}});
}

ConvexPolygon ConvexPolygon::regular(int sides, double radius, Point2 center) {
  if (sides < 3) throw Error("regular polygon needs at least 3 sides");
  std::vector<Point2> v;
  for (int k = 0; k < sides; ++k) {
    const double a = kPi / 2.0 + 2.0 * kPi * k / sides;
    v.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return ConvexPolygon(std::move(v));
}

double ConvexPolygon::area() const {
  double a = 0.0;
  for (std::size_t k = 0; k < size(); ++k) a += cross(vertices_[k], vertices_[(k + 1) % size()]);
  return 0.5 * a;
}

double ConvexPolygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, distance(vertices_[i], vertices_[j]));
  return d;
}

double ConvexPolygon::min_corner_exponent() const { return *std::min_element(exponents_.begin(), exponents_.end()); }

Box ConvexPolygon::bounding_box() const {
  Box b{vertices_[0], vertices_[0]};
  for (const auto& p : vertices_) {
    b.lo = {std::min(b.lo.x, p.x), std::min(b.lo.y, p.y)};
    b.hi = {std::max(b.hi.x, p.x), std::max(b.hi.y, p.y)};
  }
  return b;
}

double ConvexPolygon::signed_distance(Point2 p) const {
  double inside = std::numeric_limits<double>::infinity();
  bool outside = false;
  double out_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < size(); ++k) {
    const Segment e = edge(k);
    const double side = cross(e.b - e.a, p - e.a) / e.length();
    if (side < 0.0) outside = true;
    inside = std::min(inside, side);
    out_dist = std::min(out_dist, distance(p, e));
  }
  return outside ? -out_dist : inside;
}

bool ConvexPolygon::contains(Point2 p, double tol) const { return signed_distance(p) >= -tol; }

bool ConvexPolygon::is_axis_aligned_rectangle() const {
  if (size() != 4) return false;
  for (std::size_t k = 0; k < 4; ++k) {
    const Segment e = edge(k);
    if (e.a.x != e.b.x && e.a.y != e.b.y) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Mesh

Mesh::Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles, std::vector<std::uint8_t> boundary_flags,
           int generation)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary_flags)),
      generation_(generation) {
  if (boundary_.size() != vertices_.size()) throw Error("boundary flag count does not match vertex count");
  if (triangles_.empty()) throw Error("mesh has no triangles");
  const auto nv = static_cast<std::int32_t>(vertices_.size());
  h_max_ = 0.0;
  h_min_ = std::numeric_limits<double>::infinity();
  min_angle_ = kPi;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (auto v : triangles_[t])
      if (v < 0 || v >= nv) throw Error("triangle " + std::to_string(t) + " references a missing vertex");
    const auto c = corners(t);
    if (!(signed_area2(c[0], c[1], c[2]) > 0.0))
      throw Error("triangle " + std::to_string(t) + " has nonpositive signed area");
    const double d = diameter(t);
    h_max_ = std::max(h_max_, d);
    h_min_ = std::min(h_min_, d);
    for (int k = 0; k < 3; ++k) min_angle_ = std::min(min_angle_, angle_at(c[(k + 2) % 3], c[k], c[(k + 1) % 3]));
  }
  bbox_ = {vertices_[0], vertices_[0]};
  for (const auto& p : vertices_) {
    bbox_.lo = {std::min(bbox_.lo.x, p.x), std::min(bbox_.lo.y, p.y)};
    bbox_.hi = {std::max(bbox_.hi.x, p.x), std::max(bbox_.hi.y, p.y)};
  }
  locate_tol_ = 1e-12 * std::hypot(bbox_.width(), bbox_.height());
  build_edges();
  build_locator();
}

void Mesh::build_edges() {
  std::unordered_map<std::uint64_t, std::int32_t> index;
  index.reserve(triangles_.size() * 2);
  triangle_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int e = 0; e < 3; ++e) {
      std::int32_t a = triangles_[t][e];
      std::int32_t b = triangles_[t][(e + 1) % 3];
      if (a > b) std::swap(a, b);
      const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
      auto [it, inserted] = index.try_emplace(key, static_cast<std::int32_t>(edges_.size()));
      if (inserted) {
        edges_.push_back({a, b});
        edge_count_.push_back(0);
      }
      ++edge_count_[it->second];
      triangle_edges_[t][e] = it->second;
    }
  }
}

void Mesh::build_locator() {
  const double w = std::max(bbox_.width(), 1e-300);
  const double h = std::max(bbox_.height(), 1e-300);
  const double cells = std::max(1.0, static_cast<double>(triangles_.size()) / 2.0);
  const double cell = std::sqrt(w * h / cells);
  grid_nx_ = std::clamp(static_cast<int>(std::ceil(w / cell)), 1, 4096);
  grid_ny_ = std::clamp(static_cast<int>(std::ceil(h / cell)), 1, 4096);
  const double dx = w / grid_nx_;
  const double dy = h / grid_ny_;
  auto cell_range = [&](double lo, double hi, double origin, double step, int n) {
    int a = static_cast<int>(std::floor((lo - locate_tol_ - origin) / step));
    int b = static_cast<int>(std::floor((hi + locate_tol_ - origin) / step));
    return std::pair{std::clamp(a, 0, n - 1), std::clamp(b, 0, n - 1)};
  };
  std::vector<std::int32_t> counts(static_cast<std::size_t>(grid_nx_) * grid_ny_ + 1, 0);
  auto visit = [&](auto&& fn) {
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      const auto c = corners(t);
      const double xl = std::min({c[0].x, c[1].x, c[2].x}), xh = std::max({c[0].x, c[1].x, c[2].x});
      const double yl = std::min({c[0].y, c[1].y, c[2].y}), yh = std::max({c[0].y, c[1].y, c[2].y});
      const auto [i0, i1] = cell_range(xl, xh, bbox_.lo.x, dx, grid_nx_);
      const auto [j0, j1] = cell_range(yl, yh, bbox_.lo.y, dy, grid_ny_);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) fn(static_cast<std::size_t>(j) * grid_nx_ + i, t);
    }
  };
  visit([&](std::size_t b, std::size_t) { ++counts[b + 1]; });
  for (std::size_t b = 1; b < counts.size(); ++b) counts[b] += counts[b - 1];
  bucket_start_ = counts;
  bucket_items_.resize(counts.back());
  visit([&](std::size_t b, std::size_t t) { bucket_items_[counts[b]++] = static_cast<std::int32_t>(t); });
}

std::array<Point2, 3> Mesh::corners(std::size_t t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double Mesh::area(std::size_t t) const {
  const auto c = corners(t);
  return 0.5 * signed_area2(c[0], c[1], c[2]);
}

double Mesh::diameter(std::size_t t) const {
  const auto c = corners(t);
  return std::max({distance(c[0], c[1]), distance(c[1], c[2]), distance(c[2], c[0])});
}

Point2 Mesh::barycenter(std::size_t t) const {
  const auto c = corners(t);
  return (1.0 / 3.0) * (c[0] + c[1] + c[2]);
}

std::optional<std::size_t> Mesh::try_locate(Point2 z) const {
  if (z.x < bbox_.lo.x - locate_tol_ || z.x > bbox_.hi.x + locate_tol_ || z.y < bbox_.lo.y - locate_tol_ ||
      z.y > bbox_.hi.y + locate_tol_)
    return std::nullopt;
  const double dx = bbox_.width() / grid_nx_;
  const double dy = bbox_.height() / grid_ny_;
  const int i = std::clamp(static_cast<int>(std::floor((z.x - bbox_.lo.x) / dx)), 0, grid_nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((z.y - bbox_.lo.y) / dy)), 0, grid_ny_ - 1);
  const std::size_t b = static_cast<std::size_t>(j) * grid_nx_ + i;
  std::optional<std::size_t> best;
  for (auto k = bucket_start_[b]; k < bucket_start_[b + 1]; ++k) {
    const auto t = static_cast<std::size_t>(bucket_items_[k]);
    if (best && t >= *best) continue;
    const auto c = corners(t);
    if (distance_to_triangle(z, c[0], c[1], c[2]) <= locate_tol_) best = t;
  }
  return best;
}

std::size_t Mesh::locate(Point2 z) const {
  if (auto t = try_locate(z)) return *t;
  throw Error("point " + to_string(z) + " lies outside the meshed domain");
}

std::size_t locate(const Mesh& mesh, Point2 z) { return mesh.locate(z); }

QuasiUniformity quasi_uniformity_metrics(const Mesh& mesh) {
  return {mesh.h_max(), mesh.h_min(), mesh.h_max() / mesh.h_min(), mesh.min_angle()};
}

// ---------------------------------------------------------------------------
// generation and refinement

namespace {

Mesh structured_rectangle(Point2 lo, Point2 hi, double target_h) {
  const double w = hi.x - lo.x;
  const double h = hi.y - lo.y;
  // cell diagonal sqrt(dx^2 + dy^2) <= target_h when dx, dy <= target_h / sqrt(2)
  const auto cells = [&](double len) {
    return std::max(1, static_cast<int>(std::ceil(len * std::numbers::sqrt2 / target_h - 1e-12)));
  };
  const int nx = cells(w);
  const int ny = cells(h);
  std::vector<Point2> verts;
  std::vector<std::uint8_t> boundary;
  verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? hi.x : lo.x + w * i / nx;
      const double y = j == ny ? hi.y : lo.y + h * j / ny;
      verts.push_back({x, y});
      boundary.push_back(i == 0 || j == 0 || i == nx || j == ny);
    }
  }
  auto id = [nx](int i, int j) { return static_cast<std::int32_t>(j * (nx + 1) + i); };
  std::vector<Triangle> tris;
  tris.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(verts), std::move(tris), std::move(boundary));
}

Mesh centroid_fan(const ConvexPolygon& polygon) {
  const auto pv = polygon.vertices();
  const auto n = static_cast<std::int32_t>(pv.size());
  Point2 c{};
  for (const auto& p : pv) c = c + p;
  c = (1.0 / n) * c;
  std::vector<Point2> verts(pv.begin(), pv.end());
  verts.push_back(c);
  std::vector<std::uint8_t> boundary(pv.size(), 1);
  boundary.push_back(0);
  std::vector<Triangle> tris;
  for (std::int32_t k = 0; k < n; ++k) tris.push_back({n, k, (k + 1) % n});
  return Mesh(std::move(verts), std::move(tris), std::move(boundary));
}

}  // namespace

Mesh triangulate_structured(const ConvexPolygon& polygon, double target_h) {
  if (!(target_h > 0.0)) throw Error("target_h must be positive");
  if (target_h >= polygon.diameter())
    throw Error("target_h " + std::to_string(target_h) + " does not resolve a polygon of diameter " +
                std::to_string(polygon.diameter()));
  if (polygon.is_axis_aligned_rectangle()) {
    const Box b = polygon.bounding_box();
    return structured_rectangle(b.lo, b.hi, target_h);
  }
  Mesh mesh = centroid_fan(polygon);
  int generation = 0;
  while (mesh.h_max() > target_h) {
    mesh = refine_uniform(mesh);
    ++generation;
  }
  return Mesh({mesh.vertices().begin(), mesh.vertices().end()}, {mesh.triangles().begin(), mesh.triangles().end()},
              {mesh.boundary_flags().begin(), mesh.boundary_flags().end()}, 0);
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point2> verts(mesh.vertices().begin(), mesh.vertices().end());
  std::vector<std::uint8_t> boundary(mesh.boundary_flags().begin(), mesh.boundary_flags().end());
  const auto nv = static_cast<std::int32_t>(verts.size());
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges()[e];
    verts.push_back(0.5 * (mesh.vertex(ed[0]) + mesh.vertex(ed[1])));
    boundary.push_back(mesh.is_boundary_edge(e));
  }
  std::vector<Triangle> tris;
  tris.reserve(4 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangle(t);
    const auto& te = mesh.triangle_edges(t);
    const std::int32_t m01 = nv + te[0];
    const std::int32_t m12 = nv + te[1];
    const std::int32_t m20 = nv + te[2];
    tris.push_back({v[0], m01, m20});
    tris.push_back({m01, v[1], m12});
    tris.push_back({m20, m12, v[2]});
    tris.push_back({m01, m12, m20});
  }
  return Mesh(std::move(verts), std::move(tris), std::move(boundary), mesh.generation() + 1);
}

std::vector<MeshPtr> refinement_family(const Mesh& coarsest, int count) {
  std::vector<MeshPtr> family;
  if (count <= 0) return family;
  family.push_back(std::make_shared<const Mesh>(coarsest));
  for (int g = 1; g < count; ++g) family.push_back(std::make_shared<const Mesh>(refine_uniform(*family.back())));
  return family;
}

ConformityReport check_conformity(const Mesh& mesh, const ConvexPolygon& polygon) {
  ConformityReport report;
  auto fail = [&](std::string why) {
    report.conforming = false;
    report.diagnostic = std::move(why);
    return report;
  };
  const double tol = 1e-12 * polygon.diameter();
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const int m = mesh.edge_multiplicity(e);
    const auto& ed = mesh.edges()[e];
    if (m > 2) return fail("edge " + std::to_string(e) + " shared by " + std::to_string(m) + " triangles");
    if (m == 1) {
      const Point2 mid = 0.5 * (mesh.vertex(ed[0]) + mesh.vertex(ed[1]));
      if (std::abs(polygon.signed_distance(mid)) > tol)
        return fail("edge " + std::to_string(e) + " has one triangle but is interior (hanging node)");
    }
  }
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const bool on_boundary = std::abs(polygon.signed_distance(mesh.vertex(v))) <= tol;
    if (on_boundary != mesh.is_boundary_vertex(v))
      return fail("boundary flag of vertex " + std::to_string(v) + " is wrong");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) total += mesh.area(t);
  if (std::abs(total - polygon.area()) > 1e-12 * polygon.area())
    return fail("triangle areas sum to " + std::to_string(total) + ", polygon area " + std::to_string(polygon.area()));
  return report;
}

}  // namespace spfem
