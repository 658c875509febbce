#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spfem/geometry.hpp"

namespace spfem {

/// Strictly convex polygon with counterclockwise vertices.
///
/// Construction rejects clockwise, non-convex, repeated or collinear input.
/// Interior angles and corner exponents (pi / angle) are computed once.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Point2> vertices);

  static ConvexPolygon unit_square();
  static ConvexPolygon rectangle(Point2 lo, Point2 hi);
  /// Regular polygon inscribed in the circle of `radius` around `center`,
  /// first vertex at angle pi/2.
  static ConvexPolygon regular(int sides, double radius = 1.0, Point2 center = {});

  std::span<const Point2> vertices() const { return vertices_; }
  std::span<const double> interior_angles() const { return angles_; }
  std::span<const double> corner_exponents() const { return exponents_; }
  std::size_t size() const { return vertices_.size(); }
  Segment edge(std::size_t k) const { return {vertices_[k], vertices_[(k + 1) % vertices_.size()]}; }

  double area() const;
  double diameter() const;
  double min_corner_exponent() const;
  Box bounding_box() const;

  /// True if p lies in the closed polygon, up to `tol` outside.
  bool contains(Point2 p, double tol = 0.0) const;
  /// Signed distance to the boundary, positive inside.
  double signed_distance(Point2 p) const;
  bool is_axis_aligned_rectangle() const;

 private:
  std::vector<Point2> vertices_;
  std::vector<double> angles_;
  std::vector<double> exponents_;
};

using Triangle = std::array<std::int32_t, 3>;
using Edge = std::array<std::int32_t, 2>;

/// Conforming triangulation of a convex polygon.
///
/// Immutable after construction. Edges, per-triangle metrics and a bucket
/// grid for point location are derived in the constructor.
class Mesh {
 public:
  Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles, std::vector<std::uint8_t> boundary_flags,
       int generation = 0);

  std::span<const Point2> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  std::span<const std::uint8_t> boundary_flags() const { return boundary_; }
  std::span<const Edge> edges() const { return edges_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  Point2 vertex(std::size_t v) const { return vertices_[v]; }
  const Triangle& triangle(std::size_t t) const { return triangles_[t]; }
  bool is_boundary_vertex(std::size_t v) const { return boundary_[v] != 0; }
  /// Local edge e of triangle t joins local vertices e and (e + 1) % 3.
  const std::array<std::int32_t, 3>& triangle_edges(std::size_t t) const { return triangle_edges_[t]; }
  /// Number of triangles sharing edge e (1 on the boundary, 2 inside).
  int edge_multiplicity(std::size_t e) const { return edge_count_[e]; }
  bool is_boundary_edge(std::size_t e) const { return edge_count_[e] == 1; }

  std::array<Point2, 3> corners(std::size_t t) const;
  double area(std::size_t t) const;
  double diameter(std::size_t t) const;
  Point2 barycenter(std::size_t t) const;

  double h_max() const { return h_max_; }
  double h_min() const { return h_min_; }
  double min_angle() const { return min_angle_; }
  int generation() const { return generation_; }
  Box bounding_box() const { return bbox_; }

  /// Triangle containing z (closed), lowest index on ties.
  /// Throws if z is farther than 1e-12 * diameter from the mesh.
  std::size_t locate(Point2 z) const;
  std::optional<std::size_t> try_locate(Point2 z) const;

 private:
  void build_edges();
  void build_locator();

  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<std::uint8_t> boundary_;
  int generation_ = 0;

  std::vector<Edge> edges_;
  std::vector<std::array<std::int32_t, 3>> triangle_edges_;
  std::vector<int> edge_count_;

  double h_max_ = 0.0;
  double h_min_ = 0.0;
  double min_angle_ = 0.0;
  Box bbox_{};
  double locate_tol_ = 0.0;

  // bucket grid, CSR layout
  int grid_nx_ = 1;
  int grid_ny_ = 1;
  std::vector<std::int32_t> bucket_start_;
  std::vector<std::int32_t> bucket_items_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

struct QuasiUniformity {
  double h_max = 0.0;
  double h_min = 0.0;
  double ratio = 0.0;
  double min_angle = 0.0;  // radians
};

QuasiUniformity quasi_uniformity_metrics(const Mesh& mesh);

/// Structured N x M right-triangle grid for axis-aligned rectangles (every
/// cell split along its (i,j)-(i+1,j+1) diagonal); centroid fan followed by
/// red refinement for any other convex polygon. Guarantees h_max <= target_h.
Mesh triangulate_structured(const ConvexPolygon& polygon, double target_h);

/// Red refinement: every triangle split into four congruent children.
Mesh refine_uniform(const Mesh& mesh);

/// `count` meshes: the input followed by successive red refinements.
std::vector<MeshPtr> refinement_family(const Mesh& coarsest, int count);

std::size_t locate(const Mesh& mesh, Point2 z);

struct ConformityReport {
  bool conforming = true;
  std::string diagnostic;
};

/// Edge-multiplicity check: interior edges in exactly two triangles,
/// edges in one triangle only on the boundary, positive areas, total area.
ConformityReport check_conformity(const Mesh& mesh, const ConvexPolygon& polygon);

/// Plain-text mesh format, 17 significant digits.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

}  // namespace spfem
