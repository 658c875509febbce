#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "spfem/mesh.hpp"

namespace spfem {

/// Degrees of freedom of the continuous Lagrange space of degree 1 or 2.
///
/// P1: one dof per vertex. P2: vertices first, then one dof per edge
/// midpoint (index num_vertices + edge). Local dof order on a triangle is
/// (v0, v1, v2) followed, for P2, by the midpoints of edges (v0v1, v1v2, v2v0).
class DofMap {
 public:
  DofMap(MeshPtr mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int dofs_per_triangle() const { return degree_ == 1 ? 3 : 6; }
  std::size_t num_dofs() const { return num_dofs_; }
  std::size_t num_free() const { return free_dofs_.size(); }

  /// Global dofs of triangle t (first dofs_per_triangle() entries valid).
  std::array<std::int32_t, 6> triangle_dofs(std::size_t t) const;
  bool is_boundary(std::size_t dof) const { return free_index_[dof] < 0; }
  /// Position in the reduced system, -1 for boundary dofs.
  std::int32_t free_index(std::size_t dof) const { return free_index_[dof]; }
  const std::vector<std::int32_t>& free_dofs() const { return free_dofs_; }
  Point2 dof_point(std::size_t dof) const;

 private:
  MeshPtr mesh_;
  int degree_;
  std::size_t num_dofs_ = 0;
  std::vector<std::int32_t> free_index_;
  std::vector<std::int32_t> free_dofs_;
};

/// Local shape function values at barycentric point b (3 or 6 entries).
std::array<double, 6> shape_values(int degree, const std::array<double, 3>& b);
/// Local shape function gradients on triangle t at barycentric point b.
std::array<Vec2, 6> shape_gradients(const Mesh& mesh, std::size_t t, int degree, const std::array<double, 3>& b);
/// Gradients of the three barycentric coordinates on triangle t.
std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, std::size_t t);

/// Piecewise polynomial function given by nodal values over a mesh.
class FEFunction {
 public:
  FEFunction(MeshPtr mesh, int degree, std::vector<double> nodal_values);
  FEFunction(std::shared_ptr<const DofMap> dofs, std::vector<double> nodal_values);
  /// The zero function.
  FEFunction(MeshPtr mesh, int degree);
  explicit FEFunction(std::shared_ptr<const DofMap> dofs);

  const DofMap& dofs() const { return *dofs_; }
  const std::shared_ptr<const DofMap>& dofs_ptr() const { return dofs_; }
  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  const std::vector<double>& nodal_values() const { return values_; }
  std::vector<double>& nodal_values() { return values_; }

  double value(std::size_t t, const std::array<double, 3>& b) const;
  Vec2 gradient(std::size_t t, const std::array<double, 3>& b) const;
  /// Evaluation at a physical point (triangle chosen by Mesh::locate).
  double value_at(Point2 x) const;
  Vec2 gradient_at(Point2 x) const;

 private:
  MeshPtr mesh_;
  int degree_;
  std::vector<double> values_;
  std::shared_ptr<const DofMap> dofs_;
};

/// Nodal interpolant of f.
FEFunction interpolate(MeshPtr mesh, int degree, const std::function<double(Point2)>& f);

}  // namespace spfem
