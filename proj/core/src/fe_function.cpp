#include "spfem/fe_function.hpp"

namespace spfem {

DofMap::DofMap(MeshPtr mesh, int degree) : mesh_(std::move(mesh)), degree_(degree) {
  if (!mesh_) throw Error("dof map needs a mesh");
  if (degree_ != 1 && degree_ != 2) throw Error("Lagrange degree must be 1 or 2, got " + std::to_string(degree_));
  const auto& m = *mesh_;
  num_dofs_ = m.num_vertices() + (degree_ == 2 ? m.num_edges() : 0);
  free_index_.assign(num_dofs_, -1);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    if (m.is_boundary_vertex(v)) continue;
    free_index_[v] = static_cast<std::int32_t>(free_dofs_.size());
    free_dofs_.push_back(static_cast<std::int32_t>(v));
  }
  if (degree_ == 2) {
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
      if (m.is_boundary_edge(e)) continue;
      const std::size_t dof = m.num_vertices() + e;
      free_index_[dof] = static_cast<std::int32_t>(free_dofs_.size());
      free_dofs_.push_back(static_cast<std::int32_t>(dof));
    }
  }
}

std::array<std::int32_t, 6> DofMap::triangle_dofs(std::size_t t) const {
  const auto& tri = mesh_->triangle(t);
  std::array<std::int32_t, 6> d{tri[0], tri[1], tri[2], -1, -1, -1};
  if (degree_ == 2) {
    const auto& te = mesh_->triangle_edges(t);
    const auto nv = static_cast<std::int32_t>(mesh_->num_vertices());
    for (int e = 0; e < 3; ++e) d[3 + e] = nv + te[e];
  }
  return d;
}

Point2 DofMap::dof_point(std::size_t dof) const {
  const auto& m = *mesh_;
  if (dof < m.num_vertices()) return m.vertex(dof);
  const auto& e = m.edges()[dof - m.num_vertices()];
  return 0.5 * (m.vertex(e[0]) + m.vertex(e[1]));
}

std::array<double, 6> shape_values(int degree, const std::array<double, 3>& b) {
  if (degree == 1) return {b[0], b[1], b[2], 0.0, 0.0, 0.0};
  return {b[0] * (2.0 * b[0] - 1.0), b[1] * (2.0 * b[1] - 1.0), b[2] * (2.0 * b[2] - 1.0),
          4.0 * b[0] * b[1],         4.0 * b[1] * b[2],         4.0 * b[2] * b[0]};
}

std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, std::size_t t) {
  const auto c = mesh.corners(t);
  const double det = cross(c[1] - c[0], c[2] - c[0]);
  // grad b_i is the inward normal of the opposite edge scaled by 1/(2 area)
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point2 p = c[(i + 1) % 3];
    const Point2 q = c[(i + 2) % 3];
    g[i] = Vec2{p.y - q.y, q.x - p.x} * (1.0 / det);
  }
  return g;
}

std::array<Vec2, 6> shape_gradients(const Mesh& mesh, std::size_t t, int degree, const std::array<double, 3>& b) {
  const auto g = barycentric_gradients(mesh, t);
  if (degree == 1) return {g[0], g[1], g[2], Vec2{}, Vec2{}, Vec2{}};
  return {g[0] * (4.0 * b[0] - 1.0),
          g[1] * (4.0 * b[1] - 1.0),
          g[2] * (4.0 * b[2] - 1.0),
          (g[0] * b[1] + g[1] * b[0]) * 4.0,
          (g[1] * b[2] + g[2] * b[1]) * 4.0,
          (g[2] * b[0] + g[0] * b[2]) * 4.0};
}

FEFunction::FEFunction(std::shared_ptr<const DofMap> dofs, std::vector<double> nodal_values)
    : mesh_(dofs ? dofs->mesh_ptr() : nullptr),
      degree_(dofs ? dofs->degree() : 1),
      values_(std::move(nodal_values)),
      dofs_(std::move(dofs)) {
  if (!dofs_) throw Error("finite element function needs a dof map");
  if (values_.size() != dofs_->num_dofs())
    throw Error("expected " + std::to_string(dofs_->num_dofs()) + " nodal values, got " +
                std::to_string(values_.size()));
}

FEFunction::FEFunction(MeshPtr mesh, int degree, std::vector<double> nodal_values)
    : FEFunction(std::make_shared<const DofMap>(std::move(mesh), degree), std::move(nodal_values)) {}

FEFunction::FEFunction(MeshPtr mesh, int degree) : FEFunction(std::make_shared<const DofMap>(std::move(mesh), degree)) {}

FEFunction::FEFunction(std::shared_ptr<const DofMap> dofs)
    : FEFunction(dofs, std::vector<double>(dofs ? dofs->num_dofs() : 0, 0.0)) {}

double FEFunction::value(std::size_t t, const std::array<double, 3>& b) const {
  const auto d = dofs_->triangle_dofs(t);
  const auto phi = shape_values(degree_, b);
  double v = 0.0;
  for (int k = 0; k < dofs_->dofs_per_triangle(); ++k) v += values_[d[k]] * phi[k];
  return v;
}

Vec2 FEFunction::gradient(std::size_t t, const std::array<double, 3>& b) const {
  const auto d = dofs_->triangle_dofs(t);
  const auto g = shape_gradients(*mesh_, t, degree_, b);
  Vec2 v{};
  for (int k = 0; k < dofs_->dofs_per_triangle(); ++k) v = v + g[k] * values_[d[k]];
  return v;
}

double FEFunction::value_at(Point2 x) const {
  const std::size_t t = mesh_->locate(x);
  const auto c = mesh_->corners(t);
  return value(t, barycentric(x, c[0], c[1], c[2]));
}

Vec2 FEFunction::gradient_at(Point2 x) const {
  const std::size_t t = mesh_->locate(x);
  const auto c = mesh_->corners(t);
  return gradient(t, barycentric(x, c[0], c[1], c[2]));
}

FEFunction interpolate(MeshPtr mesh, int degree, const std::function<double(Point2)>& f) {
  auto dofs = std::make_shared<const DofMap>(std::move(mesh), degree);
  std::vector<double> values(dofs->num_dofs());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = f(dofs->dof_point(k));
  return FEFunction(std::move(dofs), std::move(values));
}

}  // namespace spfem
