#pragma once

#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "spfem/fe_function.hpp"
#include "spfem/mesh.hpp"
#include "spfem/sparse.hpp"

namespace spfem {

/// Stiffness matrix of the Dirichlet Laplacian.
///
/// `full` acts on every dof (its rows sum to zero); `reduced` keeps free
/// rows and columns only and is symmetric positive definite.
struct SparseSystem {
  std::shared_ptr<const DofMap> dofs;
  CsrMatrix full;
  CsrMatrix reduced;
};

SparseSystem assemble_stiffness(MeshPtr mesh, int degree = 1);

/// Element stiffness matrix of triangle t (leading 3x3 or 6x6 block).
std::array<std::array<double, 6>, 6> element_stiffness(const Mesh& mesh, std::size_t t, int degree);

using ScalarField = std::function<double(Point2)>;
using VectorField = std::function<Vec2(Point2)>;
/// Vector field evaluated at (triangle, barycentric point, physical point).
using TriangleVectorField = std::function<Vec2(std::size_t, const std::array<double, 3>&, Point2)>;

struct PointMass {
  Point2 location;
  double mass = 1.0;
};

/// Measure g ds on a segment.
struct LineMeasure {
  Segment segment;
  ScalarField density = [](Point2) { return 1.0; };
};

/// The distribution div q. The weak right-hand side is -int q . grad v.
struct DivField {
  TriangleVectorField field;

  static DivField analytic(VectorField q);
  /// One constant vector per triangle.
  static DivField piecewise_constant(std::vector<Vec2> per_triangle);
};

struct Density {
  ScalarField f;
};

using SourceTerm = std::variant<PointMass, LineMeasure, DivField, Density>;

struct AssemblyOptions {
  /// Triangle rule degree for DivField and Density.
  int triangle_degree = 4;
  /// Segment rule degree for LineMeasure.
  int segment_degree = 6;
};

/// <source, phi_i> for every dof, boundary dofs included.
///
/// A point mass on an edge or vertex uses the triangle chosen by
/// Mesh::locate; it must not lie on the boundary. A line measure is split
/// where it crosses triangle edges and every piece is integrated on the
/// triangle containing its midpoint.
std::vector<double> assemble_load(const DofMap& dofs, const SourceTerm& source, const AssemblyOptions& options = {});

/// assemble_load restricted to the free dofs.
std::vector<double> assemble_rhs(const DofMap& dofs, const SourceTerm& source, const AssemblyOptions& options = {});

/// int grad_u . grad phi_i for every dof.
std::vector<double> assemble_gradient_load(const DofMap& dofs, const TriangleVectorField& grad_u, int triangle_degree);

/// Solves the reduced system; boundary values of the result are 0.
FEFunction solve_cg(const SparseSystem& system, const std::vector<double>& free_rhs, const CgOptions& options = {});

/// Solves with a load over all dofs and nonhomogeneous boundary values g.
FEFunction solve_dirichlet(const SparseSystem& system, const std::vector<double>& load, const ScalarField& g,
                           const CgOptions& options = {});

/// Homogeneous Dirichlet solution for a source term.
FEFunction solve_source(const SparseSystem& system, const SourceTerm& source, const CgOptions& options = {},
                        const AssemblyOptions& assembly = {});

/// Ritz projection u_h of u from its gradient: int grad u_h . grad v = int grad u . grad v.
FEFunction galerkin_project(const SparseSystem& system, const TriangleVectorField& grad_u, int triangle_degree = 4,
                            const CgOptions& options = {});

/// Gradient of u_h on the triangle Mesh::locate(z).
Vec2 point_gradient(const FEFunction& u_h, Point2 z);

/// A pointwise field seen as a TriangleVectorField.
TriangleVectorField pointwise(VectorField q);

/// Gradient of an FE function as a TriangleVectorField.
TriangleVectorField gradient_field(const FEFunction& u);

}  // namespace spfem
