#include "spfem/fem.hpp"

#include <algorithm>
#include <cmath>

#include "spfem/parallel.hpp"
#include "spfem/quadrature.hpp"

namespace spfem {

std::array<std::array<double, 6>, 6> element_stiffness(const Mesh& mesh, std::size_t t, int degree) {
  const double area = mesh.area(t);
  if (!(area > 0.0)) throw Error("degenerate triangle " + std::to_string(t));
  std::array<std::array<double, 6>, 6> k{};
  if (degree == 1) {
    const auto g = barycentric_gradients(mesh, t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) k[a][b] = area * dot(g[a], g[b]);
    return k;
  }
  const auto rule = triangle_rule(2);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto g = shape_gradients(mesh, t, 2, rule.nodes[q]);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) k[a][b] += rule.weights[q] * dot(g[a], g[b]);
  }
  for (auto& row : k)
    for (auto& v : row) v *= area;
  return k;
}

SparseSystem assemble_stiffness(MeshPtr mesh, int degree) {
  SparseSystem sys;
  sys.dofs = std::make_shared<const DofMap>(mesh, degree);
  const DofMap& dofs = *sys.dofs;
  const int nloc = dofs.dofs_per_triangle();
  const std::size_t n = dofs.num_dofs();
  const std::size_t nt = mesh->num_triangles();

  std::vector<std::array<std::array<double, 6>, 6>> local(nt);
  parallel_for(nt, [&](std::size_t t) { local[t] = element_stiffness(*mesh, t, degree); });

  // sparsity pattern
  std::vector<std::vector<std::int32_t>> pattern(n);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto d = dofs.triangle_dofs(t);
    for (int a = 0; a < nloc; ++a)
      for (int b = 0; b < nloc; ++b) pattern[d[a]].push_back(d[b]);
  }
  CsrMatrix& k = sys.full;
  k.rows = n;
  k.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = pattern[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    k.row_ptr[i + 1] = k.row_ptr[i] + static_cast<std::int64_t>(row.size());
  }
  k.cols.reserve(k.row_ptr[n]);
  for (auto& row : pattern) {
    k.cols.insert(k.cols.end(), row.begin(), row.end());
    std::vector<std::int32_t>().swap(row);
  }
  k.vals.assign(k.cols.size(), 0.0);

  // scatter in triangle order
  for (std::size_t t = 0; t < nt; ++t) {
    const auto d = dofs.triangle_dofs(t);
    for (int a = 0; a < nloc; ++a) {
      const auto begin = k.cols.begin() + k.row_ptr[d[a]];
      const auto end = k.cols.begin() + k.row_ptr[d[a] + 1];
      for (int b = 0; b < nloc; ++b) {
        const auto it = std::lower_bound(begin, end, d[b]);
        k.vals[it - k.cols.begin()] += local[t][a][b];
      }
    }
  }

  // free rows and columns; free indices increase with dof index so columns stay sorted
  CsrMatrix& r = sys.reduced;
  r.rows = dofs.num_free();
  r.row_ptr.assign(r.rows + 1, 0);
  for (std::size_t fi = 0; fi < r.rows; ++fi) {
    const auto i = static_cast<std::size_t>(dofs.free_dofs()[fi]);
    for (auto p = k.row_ptr[i]; p < k.row_ptr[i + 1]; ++p) {
      const auto fj = dofs.free_index(k.cols[p]);
      if (fj < 0) continue;
      r.cols.push_back(fj);
      r.vals.push_back(k.vals[p]);
    }
    r.row_ptr[fi + 1] = static_cast<std::int64_t>(r.cols.size());
  }
  return sys;
}

TriangleVectorField pointwise(VectorField q) {
  return [q = std::move(q)](std::size_t, const std::array<double, 3>&, Point2 x) { return q(x); };
}

DivField DivField::analytic(VectorField q) { return {pointwise(std::move(q))}; }

DivField DivField::piecewise_constant(std::vector<Vec2> per_triangle) {
  auto values = std::make_shared<const std::vector<Vec2>>(std::move(per_triangle));
  return {[values](std::size_t t, const std::array<double, 3>&, Point2) {
    if (t >= values->size()) throw Error("piecewise constant field has no value for triangle " + std::to_string(t));
    return (*values)[t];
  }};
}

namespace {

using LocalVector = std::array<double, 6>;

Point2 physical(const std::array<Point2, 3>& c, const std::array<double, 3>& b) {
  return b[0] * c[0] + b[1] * c[1] + b[2] * c[2];
}

/// Element vectors computed in parallel, scattered in triangle order.
std::vector<double> assemble_elementwise(const DofMap& dofs,
                                         const std::function<LocalVector(std::size_t)>& element_vector) {
  const Mesh& mesh = dofs.mesh();
  const std::size_t nt = mesh.num_triangles();
  std::vector<LocalVector> local(nt);
  parallel_for(nt, [&](std::size_t t) { local[t] = element_vector(t); });
  std::vector<double> load(dofs.num_dofs(), 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto d = dofs.triangle_dofs(t);
    for (int a = 0; a < dofs.dofs_per_triangle(); ++a) load[d[a]] += local[t][a];
  }
  return load;
}

std::vector<double> point_mass_load(const DofMap& dofs, const PointMass& src) {
  const Mesh& mesh = dofs.mesh();
  const auto located = mesh.try_locate(src.location);
  if (!located) throw Error("point mass at " + to_string(src.location) + " lies outside the meshed domain");
  const std::size_t t = *located;
  const auto c = mesh.corners(t);
  const auto b = barycentric(src.location, c[0], c[1], c[2]);
  const double tol = 1e-12;
  for (int i = 0; i < 3; ++i)
    if (std::abs(b[i]) <= tol && mesh.is_boundary_edge(mesh.triangle_edges(t)[(i + 1) % 3]))
      throw Error("point mass at " + to_string(src.location) + " must lie strictly inside the domain");
  std::vector<double> load(dofs.num_dofs(), 0.0);
  const auto phi = shape_values(dofs.degree(), b);
  const auto d = dofs.triangle_dofs(t);
  for (int a = 0; a < dofs.dofs_per_triangle(); ++a) load[d[a]] += src.mass * phi[a];
  return load;
}

/// Parameter interval of a + s (b - a), s in [0, 1], inside the closed triangle.
bool clip_to_triangle(const Segment& seg, const std::array<Point2, 3>& c, double& s0, double& s1) {
  s0 = 0.0;
  s1 = 1.0;
  const Vec2 d = seg.b - seg.a;
  for (int e = 0; e < 3; ++e) {
    const Point2 p = c[e];
    const Point2 q = c[(e + 1) % 3];
    const double f0 = cross(q - p, seg.a - p);
    const double df = cross(q - p, d);
    if (df == 0.0) {
      if (f0 < 0.0) return false;
      continue;
    }
    const double s = -f0 / df;
    if (df > 0.0)
      s0 = std::max(s0, s);
    else
      s1 = std::min(s1, s);
    if (s0 > s1) return false;
  }
  return s1 > s0;
}

std::vector<double> line_measure_load(const DofMap& dofs, const LineMeasure& src, int segment_degree) {
  const Mesh& mesh = dofs.mesh();
  const Segment& seg = src.segment;
  if (!(seg.length() > 0.0)) throw Error("line measure segment is degenerate");
  if (!mesh.try_locate(seg.a) || !mesh.try_locate(seg.b))
    throw Error("line measure from " + to_string(seg.a) + " to " + to_string(seg.b) + " leaves the domain");

  const Point2 lo{std::min(seg.a.x, seg.b.x), std::min(seg.a.y, seg.b.y)};
  const Point2 hi{std::max(seg.a.x, seg.b.x), std::max(seg.a.y, seg.b.y)};
  std::vector<double> breaks{0.0, 1.0};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const double tx0 = std::min({c[0].x, c[1].x, c[2].x}), tx1 = std::max({c[0].x, c[1].x, c[2].x});
    const double ty0 = std::min({c[0].y, c[1].y, c[2].y}), ty1 = std::max({c[0].y, c[1].y, c[2].y});
    if (tx1 < lo.x || tx0 > hi.x || ty1 < lo.y || ty0 > hi.y) continue;
    double s0, s1;
    if (clip_to_triangle(seg, c, s0, s1)) {
      breaks.push_back(s0);
      breaks.push_back(s1);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> pieces;
  for (double s : breaks)
    if (pieces.empty() || s - pieces.back() > 1e-13) pieces.push_back(s);
  pieces.back() = 1.0;

  const auto rule = segment_rule(segment_degree);
  const double length = seg.length();
  std::vector<double> load(dofs.num_dofs(), 0.0);
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const double s0 = pieces[k], s1 = pieces[k + 1];
    const std::size_t t = mesh.locate(seg.at(0.5 * (s0 + s1)));
    const auto c = mesh.corners(t);
    const auto d = dofs.triangle_dofs(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = seg.at(s0 + (s1 - s0) * rule.nodes[q]);
      const double wq = rule.weights[q] * (s1 - s0) * length * src.density(x);
      const auto phi = shape_values(dofs.degree(), barycentric(x, c[0], c[1], c[2]));
      for (int a = 0; a < dofs.dofs_per_triangle(); ++a) load[d[a]] += wq * phi[a];
    }
  }
  return load;
}

}  // namespace

std::vector<double> assemble_gradient_load(const DofMap& dofs, const TriangleVectorField& grad_u,
                                           int triangle_degree) {
  const Mesh& mesh = dofs.mesh();
  const auto rule = triangle_rule(triangle_degree);
  return assemble_elementwise(dofs, [&](std::size_t t) {
    LocalVector v{};
    const auto c = mesh.corners(t);
    const double area = mesh.area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& b = rule.nodes[q];
      const Vec2 g = grad_u(t, b, physical(c, b));
      const auto grads = shape_gradients(mesh, t, dofs.degree(), b);
      for (int a = 0; a < dofs.dofs_per_triangle(); ++a) v[a] += rule.weights[q] * area * dot(g, grads[a]);
    }
    return v;
  });
}

std::vector<double> assemble_load(const DofMap& dofs, const SourceTerm& source, const AssemblyOptions& options) {
  if (const auto* pm = std::get_if<PointMass>(&source)) return point_mass_load(dofs, *pm);
  if (const auto* lm = std::get_if<LineMeasure>(&source)) return line_measure_load(dofs, *lm, options.segment_degree);
  if (const auto* df = std::get_if<DivField>(&source)) {
    auto load = assemble_gradient_load(dofs, df->field, options.triangle_degree);
    for (auto& v : load) v = -v;
    return load;
  }
  const auto& density = std::get<Density>(source);
  const Mesh& mesh = dofs.mesh();
  const auto rule = triangle_rule(options.triangle_degree);
  return assemble_elementwise(dofs, [&](std::size_t t) {
    LocalVector v{};
    const auto c = mesh.corners(t);
    const double area = mesh.area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& b = rule.nodes[q];
      const double f = density.f(physical(c, b));
      const auto phi = shape_values(dofs.degree(), b);
      for (int a = 0; a < dofs.dofs_per_triangle(); ++a) v[a] += rule.weights[q] * area * f * phi[a];
    }
    return v;
  });
}

namespace {

std::vector<double> restrict_to_free(const DofMap& dofs, const std::vector<double>& load) {
  std::vector<double> r(dofs.num_free());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = load[dofs.free_dofs()[k]];
  return r;
}

}  // namespace

std::vector<double> assemble_rhs(const DofMap& dofs, const SourceTerm& source, const AssemblyOptions& options) {
  return restrict_to_free(dofs, assemble_load(dofs, source, options));
}

FEFunction solve_cg(const SparseSystem& system, const std::vector<double>& free_rhs, const CgOptions& options) {
  const auto result = conjugate_gradient(system.reduced, free_rhs, options);
  std::vector<double> values(system.dofs->num_dofs(), 0.0);
  for (std::size_t k = 0; k < result.x.size(); ++k) values[system.dofs->free_dofs()[k]] = result.x[k];
  return FEFunction(system.dofs, std::move(values));
}

FEFunction solve_dirichlet(const SparseSystem& system, const std::vector<double>& load, const ScalarField& g,
                           const CgOptions& options) {
  const DofMap& dofs = *system.dofs;
  if (load.size() != dofs.num_dofs()) throw Error("load vector has wrong length");
  std::vector<double> lifted(dofs.num_dofs(), 0.0);
  for (std::size_t i = 0; i < dofs.num_dofs(); ++i)
    if (dofs.is_boundary(i)) lifted[i] = g(dofs.dof_point(i));
  std::vector<double> rhs(dofs.num_free());
  const CsrMatrix& k = system.full;
  for (std::size_t fi = 0; fi < rhs.size(); ++fi) {
    const auto i = static_cast<std::size_t>(dofs.free_dofs()[fi]);
    double acc = load[i];
    for (auto p = k.row_ptr[i]; p < k.row_ptr[i + 1]; ++p)
      if (dofs.is_boundary(k.cols[p])) acc -= k.vals[p] * lifted[k.cols[p]];
    rhs[fi] = acc;
  }
  const auto result = conjugate_gradient(system.reduced, rhs, options);
  for (std::size_t k2 = 0; k2 < result.x.size(); ++k2) lifted[dofs.free_dofs()[k2]] = result.x[k2];
  return FEFunction(system.dofs, std::move(lifted));
}

FEFunction solve_source(const SparseSystem& system, const SourceTerm& source, const CgOptions& options,
                        const AssemblyOptions& assembly) {
  return solve_cg(system, assemble_rhs(*system.dofs, source, assembly), options);
}

FEFunction galerkin_project(const SparseSystem& system, const TriangleVectorField& grad_u, int triangle_degree,
                            const CgOptions& options) {
  const auto load = assemble_gradient_load(*system.dofs, grad_u, triangle_degree);
  return solve_cg(system, restrict_to_free(*system.dofs, load), options);
}

Vec2 point_gradient(const FEFunction& u_h, Point2 z) { return u_h.gradient_at(z); }

TriangleVectorField gradient_field(const FEFunction& u) {
  return [u](std::size_t t, const std::array<double, 3>& b, Point2) { return u.gradient(t, b); };
}

}  // namespace spfem
