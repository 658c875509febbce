#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "spfem/fe_function.hpp"
#include "spfem/mesh.hpp"
#include "spfem/weights.hpp"

namespace spfem {

/// Triangle rule in barycentric coordinates; weights sum to 1 (multiply by
/// the triangle area).
struct QuadratureRule {
  std::vector<std::array<double, 3>> nodes;
  std::vector<double> weights;
  int exactness_degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Rule on [0, 1]; weights sum to 1.
struct SegmentRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int exactness_degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Fully symmetric rule with positive weights and interior nodes, exact for
/// polynomials of total degree `degree` (1..10).
QuadratureRule triangle_rule(int degree);

/// Gauss-Legendre rule on [0, 1] exact for degree `degree` (1..20).
SegmentRule segment_rule(int degree);

/// Base rule plus geometric subdivision toward a feature set: a (sub)triangle
/// whose distance to the set is below its diameter is red-refined, up to
/// `levels` times.
struct GradedScheme {
  QuadratureRule base_rule;
  int levels = 0;
  std::optional<FeatureSet> grading_target;

  static constexpr int kDefaultLevels = 6;
  static constexpr int kDefaultDegree = 4;

  /// Base rule only.
  static GradedScheme plain(int degree = kDefaultDegree);
  static GradedScheme graded(FeatureSet target, int levels = kDefaultLevels, int degree = kDefaultDegree);
};

/// Value with the scheme at `levels` and at `levels - 1` (equal when levels == 0).
struct GradedIntegral {
  double value = 0.0;
  double coarser = 0.0;
};

/// Integrand evaluated at (triangle index, barycentric point in it, physical point).
using TriangleIntegrand = std::function<double(std::size_t, const std::array<double, 3>&, Point2)>;

/// Integral over the mesh. Per-triangle contributions are summed in
/// triangle order with compensated summation, independent of worker count.
/// Throws if the integrand returns a non-finite value.
GradedIntegral integrate(const Mesh& mesh, const GradedScheme& scheme, const TriangleIntegrand& integrand);

/// A norm together with its grading diagnostic: the relative change
/// |v_L - v_{L-1}| / v_L between the last two grading levels.
struct NormValue {
  double value = 0.0;
  double diagnostic = 0.0;
};

/// (int |g|^p w)^{1/p} for an integrand g given per quadrature point.
NormValue weighted_lp_norm(const Mesh& mesh, const PowerWeight& weight, double p, const GradedScheme& scheme,
                           const TriangleIntegrand& abs_value);

/// ||grad u||_{L^p_w}.
NormValue weighted_seminorm(const FEFunction& u, const PowerWeight& weight, double p, const GradedScheme& scheme);
/// ||u||_{L^p_w}.
NormValue weighted_norm(const FEFunction& u, const PowerWeight& weight, double p, const GradedScheme& scheme);
/// ||q||_{L^p_w} for a vector field q given analytically.
NormValue weighted_field_norm(const Mesh& mesh, const std::function<Vec2(Point2)>& q, const PowerWeight& weight,
                              double p, const GradedScheme& scheme);

/// Neumaier compensated sum in the given order.
double compensated_sum(const std::vector<double>& terms);

}  // namespace spfem
