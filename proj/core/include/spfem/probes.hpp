#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spfem/fem.hpp"
#include "spfem/maximal.hpp"
#include "spfem/mesh.hpp"
#include "spfem/quadrature.hpp"
#include "spfem/weights.hpp"

namespace spfem {

/// Measured lower bound for a constant in an inequality.
///
/// `trend` holds one measured value per mesh generation or grid resolution;
/// `measured_constant` is the largest of them (all are maxima over the
/// evaluated samples).
struct ConstantReport {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  double measured_constant = 0.0;
  std::size_t sample_count = 0;
  std::string argmax;
  std::vector<double> trend;
  /// Samples excluded because both sides vanished or the bound side was 0.
  std::size_t excluded = 0;

  /// |t[n-1] - t[n-2]| / |t[n-1]|; 0 for a zero last entry with zero change.
  double last_change() const;
};

std::string to_json(const ConstantReport& report);

/// Relative change between the last two entries of a trend.
double last_relative_change(const std::vector<double>& trend);

struct GreenGradientReport {
  ConstantReport bound;
  /// max |G_h(y_i, y_j) - G_h(y_j, y_i)| / max |G_h(y_i, y_j)| over source
  /// pairs on every generation.
  double symmetry_error = 0.0;
};

/// max over (source y, observer x) of |grad_x G_h(x, y)| |x - y| per
/// generation. Every pair must be at least min_separation apart and
/// min_separation must be at least 4 h_max of the finest mesh.
GreenGradientReport verify_green_gradient_bound(const std::vector<MeshPtr>& family, const std::vector<Point2>& sources,
                                                const std::vector<Point2>& observers, double min_separation,
                                                const CgOptions& solver = {});

struct HolderReport {
  /// One report per gamma, in the order given.
  std::vector<ConstantReport> per_gamma;
  /// Largest gamma whose last-two-generation change is below `stable_tolerance`;
  /// negative if none.
  double largest_stable_gamma = -1.0;
};

/// Mixed second derivatives D_{x_i} D_{y_j} G_h from centred differences in
/// the source with step 2 h_max, compared through
/// |D^2 G_h(x, y) - D^2 G_h(xb, y)| / (|x - xb|^g (|x - y|^{-2-g} + |xb - y|^{-2-g}))
/// (Frobenius norm of the 2x2 difference).
HolderReport verify_green_holder_bound(const std::vector<MeshPtr>& family, const ConvexPolygon& polygon, Point2 source,
                                       const std::vector<std::pair<Point2, Point2>>& pairs,
                                       const std::vector<double>& gammas, double stable_tolerance = 0.25,
                                       const CgOptions& solver = {});

/// Default search grid: 10 equispaced values in [0.05, min_k sigma_k - 1 - 0.05].
std::vector<double> default_gamma_grid(const ConvexPolygon& polygon);

struct LocalizationReport {
  std::vector<ConstantReport> per_lambda;
  std::vector<double> stable_lambdas;
};

/// For u_h the Ritz projection of u on each mesh, the largest over z of
/// |grad u_h(z)|^2 / (first(z) + second(z)) with
///   first  = (h^-2 int_{T_z} |grad u|)^2,
///   second = int h^lam (|x - z|^2 + h^2)^{-(2 + lam)/2} |grad u|^2,
/// h = h_max. The second integral is graded toward z.
LocalizationReport verify_localization(const std::vector<MeshPtr>& family, const VectorField& grad_u,
                                       const std::vector<Point2>& z_points, const std::vector<double>& lambdas,
                                       double stable_tolerance = 0.20, int grading_levels = 6,
                                       const CgOptions& solver = {});

/// max over grid cells inside the polygon of M#(|grad u_h|) / (M |q|^s)^{1/s}
/// where u_h solves -Lap u = div q on `mesh`; one trend entry per resolution.
ConstantReport verify_sharp_maximal_lemma(const MeshPtr& mesh, const ConvexPolygon& polygon, const VectorField& q,
                                          double s, const std::vector<int>& resolutions,
                                          const CgOptions& solver = {});

/// ||f - f_Omega||_{L^p_w} / ||M#_Omega f||_{L^p_w} with grid Riemann sums
/// over cells whose centres lie in the polygon (f_Omega the plain mean over
/// the same cells); one trend entry per resolution.
ConstantReport verify_mean_oscillation_lemma(const std::function<double(Point2)>& f, const PowerWeight& weight,
                                             double p, const ConvexPolygon& polygon,
                                             const std::vector<int>& resolutions);

struct MaximalAlgebraReport {
  int grids = 0;
  std::size_t dominance_violations = 0;    // Mf < |f|
  std::size_t monotonicity_violations = 0;  // f <= g but Mf > Mg
  std::size_t homogeneity_violations = 0;   // M(cf) != |c| Mf
  std::size_t sharp_constant_violations = 0;  // M#(const) != 0
  bool passed() const {
    return dominance_violations == 0 && monotonicity_violations == 0 && homogeneity_violations == 0 &&
           sharp_constant_violations == 0;
  }
};

/// Exact checks of the discrete maximal operators on `count` random grids
/// drawn from `seed`. Homogeneity uses power-of-two factors of either sign,
/// for which the operator is exact in floating point.
MaximalAlgebraReport check_maximal_algebra(std::uint64_t seed, int count);

}  // namespace spfem
