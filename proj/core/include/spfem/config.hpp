#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spfem/mesh.hpp"
#include "spfem/weights.hpp"

namespace spfem {

/// Settings shared by every experiment.
///
/// Text form is INI style: `key = value` lines, `#` or `;` comments,
/// `[section]` headers allowed for grouping (ignored). List values are
/// comma separated. Empty lists select per-experiment defaults.
struct ExperimentConfig {
  /// `square`, `pentagon`, `rectangle x0 y0 x1 y1` or `polygon x1 y1 x2 y2 ...`.
  std::string domain = "square";
  /// `point x y` and `segment x1 y1 x2 y2` items separated by `;`.
  std::string features = "point 0.5 0.5";
  std::vector<double> lambdas;
  std::vector<double> ps;
  int generations = 3;
  /// Target h_max of the coarsest mesh.
  double coarse_h = 0.088388347648318434;  // sqrt(2) / 16: 16 x 16 cells on the unit square
  int quad_levels = 6;
  int quad_degree = 4;
  double solver_tol = 1e-10;
  std::uint64_t seed = 1;
  std::string out = "out";
  unsigned workers = 1;

  int ap_depth = 10;
  int ap_samples = 4;
  /// Estimate growth over the last three depths that counts as diverging.
  double ap_threshold = 1.5;
  std::vector<double> gammas;
  std::vector<double> loc_lambdas;
  std::vector<int> grid_resolutions;
  double line_density = 1.0;

  /// Throws on values that no experiment accepts (generations < 3, ...).
  void validate() const;

  ConvexPolygon polygon() const;
  FeatureSet feature_set() const;

  /// Canonical `key=value` text of every field except `out` and `workers`.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

/// Applies one `key = value` setting; throws on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

ExperimentConfig read_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

ConvexPolygon parse_domain(const std::string& text);
FeatureSet parse_features(const std::string& text);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace spfem
