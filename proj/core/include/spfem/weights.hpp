#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spfem/geometry.hpp"
#include "spfem/maximal.hpp"
#include "spfem/mesh.hpp"

namespace spfem {

/// Finite union of points and segments. Regularity k is 0 for points only
/// and 1 as soon as a segment is present.
class FeatureSet {
 public:
  FeatureSet(std::vector<Point2> points, std::vector<Segment> segments);

  static FeatureSet point(Point2 p) { return FeatureSet({p}, {}); }
  static FeatureSet segment(Segment s) { return FeatureSet({}, {s}); }

  const std::vector<Point2>& points() const { return points_; }
  const std::vector<Segment>& segments() const { return segments_; }
  int regularity() const { return segments_.empty() ? 0 : 1; }

  /// Exact minimum over point distances and point-segment distances.
  double distance(Point2 x) const;
  /// Distance from the closed triangle (a, b, c) to the set.
  double distance_to_triangle(Point2 a, Point2 b, Point2 c) const;
  /// Throws unless every feature lies in the closed polygon.
  void require_within(const ConvexPolygon& polygon) const;

 private:
  std::vector<Point2> points_;
  std::vector<Segment> segments_;
};

/// Text format: one feature per line, `point x y` or `segment x1 y1 x2 y2`.
/// Blank lines and lines starting with '#' are ignored.
FeatureSet read_feature_set(std::istream& in);
void write_feature_set(std::ostream& out, const FeatureSet& features);

/// w(x) = dist(x, features)^lambda in the plane.
class PowerWeight {
 public:
  PowerWeight(double lambda, FeatureSet features);

  double lambda() const { return lambda_; }
  const FeatureSet& features() const { return features_; }
  static constexpr int dimension = 2;

  /// +inf on the set when lambda < 0, 0 there when lambda > 0, 1 when lambda == 0.
  double evaluate(Point2 x) const;
  double operator()(Point2 x) const { return evaluate(x); }
  /// dist^lambda for a precomputed distance.
  double from_distance(double d) const;

 private:
  double lambda_;
  FeatureSet features_;
};

/// w^{-1/(p-1)}: exponent -lambda / (p - 1) over the same set.
PowerWeight dual_weight(const PowerWeight& weight, double p);

/// Open interval (lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo < x && x < hi; }
  /// Distance from x to the interval (0 inside).
  double distance_outside(double x) const { return x <= lo ? lo - x : (x >= hi ? x - hi : 0.0); }
};

/// Exponents for which the distance power to a k-regular set in R^n is an
/// A_p weight: (-(n - k), (n - k)(p - 1)).
Interval ap_range(int n, int k, double p);

struct ApEstimate {
  double p = 2.0;
  int depth = 0;
  double value = 1.0;
  long long cube_count = 0;
  int samples_per_cube = 0;
};

std::string to_json(const ApEstimate& estimate);

/// Brute-force lower estimate of the A_p constant of `weight` over the
/// dyadic subcubes of `box`.
///
/// At sampling depth d the 4^d finest cubes are each sampled at the
/// midpoints of a sqrt(samples) x sqrt(samples) grid and every dyadic cube
/// of level <= d averages all finest samples it contains. The returned
/// value is the running maximum over sampling depths 0..depth, which makes
/// it nondecreasing in depth. Samples landing on the feature set move by
/// half a sample spacing in x.
ApEstimate estimate_ap_constant(const PowerWeight& weight, double p, const Box& box, int depth,
                                int samples_per_cube = 4);

/// Estimates for every depth 0..max_depth (entry d equals
/// estimate_ap_constant at depth d), computed in one sweep.
std::vector<ApEstimate> ap_constant_trend(const PowerWeight& weight, double p, const Box& box, int max_depth,
                                          int samples_per_cube = 4);

/// max over cells of (M w)(x) / w(x) with the discrete maximal operator.
double a1_constant_on_grid(const GridSampling& weight_samples);

}  // namespace spfem
