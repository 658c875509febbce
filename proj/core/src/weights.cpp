#include "spfem/weights.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "spfem/parallel.hpp"

namespace spfem {

FeatureSet::FeatureSet(std::vector<Point2> points, std::vector<Segment> segments)
    : points_(std::move(points)), segments_(std::move(segments)) {
  if (points_.empty() && segments_.empty()) throw Error("feature set is empty");
  for (const auto& s : segments_)
    if (!(s.length() > 0.0)) throw Error("feature set contains a degenerate segment at " + to_string(s.a));
}

double FeatureSet::distance(Point2 x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : points_) d = std::min(d, spfem::distance(x, p));
  for (const auto& s : segments_) d = std::min(d, spfem::distance(x, s));
  return d;
}

double FeatureSet::distance_to_triangle(Point2 a, Point2 b, Point2 c) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : points_) d = std::min(d, spfem::distance_to_triangle(p, a, b, c));
  for (const auto& s : segments_) d = std::min(d, spfem::distance_to_triangle(s, a, b, c));
  return d;
}

void FeatureSet::require_within(const ConvexPolygon& polygon) const {
  const double tol = 1e-12 * polygon.diameter();
  for (const auto& p : points_)
    if (!polygon.contains(p, tol)) throw Error("feature point " + to_string(p) + " lies outside the domain");
  for (const auto& s : segments_)
    if (!polygon.contains(s.a, tol) || !polygon.contains(s.b, tol))
      throw Error("feature segment from " + to_string(s.a) + " leaves the domain");
}

FeatureSet read_feature_set(std::istream& in) {
  std::vector<Point2> points;
  std::vector<Segment> segments;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind[0] == '#') continue;
    if (kind == "point") {
      Point2 p;
      if (!(ls >> p.x >> p.y)) throw Error("feature line " + std::to_string(lineno) + ": expected 'point x y'");
      points.push_back(p);
    } else if (kind == "segment") {
      Segment s;
      if (!(ls >> s.a.x >> s.a.y >> s.b.x >> s.b.y))
        throw Error("feature line " + std::to_string(lineno) + ": expected 'segment x1 y1 x2 y2'");
      segments.push_back(s);
    } else {
      throw Error("feature line " + std::to_string(lineno) + ": unknown feature '" + kind + "'");
    }
  }
  return FeatureSet(std::move(points), std::move(segments));
}

void write_feature_set(std::ostream& out, const FeatureSet& features) {
  const auto old = out.precision(17);
  for (const auto& p : features.points()) out << "point " << p.x << ' ' << p.y << '\n';
  for (const auto& s : features.segments())
    out << "segment " << s.a.x << ' ' << s.a.y << ' ' << s.b.x << ' ' << s.b.y << '\n';
  out.precision(old);
}

// ---------------------------------------------------------------------------

PowerWeight::PowerWeight(double lambda, FeatureSet features) : lambda_(lambda), features_(std::move(features)) {
  if (!std::isfinite(lambda)) throw Error("weight exponent must be finite");
}

double PowerWeight::from_distance(double d) const {
  if (lambda_ == 0.0) return 1.0;
  if (d == 0.0) return lambda_ < 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::pow(d, lambda_);
}

double PowerWeight::evaluate(Point2 x) const { return from_distance(features_.distance(x)); }

PowerWeight dual_weight(const PowerWeight& weight, double p) {
  if (!(p > 1.0)) throw Error("dual weight needs p > 1");
  const double exponent = weight.lambda() == 0.0 ? 0.0 : -weight.lambda() / (p - 1.0);
  return PowerWeight(exponent, weight.features());
}

Interval ap_range(int n, int k, double p) {
  if (!(p > 1.0)) throw Error("A_p range needs p > 1");
  if (k < 0 || k >= n) throw Error("A_p range needs 0 <= k < n");
  const double codim = n - k;
  return {-codim, codim * (p - 1.0)};
}

std::string to_json(const ApEstimate& e) {
  nlohmann::ordered_json j;
  j["p"] = e.p;
  j["depth"] = e.depth;
  j["value"] = e.value;
  j["cube_count"] = e.cube_count;
  j["samples_per_cube"] = e.samples_per_cube;
  return j.dump();
}

namespace {

/// Sup over the dyadic cubes of levels 0..depth of the A_p functional when
/// every cube is averaged from midpoint samples of the level-`depth` grid.
double ap_sup_at_sampling_depth(const PowerWeight& weight, double p, const Box& box, int depth, int m) {
  const int n = 1 << depth;
  const double cell_w = box.width() / n;
  const double cell_h = box.height() / n;
  const double sx = cell_w / m;
  const double sy = cell_h / m;
  const double lambda = weight.lambda();
  const double dual = lambda == 0.0 ? 0.0 : -lambda / (p - 1.0);
  const auto& features = weight.features();

  std::vector<double> sum_w(static_cast<std::size_t>(n) * n);
  std::vector<double> sum_d(sum_w.size());
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    for (int col = 0; col < n; ++col) {
      double acc_w = 0.0, acc_d = 0.0;
      for (int b = 0; b < m; ++b) {
        for (int a = 0; a < m; ++a) {
          Point2 x{box.lo.x + col * cell_w + (a + 0.5) * sx, box.lo.y + row * cell_h + (b + 0.5) * sy};
          double d = features.distance(x);
          if (d == 0.0) {
            x.x += 0.5 * sx;
            d = features.distance(x);
          }
          if (lambda == 0.0) {
            acc_w += 1.0;
            acc_d += 1.0;
          } else {
            const double logd = std::log(d);
            acc_w += std::exp(lambda * logd);
            acc_d += std::exp(dual * logd);
          }
        }
      }
      sum_w[row * n + col] = acc_w;
      sum_d[row * n + col] = acc_d;
    }
  });

  double best = 0.0;
  double count = static_cast<double>(m) * m;
  for (int size = n;; size /= 2) {
    for (std::size_t k = 0; k < sum_w.size(); ++k) {
      const double avg_w = sum_w[k] / count;
      const double avg_d = sum_d[k] / count;
      best = std::max(best, avg_w * std::pow(avg_d, p - 1.0));
    }
    if (size == 1) break;
    const int half = size / 2;
    std::vector<double> next_w(static_cast<std::size_t>(half) * half);
    std::vector<double> next_d(next_w.size());
    for (int r = 0; r < half; ++r)
      for (int c = 0; c < half; ++c) {
        auto at = [&](const std::vector<double>& v, int rr, int cc) { return v[static_cast<std::size_t>(rr) * size + cc]; };
        next_w[static_cast<std::size_t>(r) * half + c] = (at(sum_w, 2 * r, 2 * c) + at(sum_w, 2 * r, 2 * c + 1)) +
                                                         (at(sum_w, 2 * r + 1, 2 * c) + at(sum_w, 2 * r + 1, 2 * c + 1));
        next_d[static_cast<std::size_t>(r) * half + c] = (at(sum_d, 2 * r, 2 * c) + at(sum_d, 2 * r, 2 * c + 1)) +
                                                         (at(sum_d, 2 * r + 1, 2 * c) + at(sum_d, 2 * r + 1, 2 * c + 1));
      }
    sum_w = std::move(next_w);
    sum_d = std::move(next_d);
    count *= 4.0;
  }
  return best;
}

int samples_side(int samples_per_cube) {
  const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(samples_per_cube))));
  if (samples_per_cube < 4 || m * m != samples_per_cube)
    throw Error("samples_per_cube must be a perfect square >= 4");
  return m;
}

}  // namespace

std::vector<ApEstimate> ap_constant_trend(const PowerWeight& weight, double p, const Box& box, int max_depth,
                                          int samples_per_cube) {
  if (!(p > 1.0)) throw Error("A_p estimate needs p > 1");
  if (max_depth < 0 || max_depth > 13) throw Error("A_p estimate depth must be in 0..13");
  const int m = samples_side(samples_per_cube);
  std::vector<ApEstimate> trend;
  double running = 0.0;
  long long cubes = 0;
  for (int d = 0; d <= max_depth; ++d) {
    running = std::max(running, ap_sup_at_sampling_depth(weight, p, box, d, m));
    cubes += 1LL << (2 * d);
    trend.push_back({p, d, running, cubes, samples_per_cube});
  }
  return trend;
}

ApEstimate estimate_ap_constant(const PowerWeight& weight, double p, const Box& box, int depth,
                                int samples_per_cube) {
  return ap_constant_trend(weight, p, box, depth, samples_per_cube).back();
}

double a1_constant_on_grid(const GridSampling& weight_samples) {
  for (double v : weight_samples.values())
    if (!(v > 0.0)) throw Error("A_1 constant needs strictly positive weight samples");
  const GridSampling mw = hl_maximal(weight_samples);
  double best = 0.0;
  for (std::size_t k = 0; k < mw.values().size(); ++k)
    best = std::max(best, mw.values()[k] / weight_samples.values()[k]);
  return best;
}

}  // namespace spfem
