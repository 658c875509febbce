#include "spfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spfem/parallel.hpp"

namespace spfem {

namespace {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      const double pn = n == 1 ? z : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (z * pn - pnm1) / (z * z - 1.0);
      const double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 1 ? z : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (z * pn - pnm1) / (z * z - 1.0);
    }
    x[i] = -z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

QuadratureRule orbit_rule(int degree, std::initializer_list<std::pair<std::array<double, 3>, double>> generators) {
  QuadratureRule rule;
  rule.exactness_degree = degree;
  for (const auto& [b, w] : generators) {
    std::vector<std::array<double, 3>> orbit;
    std::array<int, 3> perm{0, 1, 2};
    do {
      std::array<double, 3> node{b[perm[0]], b[perm[1]], b[perm[2]]};
      const bool seen = std::any_of(orbit.begin(), orbit.end(), [&](const auto& o) {
        return std::abs(o[0] - node[0]) + std::abs(o[1] - node[1]) + std::abs(o[2] - node[2]) < 1e-14;
      });
      if (!seen) orbit.push_back(node);
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (const auto& node : orbit) {
      rule.nodes.push_back(node);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

/// Collapsed Gauss product rule, symmetrised over the six vertex permutations.
QuadratureRule symmetrised_product_rule(int degree) {
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre((degree + 3) / 2, xu, wu);
  gauss_legendre((degree + 2) / 2, xv, wv);
  QuadratureRule rule;
  rule.exactness_degree = degree;
  for (std::size_t a = 0; a < xu.size(); ++a) {
    const double u = 0.5 * (xu[a] + 1.0);
    for (std::size_t b = 0; b < xv.size(); ++b) {
      const double v = 0.5 * (xv[b] + 1.0);
      const double x = u;
      const double y = v * (1.0 - u);
      // reference area 1/2, Jacobian (1 - u), two factors 1/2 from [-1,1] -> [0,1]
      const double w = 2.0 * 0.25 * wu[a] * wv[b] * (1.0 - u);
      const std::array<double, 3> base{1.0 - x - y, x, y};
      std::array<int, 3> perm{0, 1, 2};
      do {
        std::array<double, 3> node{base[perm[0]], base[perm[1]], base[perm[2]]};
        auto it = std::find_if(rule.nodes.begin(), rule.nodes.end(), [&](const auto& o) {
          return std::abs(o[0] - node[0]) + std::abs(o[1] - node[1]) + std::abs(o[2] - node[2]) < 1e-14;
        });
        if (it == rule.nodes.end()) {
          rule.nodes.push_back(node);
          rule.weights.push_back(w / 6.0);
        } else {
          rule.weights[it - rule.nodes.begin()] += w / 6.0;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  return rule;
}

}  // namespace

QuadratureRule triangle_rule(int degree) {
  switch (degree) {
    case 1:
      return orbit_rule(1, {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 1.0}});
    case 2:
      return orbit_rule(2, {{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0}});
    case 4:
      // Dunavant, 6 points
      return orbit_rule(4, {{{0.108103018168070, 0.445948490915965, 0.445948490915965}, 0.223381589678011},
                            {{0.816847572980459, 0.091576213509771, 0.091576213509771}, 0.109951743655322}});
    case 5:
      // Dunavant, 7 points
      return orbit_rule(5, {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.225},
                            {{0.059715871789770, 0.470142064105115, 0.470142064105115}, 0.132394152788506},
                            {{0.797426985353087, 0.101286507323456, 0.101286507323456}, 0.125939180544827}});
    case 3:
    case 6:
    case 7:
    case 8:
    case 9:
    case 10:
      return symmetrised_product_rule(degree);
    default:
      throw Error("triangle rule degree must be in 1..10, got " + std::to_string(degree));
  }
}

SegmentRule segment_rule(int degree) {
  if (degree < 1 || degree > 20) throw Error("segment rule degree must be in 1..20, got " + std::to_string(degree));
  std::vector<double> x, w;
  gauss_legendre((degree + 2) / 2, x, w);
  SegmentRule rule;
  rule.exactness_degree = degree;
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.nodes.push_back(0.5 * (x[i] + 1.0));
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

GradedScheme GradedScheme::plain(int degree) { return {triangle_rule(degree), 0, std::nullopt}; }

GradedScheme GradedScheme::graded(FeatureSet target, int levels, int degree) {
  if (levels < 0) throw Error("grading levels must be >= 0");
  return {triangle_rule(degree), levels, std::move(target)};
}

double compensated_sum(const std::vector<double>& terms) {
  double sum = 0.0, c = 0.0;
  for (double t : terms) {
    const double s = sum + t;
    if (std::abs(sum) >= std::abs(t))
      c += (sum - s) + t;
    else
      c += (t - s) + sum;
    sum = s;
  }
  return sum + c;
}

namespace {

using Bary = std::array<double, 3>;

struct SubTriangle {
  std::array<Bary, 3> corners;  // barycentric in the parent
};

Bary midpoint(const Bary& a, const Bary& b) { return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])}; }

class GradedIntegrator {
 public:
  GradedIntegrator(const Mesh& mesh, const GradedScheme& scheme, const TriangleIntegrand& f)
      : mesh_(mesh), scheme_(scheme), f_(f) {}

  /// (value with `remaining` levels, value with `remaining - 1` levels).
  std::pair<double, double> run(std::size_t t) {
    const SubTriangle root{{Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}}};
    const double area = mesh_.area(t);
    const int levels = scheme_.grading_target ? scheme_.levels : 0;
    if (levels == 0) {
      const double v = base(t, root, area);
      return {v, v};
    }
    return pair(t, root, area, levels);
  }

 private:
  Point2 physical(std::size_t t, const Bary& b) const {
    const auto c = mesh_.corners(t);
    return b[0] * c[0] + b[1] * c[1] + b[2] * c[2];
  }

  bool near(std::size_t t, const SubTriangle& s) const {
    const Point2 a = physical(t, s.corners[0]);
    const Point2 b = physical(t, s.corners[1]);
    const Point2 c = physical(t, s.corners[2]);
    const double diam = std::max({distance(a, b), distance(b, c), distance(c, a)});
    return scheme_.grading_target->distance_to_triangle(a, b, c) < diam;
  }

  double base(std::size_t t, const SubTriangle& s, double area) const {
    double acc = 0.0;
    const auto& rule = scheme_.base_rule;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& n = rule.nodes[q];
      Bary b{};
      for (int k = 0; k < 3; ++k) b[k] = n[0] * s.corners[0][k] + n[1] * s.corners[1][k] + n[2] * s.corners[2][k];
      const double v = f_(t, b, physical(t, b));
      if (!std::isfinite(v))
        throw Error("non-finite integrand at " + to_string(physical(t, b)) + " in triangle " + std::to_string(t));
      acc += rule.weights[q] * v;
    }
    return acc * area;
  }

  std::array<SubTriangle, 4> children(const SubTriangle& s) const {
    const auto& c = s.corners;
    const Bary m01 = midpoint(c[0], c[1]), m12 = midpoint(c[1], c[2]), m20 = midpoint(c[2], c[0]);
    return {SubTriangle{{c[0], m01, m20}}, SubTriangle{{m01, c[1], m12}}, SubTriangle{{m20, m12, c[2]}},
            SubTriangle{{m01, m12, m20}}};
  }

  double single(std::size_t t, const SubTriangle& s, double area, int remaining) const {
    if (remaining == 0 || !near(t, s)) return base(t, s, area);
    double acc = 0.0;
    for (const auto& c : children(s)) acc += single(t, c, 0.25 * area, remaining - 1);
    return acc;
  }

  std::pair<double, double> pair(std::size_t t, const SubTriangle& s, double area, int remaining) const {
    if (!near(t, s)) {
      const double v = base(t, s, area);
      return {v, v};
    }
    if (remaining == 1) {
      double fine = 0.0;
      for (const auto& c : children(s)) fine += base(t, c, 0.25 * area);
      return {fine, base(t, s, area)};
    }
    double fine = 0.0, coarse = 0.0;
    for (const auto& c : children(s)) {
      const auto [a, b] = pair(t, c, 0.25 * area, remaining - 1);
      fine += a;
      coarse += b;
    }
    return {fine, coarse};
  }

  const Mesh& mesh_;
  const GradedScheme& scheme_;
  const TriangleIntegrand& f_;
};

}  // namespace

GradedIntegral integrate(const Mesh& mesh, const GradedScheme& scheme, const TriangleIntegrand& integrand) {
  std::vector<double> fine(mesh.num_triangles());
  std::vector<double> coarse(mesh.num_triangles());
  GradedIntegrator integrator(mesh, scheme, integrand);
  parallel_for(mesh.num_triangles(), [&](std::size_t t) {
    const auto [a, b] = integrator.run(t);
    fine[t] = a;
    coarse[t] = b;
  });
  return {compensated_sum(fine), compensated_sum(coarse)};
}

NormValue weighted_lp_norm(const Mesh& mesh, const PowerWeight& weight, double p, const GradedScheme& scheme,
                           const TriangleIntegrand& abs_value) {
  if (!(p >= 1.0)) throw Error("weighted norm needs p >= 1");
  const auto integral = integrate(mesh, scheme, [&](std::size_t t, const std::array<double, 3>& b, Point2 x) {
    const double g = std::abs(abs_value(t, b, x));
    if (g == 0.0) return 0.0;
    const double w = weight.evaluate(x);
    return (p == 2.0 ? g * g : std::pow(g, p)) * w;
  });
  const double value = std::pow(integral.value, 1.0 / p);
  const double coarser = std::pow(integral.coarser, 1.0 / p);
  const double diag = value > 0.0 ? std::abs(value - coarser) / value : 0.0;
  return {value, diag};
}

NormValue weighted_seminorm(const FEFunction& u, const PowerWeight& weight, double p, const GradedScheme& scheme) {
  return weighted_lp_norm(u.mesh(), weight, p, scheme,
                          [&](std::size_t t, const std::array<double, 3>& b, Point2) { return norm(u.gradient(t, b)); });
}

NormValue weighted_norm(const FEFunction& u, const PowerWeight& weight, double p, const GradedScheme& scheme) {
  return weighted_lp_norm(u.mesh(), weight, p, scheme,
                          [&](std::size_t t, const std::array<double, 3>& b, Point2) { return u.value(t, b); });
}

NormValue weighted_field_norm(const Mesh& mesh, const std::function<Vec2(Point2)>& q, const PowerWeight& weight,
                              double p, const GradedScheme& scheme) {
  return weighted_lp_norm(mesh, weight, p, scheme,
                          [&](std::size_t, const std::array<double, 3>&, Point2 x) { return norm(q(x)); });
}

}  // namespace spfem
