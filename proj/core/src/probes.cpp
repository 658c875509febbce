#include "spfem/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>

#include "spfem/parallel.hpp"

namespace spfem {

double last_relative_change(const std::vector<double>& trend) {
  if (trend.size() < 2) throw Error("a trend needs at least two entries");
  const double a = trend[trend.size() - 2];
  const double b = trend.back();
  if (b == a) return 0.0;
  return std::abs(b - a) / std::abs(b);
}

double ConstantReport::last_change() const { return last_relative_change(trend); }

std::string to_json(const ConstantReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["measured_constant"] = r.measured_constant;
  j["sample_count"] = r.sample_count;
  j["excluded"] = r.excluded;
  j["argmax"] = r.argmax;
  j["trend"] = r.trend;
  return j.dump();
}

namespace {

void require_family(const std::vector<MeshPtr>& family) {
  if (family.empty()) throw Error("probe needs at least one mesh");
  for (const auto& m : family)
    if (!m) throw Error("probe mesh family contains a null mesh");
}

double finest_h(const std::vector<MeshPtr>& family) {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& m : family) h = std::min(h, m->h_max());
  return h;
}

double coarsest_h(const std::vector<MeshPtr>& family) {
  double h = 0.0;
  for (const auto& m : family) h = std::max(h, m->h_max());
  return h;
}

std::string pair_text(Point2 x, Point2 y) { return "x=" + to_string(x) + " y=" + to_string(y); }

void finish(ConstantReport& r) {
  r.measured_constant = r.trend.empty() ? 0.0 : *std::max_element(r.trend.begin(), r.trend.end());
}

}  // namespace

GreenGradientReport verify_green_gradient_bound(const std::vector<MeshPtr>& family, const std::vector<Point2>& sources,
                                                const std::vector<Point2>& observers, double min_separation,
                                                const CgOptions& solver) {
  require_family(family);
  if (sources.empty() || observers.empty()) throw Error("Green gradient probe needs sources and observers");
  const double h = finest_h(family);
  if (min_separation < 4.0 * h)
    throw Error("minimum separation " + std::to_string(min_separation) + " is below 4 h_max = " +
                std::to_string(4.0 * h));
  for (const auto& y : sources)
    for (const auto& x : observers)
      if (distance(x, y) < min_separation)
        throw Error("source-observer pair " + pair_text(x, y) + " is closer than the minimum separation");

  GreenGradientReport out;
  ConstantReport& r = out.bound;
  r.name = "green_gradient";
  r.params = {{"min_separation", min_separation},
              {"sources", static_cast<double>(sources.size())},
              {"observers", static_cast<double>(observers.size())}};
  double best_overall = -1.0;
  for (const auto& mesh : family) {
    const auto system = assemble_stiffness(mesh, 1);
    std::vector<std::vector<double>> products(sources.size(), std::vector<double>(observers.size()));
    std::vector<std::vector<double>> at_sources(sources.size(), std::vector<double>(sources.size()));
    parallel_for(sources.size(), [&](std::size_t i) {
      const auto g = solve_source(system, PointMass{sources[i], 1.0}, solver);
      for (std::size_t k = 0; k < observers.size(); ++k)
        products[i][k] = norm(g.gradient_at(observers[k])) * distance(observers[k], sources[i]);
      for (std::size_t j = 0; j < sources.size(); ++j) at_sources[i][j] = g.value_at(sources[j]);
    });
    double best = 0.0;
    std::string arg;
    for (std::size_t i = 0; i < sources.size(); ++i)
      for (std::size_t k = 0; k < observers.size(); ++k)
        if (products[i][k] > best) {
          best = products[i][k];
          arg = pair_text(observers[k], sources[i]);
        }
    r.trend.push_back(best);
    r.sample_count += sources.size() * observers.size();
    if (best > best_overall) {
      best_overall = best;
      r.argmax = arg;
    }
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < sources.size(); ++i)
      for (std::size_t j = 0; j < sources.size(); ++j) {
        if (i == j) continue;
        scale = std::max(scale, std::abs(at_sources[i][j]));
        diff = std::max(diff, std::abs(at_sources[i][j] - at_sources[j][i]));
      }
    if (scale > 0.0) out.symmetry_error = std::max(out.symmetry_error, diff / scale);
  }
  finish(r);
  return out;
}

std::vector<double> default_gamma_grid(const ConvexPolygon& polygon) {
  const double hi = polygon.min_corner_exponent() - 1.0 - 0.05;
  const double lo = 0.05;
  if (!(hi > lo)) throw Error("corner exponents leave no admissible Hoelder exponent");
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back(lo + (hi - lo) * k / 9.0);
  return grid;
}

HolderReport verify_green_holder_bound(const std::vector<MeshPtr>& family, const ConvexPolygon& polygon, Point2 y,
                                       const std::vector<std::pair<Point2, Point2>>& pairs,
                                       const std::vector<double>& gammas, double stable_tolerance,
                                       const CgOptions& solver) {
  require_family(family);
  if (pairs.empty() || gammas.empty()) throw Error("Hoelder probe needs point pairs and exponents");
  const double sep = 4.0 * finest_h(family);
  const double gamma_max = polygon.min_corner_exponent() - 1.0;
  for (double g : gammas)
    if (!(g > 0.0 && g < gamma_max))
      throw Error("Hoelder exponent " + std::to_string(g) + " outside (0, " + std::to_string(gamma_max) + ")");
  auto check_point = [&](Point2 p) {
    for (const auto& c : polygon.vertices())
      if (distance(p, c) < sep) throw Error("point " + to_string(p) + " is within 4 h_max of a corner");
  };
  check_point(y);
  for (const auto& [x, xb] : pairs) {
    check_point(x);
    check_point(xb);
    if (distance(x, xb) < sep || distance(x, y) < sep || distance(xb, y) < sep)
      throw Error("points of pair " + pair_text(x, xb) + " are closer than 4 h_max to each other or the source");
  }
  if (polygon.signed_distance(y) <= 2.0 * coarsest_h(family))
    throw Error("shifted sources around " + to_string(y) + " leave the domain");

  HolderReport out;
  out.per_gamma.resize(gammas.size());
  std::vector<double> best_overall(gammas.size(), -1.0);
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    out.per_gamma[g].name = "green_holder";
    out.per_gamma[g].params = {{"gamma", gammas[g]}, {"pairs", static_cast<double>(pairs.size())}};
  }
  for (const auto& mesh : family) {
    const auto system = assemble_stiffness(mesh, 1);
    const double delta = 2.0 * mesh->h_max();
    const std::array<Point2, 4> shifted{y + Vec2{delta, 0.0}, y - Vec2{delta, 0.0}, y + Vec2{0.0, delta},
                                        y - Vec2{0.0, delta}};
    std::vector<FEFunction> solutions;
    solutions.reserve(4);
    for (int k = 0; k < 4; ++k) solutions.push_back(FEFunction(system.dofs));
    parallel_for(4, [&](std::size_t k) { solutions[k] = solve_source(system, PointMass{shifted[k], 1.0}, solver); });
    // D[i][j] = d_{x_i} d_{y_j} G
    auto mixed = [&](Point2 x) {
      const Vec2 dx_plus = solutions[0].gradient_at(x), dx_minus = solutions[1].gradient_at(x);
      const Vec2 dy_plus = solutions[2].gradient_at(x), dy_minus = solutions[3].gradient_at(x);
      const Vec2 col_x = (dx_plus - dx_minus) * (0.5 / delta);
      const Vec2 col_y = (dy_plus - dy_minus) * (0.5 / delta);
      return std::array<double, 4>{col_x.x, col_y.x, col_x.y, col_y.y};
    };
    std::vector<double> best(gammas.size(), 0.0);
    std::vector<std::string> arg(gammas.size());
    for (const auto& [x, xb] : pairs) {
      const auto a = mixed(x);
      const auto b = mixed(xb);
      double num = 0.0;
      for (int k = 0; k < 4; ++k) num += (a[k] - b[k]) * (a[k] - b[k]);
      num = std::sqrt(num);
      const double dxx = distance(x, xb), rx = distance(x, y), rb = distance(xb, y);
      for (std::size_t g = 0; g < gammas.size(); ++g) {
        const double gam = gammas[g];
        const double den = std::pow(dxx, gam) * (std::pow(rx, -2.0 - gam) + std::pow(rb, -2.0 - gam));
        const double ratio = num / den;
        if (ratio > best[g]) {
          best[g] = ratio;
          arg[g] = pair_text(x, xb);
        }
      }
    }
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      auto& r = out.per_gamma[g];
      r.trend.push_back(best[g]);
      r.sample_count += pairs.size();
      if (best[g] > best_overall[g]) {
        best_overall[g] = best[g];
        r.argmax = arg[g];
      }
    }
  }
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    auto& r = out.per_gamma[g];
    finish(r);
    if (r.trend.size() >= 2 && r.last_change() < stable_tolerance)
      out.largest_stable_gamma = std::max(out.largest_stable_gamma, gammas[g]);
  }
  return out;
}

LocalizationReport verify_localization(const std::vector<MeshPtr>& family, const VectorField& grad_u,
                                       const std::vector<Point2>& z_points, const std::vector<double>& lambdas,
                                       double stable_tolerance, int grading_levels, const CgOptions& solver) {
  require_family(family);
  if (z_points.empty() || lambdas.empty()) throw Error("localization probe needs points and decay exponents");
  for (double l : lambdas)
    if (!(l > 0.0)) throw Error("decay exponent must be positive");

  LocalizationReport out;
  out.per_lambda.resize(lambdas.size());
  std::vector<double> best_overall(lambdas.size(), -1.0);
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    out.per_lambda[l].name = "localization";
    out.per_lambda[l].params = {{"lambda", lambdas[l]}, {"points", static_cast<double>(z_points.size())}};
  }
  const auto local_rule = triangle_rule(6);
  for (const auto& mesh : family) {
    const auto system = assemble_stiffness(mesh, 1);
    const auto u_h = galerkin_project(system, pointwise(grad_u), 6, solver);
    const double h = mesh->h_max();
    std::vector<double> best(lambdas.size(), 0.0);
    std::vector<std::string> arg(lambdas.size());
    std::vector<std::size_t> excluded(lambdas.size(), 0);
    for (const auto& z : z_points) {
      const auto located = mesh->try_locate(z);
      if (!located) throw Error("localization point " + to_string(z) + " lies outside the domain");
      const std::size_t tz = *located;
      {
        const auto c = mesh->corners(tz);
        const auto bz = barycentric(z, c[0], c[1], c[2]);
        for (int i = 0; i < 3; ++i)
          if (std::abs(bz[i]) <= 1e-12 && mesh->is_boundary_edge(mesh->triangle_edges(tz)[(i + 1) % 3]))
            throw Error("localization point " + to_string(z) + " lies on the boundary");
      }
      const double lhs = std::pow(norm(u_h.gradient(tz, {1.0 / 3, 1.0 / 3, 1.0 / 3})), 2);
      const auto c = mesh->corners(tz);
      double local = 0.0;
      for (std::size_t q = 0; q < local_rule.size(); ++q) {
        const auto& b = local_rule.nodes[q];
        local += local_rule.weights[q] * norm(grad_u(b[0] * c[0] + b[1] * c[1] + b[2] * c[2]));
      }
      local *= mesh->area(tz);
      const double first = std::pow(local / (h * h), 2);
      const auto scheme = GradedScheme::graded(FeatureSet::point(z), grading_levels);
      for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const double lam = lambdas[l];
        const auto second = integrate(*mesh, scheme, [&](std::size_t, const std::array<double, 3>&, Point2 x) {
          const Vec2 g = grad_u(x);
          const double r2 = dot(x - z, x - z) + h * h;
          return std::pow(h, lam) * std::pow(r2, -0.5 * (2.0 + lam)) * dot(g, g);
        });
        const double rhs = first + second.value;
        if (rhs == 0.0) {
          ++excluded[l];
          continue;
        }
        const double ratio = lhs / rhs;
        if (ratio > best[l]) {
          best[l] = ratio;
          arg[l] = "z=" + to_string(z);
        }
      }
    }
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      auto& r = out.per_lambda[l];
      r.trend.push_back(best[l]);
      r.sample_count += z_points.size();
      r.excluded += excluded[l];
      if (best[l] > best_overall[l]) {
        best_overall[l] = best[l];
        r.argmax = arg[l];
      }
    }
  }
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    auto& r = out.per_lambda[l];
    finish(r);
    if (r.trend.size() >= 2 && r.last_change() < stable_tolerance) out.stable_lambdas.push_back(lambdas[l]);
  }
  return out;
}

ConstantReport verify_sharp_maximal_lemma(const MeshPtr& mesh, const ConvexPolygon& polygon, const VectorField& q,
                                          double s, const std::vector<int>& resolutions, const CgOptions& solver) {
  if (!mesh) throw Error("sharp maximal probe needs a mesh");
  if (!(s > 1.0)) throw Error("sharp maximal probe needs s > 1");
  if (resolutions.empty()) throw Error("sharp maximal probe needs at least one resolution");
  const auto system = assemble_stiffness(mesh, 1);
  const auto u_h = solve_source(system, DivField::analytic(q), solver);
  const Box box = polygon.bounding_box();

  ConstantReport r;
  r.name = "sharp_maximal";
  r.params = {{"s", s}};
  double best_overall = -1.0;
  for (int n : resolutions) {
    const double tol = 1e-12 * polygon.diameter();
    auto grad_norm = GridSampling::sample(box, n, n, [&](Point2 x) {
      const auto t = mesh->try_locate(x);
      return t && polygon.contains(x, tol) ? norm(u_h.gradient(*t, {1.0 / 3, 1.0 / 3, 1.0 / 3})) : 0.0;
    });
    auto q_power = GridSampling::sample(box, n, n, [&](Point2 x) {
      return polygon.contains(x, tol) ? std::pow(norm(q(x)), s) : 0.0;
    });
    const auto sharp = sharp_maximal_local(grad_norm, polygon);
    const auto maximal = hl_maximal(q_power);
    double best = 0.0;
    std::string arg;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t k = grad_norm.index(i, j);
        if (sharp.outside[k]) continue;
        const double num = sharp.field.values()[k];
        const double den = std::pow(maximal.values()[k], 1.0 / s);
        ++r.sample_count;
        if (den == 0.0) {
          if (num != 0.0) ++r.excluded;
          continue;
        }
        if (num / den > best) {
          best = num / den;
          arg = "x=" + to_string(grad_norm.cell_center(i, j));
        }
      }
    r.trend.push_back(best);
    if (best > best_overall) {
      best_overall = best;
      r.argmax = arg;
    }
  }
  finish(r);
  return r;
}

ConstantReport verify_mean_oscillation_lemma(const std::function<double(Point2)>& f, const PowerWeight& weight,
                                             double p, const ConvexPolygon& polygon,
                                             const std::vector<int>& resolutions) {
  if (!(p >= 1.0)) throw Error("mean oscillation probe needs p >= 1");
  if (resolutions.empty()) throw Error("mean oscillation probe needs at least one resolution");
  const Box box = polygon.bounding_box();
  ConstantReport r;
  r.name = "mean_oscillation";
  r.params = {{"lambda", weight.lambda()}, {"p", p}};
  for (int n : resolutions) {
    const auto samples = GridSampling::sample(box, n, n, f);
    const auto sharp = sharp_maximal_local(samples, polygon);
    double mean = 0.0;
    std::size_t inside = 0;
    for (std::size_t k = 0; k < samples.values().size(); ++k)
      if (!sharp.outside[k]) {
        mean += samples.values()[k];
        ++inside;
      }
    if (inside == 0) throw Error("no grid cell centre lies in the polygon");
    mean /= static_cast<double>(inside);
    double lhs = 0.0, rhs = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t k = samples.index(i, j);
        if (sharp.outside[k]) continue;
        const double w = weight.evaluate(samples.cell_center(i, j));
        lhs += std::pow(std::abs(samples.values()[k] - mean), p) * w;
        rhs += std::pow(sharp.field.values()[k], p) * w;
      }
    r.sample_count += inside;
    double ratio = 0.0;
    if (rhs > 0.0)
      ratio = std::pow(lhs / rhs, 1.0 / p);
    else if (lhs > 0.0)
      ++r.excluded;
    r.trend.push_back(ratio);
  }
  finish(r);
  r.argmax = "n=" + std::to_string(resolutions[std::max_element(r.trend.begin(), r.trend.end()) - r.trend.begin()]);
  return r;
}

MaximalAlgebraReport check_maximal_algebra(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(8, 24);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  std::uniform_int_distribution<int> exponent(-3, 3);
  const auto polygon = ConvexPolygon::unit_square();
  MaximalAlgebraReport out;
  for (int g = 0; g < count; ++g) {
    const int nx = size(rng), ny = size(rng);
    const Box box{{0.0, 0.0}, {1.0, 1.0}};
    std::vector<double> f(static_cast<std::size_t>(nx) * ny), larger(f.size()), scaled(f.size());
    for (auto& v : f) v = value(rng);
    for (std::size_t k = 0; k < f.size(); ++k) larger[k] = std::copysign(std::abs(f[k]) + bump(rng), value(rng));
    const double c = std::ldexp(value(rng) < 0.0 ? -1.0 : 1.0, exponent(rng));
    for (std::size_t k = 0; k < f.size(); ++k) scaled[k] = c * f[k];

    const GridSampling gf(box, nx, ny, f), gl(box, nx, ny, larger), gs(box, nx, ny, scaled);
    const auto mf = hl_maximal(gf), ml = hl_maximal(gl), ms = hl_maximal(gs);
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (mf.values()[k] < std::abs(f[k])) ++out.dominance_violations;
      if (mf.values()[k] > ml.values()[k]) ++out.monotonicity_violations;
      if (ms.values()[k] != std::abs(c) * mf.values()[k]) ++out.homogeneity_violations;
    }
    const GridSampling constant(box, nx, ny, std::vector<double>(f.size(), value(rng)));
    const auto sharp = sharp_maximal_local(constant, polygon);
    for (double v : sharp.field.values())
      if (v != 0.0) ++out.sharp_constant_violations;
    ++out.grids;
  }
  return out;
}

}  // namespace spfem
