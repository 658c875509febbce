#include "spfem/config.hpp"

#include <cmath>
#include <cstdio>
#include <type_traits>
#include <fstream>
#include <sstream>

namespace spfem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || !std::isfinite(v)) throw Error("setting '" + key + "': not a number: '" + t + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0') throw Error("setting '" + key + "': not an integer: '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    if (!trim(item).empty()) parts.push_back(trim(item));
  return parts;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> v;
  for (const auto& item : split(text, ',')) v.push_back(parse_double(key, item));
  return v;
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ",";
    if constexpr (std::is_floating_point_v<T>)
      s += format(v[k]);
    else
      s += std::to_string(v[k]);
  }
  return s;
}

std::vector<double> numbers(const std::string& what, std::istringstream& in) {
  std::vector<double> v;
  std::string tok;
  while (in >> tok) v.push_back(parse_double(what, tok));
  return v;
}

}  // namespace

ConvexPolygon parse_domain(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  if (kind == "square") return ConvexPolygon::unit_square();
  if (kind == "pentagon") return ConvexPolygon::regular(5, 0.5, {0.5, 0.5});
  const auto v = numbers("domain", in);
  if (kind == "rectangle") {
    if (v.size() != 4) throw Error("domain 'rectangle' needs x0 y0 x1 y1");
    return ConvexPolygon::rectangle({v[0], v[1]}, {v[2], v[3]});
  }
  if (kind == "polygon") {
    if (v.size() < 6 || v.size() % 2 != 0) throw Error("domain 'polygon' needs at least three x y pairs");
    std::vector<Point2> pts;
    for (std::size_t k = 0; k < v.size(); k += 2) pts.push_back({v[k], v[k + 1]});
    return ConvexPolygon(std::move(pts));
  }
  throw Error("unknown domain '" + kind + "' (square, pentagon, rectangle, polygon)");
}

FeatureSet parse_features(const std::string& text) {
  std::vector<Point2> points;
  std::vector<Segment> segments;
  for (const auto& item : split(text, ';')) {
    std::istringstream in(item);
    std::string kind;
    in >> kind;
    const auto v = numbers("features", in);
    if (kind == "point" && v.size() == 2)
      points.push_back({v[0], v[1]});
    else if (kind == "segment" && v.size() == 4)
      segments.push_back({{v[0], v[1]}, {v[2], v[3]}});
    else
      throw Error("bad feature '" + item + "' (point x y | segment x1 y1 x2 y2)");
  }
  return FeatureSet(std::move(points), std::move(segments));
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "domain")
    c.domain = trim(value);
  else if (key == "features")
    c.features = trim(value);
  else if (key == "lambda" || key == "lambdas")
    c.lambdas = parse_list(key, value);
  else if (key == "p" || key == "ps")
    c.ps = parse_list(key, value);
  else if (key == "generations")
    c.generations = static_cast<int>(parse_int(key, value));
  else if (key == "coarse_h")
    c.coarse_h = parse_double(key, value);
  else if (key == "quad_levels")
    c.quad_levels = static_cast<int>(parse_int(key, value));
  else if (key == "quad_degree")
    c.quad_degree = static_cast<int>(parse_int(key, value));
  else if (key == "solver_tol")
    c.solver_tol = parse_double(key, value);
  else if (key == "seed")
    c.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "out")
    c.out = trim(value);
  else if (key == "workers") {
    const auto w = parse_int(key, value);
    if (w < 1) throw Error("workers must be >= 1");
    c.workers = static_cast<unsigned>(w);
  } else if (key == "ap_depth")
    c.ap_depth = static_cast<int>(parse_int(key, value));
  else if (key == "ap_samples")
    c.ap_samples = static_cast<int>(parse_int(key, value));
  else if (key == "ap_threshold")
    c.ap_threshold = parse_double(key, value);
  else if (key == "gammas")
    c.gammas = parse_list(key, value);
  else if (key == "loc_lambdas")
    c.loc_lambdas = parse_list(key, value);
  else if (key == "grid_resolutions") {
    c.grid_resolutions.clear();
    for (double v : parse_list(key, value)) c.grid_resolutions.push_back(static_cast<int>(v));
  } else if (key == "line_density")
    c.line_density = parse_double(key, value);
  else
    throw Error("unknown setting '" + key + "'");
}

void ExperimentConfig::validate() const {
  if (generations < 3) throw Error("generations must be >= 3 (trend columns need three entries)");
  if (generations > 8) throw Error("generations must be <= 8");
  if (!(coarse_h > 0.0)) throw Error("coarse_h must be positive");
  if (quad_levels < 1 || quad_levels > 12) throw Error("quad_levels must be in 1..12");
  if (quad_degree < 1 || quad_degree > 10) throw Error("quad_degree must be in 1..10");
  if (!(solver_tol > 0.0 && solver_tol < 1.0)) throw Error("solver_tol must be in (0, 1)");
  if (ap_depth < 3 || ap_depth > 13) throw Error("ap_depth must be in 3..13");
  if (!(ap_threshold > 1.0)) throw Error("ap_threshold must exceed 1");
  for (double p : ps)
    if (!(p > 1.0)) throw Error("every p must exceed 1");
  for (int n : grid_resolutions)
    if (n < 8) throw Error("grid resolutions must be >= 8");
  const auto poly = polygon();
  feature_set().require_within(poly);
}

ConvexPolygon ExperimentConfig::polygon() const { return parse_domain(domain); }
FeatureSet ExperimentConfig::feature_set() const { return parse_features(features); }

std::string ExperimentConfig::canonical() const {
  std::ostringstream s;
  s << "ap_depth=" << ap_depth << "\n"
    << "ap_samples=" << ap_samples << "\n"
    << "ap_threshold=" << format(ap_threshold) << "\n"
    << "coarse_h=" << format(coarse_h) << "\n"
    << "domain=" << domain << "\n"
    << "features=" << features << "\n"
    << "gammas=" << join(gammas) << "\n"
    << "generations=" << generations << "\n"
    << "grid_resolutions=" << join(grid_resolutions) << "\n"
    << "lambdas=" << join(lambdas) << "\n"
    << "line_density=" << format(line_density) << "\n"
    << "loc_lambdas=" << join(loc_lambdas) << "\n"
    << "ps=" << join(ps) << "\n"
    << "quad_degree=" << quad_degree << "\n"
    << "quad_levels=" << quad_levels << "\n"
    << "seed=" << seed << "\n"
    << "solver_tol=" << format(solver_tol) << "\n";
  return s.str();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

ExperimentConfig read_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';' || t[0] == '[') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(c, t.substr(0, eq), t.substr(eq + 1));
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return read_config(in);
}

}  // namespace spfem
