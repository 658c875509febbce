#include "spfem/geometry.hpp"

#include <algorithm>
#include <cstdio>

namespace spfem {

double distance(Point2 p, const Segment& s) {
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, s.a);
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return distance(p, s.a + t * d);
}

namespace {

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = signed_area2(a, b, c);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point2 p, const Segment& s) {
  return std::min(s.a.x, s.b.x) <= p.x && p.x <= std::max(s.a.x, s.b.x) &&
         std::min(s.a.y, s.b.y) <= p.y && p.y <= std::max(s.a.y, s.b.y);
}

bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(t.a, s)) return true;
  if (o2 == 0 && on_segment(t.b, s)) return true;
  if (o3 == 0 && on_segment(s.a, t)) return true;
  if (o4 == 0 && on_segment(s.b, t)) return true;
  return false;
}

}  // namespace

double distance(const Segment& s, const Segment& t) {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({distance(s.a, t), distance(s.b, t), distance(t.a, s), distance(t.b, s)});
}

std::array<double, 3> barycentric(Point2 p, Point2 a, Point2 b, Point2 c) {
  const double area2 = signed_area2(a, b, c);
  const double l0 = signed_area2(p, b, c) / area2;
  const double l1 = signed_area2(a, p, c) / area2;
  return {l0, l1, 1.0 - l0 - l1};
}

double distance_to_triangle(Point2 p, Point2 a, Point2 b, Point2 c) {
  const auto l = barycentric(p, a, b, c);
  if (l[0] >= 0.0 && l[1] >= 0.0 && l[2] >= 0.0) return 0.0;
  return std::min({distance(p, Segment{a, b}), distance(p, Segment{b, c}), distance(p, Segment{c, a})});
}

double distance_to_triangle(const Segment& s, Point2 a, Point2 b, Point2 c) {
  if (distance_to_triangle(s.a, a, b, c) == 0.0 || distance_to_triangle(s.b, a, b, c) == 0.0) return 0.0;
  return std::min({distance(s, Segment{a, b}), distance(s, Segment{b, c}), distance(s, Segment{c, a})});
}

std::string to_string(Point2 p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", p.x, p.y);
  return buf;
}

}  // namespace spfem
