#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace spfem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

using Point2 = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

struct Segment {
  Point2 a;
  Point2 b;

  double length() const { return distance(a, b); }
  Point2 at(double t) const { return a + t * (b - a); }
};

/// Euclidean distance from p to the closed segment s.
double distance(Point2 p, const Segment& s);

/// Distance between two closed segments (0 if they intersect).
double distance(const Segment& s, const Segment& t);

/// Barycentric coordinates of p with respect to the triangle (a, b, c).
std::array<double, 3> barycentric(Point2 p, Point2 a, Point2 b, Point2 c);

/// Twice the signed area of (a, b, c); positive for counterclockwise order.
constexpr double signed_area2(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

/// Distance from p to the closed triangle (a, b, c).
double distance_to_triangle(Point2 p, Point2 a, Point2 b, Point2 c);

/// Distance from segment s to the closed triangle (a, b, c).
double distance_to_triangle(const Segment& s, Point2 a, Point2 b, Point2 c);

/// Axis-aligned box [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
  Point2 lo;
  Point2 hi;

  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  bool contains(Point2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
};

/// Square box of half-side `radius` around `center`.
inline Box square_box(Point2 center, double radius) {
  return {{center.x - radius, center.y - radius}, {center.x + radius, center.y + radius}};
}

std::string to_string(Point2 p);

}  // namespace spfem
