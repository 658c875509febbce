#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spfem/geometry.hpp"
#include "spfem/mesh.hpp"

namespace spfem {

/// Cell-centred samples of a scalar field on an nx x ny grid over a box.
class GridSampling {
 public:
  GridSampling(Box box, int nx, int ny, std::vector<double> values);

  /// Samples f at every cell centre.
  static GridSampling sample(Box box, int nx, int ny, const std::function<double(Point2)>& f);

  const Box& box() const { return box_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return box_.width() / nx_; }
  double dy() const { return box_.height() / ny_; }
  double cell_area() const { return dx() * dy(); }

  Point2 cell_center(int i, int j) const;
  double at(int i, int j) const { return values_[index(i, j)]; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  const std::vector<double>& values() const { return values_; }

 private:
  Box box_;
  int nx_;
  int ny_;
  std::vector<double> values_;
};

/// Side lengths (in cells) of the square family used by the discrete
/// maximal operators: 1, 2, 4, ... below min(nx, ny), plus min(nx, ny).
std::vector<int> maximal_square_sides(int nx, int ny);

/// Discrete Hardy-Littlewood maximal function: at each cell the largest
/// average of |f| over grid-aligned squares from the family above that
/// contain the cell, in every position.
///
/// Window sums are built by pairwise dyadic addition in a fixed order, so
/// the operator is exactly monotone, exactly equal to |f| on one-cell
/// squares, and exactly homogeneous under power-of-two scaling.
GridSampling hl_maximal(const GridSampling& f);

struct SharpMaximalField {
  GridSampling field;
  std::vector<std::uint8_t> outside;  // 1 where the cell centre is outside the polygon
};

/// Local sharp maximal function: at each cell inside the polygon, the
/// largest mean oscillation avg_Q |f - f_Q| over family squares that
/// contain the cell and lie inside the polygon. Cells outside get 0 and
/// are flagged.
SharpMaximalField sharp_maximal_local(const GridSampling& f, const ConvexPolygon& polygon);

}  // namespace spfem
