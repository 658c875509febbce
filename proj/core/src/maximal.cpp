#include "spfem/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "spfem/parallel.hpp"

namespace spfem {

GridSampling::GridSampling(Box box, int nx, int ny, std::vector<double> values)
    : box_(box), nx_(nx), ny_(ny), values_(std::move(values)) {
  if (nx < 8 || ny < 8) throw Error("grid sampling needs at least 8 cells per axis");
  if (!(box.width() > 0.0 && box.height() > 0.0)) throw Error("grid sampling box is empty");
  if (values_.size() != static_cast<std::size_t>(nx) * ny) throw Error("grid sampling value count mismatch");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error("grid sampling values must be finite");
}

GridSampling GridSampling::sample(Box box, int nx, int ny, const std::function<double(Point2)>& f) {
  std::vector<double> v(static_cast<std::size_t>(std::max(nx, 0)) * std::max(ny, 0));
  const double dx = box.width() / nx;
  const double dy = box.height() / ny;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      v[static_cast<std::size_t>(j) * nx + i] = f({box.lo.x + (i + 0.5) * dx, box.lo.y + (j + 0.5) * dy});
  return GridSampling(box, nx, ny, std::move(v));
}

Point2 GridSampling::cell_center(int i, int j) const {
  return {box_.lo.x + (i + 0.5) * dx(), box_.lo.y + (j + 0.5) * dy()};
}

std::vector<int> maximal_square_sides(int nx, int ny) {
  const int top = std::min(nx, ny);
  std::vector<int> sides;
  for (int s = 1; s < top; s *= 2) sides.push_back(s);
  sides.push_back(top);
  return sides;
}

namespace {

/// out[i] = max of in[a] over a in [max(0, i - s + 1), min(i, in.size() - 1)].
void sliding_max(const double* in, std::size_t in_stride, int positions, int n, int s, double* out,
                 std::size_t out_stride) {
  std::deque<int> window;
  for (int i = 0; i < n; ++i) {
    if (i < positions) {
      while (!window.empty() && in[window.back() * in_stride] <= in[i * in_stride]) window.pop_back();
      window.push_back(i);
    }
    while (window.front() < i - s + 1) window.pop_front();
    out[i * out_stride] = in[window.front() * in_stride];
  }
}

/// For every cell, the max of `window_value` over windows of side s containing it.
/// window_value has (nx - s + 1) x (ny - s + 1) entries, row-major.
void max_over_containing_windows(const std::vector<double>& window_value, int nx, int ny, int s,
                                 std::vector<double>& result) {
  const int px = nx - s + 1;
  const int py = ny - s + 1;
  std::vector<double> rows(static_cast<std::size_t>(nx) * py);
  parallel_for(static_cast<std::size_t>(py), [&](std::size_t b) {
    sliding_max(&window_value[b * px], 1, px, nx, s, &rows[b * nx], 1);
  });
  std::vector<double> cols(static_cast<std::size_t>(nx) * ny);
  parallel_for(static_cast<std::size_t>(nx), [&](std::size_t i) {
    sliding_max(&rows[i], static_cast<std::size_t>(nx), py, ny, s, &cols[i], static_cast<std::size_t>(nx));
  });
  for (std::size_t k = 0; k < result.size(); ++k) result[k] = std::max(result[k], cols[k]);
}

}  // namespace

GridSampling hl_maximal(const GridSampling& f) {
  const int nx = f.nx();
  const int ny = f.ny();
  std::vector<double> result(f.values().size(), 0.0);
  // level[b * (nx - s + 1) + a] = sum of |f| over the s x s window with corner (a, b)
  std::vector<double> level(f.values().size());
  for (std::size_t k = 0; k < level.size(); ++k) level[k] = std::abs(f.values()[k]);
  int s = 1;
  for (int side : maximal_square_sides(nx, ny)) {
    std::vector<double> sums;
    if (side == 2 * s || side == s) {
      if (side == 2 * s) {
        const int px_old = nx - s + 1;
        const int px = nx - side + 1;
        const int py = ny - side + 1;
        sums.resize(static_cast<std::size_t>(px) * py);
        parallel_for(static_cast<std::size_t>(py), [&](std::size_t b) {
          for (int a = 0; a < px; ++a) {
            auto at = [&](int x, int y) { return level[static_cast<std::size_t>(y) * px_old + x]; };
            const int bb = static_cast<int>(b);
            sums[b * px + a] = (at(a, bb) + at(a + s, bb)) + (at(a, bb + s) + at(a + s, bb + s));
          }
        });
        level = sums;
        s = side;
      } else {
        sums = level;
      }
    } else {
      // non-dyadic top side: direct summation in row-major order
      const int px = nx - side + 1;
      const int py = ny - side + 1;
      sums.assign(static_cast<std::size_t>(px) * py, 0.0);
      for (int b = 0; b < py; ++b)
        for (int a = 0; a < px; ++a) {
          double acc = 0.0;
          for (int y = b; y < b + side; ++y)
            for (int x = a; x < a + side; ++x) acc += std::abs(f.at(x, y));
          sums[static_cast<std::size_t>(b) * px + a] = acc;
        }
    }
    const double count = static_cast<double>(side) * side;
    for (double& v : sums) v /= count;
    max_over_containing_windows(sums, nx, ny, side, result);
  }
  return GridSampling(f.box(), nx, ny, std::move(result));
}

SharpMaximalField sharp_maximal_local(const GridSampling& f, const ConvexPolygon& polygon) {
  const int nx = f.nx();
  const int ny = f.ny();
  const double tol = 1e-12 * polygon.diameter();
  std::vector<double> result(f.values().size(), 0.0);
  std::vector<std::uint8_t> outside(f.values().size(), 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) outside[f.index(i, j)] = !polygon.contains(f.cell_center(i, j), tol);

  const double x0 = f.box().lo.x, y0 = f.box().lo.y, dx = f.dx(), dy = f.dy();
  auto inside = [&](int a, int b, int side) {
    const double xl = x0 + a * dx, xh = x0 + (a + side) * dx;
    const double yl = y0 + b * dy, yh = y0 + (b + side) * dy;
    return polygon.contains({xl, yl}, tol) && polygon.contains({xh, yl}, tol) && polygon.contains({xh, yh}, tol) &&
           polygon.contains({xl, yh}, tol);
  };
  for (int side : maximal_square_sides(nx, ny)) {
    const int px = nx - side + 1;
    const int py = ny - side + 1;
    std::vector<double> osc(static_cast<std::size_t>(px) * py, 0.0);
    const double count = static_cast<double>(side) * side;
    parallel_for(static_cast<std::size_t>(py), [&](std::size_t bs) {
      const int b = static_cast<int>(bs);
      for (int a = 0; a < px; ++a) {
        if (!inside(a, b, side)) continue;
        double mean = 0.0;
        double lo = f.at(a, b), hi = lo;
        for (int y = b; y < b + side; ++y)
          for (int x = a; x < a + side; ++x) {
            const double v = f.at(x, y);
            mean += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        // constant window: no oscillation, independent of rounding in the mean
        if (lo == hi) continue;
        mean /= count;
        double dev = 0.0;
        for (int y = b; y < b + side; ++y)
          for (int x = a; x < a + side; ++x) dev += std::abs(f.at(x, y) - mean);
        osc[bs * px + a] = dev / count;
      }
    });
    max_over_containing_windows(osc, nx, ny, side, result);
  }
  for (std::size_t k = 0; k < result.size(); ++k)
    if (outside[k]) result[k] = 0.0;
  return {GridSampling(f.box(), nx, ny, std::move(result)), std::move(outside)};
}

}  // namespace spfem
