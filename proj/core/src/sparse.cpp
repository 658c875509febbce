#include "spfem/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace spfem {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = cols.begin() + row_ptr[i];
  const auto end = cols.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(j));
  if (it == end || *it != static_cast<std::int32_t>(j)) return 0.0;
  return vals[it - cols.begin()];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows);
  for (std::size_t i = 0; i < rows; ++i) d[i] = at(i, i);
  return d;
}

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  if (x.size() != rows) throw Error("matrix-vector size mismatch");
  y.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += vals[k] * x[cols[k]];
    y[i] = acc;
  }
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y;
  multiply(x, y);
  return y;
}

bool CsrMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < rows; ++i)
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(cols[k]);
      const auto begin = cols.begin() + row_ptr[j];
      const auto end = cols.begin() + row_ptr[j + 1];
      const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(i));
      if (it == end || *it != static_cast<std::int32_t>(i)) return false;
      if (vals[it - cols.begin()] != vals[k]) return false;
    }
  return true;
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CgResult conjugate_gradient(const CsrMatrix& a, const std::vector<double>& b, const CgOptions& options) {
  const std::size_t n = a.rows;
  if (b.size() != n) throw Error("right-hand side has wrong length");
  if (!(options.rel_tol > 0.0)) throw Error("solver tolerance must be positive");
  const int max_iters = options.max_iters > 0 ? options.max_iters : static_cast<int>(n) + 1000;

  CgResult result;
  result.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return result;

  auto inv_diag = a.diagonal();
  for (auto& d : inv_diag) {
    if (!(d > 0.0)) throw Error("matrix has a non-positive diagonal entry");
    d = 1.0 / d;
  }

  std::vector<double> r = b;
  std::vector<double> z(n), p(n), q(n);
  int it = 0;
  for (;;) {
    // (re)start from the current residual r
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    double rnorm = norm2(r);
    while (rnorm > options.rel_tol * bnorm) {
      if (it >= max_iters)
        throw SolverError("conjugate gradients stopped after " + std::to_string(it) +
                              " iterations at relative residual " + std::to_string(rnorm / bnorm),
                          rnorm / bnorm, it);
      a.multiply(p, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0)) throw SolverError("matrix is not positive definite", rnorm / bnorm, it);
      const double alpha = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        result.x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      rnorm = norm2(r);
      ++it;
    }
    // the recursive residual may drift from the true one
    a.multiply(result.x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    result.relative_residual = norm2(r) / bnorm;
    if (result.relative_residual <= options.rel_tol) break;
    if (it >= max_iters)
      throw SolverError("conjugate gradients stopped after " + std::to_string(it) +
                            " iterations at relative residual " + std::to_string(result.relative_residual),
                        result.relative_residual, it);
  }
  result.iterations = it;
  return result;
}

}  // namespace spfem
