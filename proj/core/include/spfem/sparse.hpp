#pragma once

#include <cstdint>
#include <vector>

#include "spfem/geometry.hpp"

namespace spfem {

/// Square matrix in compressed sparse row form with sorted column indices.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> cols;
  std::vector<double> vals;

  std::size_t nonzeros() const { return vals.size(); }
  /// Entry (i, j), 0 if outside the pattern.
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal() const;
  /// y = A x
  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> multiply(const std::vector<double>& x) const;
  /// Bitwise symmetry of values and pattern.
  bool is_symmetric() const;
};

/// Raised when the iteration limit is hit; carries the residual reached.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

struct CgOptions {
  double rel_tol = 1e-10;
  /// 0 selects rows + 1000.
  int max_iters = 0;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for an SPD matrix, stopping on
/// ||b - A x|| <= rel_tol ||b||. Sequential and deterministic.
CgResult conjugate_gradient(const CsrMatrix& a, const std::vector<double>& b, const CgOptions& options = {});

}  // namespace spfem
