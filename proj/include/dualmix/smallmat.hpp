#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dualmix {

using Vec = std::vector<double>;

// Dense row-major rectangular matrix for the small systems that arise here
// (dimensions never exceed 8 in any direction).
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const {
    return a[static_cast<std::size_t>(i) * cols + j];
  }
};

// Symmetric matrix of order 2..8. Construction verifies symmetry to a
// relative 1e-12 and stores the symmetrized average, so downstream code can
// rely on exact a(i,j) == a(j,i).
class SymMat {
 public:
  explicit SymMat(int n);
  // Builds from a full matrix; throws std::invalid_argument when the input
  // is out of the supported order range or asymmetric beyond tolerance.
  static SymMat from(const Mat& m);

  int order() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }
  void set(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * n_ + j] = v;
    a_[static_cast<std::size_t>(j) * n_ + i] = v;
  }
  Mat full() const;

 private:
  int n_;
  std::vector<double> a_;
};

// Raised when an inversion hits a pivot (or subblock determinant) below
// 1e-12 relative to the matrix scale; carries the elimination step at which
// the breakdown occurred.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(int pivot_index, const std::string& what)
      : std::runtime_error(what), pivot_index_(pivot_index) {}
  int pivot_index() const { return pivot_index_; }

 private:
  int pivot_index_;
};

// Sylvester's criterion: all leading principal minors strictly positive.
// Minors are computed on a scale-normalized copy and compared against 1e-12,
// so the verdict does not depend on the overall magnitude of the matrix.
// Non-finite entries fail the test (callers treat them as infeasible points).
bool is_spd_sylvester(const SymMat& m);

// Inverse of a symmetric matrix. Order 3 uses the adjugate formula, orders
// 4 and 5 use 2x2 / (2+3) block inversion via the Schur complement, other
// orders fall back to Gauss-Jordan with partial pivoting. Throws
// SingularMatrixError on (near-)singular input.
SymMat invert(const SymMat& m);

// The Gauss-Jordan fallback, exposed so tests can cross-check the block path.
SymMat invert_pivot(const SymMat& m);

// General square inverse (used for the Jacobian block system, which is
// symmetric but indefinite). Partial pivoting, same singularity policy.
Mat invert_square(const Mat& m);

// Small dense helpers.
Mat matmul(const Mat& x, const Mat& y);
Mat transpose(const Mat& x);
Vec matvec(const Mat& x, const Vec& v);
Vec matvec(const SymMat& x, const Vec& v);
double dot(const Vec& x, const Vec& y);

// Infinity-norm condition number estimate ||A||_inf ||A^-1||_inf; returns
// +inf when the inverse does not exist.
double cond_inf(const SymMat& m);

}  // namespace dualmix
