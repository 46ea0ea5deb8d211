#include "dualmix/smallmat.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace dualmix {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) {
    const double av = std::fabs(v);
    if (av > s) s = av;
  }
  return s;
}

bool all_finite(const std::vector<double>& a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// 2x2 inverse on an already scale-normalized block.
void invert2_normalized(const double b[4], double out[4], int pivot_index) {
  const double det = b[0] * b[3] - b[1] * b[2];
  if (std::fabs(det) <= kPivotTol) {
    throw SingularMatrixError(pivot_index, "singular 2x2 block (|det| = " +
                                               std::to_string(std::fabs(det)) + ")");
  }
  out[0] = b[3] / det;
  out[1] = -b[1] / det;
  out[2] = -b[2] / det;
  out[3] = b[0] / det;
}

// 3x3 inverse by the adjugate formula on a scale-normalized block.
void invert3_normalized(const double b[9], double out[9], int pivot_index) {
  const double c00 = b[4] * b[8] - b[5] * b[7];
  const double c01 = b[5] * b[6] - b[3] * b[8];
  const double c02 = b[3] * b[7] - b[4] * b[6];
  const double det = b[0] * c00 + b[1] * c01 + b[2] * c02;
  if (std::fabs(det) <= kPivotTol) {
    throw SingularMatrixError(pivot_index, "singular 3x3 block (|det| = " +
                                               std::to_string(std::fabs(det)) + ")");
  }
  out[0] = c00 / det;
  out[1] = (b[2] * b[7] - b[1] * b[8]) / det;
  out[2] = (b[1] * b[5] - b[2] * b[4]) / det;
  out[3] = c01 / det;
  out[4] = (b[0] * b[8] - b[2] * b[6]) / det;
  out[5] = (b[2] * b[3] - b[0] * b[5]) / det;
  out[6] = c02 / det;
  out[7] = (b[1] * b[6] - b[0] * b[7]) / det;
  out[8] = (b[0] * b[4] - b[1] * b[3]) / det;
}

// Blockwise inverse for orders 4 and 5 via the Schur complement of the
// leading 2x2 block:
//   [A B; C D]^-1 = [A^-1 + A^-1 B S^-1 C A^-1,  -A^-1 B S^-1;
//                    -S^-1 C A^-1,                S^-1],  S = D - C A^-1 B.
SymMat invert_block_normalized(const SymMat& m) {
  const int n = m.order();
  const int k = n - 2;

  double a[4] = {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
  double ainv[4];
  invert2_normalized(a, ainv, 1);

  // B is 2 x k, C = B^T.
  double b[2 * 3];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < k; ++j) b[i * k + j] = m(i, 2 + j);

  // A^-1 B (2 x k).
  double ab[2 * 3];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < k; ++j)
      ab[i * k + j] = ainv[i * 2 + 0] * b[0 * k + j] + ainv[i * 2 + 1] * b[1 * k + j];

  // Schur complement S = D - C A^-1 B (k x k, symmetric).
  double s[3 * 3];
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      s[i * k + j] = m(2 + i, 2 + j) -
                     (b[0 * k + i] * ab[0 * k + j] + b[1 * k + i] * ab[1 * k + j]);

  double sinv[3 * 3];
  if (k == 2) {
    invert2_normalized(s, sinv, n - 1);
  } else {
    invert3_normalized(s, sinv, n - 1);
  }

  SymMat out(n);
  // Bottom-right: S^-1.
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out(2 + i, 2 + j) = sinv[i * k + j];
  // Top-right: -A^-1 B S^-1; bottom-left by symmetry.
  double tr[2 * 3];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < k; ++j) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += ab[i * k + t] * sinv[t * k + j];
      tr[i * k + j] = -acc;
      out(i, 2 + j) = -acc;
      out(2 + j, i) = -acc;
    }
  // Top-left: A^-1 + (A^-1 B) S^-1 (A^-1 B)^T = A^-1 - tr * ab^T.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double acc = ainv[i * 2 + j];
      for (int t = 0; t < k; ++t) acc -= tr[i * k + t] * ab[j * k + t];
      out(i, j) = acc;
    }
  return out;
}

}  // namespace

SymMat::SymMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
  if (n < 2 || n > 8) {
    throw std::invalid_argument("symmetric matrix order must be in [2, 8], got " +
                                std::to_string(n));
  }
}

SymMat SymMat::from(const Mat& m) {
  if (m.rows != m.cols) {
    throw std::invalid_argument("symmetric matrix must be square");
  }
  SymMat out(m.rows);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = i; j < m.cols; ++j) {
      const double x = m(i, j);
      const double y = m(j, i);
      if (std::isfinite(x) && std::isfinite(y) &&
          std::fabs(x - y) > 1e-12 * std::max(1.0, std::fabs(x))) {
        throw std::invalid_argument("matrix is not symmetric at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
      }
      out.set(i, j, 0.5 * (x + y));
    }
  }
  return out;
}

Mat SymMat::full() const {
  Mat out(n_, n_);
  out.a = a_;
  return out;
}

bool is_spd_sylvester(const SymMat& m) {
  const int n = m.order();
  std::vector<double> b(m.full().a);
  if (!all_finite(b)) return false;
  const double scale = max_abs(b);
  if (scale <= 0.0) return false;
  for (double& v : b) v /= scale;

  // Gaussian elimination without row exchanges: the k-th pivot equals
  // D_k / D_{k-1}, so all pivots positive iff all leading principal minors
  // are. A pivot at or below the tolerance is treated as a failed minor.
  for (int k = 0; k < n; ++k) {
    const double piv = b[static_cast<std::size_t>(k) * n + k];
    if (!std::isfinite(piv) || piv <= kPivotTol) return false;
    for (int i = k + 1; i < n; ++i) {
      const double f = b[static_cast<std::size_t>(i) * n + k] / piv;
      for (int j = k; j < n; ++j) {
        b[static_cast<std::size_t>(i) * n + j] -=
            f * b[static_cast<std::size_t>(k) * n + j];
      }
    }
  }
  return true;
}

SymMat invert_pivot(const SymMat& m) {
  const int n = m.order();
  const double scale = max_abs(m.full().a);
  if (!(scale > 0.0) || !all_finite(m.full().a)) {
    throw SingularMatrixError(0, "matrix has no finite scale");
  }

  // Gauss-Jordan with partial pivoting on the scale-normalized augmented
  // system [A/s | I]; the result is then divided by s.
  Mat w(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w(i, j) = m(i, j) / scale;
    w(i, n + i) = 1.0;
  }
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::fabs(w(i, k)) > std::fabs(w(p, k))) p = i;
    }
    if (std::fabs(w(p, k)) <= kPivotTol) {
      throw SingularMatrixError(k, "singular matrix (pivot " + std::to_string(k) +
                                       " is " + std::to_string(w(p, k)) + ")");
    }
    if (p != k) {
      for (int j = 0; j < 2 * n; ++j) std::swap(w(p, j), w(k, j));
    }
    const double piv = w(k, k);
    for (int j = 0; j < 2 * n; ++j) w(k, j) /= piv;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = w(i, k);
      if (f == 0.0) continue;
      for (int j = 0; j < 2 * n; ++j) w(i, j) -= f * w(k, j);
    }
  }
  SymMat out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      out.set(i, j, 0.5 * (w(i, n + j) + w(j, n + i)) / scale);
    }
  }
  return out;
}

SymMat invert(const SymMat& m) {
  const int n = m.order();
  const double scale = max_abs(m.full().a);
  if (!(scale > 0.0) || !all_finite(m.full().a)) {
    throw SingularMatrixError(0, "matrix has no finite scale");
  }
  if (n == 3 || n == 4 || n == 5) {
    SymMat b(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) b.set(i, j, m(i, j) / scale);
    SymMat inv(n);
    if (n == 3) {
      double in[9];
      double out[9];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) in[i * 3 + j] = b(i, j);
      invert3_normalized(in, out, 2);
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) inv.set(i, j, out[i * 3 + j]);
    } else {
      inv = invert_block_normalized(b);
    }
    SymMat res(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) res.set(i, j, inv(i, j) / scale);
    return res;
  }
  return invert_pivot(m);
}

Mat invert_square(const Mat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("inverse of non-square matrix");
  const int n = m.rows;
  const double scale = max_abs(m.a);
  if (!(scale > 0.0) || !all_finite(m.a)) {
    throw SingularMatrixError(0, "matrix has no finite scale");
  }
  Mat w(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w(i, j) = m(i, j) / scale;
    w(i, n + i) = 1.0;
  }
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::fabs(w(i, k)) > std::fabs(w(p, k))) p = i;
    }
    if (std::fabs(w(p, k)) <= kPivotTol) {
      throw SingularMatrixError(k, "singular matrix (pivot " + std::to_string(k) +
                                       " is " + std::to_string(w(p, k)) + ")");
    }
    if (p != k) {
      for (int j = 0; j < 2 * n; ++j) std::swap(w(p, j), w(k, j));
    }
    const double piv = w(k, k);
    for (int j = 0; j < 2 * n; ++j) w(k, j) /= piv;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = w(i, k);
      if (f == 0.0) continue;
      for (int j = 0; j < 2 * n; ++j) w(i, j) -= f * w(k, j);
    }
  }
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = w(i, n + j) / scale;
  return out;
}

Mat matmul(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matmul dimension mismatch");
  Mat out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const double v = x(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) out(i, j) += v * y(k, j);
    }
  return out;
}

Mat transpose(const Mat& x) {
  Mat out(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
  return out;
}

Vec matvec(const Mat& x, const Vec& v) {
  if (static_cast<int>(v.size()) != x.cols) {
    throw std::invalid_argument("matvec dimension mismatch");
  }
  Vec out(x.rows, 0.0);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) out[i] += x(i, j) * v[j];
  return out;
}

Vec matvec(const SymMat& x, const Vec& v) { return matvec(x.full(), v); }

double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double cond_inf(const SymMat& m) {
  auto norm_inf = [](const SymMat& x) {
    double best = 0.0;
    for (int i = 0; i < x.order(); ++i) {
      double row = 0.0;
      for (int j = 0; j < x.order(); ++j) row += std::fabs(x(i, j));
      if (row > best) best = row;
    }
    return best;
  };
  try {
    const SymMat inv = invert(m);
    return norm_inf(m) * norm_inf(inv);
  } catch (const SingularMatrixError&) {
    return kInf;
  }
}

}  // namespace dualmix
