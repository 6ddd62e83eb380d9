#pragma once

// Dense exact matrices: integer matrices with a division-free characteristic
// polynomial, unimodular matrices, and Gaussian elimination over any exact
// field type.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/polynomial.hpp"

namespace nilmix {

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, T(0)) {}
  Matrix(int rows, int cols, const T& fill) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) throw InvalidInput("ragged matrix literal");
      for (long v : r) a_.emplace_back(v);
    }
  }
  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  T& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw InvalidInput("matrix dimension mismatch in product");
    Matrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }
  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("matrix dimension mismatch in sum");
    Matrix c = a;
    for (size_t i = 0; i < c.a_.size(); ++i) c.a_[i] += b.a_[i];
    return c;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("matrix dimension mismatch in difference");
    Matrix c = a;
    for (size_t i = 0; i < c.a_.size(); ++i) c.a_[i] -= b.a_[i];
    return c;
  }
  friend Matrix operator*(const T& s, const Matrix& a) {
    Matrix c = a;
    for (auto& v : c.a_) v *= s;
    return c;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }
  std::vector<T> apply(const std::vector<T>& v) const {
    if (static_cast<int>(v.size()) != cols_) throw InvalidInput("matrix-vector dimension mismatch");
    std::vector<T> out(rows_, T(0));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }
  Matrix pow(unsigned n) const {
    Matrix r = identity(rows_);
    Matrix b = *this;
    while (n) {
      if (n & 1) r = r * b;
      n >>= 1;
      if (n) b = b * b;
    }
    return r;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> a_;
};

using IntMatrix = Matrix<mpz_class>;
using QMatrix = Matrix<mpq_class>;

/// Characteristic polynomial det(xI - M) by Berkowitz's algorithm. Uses only
/// ring operations, so integer input stays in the integers.
template <typename T>
Polynomial<T> char_poly(const Matrix<T>& m) {
  if (!m.square()) throw InvalidInput("characteristic polynomial of a non-square matrix");
  const int n = m.rows();
  if (n == 0) return Polynomial<T>::constant(T(1));
  // Coefficient vectors are stored highest degree first during the iteration.
  std::vector<T> vec{T(1), -m(0, 0)};
  for (int r = 1; r < n; ++r) {
    // Toeplitz column built from the leading principal r x r block A, the row
    // R = m(r, 0..r-1), the column C = m(0..r-1, r) and the corner m(r, r).
    std::vector<T> col(r + 2, T(0));
    col[0] = T(1);
    col[1] = -m(r, r);
    std::vector<T> c(r);
    for (int i = 0; i < r; ++i) c[i] = m(i, r);
    for (int k = 2; k <= r + 1; ++k) {
      T s(0);
      for (int i = 0; i < r; ++i) s += m(r, i) * c[i];
      col[k] = -s;
      std::vector<T> next(r, T(0));
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) next[i] += m(i, j) * c[j];
      c = std::move(next);
    }
    std::vector<T> out(r + 2, T(0));
    for (int i = 0; i < r + 2; ++i)
      for (int j = 0; j <= i && j < static_cast<int>(vec.size()); ++j) out[i] += col[i - j] * vec[j];
    vec = std::move(out);
  }
  std::vector<T> low(vec.rbegin(), vec.rend());
  return Polynomial<T>(std::move(low));
}

template <typename T>
T determinant(const Matrix<T>& m) {
  Polynomial<T> p = char_poly(m);
  T c0 = p.coeff(0);
  return (m.rows() % 2 == 0) ? c0 : T(-c0);
}

/// Square integer matrix with determinant +1 or -1.
class UnimodularMatrix {
 public:
  UnimodularMatrix() = default;
  explicit UnimodularMatrix(IntMatrix m) : m_(std::move(m)) {
    if (!m_.square() || m_.rows() == 0) throw InvalidInput("unimodular matrix must be square and nonempty");
    charpoly_ = char_poly(m_);
    det_ = determinant(m_);
    if (det_ != 1 && det_ != -1) throw InvalidInput("matrix is not unimodular (det = " + det_.get_str() + ")");
  }
  UnimodularMatrix(std::initializer_list<std::initializer_list<long>> rows) : UnimodularMatrix(IntMatrix(rows)) {}

  int dim() const { return m_.rows(); }
  const IntMatrix& matrix() const { return m_; }
  const mpz_class& det() const { return det_; }
  const IntPolynomial& charpoly() const { return charpoly_; }

  /// Exact inverse from Cayley-Hamilton; verified A * A^{-1} = I.
  UnimodularMatrix inverse() const {
    const int n = dim();
    // p(x) = sum c_k x^k, c_n = 1;  A^{-1} = -(1/c_0) sum_{k>=1} c_k A^{k-1}
    IntMatrix acc(n, n);
    IntMatrix power = IntMatrix::identity(n);
    for (int k = 1; k <= n; ++k) {
      acc = acc + charpoly_.coeff(k) * power;
      power = power * m_;
    }
    mpz_class c0 = charpoly_.coeff(0);
    IntMatrix inv = mpz_class(-c0) * acc;  // c0 = +-1 so 1/c0 = c0
    if (m_ * inv != IntMatrix::identity(n)) throw Error("internal: unimodular inverse check failed");
    return UnimodularMatrix(std::move(inv));
  }
  friend UnimodularMatrix operator*(const UnimodularMatrix& a, const UnimodularMatrix& b) {
    return UnimodularMatrix(a.m_ * b.m_);
  }
  friend bool operator==(const UnimodularMatrix& a, const UnimodularMatrix& b) { return a.m_ == b.m_; }
  UnimodularMatrix transpose() const { return UnimodularMatrix(m_.transpose()); }
  /// A^n for any integer n.
  UnimodularMatrix power(long n) const {
    if (n < 0) return inverse().power(-n);
    return UnimodularMatrix(m_.pow(static_cast<unsigned>(n)));
  }
  static UnimodularMatrix identity(int n) { return UnimodularMatrix(IntMatrix::identity(n)); }

 private:
  IntMatrix m_;
  mpz_class det_;
  IntPolynomial charpoly_;
};

/// Exact characteristic polynomial of a unimodular matrix.
inline IntPolynomial char_poly(const UnimodularMatrix& m) { return m.charpoly(); }

inline bool is_zero(const mpq_class& v) { return v == 0; }
inline bool is_zero(const mpz_class& v) { return v == 0; }
inline mpq_class field_inverse(const mpq_class& v) { return 1 / v; }

/// Reduced row echelon form over an exact field; returns pivot columns.
template <typename F>
std::vector<int> rref(Matrix<F>& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int p = -1;
    for (int i = row; i < m.rows(); ++i)
      if (!is_zero(m(i, col))) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    F inv = field_inverse(m(row, col));
    for (int j = col; j < m.cols(); ++j) m(row, j) = m(row, j) * inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row || is_zero(m(i, col))) continue;
      F f = m(i, col);
      for (int j = col; j < m.cols(); ++j) m(i, j) = m(i, j) - f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <typename F>
int rank(Matrix<F> m) {
  return static_cast<int>(rref(m).size());
}

/// Basis of the right null space {v : M v = 0}.
template <typename F>
std::vector<std::vector<F>> nullspace(Matrix<F> m, const F& zero, const F& one) {
  std::vector<int> piv = rref(m);
  std::vector<bool> is_piv(m.cols(), false);
  for (int c : piv) is_piv[c] = true;
  std::vector<std::vector<F>> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_piv[free]) continue;
    std::vector<F> v(m.cols(), zero);
    v[free] = one;
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = zero - m(static_cast<int>(r), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace nilmix
