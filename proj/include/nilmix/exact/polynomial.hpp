#pragma once

// Dense univariate polynomials over the integers and the rationals.

#include <gmpxx.h>

#include <initializer_list>
#include <sstream>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "nilmix/errors.hpp"

namespace nilmix {

/// Dense polynomial, coefficients stored from the constant term upward.
/// The zero polynomial has no coefficients and degree -1.
template <typename T>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<long> coeffs) {
    for (long v : coeffs) c_.emplace_back(v);
    trim();
  }
  static Polynomial constant(const T& v) { return Polynomial(std::vector<T>{v}); }
  static Polynomial monomial(const T& v, int deg) {
    std::vector<T> c(deg + 1, T(0));
    c[deg] = v;
    return Polynomial(std::move(c));
  }
  /// x - r
  static Polynomial linear_root(const T& r) { return Polynomial(std::vector<T>{-r, T(1)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  const std::vector<T>& coeffs() const { return c_; }
  T coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : T(0); }
  const T& lead() const {
    if (c_.empty()) throw InvalidInput("leading coefficient of the zero polynomial");
    return c_.back();
  }

  T operator()(const T& x) const {
    T acc(0);
    for (int i = degree(); i >= 0; --i) acc = acc * x + c_[i];
    return acc;
  }

  Polynomial derivative() const {
    std::vector<T> d;
    for (int i = 1; i <= degree(); ++i) d.push_back(c_[i] * i);
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return Polynomial(std::move(c));
  }
  Polynomial operator-() const {
    std::vector<T> c = c_;
    for (auto& v : c) v = -v;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Polynomial& a, const T& s) {
    std::vector<T> c = a.c_;
    for (auto& v : c) v *= s;
    return Polynomial(std::move(c));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  /// Euclidean division; requires T to be a field or the divisor to have a
  /// unit leading coefficient dividing exactly.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
    if (d.is_zero()) throw InvalidInput("polynomial division by zero");
    std::vector<T> r = c_;
    const int dd = d.degree();
    if (degree() < dd) return {Polynomial{}, *this};
    std::vector<T> q(degree() - dd + 1, T(0));
    for (int i = degree(); i >= dd; --i) {
      if (r[i] == 0) continue;
      T f = r[i] / d.lead();
      if constexpr (std::is_same_v<T, mpz_class>) {
        if (f * d.lead() != r[i]) throw InvalidInput("inexact integer polynomial division");
      }
      q[i - dd] = f;
      for (int j = 0; j <= dd; ++j) r[i - dd + j] -= f * d.c_[j];
    }
    return {Polynomial(std::move(q)), Polynomial(std::move(r))};
  }
  friend Polynomial operator/(const Polynomial& a, const Polynomial& b) { return a.divmod(b).first; }
  friend Polynomial operator%(const Polynomial& a, const Polynomial& b) { return a.divmod(b).second; }

  Polynomial pow(unsigned n) const {
    Polynomial r = constant(T(1));
    for (unsigned i = 0; i < n; ++i) r = r * *this;
    return r;
  }
  /// p(q(x))
  Polynomial compose(const Polynomial& q) const {
    Polynomial acc;
    for (int i = degree(); i >= 0; --i) acc = acc * q + constant(c_[i]);
    return acc;
  }

  std::string str(const char* var = "x") const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
      if (c_[i] == 0) continue;
      T v = c_[i];
      if (!first) os << (v < 0 ? " - " : " + ");
      else if (v < 0) os << "-";
      if (v < 0) v = -v;
      if (v != 1 || i == 0) os << v;
      if (i > 0) os << var;
      if (i > 1) os << "^" << i;
      first = false;
    }
    return os.str();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<T> c_;
};

using IntPolynomial = Polynomial<mpz_class>;
using QPolynomial = Polynomial<mpq_class>;

inline QPolynomial to_rational(const IntPolynomial& p) {
  std::vector<mpq_class> c;
  for (const auto& v : p.coeffs()) c.emplace_back(v);
  return QPolynomial(std::move(c));
}

/// Content (gcd of coefficients), nonnegative.
inline mpz_class content(const IntPolynomial& p) {
  mpz_class g = 0;
  for (const auto& v : p.coeffs()) g = gcd(g, v);
  return g;
}

/// The primitive integer polynomial with positive leading coefficient that is
/// a rational multiple of p.
inline IntPolynomial primitive_part(const QPolynomial& p) {
  if (p.is_zero()) return {};
  mpz_class den = 1;
  for (const auto& v : p.coeffs()) den = lcm(den, mpz_class(v.get_den()));
  std::vector<mpz_class> c;
  for (const auto& v : p.coeffs()) c.push_back(mpz_class(v * den));
  mpz_class g = 0;
  for (const auto& v : c) g = gcd(g, v);
  if (c.back() < 0) g = -g;
  for (auto& v : c) v /= g;
  return IntPolynomial(std::move(c));
}
inline IntPolynomial primitive_part(const IntPolynomial& p) { return primitive_part(to_rational(p)); }

inline QPolynomial make_monic(const QPolynomial& p) {
  if (p.is_zero()) return p;
  return p * mpq_class(1 / p.lead());
}

/// Monic gcd over the rationals (zero if both are zero).
inline QPolynomial gcd(QPolynomial a, QPolynomial b) {
  while (!b.is_zero()) {
    QPolynomial r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(a);
}
inline IntPolynomial gcd(const IntPolynomial& a, const IntPolynomial& b) {
  return primitive_part(gcd(to_rational(a), to_rational(b)));
}

/// Extended Euclid over Q: returns (g, s, t) with s*a + t*b = g monic.
inline std::tuple<QPolynomial, QPolynomial, QPolynomial> extended_gcd(QPolynomial a, QPolynomial b) {
  QPolynomial s0 = QPolynomial::constant(1), s1;
  QPolynomial t0, t1 = QPolynomial::constant(1);
  while (!b.is_zero()) {
    auto [q, r] = a.divmod(b);
    a = std::move(b);
    b = std::move(r);
    QPolynomial s2 = s0 - q * s1;
    QPolynomial t2 = t0 - q * t1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (a.is_zero()) return {a, s0, t0};
  mpq_class inv = 1 / a.lead();
  return {a * inv, s0 * inv, t0 * inv};
}

inline bool is_squarefree(const IntPolynomial& p) {
  if (p.degree() <= 0) return true;
  return gcd(p, p.derivative()).degree() == 0;
}

/// Product of the distinct irreducible factors of p, primitive.
inline IntPolynomial radical(const IntPolynomial& p) {
  if (p.degree() <= 0) return primitive_part(p);
  QPolynomial q = to_rational(p);
  QPolynomial g = gcd(q, q.derivative());
  return primitive_part(q / g);
}

/// Yun's algorithm: returns pairs (a_k, k), a_k squarefree, pairwise coprime,
/// nonconstant, with p = c * prod a_k^k.
inline std::vector<std::pair<IntPolynomial, int>> squarefree_decomposition(const IntPolynomial& p) {
  std::vector<std::pair<IntPolynomial, int>> out;
  if (p.degree() <= 0) return out;
  QPolynomial f = to_rational(p);
  QPolynomial fp = f.derivative();
  QPolynomial a = gcd(f, fp);
  QPolynomial b = f / a;
  QPolynomial c = fp / a;
  QPolynomial d = c - b.derivative();
  int k = 1;
  while (b.degree() > 0) {
    QPolynomial ak = gcd(b, d);
    if (ak.degree() > 0) out.emplace_back(primitive_part(ak), k);
    b = b / ak;
    c = d / ak;
    d = c - b.derivative();
    ++k;
  }
  return out;
}

/// x^n p(1/x)
template <typename T>
Polynomial<T> reversed(const Polynomial<T>& p) {
  std::vector<T> c(p.coeffs().rbegin(), p.coeffs().rend());
  return Polynomial<T>(std::move(c));
}

}  // namespace nilmix
