#pragma once

// Trigonometric polynomials on T^d with exact rational complex coefficients
// and a certified l1 bound on omitted Fourier mass.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/matrix.hpp"

namespace nilmix {

struct ComplexQ {
  mpq_class re = 0, im = 0;

  bool is_zero() const { return re == 0 && im == 0; }
  ComplexQ conj() const { return {re, -im}; }
  friend ComplexQ operator+(const ComplexQ& a, const ComplexQ& b) { return {a.re + b.re, a.im + b.im}; }
  friend ComplexQ operator-(const ComplexQ& a, const ComplexQ& b) { return {a.re - b.re, a.im - b.im}; }
  friend ComplexQ operator*(const ComplexQ& a, const ComplexQ& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  ComplexQ& operator+=(const ComplexQ& o) { return *this = *this + o; }
  friend bool operator==(const ComplexQ& a, const ComplexQ& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const ComplexQ& a, const ComplexQ& b) { return !(a == b); }
  /// |re| + |im|, an upper bound for the modulus.
  mpq_class l1() const { return abs(re) + abs(im); }
  mpq_class norm() const { return re * re + im * im; }
  CertifiedComplex enclose(mpfr_prec_t prec = 128) const { return {Interval(re, prec), Interval(im, prec)}; }
  double modulus_d() const { return std::hypot(re.get_d(), im.get_d()); }
};

using Frequency = std::vector<mpz_class>;

class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  explicit TrigPolynomial(int dim) : dim_(dim) {
    if (dim < 1) throw InvalidInput("trig polynomial dimension must be positive");
  }

  static TrigPolynomial constant(int dim, const mpq_class& c) {
    TrigPolynomial f(dim);
    f.set(Frequency(dim, 0), {c, 0});
    return f;
  }
  /// e(<a, x>) = exp(2 pi i <a, x>)
  static TrigPolynomial character(const Frequency& a) {
    TrigPolynomial f(static_cast<int>(a.size()));
    f.set(a, {1, 0});
    return f;
  }

  int dim() const { return dim_; }
  const std::map<Frequency, ComplexQ>& coeffs() const { return c_; }
  size_t support_size() const { return c_.size(); }
  const mpq_class& tail() const { return tail_; }
  void set_tail(const mpq_class& t) {
    if (t < 0) throw InvalidInput("tail bound must be nonnegative");
    tail_ = t;
  }
  std::optional<double> holder_norm_hint;

  void set(const Frequency& a, const ComplexQ& v) {
    if (static_cast<int>(a.size()) != dim_) throw InvalidInput("frequency has wrong dimension");
    if (v.is_zero()) c_.erase(a);
    else c_[a] = v;
  }
  void add(const Frequency& a, const ComplexQ& v) {
    if (static_cast<int>(a.size()) != dim_) throw InvalidInput("frequency has wrong dimension");
    ComplexQ s = coeff(a) + v;
    set(a, s);
  }
  ComplexQ coeff(const Frequency& a) const {
    auto it = c_.find(a);
    return it == c_.end() ? ComplexQ{} : it->second;
  }
  /// Integral over the torus.
  ComplexQ integral() const { return coeff(Frequency(dim_, 0)); }
  bool is_exact() const { return tail_ == 0; }
  bool is_real() const {
    for (const auto& [a, v] : c_) {
      Frequency neg = a;
      for (auto& x : neg) x = -x;
      if (coeff(neg) != v.conj()) return false;
    }
    return true;
  }
  /// Upper bound on the l1 norm of the listed coefficients.
  mpq_class l1_mass() const {
    mpq_class s = 0;
    for (const auto& [a, v] : c_) s += v.l1();
    return s;
  }
  /// Largest |a|_inf over the support.
  mpz_class support_radius() const {
    mpz_class r = 0;
    for (const auto& [a, v] : c_)
      for (const auto& x : a)
        if (abs(x) > r) r = abs(x);
    return r;
  }

  /// f - integral(f); the tail is unchanged.
  TrigPolynomial zero_mean() const {
    TrigPolynomial g = *this;
    g.c_.erase(Frequency(dim_, 0));
    return g;
  }

  friend TrigPolynomial operator+(const TrigPolynomial& f, const TrigPolynomial& g) {
    check_dims(f, g);
    TrigPolynomial h = f;
    for (const auto& [a, v] : g.c_) h.add(a, v);
    h.tail_ = f.tail_ + g.tail_;
    return h;
  }
  friend TrigPolynomial operator*(const ComplexQ& s, const TrigPolynomial& f) {
    TrigPolynomial h(f.dim_);
    for (const auto& [a, v] : f.c_) h.set(a, s * v);
    h.tail_ = f.tail_ * s.l1();
    return h;
  }
  /// Pointwise product (convolution of coefficients).
  friend TrigPolynomial operator*(const TrigPolynomial& f, const TrigPolynomial& g) {
    check_dims(f, g);
    TrigPolynomial h(f.dim_);
    for (const auto& [a, v] : f.c_)
      for (const auto& [b, w] : g.c_) {
        Frequency s(f.dim_);
        for (int i = 0; i < f.dim_; ++i) s[i] = a[i] + b[i];
        h.add(s, v * w);
      }
    h.tail_ = f.tail_ * (g.l1_mass() + g.tail_) + f.l1_mass() * g.tail_;
    return h;
  }
  friend bool operator==(const TrigPolynomial& f, const TrigPolynomial& g) {
    return f.dim_ == g.dim_ && f.c_ == g.c_ && f.tail_ == g.tail_;
  }

  /// Value at a point given in [0,1)^d coordinates (double precision, listed
  /// terms only).
  std::complex<double> evaluate(const std::vector<double>& x) const {
    std::complex<double> s = 0;
    for (const auto& [a, v] : c_) {
      double ph = 0;
      for (int i = 0; i < dim_; ++i) ph += a[i].get_d() * x[i];
      ph = 2 * M_PI * (ph - std::floor(ph));
      s += std::complex<double>(v.re.get_d(), v.im.get_d()) * std::polar(1.0, ph);
    }
    return s;
  }

 private:
  static void check_dims(const TrigPolynomial& f, const TrigPolynomial& g) {
    if (f.dim_ != g.dim_) throw InvalidInput("trig polynomial dimension mismatch");
  }
  int dim_ = 0;
  std::map<Frequency, ComplexQ> c_;
  mpq_class tail_ = 0;
};

/// Frequency M a for an integer matrix M.
inline Frequency transform_frequency(const IntMatrix& m, const Frequency& a) {
  Frequency out(m.rows(), 0);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i] += m(i, j) * a[j];
  return out;
}

/// f o m: the coefficient at m^T a equals the coefficient of f at a.
inline TrigPolynomial pullback(const TrigPolynomial& f, const UnimodularMatrix& m) {
  if (m.dim() != f.dim()) throw InvalidInput("pullback dimension mismatch");
  IntMatrix mt = m.matrix().transpose();
  TrigPolynomial g(f.dim());
  for (const auto& [a, v] : f.coeffs()) g.set(transform_frequency(mt, a), v);
  g.set_tail(f.tail());
  g.holder_norm_hint = f.holder_norm_hint;
  return g;
}

}  // namespace nilmix
