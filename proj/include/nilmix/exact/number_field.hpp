#pragma once

// Exact arithmetic in a number field Q(theta) given by a monic irreducible
// integer polynomial, with certified complex embeddings.

#include <gmpxx.h>

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/matrix.hpp"
#include "nilmix/exact/polynomial.hpp"
#include "nilmix/exact/roots.hpp"

namespace nilmix {

class NumberField {
 public:
  /// `defining` must be monic and irreducible; irreducibility is checked
  /// unless `trusted` is set.
  explicit NumberField(IntPolynomial defining, bool trusted = false) : f_(std::move(defining)) {
    if (f_.degree() < 1) throw InvalidInput("defining polynomial must be nonconstant");
    if (f_.lead() != 1) throw InvalidInput("defining polynomial must be monic");
    if (!trusted) {
      auto factors = factor_monic(f_);
      if (factors.size() != 1 || factors[0].second != 1) throw InvalidInput("defining polynomial is reducible");
    }
  }
  int degree() const { return f_.degree(); }
  const IntPolynomial& defining() const { return f_; }
  bool operator==(const NumberField& o) const { return f_ == o.f_; }

  /// Certified roots of the defining polynomial; this fixes the order of the
  /// complex embeddings.
  std::vector<CertifiedComplex> roots(long precision_bits, long cap = kDefaultPrecisionCap) const {
    {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      auto it = cache_->roots.find(precision_bits);
      if (it != cache_->roots.end()) return it->second;
    }
    auto r = certified_roots(f_, precision_bits, cap);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    cache_->roots.emplace(precision_bits, r);
    return r;
  }

 private:
  struct RootCache {
    std::mutex mutex;
    std::map<long, std::vector<CertifiedComplex>> roots;
  };
  IntPolynomial f_;
  std::shared_ptr<RootCache> cache_ = std::make_shared<RootCache>();
};

using FieldPtr = std::shared_ptr<const NumberField>;

inline FieldPtr make_field(IntPolynomial defining, bool trusted = false) {
  return std::make_shared<const NumberField>(std::move(defining), trusted);
}

class NumberFieldElement {
 public:
  NumberFieldElement() = default;
  NumberFieldElement(FieldPtr field, std::vector<mpq_class> coords) : field_(std::move(field)), c_(std::move(coords)) {
    if (!field_) throw InvalidInput("number field element without a field");
    if (static_cast<int>(c_.size()) > field_->degree()) {
      c_ = reduce(QPolynomial(c_)).coeffs();
    }
    c_.resize(field_->degree(), mpq_class(0));
  }
  static NumberFieldElement rational(FieldPtr field, const mpq_class& v) {
    std::vector<mpq_class> c{v};
    return NumberFieldElement(std::move(field), std::move(c));
  }
  static NumberFieldElement generator(FieldPtr field) {
    if (field->degree() == 1) return rational(field, mpq_class(-field->defining().coeff(0)));
    std::vector<mpq_class> c{0, 1};
    return NumberFieldElement(std::move(field), std::move(c));
  }
  /// p(theta) for a rational polynomial p.
  static NumberFieldElement from_polynomial(FieldPtr field, const QPolynomial& p) {
    NumberFieldElement e(field, {});
    e.c_ = e.reduce(p).coeffs();
    e.c_.resize(field->degree(), mpq_class(0));
    return e;
  }

  const FieldPtr& field() const { return field_; }
  const std::vector<mpq_class>& coords() const { return c_; }
  QPolynomial as_polynomial() const { return QPolynomial(c_); }
  bool is_zero() const {
    for (const auto& v : c_)
      if (v != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != 0) return false;
    return true;
  }

  friend NumberFieldElement operator+(const NumberFieldElement& a, const NumberFieldElement& b) {
    check_same(a, b);
    NumberFieldElement r = a;
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
  }
  friend NumberFieldElement operator-(const NumberFieldElement& a, const NumberFieldElement& b) {
    check_same(a, b);
    NumberFieldElement r = a;
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
    return r;
  }
  NumberFieldElement operator-() const {
    NumberFieldElement r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend NumberFieldElement operator*(const NumberFieldElement& a, const NumberFieldElement& b) {
    check_same(a, b);
    return from_polynomial(a.field_, a.as_polynomial() * b.as_polynomial());
  }
  friend bool operator==(const NumberFieldElement& a, const NumberFieldElement& b) {
    return *a.field_ == *b.field_ && a.c_ == b.c_;
  }
  friend bool operator!=(const NumberFieldElement& a, const NumberFieldElement& b) { return !(a == b); }

  NumberFieldElement inverse() const {
    if (is_zero()) throw InvalidInput("inverse of zero in a number field");
    auto [g, s, t] = extended_gcd(as_polynomial(), to_rational(field_->defining()));
    if (g.degree() != 0) throw Error("internal: defining polynomial not irreducible");
    return from_polynomial(field_, s);
  }
  friend NumberFieldElement operator/(const NumberFieldElement& a, const NumberFieldElement& b) {
    return a * b.inverse();
  }
  NumberFieldElement pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    NumberFieldElement r = rational(field_, 1);
    NumberFieldElement b = *this;
    while (n > 0) {
      if (n & 1) r = r * b;
      n >>= 1;
      if (n > 0) b = b * b;
    }
    return r;
  }
  NumberFieldElement pow(const mpz_class& n) const {
    if (!n.fits_slong_p()) throw UnsupportedInput("exponent too large");
    return pow(n.get_si());
  }

  /// Matrix of multiplication by this element on the power basis (columns are
  /// images of basis vectors).
  QMatrix multiplication_matrix() const {
    const int n = field_->degree();
    QMatrix m(n, n);
    NumberFieldElement basis = rational(field_, 1);
    NumberFieldElement theta = generator(field_);
    for (int j = 0; j < n; ++j) {
      NumberFieldElement img = *this * basis;
      for (int i = 0; i < n; ++i) m(i, j) = img.c_[i];
      basis = basis * theta;
    }
    return m;
  }
  /// Characteristic polynomial of multiplication, monic rational.
  QPolynomial charpoly() const { return char_poly(multiplication_matrix()); }
  /// Minimal polynomial over Q, primitive with positive leading coefficient.
  IntPolynomial minpoly() const { return radical(primitive_part(charpoly())); }
  /// Degree of Q(this element) over Q.
  int degree() const { return minpoly().degree(); }
  bool is_algebraic_integer() const {
    const QPolynomial p = charpoly();
    for (const auto& v : p.coeffs())
      if (v.get_den() != 1) return false;
    return true;
  }
  bool is_unit() const { return !is_zero() && is_algebraic_integer() && inverse().is_algebraic_integer(); }
  mpq_class norm() const {
    QPolynomial p = charpoly();
    mpq_class c0 = p.coeff(0);
    return (field_->degree() % 2 == 0) ? c0 : mpq_class(-c0);
  }
  mpq_class trace() const { return -charpoly().coeff(field_->degree() - 1); }

  /// Value under each complex embedding, in the order of the field's
  /// certified roots; each enclosure has radius <= 2^{-precision_bits}.
  std::vector<CertifiedComplex> embeddings(long precision_bits, long cap = kDefaultPrecisionCap) const {
    long bits = precision_bits + 32;
    while (true) {
      std::vector<CertifiedComplex> theta = field_->roots(bits, cap);
      std::vector<CertifiedComplex> out;
      bool ok = true;
      const double target = std::ldexp(1.0, -static_cast<int>(std::min<long>(precision_bits, 1000)));
      for (const auto& t : theta) {
        CertifiedComplex v = is_rational() ? CertifiedComplex(Interval(c_[0], t.prec()), Interval(0, t.prec()))
                                           : eval(as_polynomial(), t);
        if (precision_bits <= 1000 ? v.radius() > target : v.log2_width() > -precision_bits) ok = false;
        out.push_back(std::move(v));
      }
      if (ok) return out;
      if (bits >= cap) throw PrecisionExhausted("embedding enclosure did not reach the requested precision");
      bits = std::min<long>(bits * 2, cap);
    }
  }

  std::string str() const { return as_polynomial().str("t"); }

 private:
  static void check_same(const NumberFieldElement& a, const NumberFieldElement& b) {
    if (!a.field_ || !b.field_) throw InvalidInput("uninitialised number field element");
    if (a.field_ != b.field_ && !(*a.field_ == *b.field_)) throw InvalidInput("number field mismatch");
  }
  QPolynomial reduce(const QPolynomial& p) const { return p % to_rational(field_->defining()); }

  FieldPtr field_;
  std::vector<mpq_class> c_;
};

inline bool is_zero(const NumberFieldElement& v) { return v.is_zero(); }
inline NumberFieldElement field_inverse(const NumberFieldElement& v) { return v.inverse(); }

}  // namespace nilmix
