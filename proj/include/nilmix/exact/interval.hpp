#pragma once

// Outward-rounded interval arithmetic over MPFR, plus rectangular complex
// enclosures built from it. Every operation returns an interval that contains
// the exact result of the operation applied to any points of the operands.

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "nilmix/errors.hpp"

namespace nilmix {

class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = 128) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }
  Interval(long v, mpfr_prec_t prec) : Interval(prec) {
    mpfr_set_si(lo_, v, MPFR_RNDD);
    mpfr_set_si(hi_, v, MPFR_RNDU);
  }
  Interval(const mpz_class& v, mpfr_prec_t prec) : Interval(prec) {
    mpfr_set_z(lo_, v.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(hi_, v.get_mpz_t(), MPFR_RNDU);
  }
  Interval(const mpq_class& v, mpfr_prec_t prec) : Interval(prec) {
    mpfr_set_q(lo_, v.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, v.get_mpq_t(), MPFR_RNDU);
  }
  static Interval from_double(double v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_d(r.lo_, v, MPFR_RNDD);
    mpfr_set_d(r.hi_, v, MPFR_RNDU);
    return r;
  }
  /// Interval [lo, hi] from doubles; requires lo <= hi.
  static Interval from_bounds(double lo, double hi, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_d(r.lo_, lo, MPFR_RNDD);
    mpfr_set_d(r.hi_, hi, MPFR_RNDU);
    return r;
  }
  /// Parses a decimal string, rounding outward.
  static Interval from_decimal(const std::string& s, mpfr_prec_t prec) {
    Interval r(prec);
    if (mpfr_set_str(r.lo_, s.c_str(), 10, MPFR_RNDD) != 0 &&
        mpfr_nan_p(r.lo_)) {
      throw InvalidInput("not a decimal number: " + s);
    }
    mpfr_set_str(r.hi_, s.c_str(), 10, MPFR_RNDU);
    return r;
  }

  Interval(const Interval& o) {
    mpfr_init2(lo_, mpfr_get_prec(o.lo_));
    mpfr_init2(hi_, mpfr_get_prec(o.hi_));
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  Interval(Interval&& o) noexcept {
    mpfr_init2(lo_, mpfr_get_prec(o.lo_));
    mpfr_init2(hi_, mpfr_get_prec(o.hi_));
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }
  Interval& operator=(const Interval& o) {
    if (this != &o) {
      mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
      mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
      mpfr_set(lo_, o.lo_, MPFR_RNDD);
      mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
  }
  Interval& operator=(Interval&& o) noexcept {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
  }
  ~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  mpfr_prec_t prec() const { return std::max(mpfr_get_prec(lo_), mpfr_get_prec(hi_)); }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }

  double lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double mid_d() const {
    Interval m = midpoint();
    return mpfr_get_d(m.lo_, MPFR_RNDN);
  }

  /// Point interval at the (rounded) midpoint. Not an enclosure of *this.
  Interval midpoint() const {
    Interval r(prec());
    mpfr_add(r.lo_, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(r.lo_, r.lo_, 1, MPFR_RNDN);
    mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
    return r;
  }

  /// Upper bound on hi - lo.
  Interval width() const {
    Interval r(prec());
    mpfr_sub(r.hi_, hi_, lo_, MPFR_RNDU);
    mpfr_set(r.lo_, r.hi_, MPFR_RNDD);
    mpfr_set_zero(r.lo_, 1);
    return r;
  }
  double width_d() const {
    mpfr_t w;
    mpfr_init2(w, prec());
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double d = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return d;
  }
  /// log2 of the width, -inf for a point.
  double log2_width() const {
    mpfr_t w;
    mpfr_init2(w, prec());
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double r;
    if (mpfr_zero_p(w)) {
      r = -INFINITY;
    } else {
      long e;
      double m = mpfr_get_d_2exp(&e, w, MPFR_RNDU);
      r = std::log2(m) + static_cast<double>(e);
    }
    mpfr_clear(w);
    return r;
  }

  bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
  bool contains(const Interval& o) const {
    return mpfr_lessequal_p(lo_, o.lo_) && mpfr_greaterequal_p(hi_, o.hi_);
  }
  bool contains(const mpq_class& q) const {
    return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
  }
  bool contains(double d) const { return mpfr_cmp_d(lo_, d) <= 0 && mpfr_cmp_d(hi_, d) >= 0; }
  bool intersects(const Interval& o) const {
    return mpfr_lessequal_p(lo_, o.hi_) && mpfr_lessequal_p(o.lo_, hi_);
  }
  bool is_point() const { return mpfr_equal_p(lo_, hi_); }

  bool certainly_positive() const { return mpfr_sgn(lo_) > 0; }
  bool certainly_negative() const { return mpfr_sgn(hi_) < 0; }
  bool certainly_nonzero() const { return certainly_positive() || certainly_negative(); }
  bool certainly_less(const Interval& o) const { return mpfr_less_p(hi_, o.lo_); }
  bool certainly_leq(const Interval& o) const { return mpfr_lessequal_p(hi_, o.lo_); }
  bool certainly_greater(const Interval& o) const { return o.certainly_less(*this); }
  bool possibly_leq(const Interval& o) const { return mpfr_lessequal_p(lo_, o.hi_); }

  Interval operator-() const {
    Interval r(prec());
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
  }
  friend Interval operator+(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    const mpfr_prec_t p = std::max(a.prec(), b.prec());
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    mpfr_srcptr as[2] = {a.lo_, a.hi_};
    mpfr_srcptr bs[2] = {b.lo_, b.hi_};
    bool first = true;
    for (auto x : as) {
      for (auto y : bs) {
        mpfr_mul(t, x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
        mpfr_mul(t, x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    }
    mpfr_clear(t);
    return r;
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw PrecisionExhausted("interval division by an interval containing zero");
    const mpfr_prec_t p = std::max(a.prec(), b.prec());
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    mpfr_srcptr as[2] = {a.lo_, a.hi_};
    mpfr_srcptr bs[2] = {b.lo_, b.hi_};
    bool first = true;
    for (auto x : as) {
      for (auto y : bs) {
        mpfr_div(t, x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
        mpfr_div(t, x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    }
    mpfr_clear(t);
    return r;
  }
  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  friend Interval sqr(const Interval& a) {
    Interval r = abs(a);
    Interval out(r.prec());
    mpfr_sqr(out.lo_, r.lo_, MPFR_RNDD);
    mpfr_sqr(out.hi_, r.hi_, MPFR_RNDU);
    return out;
  }
  friend Interval abs(const Interval& a) {
    Interval r(a.prec());
    if (mpfr_sgn(a.lo_) >= 0) return a;
    if (mpfr_sgn(a.hi_) <= 0) return -a;
    mpfr_set_zero(r.lo_, 1);
    if (mpfr_cmpabs(a.lo_, a.hi_) > 0) {
      mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
    } else {
      mpfr_set(r.hi_, a.hi_, MPFR_RNDU);
    }
    return r;
  }
  friend Interval sqrt(const Interval& a) {
    if (mpfr_sgn(a.hi_) < 0) throw InvalidInput("sqrt of a negative interval");
    Interval r(a.prec());
    if (mpfr_sgn(a.lo_) <= 0) {
      mpfr_set_zero(r.lo_, 1);
    } else {
      mpfr_sqrt(r.lo_, a.lo_, MPFR_RNDD);
    }
    mpfr_sqrt(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval log(const Interval& a) {
    if (!a.certainly_positive()) throw PrecisionExhausted("log of an interval not bounded away from zero");
    Interval r(a.prec());
    mpfr_log(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval exp(const Interval& a) {
    Interval r(a.prec());
    mpfr_exp(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }
  /// Real power a^b for a > 0.
  friend Interval pow(const Interval& a, const Interval& b) { return exp(b * log(a)); }
  friend Interval pow(const Interval& a, long n) {
    if (n == 0) return Interval(1, a.prec());
    if (n < 0) return Interval(1, a.prec()) / pow(a, -n);
    Interval result(1, a.prec());
    Interval base = a;
    // Even powers of a sign-straddling interval go through sqr to stay tight.
    while (n > 0) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n > 0) base = sqr(base);
    }
    return result;
  }
  friend Interval max(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval min(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  /// Smallest interval containing both.
  friend Interval hull(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  /// Intersection; throws if empty.
  friend Interval intersect(const Interval& a, const Interval& b) {
    if (!a.intersects(b)) throw Error("empty interval intersection");
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }

  static Interval pi(mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_const_pi(r.lo_, MPFR_RNDD);
    mpfr_const_pi(r.hi_, MPFR_RNDU);
    return r;
  }
  static Interval e(mpfr_prec_t prec) { return exp(Interval(1, prec)); }

  /// Interval with the given endpoints, rounded outward to `prec` bits.
  static Interval from_endpoints(mpfr_srcptr lo, mpfr_srcptr hi, mpfr_prec_t prec) {
    Interval out(prec);
    mpfr_set(out.lo_, lo, MPFR_RNDD);
    mpfr_set(out.hi_, hi, MPFR_RNDU);
    return out;
  }

  /// [a.lo, b.hi]; requires a.lo <= b.hi.
  static Interval span(const Interval& a, const Interval& b) {
    Interval out(std::max(a.prec(), b.prec()));
    mpfr_set(out.lo_, a.lo_, MPFR_RNDD);
    mpfr_set(out.hi_, b.hi_, MPFR_RNDU);
    if (mpfr_greater_p(out.lo_, out.hi_)) throw InvalidInput("empty span");
    return out;
  }

  /// Same enclosure stored at a different precision (rounded outward).
  Interval with_prec(mpfr_prec_t p) const {
    Interval out(p);
    mpfr_set(out.lo_, lo_, MPFR_RNDD);
    mpfr_set(out.hi_, hi_, MPFR_RNDU);
    return out;
  }

  /// Widens the interval to [lo - r, hi + r] for r >= 0.
  Interval inflated(const Interval& r) const {
    Interval out(prec());
    mpfr_sub(out.lo_, lo_, r.hi_, MPFR_RNDD);
    mpfr_add(out.hi_, hi_, r.hi_, MPFR_RNDU);
    return out;
  }

  /// Decimal rendering of an endpoint with the given significant digits,
  /// rounded outward.
  std::string lo_str(int digits = 20) const { return render(lo_, digits, MPFR_RNDD); }
  std::string hi_str(int digits = 20) const { return render(hi_, digits, MPFR_RNDU); }
  std::string mid_str(int digits = 20) const {
    Interval m = midpoint();
    return render(m.lo_, digits, MPFR_RNDN);
  }

  /// The unique integer contained in the interval, if its width is below one
  /// and it contains exactly one integer.
  bool unique_integer(mpz_class& out) const {
    mpfr_t c;
    mpfr_init2(c, prec());
    mpfr_ceil(c, lo_);
    bool ok = mpfr_lessequal_p(c, hi_);
    if (ok) {
      mpfr_t n;
      mpfr_init2(n, prec());
      mpfr_add_ui(n, c, 1, MPFR_RNDN);
      ok = mpfr_greater_p(n, hi_);
      mpfr_clear(n);
      if (ok) mpfr_get_z(out.get_mpz_t(), c, MPFR_RNDN);
    }
    mpfr_clear(c);
    return ok;
  }

 private:
  static std::string render(mpfr_srcptr x, int digits, mpfr_rnd_t rnd) {
    if (mpfr_zero_p(x)) return "0";
    char* buf = nullptr;
    std::string fmt = "%." + std::to_string(digits) + "R" + rnd_char(rnd) + "e";
    mpfr_asprintf(&buf, fmt.c_str(), x);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }
  static std::string rnd_char(mpfr_rnd_t rnd) {
    switch (rnd) {
      case MPFR_RNDD: return "D";
      case MPFR_RNDU: return "U";
      default: return "N";
    }
  }

  mpfr_t lo_;
  mpfr_t hi_;
};

/// Rectangular complex enclosure: re and im are independent intervals.
class CertifiedComplex {
 public:
  explicit CertifiedComplex(mpfr_prec_t prec = 128) : re_(prec), im_(prec) {}
  CertifiedComplex(Interval re, Interval im) : re_(std::move(re)), im_(std::move(im)) {}
  explicit CertifiedComplex(Interval re) : re_(std::move(re)), im_(re_.prec()) {}

  const Interval& re() const { return re_; }
  const Interval& im() const { return im_; }
  mpfr_prec_t prec() const { return std::max(re_.prec(), im_.prec()); }

  double re_mid() const { return re_.mid_d(); }
  double im_mid() const { return im_.mid_d(); }
  /// Upper bound on the distance from the midpoint to any enclosed point.
  double radius() const {
    Interval half_w = max(re_.width(), im_.width()) * Interval::from_double(0.5, prec());
    return (half_w * Interval::from_double(std::sqrt(2.0) * (1 + 1e-15), prec())).hi_d();
  }
  /// log2 of the larger side width.
  double log2_width() const { return std::max(re_.log2_width(), im_.log2_width()); }

  bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }
  bool contains(double re, double im) const { return re_.contains(re) && im_.contains(im); }
  bool intersects(const CertifiedComplex& o) const { return re_.intersects(o.re_) && im_.intersects(o.im_); }

  CertifiedComplex conj() const { return {re_, -im_}; }
  CertifiedComplex operator-() const { return {-re_, -im_}; }
  friend CertifiedComplex operator+(const CertifiedComplex& a, const CertifiedComplex& b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
  }
  friend CertifiedComplex operator-(const CertifiedComplex& a, const CertifiedComplex& b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
  }
  friend CertifiedComplex operator*(const CertifiedComplex& a, const CertifiedComplex& b) {
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
  }
  friend CertifiedComplex operator*(const CertifiedComplex& a, const Interval& s) {
    return {a.re_ * s, a.im_ * s};
  }
  friend CertifiedComplex operator/(const CertifiedComplex& a, const CertifiedComplex& b) {
    Interval den = sqr(b.re_) + sqr(b.im_);
    CertifiedComplex num = a * b.conj();
    return {num.re_ / den, num.im_ / den};
  }
  CertifiedComplex& operator+=(const CertifiedComplex& o) { return *this = *this + o; }
  CertifiedComplex& operator-=(const CertifiedComplex& o) { return *this = *this - o; }
  CertifiedComplex& operator*=(const CertifiedComplex& o) { return *this = *this * o; }

  /// Enclosure of |z|.
  Interval modulus() const {
    if (im_.is_point() && im_.contains_zero()) return abs(re_);
    return sqrt(sqr(re_) + sqr(im_));
  }
  /// Enclosure of |z|^2.
  Interval norm() const { return sqr(re_) + sqr(im_); }

  friend CertifiedComplex pow(const CertifiedComplex& z, long n) {
    if (n < 0) return CertifiedComplex(Interval(1, z.prec())) / pow(z, -n);
    CertifiedComplex result(Interval(1, z.prec()));
    CertifiedComplex base = z;
    while (n > 0) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n > 0) base = base * base;
    }
    return result;
  }

  CertifiedComplex midpoint() const { return {re_.midpoint(), im_.midpoint()}; }
  CertifiedComplex with_prec(mpfr_prec_t p) const { return {re_.with_prec(p), im_.with_prec(p)}; }

 private:
  Interval re_;
  Interval im_;
};

/// Enclosure of the principal argument in (-pi, pi].
inline Interval arg(const CertifiedComplex& z) {
  const mpfr_prec_t prec = z.prec();
  const Interval& re = z.re();
  const Interval& im = z.im();
  if (im.is_point() && im.contains_zero()) {
    if (re.certainly_positive()) return Interval(0, prec);
    if (re.certainly_negative()) return Interval::pi(prec);
  }
  if (z.contains_zero()) throw PrecisionExhausted("argument of an enclosure containing zero");
  if (re.contains_zero() && im.contains_zero()) throw PrecisionExhausted("argument enclosure too wide");
  if (!re.certainly_positive() && !im.certainly_nonzero()) {
    // Straddles the branch cut on the negative real axis.
    Interval p = Interval::pi(prec);
    return hull(-p, p);
  }
  mpfr_t lo, hi, t;
  mpfr_inits2(prec, lo, hi, t, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_inf(lo, 1);
  mpfr_set_inf(hi, -1);
  for (mpfr_srcptr y : {im.lo(), im.hi()})
    for (mpfr_srcptr x : {re.lo(), re.hi()}) {
      mpfr_atan2(t, y, x, MPFR_RNDD);
      mpfr_min(lo, lo, t, MPFR_RNDD);
      mpfr_atan2(t, y, x, MPFR_RNDU);
      mpfr_max(hi, hi, t, MPFR_RNDU);
    }
  Interval out = Interval::from_endpoints(lo, hi, prec);
  mpfr_clears(lo, hi, t, static_cast<mpfr_ptr>(nullptr));
  return out;
}

/// Principal logarithm log|z| + i arg z.
inline CertifiedComplex principal_log(const CertifiedComplex& z) { return {log(z.modulus()), arg(z)}; }

}  // namespace nilmix
