#pragma once

// Certified complex root enclosures for integer polynomials, cyclotomic
// detection, factorisation of monic integer polynomials, and Sturm counting.
//
// Root certification uses the Weierstrass inclusion theorem: for distinct
// approximations z_1..z_n of the roots of p (degree n, leading coefficient a)
// and W_i = p(z_i) / (a * prod_{j != i} (z_i - z_j)), every connected component
// of the union of the disks |z - z_i| <= n |W_i| made of m disks contains
// exactly m roots. Disjoint disks therefore isolate one root each.

#include <algorithm>
#include <complex>
#include <cmath>
#include <functional>
#include <optional>
#include <numeric>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/polynomial.hpp"

namespace nilmix {

/// Default cap on working precision for certified operations.
inline constexpr long kDefaultPrecisionCap = 4096;

inline Interval to_interval(const mpz_class& v, mpfr_prec_t prec) { return Interval(v, prec); }
inline Interval to_interval(const mpq_class& v, mpfr_prec_t prec) { return Interval(v, prec); }

template <typename T>
CertifiedComplex eval(const Polynomial<T>& p, const CertifiedComplex& z) {
  const mpfr_prec_t prec = z.prec();
  CertifiedComplex acc(prec);
  for (int i = p.degree(); i >= 0; --i) acc = acc * z + CertifiedComplex(to_interval(p.coeff(i), prec));
  return acc;
}

template <typename T>
Interval eval(const Polynomial<T>& p, const Interval& x) {
  const mpfr_prec_t prec = x.prec();
  Interval acc(prec);
  for (int i = p.degree(); i >= 0; --i) acc = acc * x + to_interval(p.coeff(i), prec);
  return acc;
}

namespace detail {

using cld = std::complex<long double>;

/// Aberth-Ehrlich iteration in extended double precision.
inline std::vector<cld> aberth_initial(const IntPolynomial& p) {
  const int n = p.degree();
  std::vector<long double> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = p.coeff(i).get_d();
  // Cauchy bound for the starting circle.
  long double bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(c[i] / c[n]));
  bound = 1 + bound;
  std::vector<cld> z(n);
  for (int k = 0; k < n; ++k) {
    long double ang = 2.0L * 3.14159265358979323846L * k / n + 0.4L;
    z[k] = std::polar(bound * 0.5L, ang);
  }
  auto val = [&](cld x, cld& d) {
    cld v = c[n];
    d = 0;
    for (int i = n - 1; i >= 0; --i) {
      d = d * x + v;
      v = v * x + c[i];
    }
    return v;
  };
  for (int it = 0; it < 500; ++it) {
    long double maxstep = 0;
    for (int k = 0; k < n; ++k) {
      cld d;
      cld v = val(z[k], d);
      if (v == cld(0)) continue;
      cld ratio = v / d;
      cld s = 0;
      for (int j = 0; j < n; ++j)
        if (j != k) s += cld(1) / (z[k] - z[j]);
      cld step = ratio / (cld(1) - ratio * s);
      z[k] -= step;
      maxstep = std::max(maxstep, std::abs(step) / (1 + std::abs(z[k])));
    }
    if (maxstep < 1e-17L) break;
  }
  return z;
}

inline CertifiedComplex point(long double re, long double im, mpfr_prec_t prec) {
  return CertifiedComplex(Interval::from_double(static_cast<double>(re), prec),
                          Interval::from_double(static_cast<double>(im), prec));
}

/// Simultaneous Aberth refinement at working precision; returns point values.
inline std::vector<CertifiedComplex> refine(const IntPolynomial& p, std::vector<CertifiedComplex> z, int iterations) {
  const int n = p.degree();
  IntPolynomial dp = p.derivative();
  for (int it = 0; it < iterations; ++it) {
    for (int k = 0; k < n; ++k) {
      CertifiedComplex v = eval(p, z[k]).midpoint();
      if (v.contains_zero()) continue;
      CertifiedComplex d = eval(dp, z[k]).midpoint();
      if (d.contains_zero()) continue;
      CertifiedComplex ratio = (v / d).midpoint();
      CertifiedComplex s(z[k].prec());
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        CertifiedComplex diff = (z[k] - z[j]).midpoint();
        if (diff.contains_zero()) continue;
        s = (s + CertifiedComplex(Interval(1, z[k].prec())) / diff).midpoint();
      }
      CertifiedComplex den = (CertifiedComplex(Interval(1, z[k].prec())) - ratio * s).midpoint();
      if (den.contains_zero()) continue;
      z[k] = (z[k] - ratio / den).midpoint();
    }
  }
  return z;
}

/// Attempts to certify disjoint enclosures of radius <= 2^{-target_bits};
/// empty result on failure.
inline std::vector<CertifiedComplex> certify(const IntPolynomial& p, const std::vector<CertifiedComplex>& z,
                                             long target_bits) {
  const int n = p.degree();
  const mpfr_prec_t prec = z.front().prec();
  // Rectangle enclosures have radius sqrt(2) times the disk radius.
  const Interval target = pow(Interval(2, prec), -(target_bits + 1));
  std::vector<Interval> radii;
  for (int i = 0; i < n; ++i) {
    CertifiedComplex den(Interval(p.lead(), prec));
    for (int j = 0; j < n; ++j)
      if (j != i) den = den * (z[i] - z[j]);
    if (den.contains_zero()) return {};
    Interval r = (eval(p, z[i]) / den).modulus() * Interval(static_cast<long>(n), prec);
    if (!r.certainly_leq(target)) return {};
    radii.push_back(std::move(r));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!(z[i] - z[j]).modulus().certainly_greater(radii[i] + radii[j])) return {};
  std::vector<CertifiedComplex> out;
  for (int i = 0; i < n; ++i) {
    Interval re = z[i].re().inflated(radii[i]);
    if (z[i].im().is_point() && z[i].im().contains_zero()) {
      // An isolating disk centred on the real axis holds a real root, since
      // the conjugate root lies in the same disk.
      out.emplace_back(re, Interval(0, prec));
    } else {
      out.emplace_back(re, z[i].im().inflated(radii[i]));
    }
  }
  return out;
}

inline bool root_order(const CertifiedComplex& a, const CertifiedComplex& b) {
  const bool ar = a.im().is_point() && a.im().contains_zero();
  const bool br = b.im().is_point() && b.im().contains_zero();
  if (ar != br) return ar;
  double are = a.re_mid(), bre = b.re_mid();
  if (are != bre) return are > bre;
  return a.im_mid() > b.im_mid();
}

/// Certified roots of a squarefree polynomial of degree >= 1.
inline std::vector<CertifiedComplex> squarefree_roots(const IntPolynomial& p, long target_bits, long cap) {
  const int n = p.degree();
  if (n == 1) {
    mpq_class r(-p.coeff(0), p.coeff(1));
    r.canonicalize();
    std::vector<CertifiedComplex> out;
    out.emplace_back(Interval(r, target_bits + 64), Interval(0, target_bits + 64));
    return out;
  }
  std::vector<cld> init = aberth_initial(p);
  mpfr_prec_t w = std::max<long>(96, target_bits + 64);
  std::vector<CertifiedComplex> z;
  for (auto& v : init) z.push_back(point(v.real(), v.imag(), w));
  int iterations = 8;
  while (w <= cap + 64) {
    for (auto& v : z) v = v.midpoint().with_prec(w);
    z = refine(p, z, iterations);
    // Try with nearly real approximations moved onto the real axis first.
    std::vector<CertifiedComplex> snapped = z;
    const double tiny = std::ldexp(1.0, -static_cast<int>(std::min<long>(w / 2, 1000)));
    for (auto& v : snapped)
      if (std::fabs(v.im_mid()) <= tiny * (1 + std::fabs(v.re_mid()))) v = CertifiedComplex(v.re(), Interval(0, w));
    auto cert = certify(p, snapped, target_bits);
    if (cert.empty()) cert = certify(p, z, target_bits);
    if (!cert.empty()) {
      std::sort(cert.begin(), cert.end(), root_order);
      return cert;
    }
    w *= 2;
    iterations += 4;
  }
  throw PrecisionExhausted("root certification failed below the precision cap of " + std::to_string(cap) + " bits");
}

}  // namespace detail

/// Pairwise-disjoint enclosures of the complex roots of p, one per root
/// counted with multiplicity (a repeated root appears once per multiplicity
/// with the same enclosure). Each enclosure has radius <= 2^{-precision_bits}.
/// Order: real roots by decreasing value, then complex roots by decreasing
/// real part, then decreasing imaginary part.
inline std::vector<CertifiedComplex> certified_roots(const IntPolynomial& p, long precision_bits,
                                                     long cap = kDefaultPrecisionCap) {
  if (p.degree() < 1) throw InvalidInput("certified_roots of a constant polynomial");
  if (precision_bits <= 0) throw InvalidInput("precision must be positive");
  auto parts = squarefree_decomposition(p);
  std::vector<std::pair<CertifiedComplex, int>> all;
  for (const auto& [a, k] : parts) {
    for (auto& r : detail::squarefree_roots(a, precision_bits, cap)) all.emplace_back(std::move(r), k);
  }
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j)
      if (all[i].first.intersects(all[j].first))
        throw PrecisionExhausted("root enclosures of distinct squarefree factors overlap");
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return detail::root_order(a.first, b.first); });
  std::vector<CertifiedComplex> out;
  for (auto& [r, k] : all)
    for (int i = 0; i < k; ++i) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Cyclotomic polynomials

inline long euler_phi(long n) {
  long result = n;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

inline IntPolynomial cyclotomic(long n) {
  if (n < 1) throw InvalidInput("cyclotomic index must be positive");
  IntPolynomial num = IntPolynomial::monomial(1, static_cast<int>(n)) - IntPolynomial::constant(1);
  for (long d = 1; d < n; ++d)
    if (n % d == 0) num = num / cyclotomic(d);
  return num;
}

/// Every k with phi(k) <= degree.
inline std::vector<long> cyclotomic_indices_up_to_degree(int degree) {
  std::vector<long> ks;
  const long kmax = 2L * degree * degree + 2;
  for (long k = 1; k <= kmax; ++k)
    if (euler_phi(k) <= degree) ks.push_back(k);
  return ks;
}

/// True iff p has no root of unity among its roots.
inline bool roots_of_unity_free(const IntPolynomial& p) {
  if (p.degree() < 1) throw InvalidInput("roots_of_unity_free of a constant polynomial");
  for (long k : cyclotomic_indices_up_to_degree(p.degree()))
    if (gcd(p, cyclotomic(k)).degree() > 0) return false;
  return true;
}

/// If p (up to sign and content) equals a cyclotomic polynomial, its index.
inline std::optional<long> cyclotomic_index(const IntPolynomial& p) {
  if (p.degree() < 1) return std::nullopt;
  IntPolynomial q = primitive_part(p);
  for (long k : cyclotomic_indices_up_to_degree(q.degree()))
    if (euler_phi(k) == q.degree() && cyclotomic(k) == q) return k;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Factorisation of monic integer polynomials by certified root grouping.

/// Irreducible factors over Q of a monic integer polynomial, with
/// multiplicities. Each factor is monic with integer coefficients.
inline std::vector<std::pair<IntPolynomial, int>> factor_monic(const IntPolynomial& p,
                                                               long cap = kDefaultPrecisionCap) {
  if (p.degree() < 1) return {};
  if (abs(p.lead()) != 1) throw InvalidInput("factor_monic requires a monic polynomial");
  std::vector<std::pair<IntPolynomial, int>> out;
  for (const auto& [part, mult] : squarefree_decomposition(p)) {
    IntPolynomial rest = part;
    long bits = 64;
    while (rest.degree() > 0) {
      if (rest.degree() == 1) {
        out.emplace_back(rest, mult);
        break;
      }
      if (bits > cap) throw PrecisionExhausted("factorisation exceeded the precision cap");
      std::vector<CertifiedComplex> roots = detail::squarefree_roots(rest, bits, cap);
      const int m = static_cast<int>(roots.size());
      bool found = false, ambiguous = false;
      for (int size = 1; size <= m / 2 && !found; ++size) {
        std::vector<int> idx(size);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
          // product of (x - r) over the chosen roots, in interval arithmetic
          std::vector<CertifiedComplex> coef(1, CertifiedComplex(Interval(1, roots[0].prec())));
          for (int k : idx) {
            std::vector<CertifiedComplex> next(coef.size() + 1, CertifiedComplex(roots[0].prec()));
            for (size_t t = 0; t < coef.size(); ++t) {
              next[t + 1] = next[t + 1] + coef[t];
              next[t] = next[t] - coef[t] * roots[k];
            }
            coef = std::move(next);
          }
          bool integral = true;
          std::vector<mpz_class> ic;
          for (auto& c : coef) {
            mpz_class re_int, im_int;
            if (!c.im().contains_zero()) {
              integral = false;
              break;
            }
            if (!c.re().unique_integer(re_int)) {
              if (c.re().width_d() >= 0.5) ambiguous = true;
              integral = false;
              break;
            }
            ic.push_back(re_int);
          }
          if (integral) {
            IntPolynomial cand(ic);
            auto [q, r] = to_rational(rest).divmod(to_rational(cand));
            if (r.is_zero()) {
              out.emplace_back(cand, mult);
              rest = primitive_part(q);
              found = true;
              break;
            }
          }
          // next combination
          int pos = size - 1;
          while (pos >= 0 && idx[pos] == m - size + pos) --pos;
          if (pos < 0) break;
          ++idx[pos];
          for (int t = pos + 1; t < size; ++t) idx[t] = idx[t - 1] + 1;
        }
      }
      if (!found) {
        if (ambiguous) {
          bits *= 2;
          continue;
        }
        out.emplace_back(rest, mult);
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sturm sequences

inline std::vector<QPolynomial> sturm_sequence(const QPolynomial& p) {
  std::vector<QPolynomial> seq{p, p.derivative()};
  while (!seq.back().is_zero() && seq.back().degree() > 0) {
    QPolynomial r = seq[seq.size() - 2] % seq.back();
    if (r.is_zero()) break;
    seq.push_back(-r);
  }
  return seq;
}

inline int sign_changes(const std::vector<QPolynomial>& seq, const mpq_class& x) {
  int changes = 0, last = 0;
  for (const auto& q : seq) {
    mpq_class v = q(x);
    int s = sgn(v);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

/// Number of distinct real roots of p in the closed interval [a, b].
inline int count_real_roots(const IntPolynomial& p, const mpq_class& a, const mpq_class& b) {
  if (p.degree() < 1 || a > b) return 0;
  QPolynomial sf = to_rational(radical(p));
  int extra = 0;
  if (sf(a) == 0) {
    sf = sf / QPolynomial::linear_root(a);
    extra = 1;
  }
  if (sf.degree() < 1) return extra;
  // V(a) - V(b) counts the roots in (a, b] when a is not a root.
  auto seq = sturm_sequence(sf);
  return extra + sign_changes(seq, a) - sign_changes(seq, b);
}

/// For a palindromic polynomial of even degree 2m, the q with p(x) = x^m q(x + 1/x).
inline IntPolynomial reciprocal_trace_polynomial(const IntPolynomial& p) {
  const int n = p.degree();
  if (n % 2 != 0) throw InvalidInput("trace substitution needs even degree");
  const int m = n / 2;
  // Dickson polynomials D_j(y) = x^j + x^{-j}: D_0 = 2, D_1 = y.
  std::vector<IntPolynomial> dj{IntPolynomial{2}, IntPolynomial{0, 1}};
  for (int j = 2; j <= m; ++j) dj.push_back(IntPolynomial{0, 1} * dj[j - 1] - dj[j - 2]);
  IntPolynomial q = IntPolynomial::constant(p.coeff(m));
  for (int j = 1; j <= m; ++j) q = q + dj[j] * p.coeff(m + j);
  return q;
}

/// Exact decision: does the irreducible (or any squarefree) integer
/// polynomial p have a root of modulus exactly one?
inline bool has_unit_circle_root(const IntPolynomial& p) {
  for (const auto& [a, k] : squarefree_decomposition(p)) {
    IntPolynomial f = primitive_part(a);
    if (f(1) == 0 || f(-1) == 0) return true;
    // Strip the factors x -+ 1 (already excluded) and test each remaining
    // palindromic part; a non-palindromic irreducible factor has no root on
    // the unit circle, so test gcd(f, reversed f) which collects the
    // self-reciprocal part.
    IntPolynomial g = gcd(f, primitive_part(reversed(f)));
    if (g.degree() < 1) continue;
    if (g.degree() % 2 != 0) continue;  // odd palindromic parts carry the root -1, excluded above
    IntPolynomial gp = primitive_part(g);
    if (!(reversed(gp) == gp)) continue;
    IntPolynomial q = reciprocal_trace_polynomial(gp);
    if (count_real_roots(q, mpq_class(-2), mpq_class(2)) > 0) return true;
  }
  return false;
}

}  // namespace nilmix
