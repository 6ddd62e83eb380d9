#pragma once

// Cocycles over Z^2 actions on tori with trigonometric-polynomial values:
// compatibility, the variance obstruction sigma^2, coboundary solving along
// dual orbits, and the rigidity pipeline.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nilmix/cocycle/dual_orbits.hpp"
#include "nilmix/errors.hpp"
#include "nilmix/exact/roots.hpp"
#include "nilmix/spectrum/action.hpp"
#include "nilmix/toral/trig_polynomial.hpp"

namespace nilmix {

/// c(a, .) = f_a and c(b, .) = f_b for the generators a, b.
struct TorusCocycle {
  ZlAction action;
  TrigPolynomial f_a, f_b;
};

struct CoefficientMismatch {
  Frequency frequency;
  ComplexQ lhs, rhs;  ///< coefficients of f_a o b + f_b and f_b o a + f_a
};

struct CocycleCertificate {
  bool valid = false;
  bool commute = false;
  bool generators_ergodic = false;
  bool exact = false;  ///< both values are exact trig polynomials
  bool compatible = false;
  std::vector<CoefficientMismatch> mismatches;
  ComplexQ c0_a, c0_b;      ///< means of f_a and f_b
  bool c0_additive = false;  ///< mean of c(a+b, .) equals c0_a + c0_b
  std::string report;
};

/// Coefficient-wise difference listing.
inline std::vector<CoefficientMismatch> coefficient_mismatches(const TrigPolynomial& p, const TrigPolynomial& q) {
  std::vector<CoefficientMismatch> out;
  std::map<Frequency, bool> keys;
  for (const auto& [a, v] : p.coeffs()) keys[a] = true;
  for (const auto& [a, v] : q.coeffs()) keys[a] = true;
  for (const auto& [a, unused] : keys)
    if (p.coeff(a) != q.coeff(a)) out.push_back({a, p.coeff(a), q.coeff(a)});
  return out;
}

inline bool is_ergodic_matrix(const UnimodularMatrix& m) { return roots_of_unity_free(m.charpoly()); }

inline CocycleCertificate cocycle_validate(const TorusCocycle& c) {
  CocycleCertificate cert;
  if (c.action.rank() != 2) {
    cert.report = "cocycle needs a rank-2 action";
    return cert;
  }
  const auto& a = c.action.generator(0);
  const auto& b = c.action.generator(1);
  cert.commute = a * b == b * a;
  cert.generators_ergodic = is_ergodic_matrix(a) && is_ergodic_matrix(b);
  cert.exact = c.f_a.is_exact() && c.f_b.is_exact();
  if (c.f_a.dim() != c.action.dim() || c.f_b.dim() != c.action.dim()) {
    cert.report = "cocycle values have the wrong dimension";
    return cert;
  }
  TrigPolynomial lhs = pullback(c.f_a, b) + c.f_b;
  TrigPolynomial rhs = pullback(c.f_b, a) + c.f_a;
  cert.mismatches = coefficient_mismatches(lhs, rhs);
  cert.compatible = cert.mismatches.empty();
  cert.c0_a = c.f_a.integral();
  cert.c0_b = c.f_b.integral();
  cert.c0_additive = lhs.integral() == cert.c0_a + cert.c0_b && rhs.integral() == cert.c0_a + cert.c0_b;
  cert.valid = cert.commute && cert.generators_ergodic && cert.exact && cert.compatible && cert.c0_additive;
  if (!cert.commute) cert.report += "generators do not commute; ";
  if (!cert.generators_ergodic) cert.report += "a generator is not ergodic; ";
  if (!cert.exact) cert.report += "cocycle values carry a tail; ";
  for (const auto& m : cert.mismatches) {
    cert.report += "compatibility fails at (";
    for (size_t i = 0; i < m.frequency.size(); ++i) cert.report += (i ? "," : "") + m.frequency[i].get_str();
    cert.report += "): " + m.lhs.re.get_str() + "+" + m.lhs.im.get_str() + "i vs " + m.rhs.re.get_str() + "+" +
                   m.rhs.im.get_str() + "i; ";
  }
  return cert;
}

/// (c - c0, c0).
inline std::pair<TorusCocycle, std::pair<ComplexQ, ComplexQ>> subtract_average(const TorusCocycle& c) {
  TorusCocycle z{c.action, c.f_a.zero_mean(), c.f_b.zero_mean()};
  return {z, {c.f_a.integral(), c.f_b.integral()}};
}

namespace detail {

inline std::vector<Frequency> support_of(const TrigPolynomial& f) {
  std::vector<Frequency> s;
  for (const auto& [a, v] : f.coeffs()) s.push_back(a);
  return s;
}

inline void check_single_matrix(const TrigPolynomial& f, const UnimodularMatrix& a) {
  if (f.dim() != a.dim()) throw InvalidInput("function and matrix dimensions differ");
  if (!f.is_exact()) throw InvalidInput("function must be an exact trig polynomial");
  if (!is_ergodic_matrix(a)) throw InvalidInput("matrix is not ergodic: dual orbits may recur");
}

}  // namespace detail

struct SigmaSquared {
  mpq_class value;         ///< orbit-sum value
  ComplexQ series_value;   ///< series value (exact)
  bool routes_agree = false;
  long series_terms = 0;   ///< last i with a nonzero cross term
  DualOrbitDecomposition orbits;
};

/// sigma^2 = int f^2 + 2 sum_{i>=1} <f o a^i, f>, computed term by term, and
/// as sum over dual orbits of |sum_k f^(m_k)|^2.
inline SigmaSquared sigma_squared(const TrigPolynomial& f, const UnimodularMatrix& a) {
  detail::check_single_matrix(f, a);
  if (!f.integral().is_zero()) throw InvalidInput("sigma^2 needs a zero-mean function");
  if (!f.is_real()) throw InvalidInput("sigma^2 needs a real-valued function");
  SigmaSquared out;
  DualOrbitIndex index(ZlAction({a}));
  out.orbits = dual_orbits(index, detail::support_of(f));
  ComplexQ orbit_route;
  long span = 0;
  for (const auto& o : out.orbits.orbits) {
    ComplexQ s;
    for (const auto& [k, m] : o.members) s += f.coeff(m);
    orbit_route += ComplexQ{s.norm(), 0};
    span = std::max(span, o.last() - o.first());
  }
  // Series: <f o a^i, f> = sum_n (f o a^i)^(n) conj(f^(n)); zero once i exceeds every orbit span.
  ComplexQ series;
  for (const auto& [n, v] : f.coeffs()) series += ComplexQ{v.norm(), 0};
  UnimodularMatrix power = a;
  for (long i = 1; i <= span; ++i) {
    TrigPolynomial g = pullback(f, power);
    ComplexQ term;
    for (const auto& [n, v] : g.coeffs()) term += v * f.coeff(n).conj();
    if (!term.is_zero()) out.series_terms = i;
    series += ComplexQ{2, 0} * term;
    power = power * a;
  }
  out.series_value = series;
  out.value = orbit_route.re;
  out.routes_agree = series == orbit_route;
  return out;
}

struct OrbitObstruction {
  Frequency representative;
  ComplexQ sum;
};

struct CoboundaryResult {
  std::optional<TrigPolynomial> phi;
  std::vector<OrbitObstruction> obstructions;
  DualOrbitDecomposition orbits;
  bool verified = false;  ///< phi o a - phi == f checked exactly
};

/// Solves f = phi o a - phi in trig polynomials. Along a dual orbit m_k =
/// (a^T)^k m_0 the coefficients satisfy f^(m_k) = phi^(m_{k-1}) - phi^(m_k);
/// phi^ is anchored to 0 before the first support point, so
/// phi^(m_k) = -sum_{j <= k} f^(m_j), and a solution exists iff each orbit sum
/// vanishes.
inline CoboundaryResult coboundary_solve(const TrigPolynomial& f, const UnimodularMatrix& a) {
  detail::check_single_matrix(f, a);
  CoboundaryResult res;
  const int d = f.dim();
  if (!f.integral().is_zero()) res.obstructions.push_back({Frequency(d, 0), f.integral()});
  DualOrbitIndex index(ZlAction({a}));
  res.orbits = dual_orbits(index, detail::support_of(f));
  TrigPolynomial phi(d);
  UnimodularMatrix at = a.transpose();
  for (const auto& o : res.orbits.orbits) {
    ComplexQ total;
    for (const auto& [k, m] : o.members) total += f.coeff(m);
    if (!total.is_zero()) {
      res.obstructions.push_back({o.representative, total});
      continue;
    }
    ComplexQ partial;
    Frequency m = o.representative;
    size_t next = 0;
    for (long k = 0; k < o.last(); ++k) {
      if (next < o.members.size() && o.members[next].first == k) {
        partial += f.coeff(o.members[next].second);
        ++next;
      }
      phi.set(m, ComplexQ{} - partial);
      m = transform_frequency(at.matrix(), m);
    }
  }
  if (!res.obstructions.empty()) return res;
  TrigPolynomial check = pullback(phi, a) + ComplexQ{-1, 0} * phi;
  res.verified = check == f;
  if (!res.verified) throw Error("internal: coboundary verification failed");
  res.phi = phi;
  return res;
}

/// phi o a - phi.
inline TrigPolynomial coboundary_of(const TrigPolynomial& phi, const UnimodularMatrix& a) {
  return pullback(phi, a) + ComplexQ{-1, 0} * phi;
}

/// c(b^j, .) = sum_{i<j} f_b o b^i for j >= 0.
inline TrigPolynomial cocycle_power(const TrigPolynomial& f_b, const UnimodularMatrix& b, long j) {
  if (j < 0) throw InvalidInput("cocycle_power needs j >= 0");
  TrigPolynomial h(f_b.dim());
  UnimodularMatrix p = UnimodularMatrix::identity(b.dim());
  for (long i = 0; i < j; ++i) {
    h = h + pullback(f_b, p);
    p = p * b;
  }
  return h;
}

/// sum_{i=-n}^{n} (f o a^i b^j - f o a^i) == h o a^{n+1} - h o a^{-n},
/// h = c(b^j, .), checked coefficient-wise.
inline bool telescoping_identity_holds(const TorusCocycle& c, long n, long j) {
  const auto& a = c.action.generator(0);
  const auto& b = c.action.generator(1);
  TrigPolynomial lhs(c.f_a.dim());
  UnimodularMatrix bj = b.power(j);
  for (long i = -n; i <= n; ++i) {
    UnimodularMatrix ai = a.power(i);
    lhs = lhs + pullback(c.f_a, ai * bj) + ComplexQ{-1, 0} * pullback(c.f_a, ai);
  }
  TrigPolynomial h = cocycle_power(c.f_b, b, j);
  TrigPolynomial rhs = pullback(h, a.power(n + 1)) + ComplexQ{-1, 0} * pullback(h, a.power(-n));
  return lhs == rhs;
}

struct HigherRankSum {
  ComplexQ value;                 ///< sum over (i,j) of <f o a^i b^j, f>
  std::vector<IntVector> terms;   ///< (i,j) with a nonzero contribution
};

/// Every pair of support frequencies related by the dual Z^2 action
/// contributes f^(m) conj(f^(n)) at the unique (i,j); all other terms vanish.
inline HigherRankSum higher_rank_sum(const TrigPolynomial& f, const ZlAction& action) {
  HigherRankSum out;
  DualOrbitIndex index(action);
  std::map<IntVector, ComplexQ> by_time;
  for (const auto& [n, vn] : f.coeffs())
    for (const auto& [m, vm] : f.coeffs()) {
      if (DualOrbitIndex::is_zero_frequency(n) != DualOrbitIndex::is_zero_frequency(m)) continue;
      if (DualOrbitIndex::is_zero_frequency(n)) throw InvalidInput("higher-rank sum needs a zero-mean function");
      // (f o alpha(z))^ at alpha(z)^T n equals f^(n); pairing with f^ at m = alpha(z)^T n.
      auto z = index.relate(n, m);
      if (!z) continue;
      by_time[*z] += vn * vm.conj();
    }
  for (const auto& [z, v] : by_time)
    if (!v.is_zero()) {
      out.terms.push_back(z);
      out.value += v;
    }
  return out;
}

struct RigidityReport {
  CocycleCertificate certificate;
  std::pair<ComplexQ, ComplexQ> constants;
  std::optional<TrigPolynomial> phi;
  SigmaSquared sigma;
  bool telescoping_ok = false;
  HigherRankSum higher_rank;
  bool second_generator_ok = false;  ///< f_b - (phi o b - phi) == 0
  bool falsification = false;        ///< sigma^2 != 0 on a validated cocycle
  std::vector<OrbitObstruction> obstructions;
  std::string trace;
};

struct RigidityOptions {
  long telescoping_n = 3;
  long telescoping_j = 2;
};

inline RigidityReport rigidity_pipeline(const TorusCocycle& c, const RigidityOptions& opt = {}) {
  RigidityReport r;
  r.certificate = cocycle_validate(c);
  if (!r.certificate.valid) throw InvalidInput("cocycle rejected: " + r.certificate.report);
  auto [z, constants] = subtract_average(c);
  r.constants = constants;
  const auto& a = c.action.generator(0);
  const auto& b = c.action.generator(1);
  r.telescoping_ok = telescoping_identity_holds(z, opt.telescoping_n, opt.telescoping_j);
  if (!r.telescoping_ok) r.trace += "telescoping identity failed; ";
  r.higher_rank = higher_rank_sum(z.f_a, c.action);
  r.sigma = sigma_squared(z.f_a, a);
  if (!r.sigma.routes_agree) r.trace += "sigma^2 routes disagree; ";
  if (r.sigma.value != 0) {
    r.falsification = true;
    r.trace += "sigma^2 = " + r.sigma.value.get_str() + " for a compatible cocycle; ";
  }
  CoboundaryResult cb = coboundary_solve(z.f_a, a);
  r.obstructions = cb.obstructions;
  if (cb.phi) {
    r.phi = cb.phi;
    r.second_generator_ok = coboundary_of(*cb.phi, b) == z.f_b;
    if (!r.second_generator_ok) {
      r.falsification = true;
      r.trace += "f_b is not the coboundary of the transfer function for a; ";
    }
  } else {
    r.falsification = true;
    r.trace += "no trig-polynomial transfer function for a; ";
  }
  return r;
}

}  // namespace nilmix
