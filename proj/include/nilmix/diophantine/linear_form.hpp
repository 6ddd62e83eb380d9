#pragma once

// Lower bounds for |u_1^{z_1} ... u_l^{z_l} u - 1|: the explicit constant
// chain of the linear-forms-in-logarithms estimate, the resulting shape
// bound, the certified empirical gap, and calibration of c1.

#include <optional>
#include <string>
#include <vector>

#include "nilmix/diophantine/height.hpp"
#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/matrix.hpp"
#include "nilmix/exact/number_field.hpp"

namespace nilmix {

/// All elements of one number field, evaluated at one complex embedding.
struct LogFormInstance {
  std::vector<NumberFieldElement> u_list;
  NumberFieldElement u;
  std::vector<long> z;
  int embedding = 0;
};

struct LinearFormParams {
  std::optional<Interval> c1, c2, c3;        ///< defaults: 1, e, e
  std::vector<std::optional<Interval>> a_overrides;  ///< A_0..A_l, unset entries use defaults
  std::optional<Interval> c;                 ///< constant in exp(-c U0), default 1
};

struct LinearFormChain {
  int l = 0;
  int D = 0;
  long z0 = 0;  ///< branch integer with log S = pi i z0 + sum z_i log u_i + log u
  std::vector<Interval> A;  ///< A_0..A_l
  Interval B, A_max, M, Z0, G0, U0;
  Interval c1, c2, c3;
  Interval condition_lhs, condition_rhs;  ///< sum |log u_i|/log A_i + |log u|/log B  vs  (l+2) D / e
  bool condition_holds = false;
  Interval height_u;
};

namespace detail {

inline long sup_norm(const std::vector<long>& z) {
  long s = 0;
  for (long v : z) s = std::max(s, std::labs(v));
  return s;
}

/// Dimension over Q of the algebra generated by the given elements.
inline int generated_degree(const std::vector<NumberFieldElement>& gens) {
  const FieldPtr& k = gens.front().field();
  const int n = k->degree();
  std::vector<std::vector<mpq_class>> basis;  // reduced rows
  auto reduce_in = [&](std::vector<mpq_class> v) {
    QMatrix m(static_cast<int>(basis.size()) + 1, n);
    for (size_t r = 0; r < basis.size(); ++r)
      for (int c = 0; c < n; ++c) m(static_cast<int>(r), c) = basis[r][c];
    for (int c = 0; c < n; ++c) m(static_cast<int>(basis.size()), c) = v[c];
    return rank(m) > static_cast<int>(basis.size());
  };
  std::vector<NumberFieldElement> span{NumberFieldElement::rational(k, 1)};
  basis.push_back(span[0].coords());
  for (size_t i = 0; i < span.size(); ++i)
    for (const auto& g : gens) {
      NumberFieldElement p = span[i] * g;
      if (reduce_in(p.coords())) {
        basis.push_back(p.coords());
        span.push_back(p);
      }
    }
  return static_cast<int>(basis.size());
}

inline NumberFieldElement product_value(const LogFormInstance& inst) {
  if (inst.u_list.size() != inst.z.size()) throw InvalidInput("u_list and z have different lengths");
  NumberFieldElement s = inst.u;
  for (size_t i = 0; i < inst.z.size(); ++i)
    if (inst.z[i] != 0) s = s * inst.u_list[i].pow(inst.z[i]);
  return s;
}

}  // namespace detail

/// The constant chain D, A_i, B, A, M, Z0, G0, U0 of the estimate, with
/// u_0 = -1 and log u_0 = pi i.
inline LinearFormChain linear_form_chain(const LogFormInstance& inst, const LinearFormParams& params = {},
                                          long precision_bits = 256) {
  const mpfr_prec_t prec = precision_bits;
  const int l = static_cast<int>(inst.u_list.size());
  if (l < 1 || static_cast<int>(inst.z.size()) != l) throw InvalidInput("need l >= 1 and |z| = l");
  const Interval e = Interval::e(prec);
  const Interval pi = Interval::pi(prec);
  LinearFormChain w;
  w.l = l;
  w.c1 = params.c1.value_or(Interval(1, prec));
  w.c2 = params.c2.value_or(e);
  w.c3 = params.c3.value_or(e);
  if (!w.c2.certainly_greater(Interval(1, prec)) || !w.c3.certainly_greater(Interval(1, prec)))
    throw InvalidInput("c2 and c3 must exceed 1");

  w.height_u = height(inst.u, prec).value;
  const Interval log_c2h = log(w.c2 * w.height_u);
  const long znorm = detail::sup_norm(inst.z);
  if (Interval(znorm, prec).certainly_less(log_c2h))
    throw InvalidInput("condition ||z|| >= log(c2 H(u)) is violated");

  std::vector<NumberFieldElement> gens = inst.u_list;
  gens.push_back(inst.u);
  w.D = detail::generated_degree(gens);
  const Interval D(static_cast<long>(w.D), prec);

  // Principal logarithms at the chosen embedding.
  std::vector<CertifiedComplex> logs;
  logs.emplace_back(Interval(0, prec), pi);  // log u_0 = pi i
  for (const auto& ui : inst.u_list) logs.push_back(principal_log(ui.embeddings(prec)[inst.embedding]));
  CertifiedComplex log_u = principal_log(inst.u.embeddings(prec)[inst.embedding]);

  // Branch integer z0.
  CertifiedComplex s_emb = detail::product_value(inst).embeddings(prec)[inst.embedding];
  Interval im_diff = arg(s_emb) - log_u.im();
  for (int i = 0; i < l; ++i) im_diff = im_diff - logs[i + 1].im() * Interval(inst.z[i], prec);
  mpz_class z0;
  if (!(im_diff / pi).unique_integer(z0)) throw PrecisionExhausted("could not determine the branch integer");
  w.z0 = z0.get_si();

  // A_i defaults: at least e, H(u_i), and exp(e |log u_i| / D) so each term
  // of the side condition is at most D/e.
  for (int i = 0; i <= l; ++i) {
    Interval hi = i == 0 ? Interval(1, prec) : height(inst.u_list[i - 1], prec).value;
    Interval a = max(e, max(hi, exp(e * logs[i].modulus() / D)));
    if (i < static_cast<int>(params.a_overrides.size()) && params.a_overrides[i]) {
      a = *params.a_overrides[i];
      if (!a.certainly_greater(e) && !a.contains(e)) throw InvalidInput("A_" + std::to_string(i) + " must be >= e");
      if (a.certainly_less(hi)) throw InvalidInput("A_" + std::to_string(i) + " is below H(u_" + std::to_string(i) + ")");
    }
    w.A.push_back(a);
  }
  w.B = w.c2 * w.height_u;
  if (w.B.certainly_less(e)) throw InvalidInput("B = c2 H(u) must be >= e");
  w.A_max = w.B;
  for (const auto& a : w.A) w.A_max = max(w.A_max, a);

  const Interval log_b = log(w.B);
  std::vector<long> zfull{w.z0};
  zfull.insert(zfull.end(), inst.z.begin(), inst.z.end());
  std::optional<Interval> m;
  for (int i = 0; i <= l; ++i) {
    Interval t = Interval(1, prec) / log(w.A[i]) + Interval(std::labs(zfull[i]), prec) / log_b;
    m = m ? max(*m, t) : t;
  }
  w.M = *m;
  w.Z0 = max(Interval(7, prec) + Interval(3, prec) * log(Interval(l + 2, prec)), log(D));
  w.G0 = max(Interval(4L * (l + 2), prec) * w.Z0, max(log(w.M), log(D)));
  Interval prod = pow(D, static_cast<long>(l + 4)) * w.G0 * w.Z0 * log_b;
  for (const auto& a : w.A) prod = prod * log(a);
  w.U0 = max(sqr(D) * log(w.A_max), prod);

  Interval lhs = log_u.modulus() / log_b;
  for (int i = 0; i <= l; ++i) lhs = lhs + logs[i].modulus() / log(w.A[i]);
  w.condition_lhs = lhs;
  w.condition_rhs = Interval(l + 2, prec) * D / e;
  w.condition_holds = lhs.certainly_leq(w.condition_rhs);
  return w;
}

struct LinearFormBound {
  Interval bound;       ///< exp(-c1 log(c2 H) log(c3 ||z|| / log(c2 H)))
  Interval proof_route; ///< exp(-c U0)
  LinearFormChain chain;
};

inline Interval shape_bound(const Interval& c1, const Interval& c2, const Interval& c3, const Interval& height_u,
                            long znorm) {
  const mpfr_prec_t prec = height_u.prec();
  Interval lb = log(c2 * height_u);
  return exp(-(c1 * lb * log(c3 * Interval(znorm, prec) / lb)));
}

inline bool is_degenerate(const LogFormInstance& inst) {
  NumberFieldElement s = detail::product_value(inst);
  return s == NumberFieldElement::rational(s.field(), 1);
}

inline LinearFormBound linear_form_bound(const LogFormInstance& inst, const LinearFormParams& params = {},
                                          long precision_bits = 256) {
  if (is_degenerate(inst)) throw DegenerateInstance("degenerate instance: the product equals 1 exactly");
  LinearFormBound r{Interval(precision_bits), Interval(precision_bits), linear_form_chain(inst, params, precision_bits)};
  r.bound = shape_bound(r.chain.c1, r.chain.c2, r.chain.c3, r.chain.height_u, detail::sup_norm(inst.z));
  Interval c = params.c.value_or(Interval(1, precision_bits));
  r.proof_route = exp(-(c * r.chain.U0));
  return r;
}

/// Certified |u_1^{z_1} ... u_l^{z_l} u - 1| with absolute radius below
/// 2^{-precision_bits} and positive lower bound.
inline Interval empirical_gap(const LogFormInstance& inst, long precision_bits = 256,
                              long cap = 4 * kDefaultPrecisionCap) {
  NumberFieldElement s = detail::product_value(inst);
  if (s == NumberFieldElement::rational(s.field(), 1))
    throw DegenerateInstance("degenerate instance: the product equals 1 exactly");
  for (long bits = precision_bits; bits <= cap; bits *= 2) {
    CertifiedComplex v = s.embeddings(bits, cap)[inst.embedding];
    Interval gap = (v - CertifiedComplex(Interval(1, v.prec()))).modulus();
    if (gap.certainly_positive() && gap.log2_width() <= -precision_bits) return gap;
  }
  throw PrecisionExhausted("gap enclosure did not separate from zero below the precision cap");
}

struct CalibrationResult {
  double c1 = 0;
  int binding_instance = -1;  ///< instance attaining the maximum requirement
};

/// Smallest c1 >= 0 (to relative tolerance `tol`) with the shape bound below the
/// gap on every instance, found by bisection on certified comparisons.
inline CalibrationResult calibrate_c1(const std::vector<LogFormInstance>& instances,
                                      const LinearFormParams& params = {}, long precision_bits = 256,
                                      double tol = 1e-9) {
  if (instances.empty()) throw InvalidInput("calibrate_c1 needs at least one instance");
  const mpfr_prec_t prec = precision_bits;
  const Interval c2 = params.c2.value_or(Interval::e(prec));
  const Interval c3 = params.c3.value_or(Interval::e(prec));
  struct Item {
    Interval gap, h;
    long znorm;
  };
  std::vector<Item> items;
  for (const auto& inst : instances) {
    Interval h = height(inst.u, prec).value;
    long zn = detail::sup_norm(inst.z);
    if (Interval(zn, prec).certainly_less(log(c2 * h))) throw InvalidInput("instance violates ||z|| >= log(c2 H(u))");
    items.push_back({empirical_gap(inst, precision_bits), h, zn});
  }
  auto ok = [&](double c1, int* failing) {
    Interval c1i = Interval::from_double(c1, prec);
    for (size_t i = 0; i < items.size(); ++i)
      if (!shape_bound(c1i, c2, c3, items[i].h, items[i].znorm).certainly_leq(items[i].gap)) {
        if (failing) *failing = static_cast<int>(i);
        return false;
      }
    return true;
  };
  CalibrationResult res;
  if (ok(0.0, nullptr)) return res;
  double lo = 0, hi = 1;
  int failing = -1;
  while (!ok(hi, &failing)) {
    lo = hi;
    hi *= 2;
    if (hi > 1e12) throw PrecisionExhausted("c1 calibration diverged");
  }
  while (hi - lo > tol * hi) {
    double mid = 0.5 * (lo + hi);
    if (ok(mid, &failing)) hi = mid;
    else lo = mid;
  }
  ok(lo, &failing);
  res.c1 = hi;
  res.binding_instance = failing;
  return res;
}

}  // namespace nilmix
