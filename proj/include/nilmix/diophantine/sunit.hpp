#pragma once

// Brute-force enumeration of solutions of the S-unit inequality
//   |b_1 + b_2 x_2 + ... + b_s x_s|_v < H(x)^{-eps}
// over units x_j = zeta * prod eta_k^{e_k} with exponents in a box, S being
// the archimedean places.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "nilmix/diophantine/height.hpp"
#include "nilmix/errors.hpp"
#include "nilmix/exact/galois.hpp"
#include "nilmix/exact/number_field.hpp"
#include "nilmix/exact/roots.hpp"

namespace nilmix {

struct SUnitInstance {
  FieldPtr field;
  std::vector<NumberFieldElement> fundamental_units;
  std::vector<NumberFieldElement> roots_of_unity;  ///< defaults to {1, -1}
  std::vector<NumberFieldElement> b;                ///< b_1..b_s, all nonzero
  int place = 0;                                    ///< index into archimedean_places
  mpq_class epsilon = 1;

  void validate() const {
    if (b.empty()) throw InvalidInput("need at least one coefficient b_1");
    for (const auto& x : b)
      if (x.is_zero()) throw InvalidInput("coefficients b_j must be nonzero");
    for (const auto& u : fundamental_units) {
      if (!u.is_algebraic_integer()) throw InvalidInput("fundamental unit is not an algebraic integer");
      mpq_class n = u.norm();
      if (n != 1 && n != -1) throw InvalidInput("fundamental unit does not have norm +-1");
    }
    for (const auto& z : roots_of_unity)
      if (!cyclotomic_index(z.minpoly())) throw InvalidInput("listed root of unity is not a root of unity");
    if (epsilon <= 0) throw InvalidInput("epsilon must be positive");
  }
};

struct SUnitSolution {
  /// Per unknown x_j (j = 2..s): root-of-unity index and unit exponents.
  std::vector<int> zeta_index;
  std::vector<std::vector<long>> exponents;
  std::vector<NumberFieldElement> x;
  bool nondegenerate = true;
  long max_exponent = 0;
  Interval lhs;     ///< |b_1 + sum b_j x_j|_v
  Interval rhs;     ///< H(x)^{-eps}
};

struct SUnitResult {
  std::vector<SUnitSolution> solutions;     ///< canonical order
  std::vector<SUnitSolution> undecided;     ///< comparison not certified below the precision cap
  bool partial = false;                     ///< enumeration budget exhausted
  std::uint64_t exact_ties = 0;             ///< candidates with |L|_v = H(x)^{-eps} exactly
  std::uint64_t candidates_checked = 0;
  int nondegenerate_count() const {
    return static_cast<int>(std::count_if(solutions.begin(), solutions.end(), [](const auto& s) { return s.nondegenerate; }));
  }
  /// Smallest box radius B0 such that enlarging the box beyond B0 (up to the
  /// searched radius) adds no nondegenerate solution.
  long stabilization_box() const {
    long b0 = 0;
    for (const auto& s : solutions)
      if (s.nondegenerate) b0 = std::max(b0, s.max_exponent);
    return b0;
  }
};

namespace detail {

/// True iff some nonempty proper subset of the terms sums to zero.
inline bool has_vanishing_proper_subsum(const std::vector<NumberFieldElement>& terms) {
  const int n = static_cast<int>(terms.size());
  if (n < 2) return false;
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    NumberFieldElement s = NumberFieldElement::rational(terms[0].field(), 0);
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) s = s + terms[i];
    if (s.is_zero()) return true;
  }
  return false;
}

/// Element whose image under embedding 0 is |y|_v^2.
inline NumberFieldElement squared_abs_element(const NumberFieldElement& y, const Place& v, int conj,
                                              const std::vector<FieldAutomorphism>& tau) {
  NumberFieldElement a = tau[v.embedding](y);
  if (v.complex) a = a * tau[conj](y);
  return a * a;
}

/// Decides |sum|_v = H(x)^{-eps} exactly in a Galois field with integral x.
/// With eps = p/q the equality reads A_v(sum)^q prod_w A_w(m_w)^p = 1, where
/// m_w is the entry of (1, x) of largest w-adic size. False when the
/// equality fails or cannot be set up.
inline bool exact_tie(const std::vector<NumberFieldElement>& x, const NumberFieldElement& sum, const Place& v,
                      const std::vector<Place>& places, const std::vector<int>& conj,
                      const std::vector<FieldAutomorphism>& tau, const mpq_class& eps, long bits) {
  const FieldPtr& k = sum.field();
  for (const auto& e : x)
    if (!e.is_algebraic_integer()) return false;
  if (!eps.get_num().fits_slong_p() || !eps.get_den().fits_slong_p()) return false;
  std::vector<NumberFieldElement> cand{NumberFieldElement::rational(k, 1)};
  cand.insert(cand.end(), x.begin(), x.end());
  std::vector<std::vector<CertifiedComplex>> emb;
  for (const auto& c : cand) emb.push_back(c.embeddings(bits));
  NumberFieldElement z = squared_abs_element(sum, v, conj[v.embedding], tau).pow(eps.get_den().get_si());
  NumberFieldElement prod = NumberFieldElement::rational(k, 1);
  for (const Place& w : places) {
    std::vector<Interval> size;
    for (const auto& e : emb) size.push_back(place_abs(e[w.embedding], w));
    size_t best = 0;
    for (size_t i = 1; i < size.size(); ++i)
      if (size[i].mid_d() > size[best].mid_d()) best = i;
    NumberFieldElement top = squared_abs_element(cand[best], w, conj[w.embedding], tau);
    for (size_t i = 0; i < size.size(); ++i)
      if (i != best && !size[i].certainly_less(size[best]) &&
          squared_abs_element(cand[i], w, conj[w.embedding], tau) != top)
        return false;
    prod = prod * top;
  }
  z = z * prod.pow(eps.get_num().get_si());
  return z == NumberFieldElement::rational(k, 1);
}

/// Index of the complex-conjugate embedding for each embedding.
inline std::vector<int> conjugate_embeddings(const NumberField& k) {
  auto r = k.roots(64);
  std::vector<int> out(r.size());
  for (size_t i = 0; i < r.size(); ++i) {
    size_t best = 0;
    double d = 1e300;
    for (size_t j = 0; j < r.size(); ++j) {
      double e = std::hypot(r[i].re_mid() - r[j].re_mid(), r[i].im_mid() + r[j].im_mid());
      if (e < d) d = e, best = j;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

}  // namespace detail

inline SUnitResult sunit_solutions(const SUnitInstance& inst_in, long box, std::uint64_t budget = 50'000'000,
                                   long precision_bits = 128, long cap = 1024) {
  SUnitInstance inst = inst_in;
  if (inst.roots_of_unity.empty())
    inst.roots_of_unity = {NumberFieldElement::rational(inst.field, 1), NumberFieldElement::rational(inst.field, -1)};
  inst.validate();
  if (box < 0) throw InvalidInput("exponent box must be nonnegative");
  const auto places = archimedean_places(*inst.field);
  if (inst.place < 0 || inst.place >= static_cast<int>(places.size())) throw InvalidInput("place index out of range");
  const Place v = places[inst.place];
  const auto tau = embedding_automorphisms(inst.field);
  const std::vector<int> conj = detail::conjugate_embeddings(*inst.field);
  const int s = static_cast<int>(inst.b.size());
  const int r = static_cast<int>(inst.fundamental_units.size());
  const int unknowns = s - 1;
  const int per_unknown_dims = r;

  // Precompute the unit powers eta_k^e for e in [-box, box].
  std::vector<std::vector<NumberFieldElement>> powers(r);
  for (int k = 0; k < r; ++k)
    for (long e = -box; e <= box; ++e) powers[k].push_back(inst.fundamental_units[k].pow(e));

  // All single-unknown values in canonical order (zeta index, then exponents).
  struct UnitValue {
    int zeta;
    std::vector<long> exps;
    NumberFieldElement value;
  };
  std::vector<UnitValue> values;
  for (int zi = 0; zi < static_cast<int>(inst.roots_of_unity.size()); ++zi) {
    std::vector<long> e(per_unknown_dims, -box);
    while (true) {
      NumberFieldElement x = inst.roots_of_unity[zi];
      for (int k = 0; k < r; ++k) x = x * powers[k][e[k] + box];
      values.push_back({zi, e, x});
      int pos = per_unknown_dims - 1;
      while (pos >= 0 && e[pos] == box) e[pos--] = -box;
      if (pos < 0) break;
      ++e[pos];
    }
  }

  SUnitResult res;
  const std::uint64_t nv = values.size();
  std::vector<std::uint64_t> idx(unknowns, 0);
  const mpq_class eps = inst.epsilon;
  while (true) {
    if (res.candidates_checked >= budget) {
      res.partial = true;
      break;
    }
    ++res.candidates_checked;
    std::vector<NumberFieldElement> terms{inst.b[0]};
    std::vector<NumberFieldElement> x;
    for (int j = 0; j < unknowns; ++j) {
      x.push_back(values[idx[j]].value);
      terms.push_back(inst.b[j + 1] * x.back());
    }
    NumberFieldElement sum = terms[0];
    for (int j = 1; j < s; ++j) sum = sum + terms[j];

    std::optional<bool> decided;
    Interval lhs(precision_bits), rhs(precision_bits);
    for (long bits = precision_bits; bits <= cap && !decided; bits *= 2) {
      Interval h = x.empty() ? Interval(1, bits) : vector_height(x, bits);
      rhs = exp(-(Interval(eps, bits) * log(h)));
      lhs = sum.is_zero() ? Interval(0, bits) : place_abs(sum.embeddings(bits)[v.embedding], v);
      if (lhs.certainly_less(rhs)) decided = true;
      else if (rhs.certainly_leq(lhs)) decided = false;
    }
    if (!decided && tau && detail::exact_tie(x, sum, v, places, conj, *tau, eps, cap)) {
      decided = false;  // equality, so the strict inequality fails
      ++res.exact_ties;
    }
    if (!decided || *decided) {
      SUnitSolution sol;
      for (int j = 0; j < unknowns; ++j) {
        sol.zeta_index.push_back(values[idx[j]].zeta);
        sol.exponents.push_back(values[idx[j]].exps);
        for (long e : values[idx[j]].exps) sol.max_exponent = std::max(sol.max_exponent, std::labs(e));
      }
      sol.x = x;
      sol.nondegenerate = !detail::has_vanishing_proper_subsum(terms);
      sol.lhs = lhs;
      sol.rhs = rhs;
      (decided ? res.solutions : res.undecided).push_back(std::move(sol));
    }
    int pos = unknowns - 1;
    while (pos >= 0 && idx[pos] + 1 == nv) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  return res;
}

}  // namespace nilmix
