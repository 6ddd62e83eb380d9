#pragma once

// Absolute heights of algebraic numbers and relative heights of vectors.
//
// Archimedean absolute values are normalised so the product formula holds:
// a real place contributes |x|, a complex place (a conjugate pair of
// embeddings) contributes |x|^2.

#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/number_field.hpp"
#include "nilmix/exact/roots.hpp"

namespace nilmix {

struct HeightValue {
  Interval value;
  int degree = 0;  ///< degree of the minimal polynomial used
};

/// Field Q, represented as Q[x]/(x).
inline FieldPtr rational_field() { return make_field(IntPolynomial{0, 1}, true); }

/// Mahler measure |lead| * prod max(1, |root|) of an integer polynomial.
inline Interval mahler_measure(const IntPolynomial& p, long precision_bits = 128) {
  Interval m(mpz_class(abs(p.lead())), precision_bits);
  const Interval one(1, precision_bits);
  for (const auto& r : certified_roots(p, precision_bits)) m = m * max(one, r.modulus());
  return m;
}

/// H(u) = M(p)^{1/deg p} for the minimal polynomial p of u.
inline HeightValue height(const NumberFieldElement& u, long precision_bits = 128) {
  if (u.is_zero()) throw InvalidInput("height of zero");
  IntPolynomial p = u.minpoly();
  const int deg = p.degree();
  Interval m = mahler_measure(p, precision_bits + 16);
  Interval h = deg == 1 ? m : exp(log(m) / Interval(static_cast<long>(deg), m.prec()));
  return {h, deg};
}

/// An archimedean place: an embedding index and whether it is complex.
struct Place {
  int embedding = 0;
  bool complex = false;
};

/// One place per real embedding and per conjugate pair (the member with
/// positive imaginary part).
inline std::vector<Place> archimedean_places(const NumberField& k, long precision_bits = 64) {
  std::vector<Place> out;
  auto roots = k.roots(precision_bits);
  for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
    const Interval& im = roots[i].im();
    if (im.is_point() && im.contains_zero()) {
      out.push_back({i, false});
    } else if (im.certainly_positive()) {
      out.push_back({i, true});
    }
  }
  return out;
}

/// Normalised |x|_v.
inline Interval place_abs(const CertifiedComplex& embedded, const Place& v) {
  Interval a = embedded.modulus();
  return v.complex ? sqr(a) : a;
}

/// Relative height prod_v max(1, max_i |x_i|_v) over all places of the field.
/// Finite places contribute 1 when every entry is an algebraic integer; a
/// single entry is handled in general through its Mahler measure.
inline Interval vector_height(const std::vector<NumberFieldElement>& x, long precision_bits = 128) {
  if (x.empty()) throw InvalidInput("vector_height of an empty vector");
  const FieldPtr& k = x.front().field();
  for (const auto& e : x)
    if (!(*e.field() == *k)) throw InvalidInput("vector entries lie in different fields");
  bool integral = true;
  for (const auto& e : x) integral &= e.is_algebraic_integer();
  if (!integral) {
    if (x.size() != 1) throw UnsupportedInput("relative height of a non-integral vector with several entries");
    if (x[0].is_zero()) return Interval(1, precision_bits);
    // prod over all places of K of max(1,|x|_v) = H(x)^{[K:Q]}.
    HeightValue h = height(x[0], precision_bits);
    return pow(h.value, static_cast<long>(k->degree()));
  }
  const Interval one(1, precision_bits);
  std::vector<std::vector<CertifiedComplex>> emb;
  for (const auto& e : x) emb.push_back(e.embeddings(precision_bits));
  Interval h = one;
  for (const Place& v : archimedean_places(*k)) {
    Interval m = one;
    for (const auto& ee : emb) m = max(m, place_abs(ee[v.embedding], v));
    h = h * m;
  }
  return h;
}

}  // namespace nilmix
