#pragma once

// Commuting unimodular Z^l actions and their simultaneous spectrum.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/matrix.hpp"
#include "nilmix/exact/number_field.hpp"
#include "nilmix/exact/roots.hpp"

namespace nilmix {

using IntVector = std::vector<long>;

class ZlAction {
 public:
  ZlAction() = default;
  explicit ZlAction(std::vector<UnimodularMatrix> generators) : gens_(std::move(generators)) {
    if (gens_.empty()) throw InvalidInput("action needs at least one generator");
    const int d = gens_[0].dim();
    for (const auto& g : gens_)
      if (g.dim() != d) throw InvalidInput("generators have different dimensions");
    for (size_t i = 0; i < gens_.size(); ++i)
      for (size_t j = i + 1; j < gens_.size(); ++j)
        if (!(gens_[i] * gens_[j] == gens_[j] * gens_[i]))
          throw InvalidInput("generators " + std::to_string(i) + " and " + std::to_string(j) + " do not commute");
  }
  int rank() const { return static_cast<int>(gens_.size()); }
  int dim() const { return gens_[0].dim(); }
  const std::vector<UnimodularMatrix>& generators() const { return gens_; }
  const UnimodularMatrix& generator(int i) const { return gens_.at(i); }

  /// alpha(z) = prod A_i^{z_i}.
  UnimodularMatrix at(const IntVector& z) const {
    if (static_cast<int>(z.size()) != rank()) throw InvalidInput("exponent vector has wrong length");
    UnimodularMatrix m = UnimodularMatrix::identity(dim());
    for (int i = 0; i < rank(); ++i)
      if (z[i] != 0) m = m * gens_[i].power(z[i]);
    return m;
  }

 private:
  std::vector<UnimodularMatrix> gens_;
};

/// A joint eigenvalue system. `values[i]` is the eigenvalue of generator i as
/// an element of the orbit field; the character itself is obtained from the
/// embedding `embedding_index` of that field.
struct Character {
  std::vector<NumberFieldElement> values;
  std::vector<NumberFieldElement> eigenvector;
  int embedding_index = 0;
  int orbit = 0;

  const FieldPtr& field() const { return values.front().field(); }
  int rank() const { return static_cast<int>(values.size()); }

  /// chi(z) as an exact element of the orbit field.
  NumberFieldElement value_at(const IntVector& z) const {
    if (static_cast<int>(z.size()) != rank()) throw InvalidInput("exponent vector has wrong length");
    NumberFieldElement r = NumberFieldElement::rational(field(), 1);
    for (int i = 0; i < rank(); ++i)
      if (z[i] != 0) r = r * values[i].pow(z[i]);
    return r;
  }
  /// Certified enclosure of chi(z).
  CertifiedComplex embedded_value(const IntVector& z, long precision_bits) const {
    return value_at(z).embeddings(precision_bits)[embedding_index];
  }
};

struct GaloisOrbit {
  std::vector<Character> members;
  const FieldPtr& field() const { return members.front().field(); }
  int size() const { return static_cast<int>(members.size()); }
};

struct SpectrumOptions {
  int max_attempts = 32;
  std::uint64_t seed = 0x5eed;
};

namespace detail {

inline bool poly_less(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = a.degree(); i >= 0; --i)
    if (a.coeff(i) != b.coeff(i)) return a.coeff(i) < b.coeff(i);
  return false;
}

inline Matrix<NumberFieldElement> lift(const IntMatrix& m, const FieldPtr& k) {
  Matrix<NumberFieldElement> out(m.rows(), m.cols(), NumberFieldElement::rational(k, 0));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = NumberFieldElement::rational(k, mpq_class(m(i, j)));
  return out;
}

inline std::vector<NumberFieldElement> apply_int(const IntMatrix& m, const std::vector<NumberFieldElement>& v) {
  const FieldPtr& k = v.front().field();
  std::vector<NumberFieldElement> out;
  for (int i = 0; i < m.rows(); ++i) {
    NumberFieldElement s = NumberFieldElement::rational(k, 0);
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) s = s + NumberFieldElement::rational(k, mpq_class(m(i, j))) * v[j];
    out.push_back(std::move(s));
  }
  return out;
}

/// Spectrum attempt for one splitting combination; false if it does not
/// separate the joint eigenspaces.
inline bool try_split(const ZlAction& action, const IntMatrix& comb, std::vector<Character>& out) {
  const int d = action.dim();
  IntPolynomial p = char_poly(comb);
  auto factors = factor_monic(p);
  std::sort(factors.begin(), factors.end(), [](const auto& a, const auto& b) { return poly_less(a.first, b.first); });
  int orbit = 0;
  for (const auto& [q, mult] : factors) {
    FieldPtr k = make_field(q, true);
    NumberFieldElement theta = NumberFieldElement::generator(k);
    Matrix<NumberFieldElement> m = lift(comb, k);
    for (int i = 0; i < d; ++i) m(i, i) = m(i, i) - theta;
    auto kernel = nullspace(m, NumberFieldElement::rational(k, 0), NumberFieldElement::rational(k, 1));
    if (static_cast<int>(kernel.size()) != mult) return false;  // not semisimple on this factor
    std::vector<NumberFieldElement> mu;
    for (const auto& g : action.generators()) {
      std::vector<NumberFieldElement> img0 = apply_int(g.matrix(), kernel[0]);
      int r = 0;
      while (kernel[0][r].is_zero()) ++r;
      NumberFieldElement s = img0[r] / kernel[0][r];
      for (const auto& v : kernel) {
        std::vector<NumberFieldElement> img = apply_int(g.matrix(), v);
        for (int i = 0; i < d; ++i)
          if (img[i] != s * v[i]) return false;
      }
      mu.push_back(std::move(s));
    }
    for (int copy = 0; copy < mult; ++copy) {
      for (int e = 0; e < q.degree(); ++e) {
        Character c;
        c.values = mu;
        c.eigenvector = kernel[copy];
        c.embedding_index = e;
        c.orbit = orbit;
        out.push_back(std::move(c));
      }
      ++orbit;
    }
  }
  return static_cast<int>(out.size()) == d;
}

}  // namespace detail

/// All d joint characters with multiplicity, each with an exact common
/// eigenvector over its orbit field. A_i v = chi(e_i) v is verified exactly.
inline std::vector<Character> simultaneous_spectrum(const ZlAction& action, const SpectrumOptions& opt = {}) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<long> coef(-10, 10);
  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    std::vector<long> c(action.rank(), 0);
    if (attempt == 0) {
      c[0] = 1;
    } else {
      bool nonzero = false;
      while (!nonzero)
        for (auto& v : c) nonzero |= (v = coef(rng)) != 0;
    }
    IntMatrix comb(action.dim(), action.dim());
    for (int i = 0; i < action.rank(); ++i)
      if (c[i] != 0) comb = comb + mpz_class(c[i]) * action.generator(i).matrix();
    std::vector<Character> chars;
    if (detail::try_split(action, comb, chars)) return chars;
  }
  throw UnsupportedInput("could not split the action into joint eigenspaces (non-semisimple action?) after " +
                         std::to_string(opt.max_attempts) + " attempts");
}

/// Groups characters into Galois orbits.
inline std::vector<GaloisOrbit> galois_orbits(const std::vector<Character>& chars) {
  std::vector<GaloisOrbit> orbits;
  for (const auto& c : chars) {
    if (c.orbit >= static_cast<int>(orbits.size())) orbits.resize(c.orbit + 1);
    orbits[c.orbit].members.push_back(c);
  }
  return orbits;
}

}  // namespace nilmix
