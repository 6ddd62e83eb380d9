#pragma once

// Automorphisms of a Galois number field, found numerically and verified
// exactly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <vector>

#include "nilmix/exact/number_field.hpp"

namespace nilmix {

/// An automorphism tau of K, stored as tau(theta).
class FieldAutomorphism {
 public:
  explicit FieldAutomorphism(NumberFieldElement image) : image_(std::move(image)) {}
  const NumberFieldElement& image() const { return image_; }
  NumberFieldElement operator()(const NumberFieldElement& y) const {
    const auto& c = y.coords();
    NumberFieldElement acc = NumberFieldElement::rational(y.field(), 0);
    for (int m = static_cast<int>(c.size()) - 1; m >= 0; --m)
      acc = acc * image_ + NumberFieldElement::rational(y.field(), c[m]);
    return acc;
  }

 private:
  NumberFieldElement image_;
};

namespace detail {

/// Solves V c = y for the Vandermonde matrix V_ik = t_i^k.
inline std::vector<std::complex<double>> vandermonde_solve(const std::vector<std::complex<double>>& t,
                                                           std::vector<std::complex<double>> y) {
  const int n = static_cast<int>(t.size());
  std::vector<std::vector<std::complex<double>>> a(n, std::vector<std::complex<double>>(n));
  for (int i = 0; i < n; ++i) {
    std::complex<double> p = 1;
    for (int k = 0; k < n; ++k, p *= t[i]) a[i][k] = p;
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(y[col], y[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      std::complex<double> f = a[r][col] / a[col][col];
      for (int k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      y[r] -= f * y[col];
    }
  }
  for (int i = 0; i < n; ++i) y[i] /= a[i][i];
  return y;
}

/// |disc(f)| as det of the trace form; d * O_K lies in Z[theta] for some d
/// dividing it.
inline mpz_class discriminant_abs(const FieldPtr& k) {
  const int n = k->degree();
  QMatrix m(n, n);
  NumberFieldElement t = NumberFieldElement::generator(k);
  std::vector<NumberFieldElement> powers{NumberFieldElement::rational(k, 1)};
  for (int i = 1; i < 2 * n; ++i) powers.push_back(powers.back() * t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = powers[i + j].trace();
  mpq_class d = determinant(m);
  return abs(d.get_num());
}

}  // namespace detail

/// For a Galois field, automorphisms tau_k with sigma_0 o tau_k = sigma_k
/// for every embedding index k; nullopt when K is not Galois or the degree
/// is too large for the search.
inline std::optional<std::vector<FieldAutomorphism>> embedding_automorphisms(const FieldPtr& k, int max_degree = 6) {
  const int n = k->degree();
  if (n > max_degree) return std::nullopt;
  auto roots = k->roots(128);
  std::vector<std::complex<double>> t;
  for (const auto& r : roots) t.emplace_back(r.re_mid(), r.im_mid());
  if (n == 1) return std::vector<FieldAutomorphism>{FieldAutomorphism(NumberFieldElement::generator(k))};
  const mpz_class disc = detail::discriminant_abs(k);
  const double scale = disc.get_d();

  std::vector<FieldAutomorphism> out;
  for (int j = 0; j < n; ++j) {
    std::optional<FieldAutomorphism> found;
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
      if (i != j) rest.push_back(i);
    do {
      std::vector<std::complex<double>> y{t[j]};
      for (int i : rest) y.push_back(t[i]);
      auto c = detail::vandermonde_solve(t, y);
      std::vector<mpq_class> coords;
      bool ok = true;
      for (const auto& ci : c) {
        if (std::fabs(ci.imag()) * scale > 0.25) {
          ok = false;
          break;
        }
        coords.emplace_back(mpz_class(static_cast<long>(std::llround(ci.real() * scale))), disc);
        coords.back().canonicalize();
      }
      if (!ok) continue;
      NumberFieldElement g(k, coords);
      // Exact check: g is a root of the defining polynomial.
      NumberFieldElement fg = NumberFieldElement::rational(k, 0);
      for (int m = n; m >= 0; --m) fg = fg * g + NumberFieldElement::rational(k, mpq_class(k->defining().coeff(m)));
      if (!fg.is_zero()) continue;
      auto e = g.embeddings(64)[0];
      if (std::abs(std::complex<double>(e.re_mid(), e.im_mid()) - t[j]) > 1e-6 * (1 + std::abs(t[j]))) continue;
      found.emplace(g);
    } while (!found && std::next_permutation(rest.begin(), rest.end()));
    if (!found) return std::nullopt;
    out.push_back(*found);
  }
  return out;
}

}  // namespace nilmix
