#pragma once

// Exact multiple correlations of trigonometric polynomials under a Z^l
// action on T^d, separation statistics of time tuples, and decay fits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/roots.hpp"
#include "nilmix/spectrum/action.hpp"
#include "nilmix/toral/trig_polynomial.hpp"

namespace nilmix {

struct FrequencyHash {
  size_t operator()(const Frequency& a) const {
    size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& x : a) {
      size_t v = mpz_size(x.get_mpz_t()) ? mpz_getlimbn(x.get_mpz_t(), 0) : 0;
      v ^= static_cast<size_t>(mpz_sgn(x.get_mpz_t()) + 1) << 1;
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct CorrelationResult {
  ComplexQ value;           ///< exact correlation of the listed terms
  mpq_class radius = 0;     ///< bound on the contribution of the tails
  std::uint64_t matched_tuples = 0;
  std::uint64_t tuple_tests = 0;
  CertifiedComplex enclosure(mpfr_prec_t prec = 128) const {
    Interval r(radius, prec);
    CertifiedComplex v = value.enclose(prec);
    return {v.re().inflated(r), v.im().inflated(r)};
  }
};

/// Tail contribution bound sum_i tail_i prod_{j != i} (l1_j + tail_j).
inline mpq_class correlation_radius(const std::vector<TrigPolynomial>& fs) {
  mpq_class r = 0;
  for (size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].tail() == 0) continue;
    mpq_class t = fs[i].tail();
    for (size_t j = 0; j < fs.size(); ++j)
      if (j != i) t *= fs[j].l1_mass() + fs[j].tail();
    r += t;
  }
  return r;
}

/// Integral of prod_i f_i(M_i x) given the pulled-back functions f_i o M_i:
/// the sum over frequency tuples adding to zero of the coefficient products.
/// Meet in the middle: partial sums of the first half are hashed.
inline CorrelationResult correlate_pulled(const std::vector<TrigPolynomial>& g, std::uint64_t budget = 100'000'000) {
  if (g.size() < 2) throw InvalidInput("correlation needs at least two functions");
  const int d = g[0].dim();
  const size_t n = g.size();
  // Choose the split that balances the two enumeration sizes.
  size_t split = 1;
  double best = INFINITY;
  for (size_t h = 1; h < n; ++h) {
    double left = 1, right = 1;
    for (size_t i = 0; i < h; ++i) left *= static_cast<double>(g[i].support_size());
    for (size_t i = h; i < n; ++i) right *= static_cast<double>(g[i].support_size());
    if (left + right < best) {
      best = left + right;
      split = h;
    }
  }
  CorrelationResult res;
  if (best > static_cast<double>(budget))
    throw BudgetExceeded("correlation enumeration needs " + std::to_string(best) + " tuple tests, budget " +
                         std::to_string(budget));
  struct Acc {
    ComplexQ sum;
    std::uint64_t count = 0;
  };
  // Enumerate all tuples of a range of factors: callback(frequency sum, coefficient product).
  auto enumerate = [&](size_t from, size_t to, const std::function<void(const Frequency&, const ComplexQ&)>& cb) {
    std::vector<std::map<Frequency, ComplexQ>::const_iterator> it(to - from);
    for (size_t i = from; i < to; ++i) {
      if (g[i].coeffs().empty()) return;
      it[i - from] = g[i].coeffs().begin();
    }
    while (true) {
      Frequency s(d, 0);
      ComplexQ prod{1, 0};
      for (size_t k = 0; k < it.size(); ++k) {
        for (int c = 0; c < d; ++c) s[c] += it[k]->first[c];
        prod = prod * it[k]->second;
      }
      cb(s, prod);
      bool done = true;
      for (size_t pos = it.size(); pos-- > 0;) {
        if (++it[pos] != g[from + pos].coeffs().end()) {
          done = false;
          break;
        }
        it[pos] = g[from + pos].coeffs().begin();
      }
      if (done) return;
    }
  };
  std::unordered_map<Frequency, Acc, FrequencyHash> left;
  enumerate(0, split, [&](const Frequency& s, const ComplexQ& p) {
    ++res.tuple_tests;
    Acc& a = left[s];
    a.sum += p;
    ++a.count;
  });
  enumerate(split, n, [&](const Frequency& s, const ComplexQ& p) {
    ++res.tuple_tests;
    Frequency neg = s;
    for (auto& x : neg) x = -x;
    auto f = left.find(neg);
    if (f == left.end()) return;
    res.value += f->second.sum * p;
    res.matched_tuples += f->second.count;
  });
  res.radius = correlation_radius(g);
  return res;
}

/// Integral over T^d of prod_i f_i(alpha(z_i) x).
inline CorrelationResult multi_correlation(const std::vector<TrigPolynomial>& fs, const std::vector<IntVector>& zs,
                                           const ZlAction& action, std::uint64_t budget = 100'000'000) {
  if (fs.size() != zs.size()) throw InvalidInput("function and time lists differ in length");
  if (fs.size() < 2) throw InvalidInput("correlation needs s >= 1");
  std::vector<TrigPolynomial> g;
  for (size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].dim() != action.dim()) throw InvalidInput("function dimension differs from the action dimension");
    g.push_back(pullback(fs[i], action.at(zs[i])));
  }
  return correlate_pulled(g, budget);
}

/// prod_i integral(f_i), exact for the listed terms.
inline ComplexQ product_of_integrals(const std::vector<TrigPolynomial>& fs) {
  ComplexQ p{1, 0};
  for (const auto& f : fs) p = p * f.integral();
  return p;
}

struct SeparationStats {
  long min_separation = 0;            ///< min_{i != j} ||z_i - z_j||_inf; N = exp(this)
  Interval N;
  std::optional<Interval> n_star;     ///< min over characters and ordered pairs of |chi(z_i - z_j)| >= 1
  std::optional<Interval> n_star_bang;  ///< max over characters of the per-character minimum
  int n_star_character = -1;
  std::pair<int, int> n_star_pair{-1, -1};
  /// The min-over-characters display admits two parses; the global minimum
  /// over the restricted set is used.
  std::string n_star_parse = "global minimum over characters and ordered pairs of values >= 1";
};

namespace detail {

/// Decides |v| >= 1 for an exact algebraic v at a given embedding.
inline std::optional<Interval> modulus_if_at_least_one(const NumberFieldElement& v, int embedding, long prec) {
  std::optional<bool> unit_root;
  for (long bits = prec; bits <= 2048; bits *= 2) {
    Interval m = v.embeddings(bits)[embedding].modulus();
    Interval one(1, bits);
    if (m.certainly_less(one)) return std::nullopt;
    if (one.certainly_leq(m) && !m.contains(one)) return m;
    if (!unit_root) unit_root = has_unit_circle_root(v.minpoly());
    if (!*unit_root) continue;  // cannot equal 1: refine
    if (bits * 2 > 2048) return m;  // modulus 1 within every enclosure: treated as |v| = 1
  }
  return v.embeddings(prec)[embedding].modulus();
}

}  // namespace detail

inline SeparationStats separation_stats(const ZlAction& action, const std::vector<IntVector>& zs,
                                        long precision_bits = 128) {
  if (zs.size() < 2) throw InvalidInput("separation needs at least two times");
  SeparationStats st;
  st.min_separation = -1;
  for (size_t i = 0; i < zs.size(); ++i)
    for (size_t j = i + 1; j < zs.size(); ++j) {
      long sep = 0;
      for (size_t k = 0; k < zs[i].size(); ++k) sep = std::max(sep, std::labs(zs[i][k] - zs[j][k]));
      if (sep == 0) throw InvalidInput("times must be pairwise distinct");
      st.min_separation = st.min_separation < 0 ? sep : std::min(st.min_separation, sep);
    }
  st.N = exp(Interval(st.min_separation, precision_bits));

  const auto chars = simultaneous_spectrum(action);
  for (int c = 0; c < static_cast<int>(chars.size()); ++c) {
    std::optional<Interval> per_char;
    for (size_t i = 0; i < zs.size(); ++i)
      for (size_t j = 0; j < zs.size(); ++j) {
        if (i == j) continue;
        IntVector w(zs[i].size());
        for (size_t k = 0; k < w.size(); ++k) w[k] = zs[i][k] - zs[j][k];
        auto m = detail::modulus_if_at_least_one(chars[c].value_at(w), chars[c].embedding_index, precision_bits);
        if (!m) continue;
        if (!per_char || m->certainly_less(*per_char) || (!per_char->certainly_less(*m) && m->mid_d() < per_char->mid_d()))
          per_char = *m;
        if (!st.n_star || m->certainly_less(*st.n_star) ||
            (!st.n_star->certainly_less(*m) && m->mid_d() < st.n_star->mid_d())) {
          st.n_star = *m;
          st.n_star_character = c;
          st.n_star_pair = {static_cast<int>(i), static_cast<int>(j)};
        }
      }
    if (per_char && (!st.n_star_bang || st.n_star_bang->certainly_less(*per_char) ||
                     (!per_char->certainly_less(*st.n_star_bang) && per_char->mid_d() > st.n_star_bang->mid_d())))
      st.n_star_bang = *per_char;
  }
  return st;
}

struct DecaySample {
  double x = 0;           ///< log N (power model) or n (shape model)
  long separation = 0;    ///< separation parameter used for the onset
  ComplexQ deviation;     ///< exact corr - prod of integrals of the listed terms
  mpq_class radius = 0;   ///< tail radius
};

enum class DecayModel { NPower, RhoPower };

struct DecayFit {
  bool fitted = false;
  double slope = 0;       ///< fitted slope of log|deviation| against x
  double intercept = 0;
  double rate = 0;        ///< eta_hat = -slope (NPower) or rho_hat = exp(slope) (RhoPower)
  std::vector<double> residuals;
  int used_samples = 0;
  std::optional<long> zero_onset;  ///< smallest separation from which every deviation is exactly 0
  /// C with |deviation| <= C * exp(slope x) on every nonzero sample.
  double envelope_constant() const {
    double m = 0;
    for (double r : residuals) m = std::max(m, r);
    return std::exp(intercept + m);
  }
};

inline DecayFit decay_fit(std::vector<DecaySample> samples, DecayModel model) {
  if (samples.empty()) throw InvalidInput("decay fit needs samples");
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.separation < b.separation; });
  DecayFit fit;
  for (size_t i = samples.size(); i-- > 0;) {
    if (!samples[i].deviation.is_zero()) break;
    fit.zero_onset = samples[i].separation;
  }
  std::vector<double> xs, ys;
  for (const auto& s : samples) {
    if (s.deviation.is_zero()) continue;
    xs.push_back(s.x);
    ys.push_back(std::log(s.deviation.modulus_d()));
  }
  fit.used_samples = static_cast<int>(xs.size());
  if (xs.size() < 2) return fit;
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw DegenerateInstance("decay fit is degenerate: all samples at one separation");
  fit.fitted = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (size_t i = 0; i < xs.size(); ++i) fit.residuals.push_back(ys[i] - (fit.intercept + fit.slope * xs[i]));
  fit.rate = model == DecayModel::NPower ? -fit.slope : std::exp(fit.slope);
  return fit;
}

}  // namespace nilmix
