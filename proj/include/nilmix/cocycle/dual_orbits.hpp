#pragma once

// Orbits of the dual action n -> alpha(z)^T n on frequencies.
//
// For an eigenvector w of the action (alpha(z) w = chi(z) w) the linear form
// phi(n) = <w, n> satisfies phi(alpha(z)^T n) = chi(z) phi(n). Whether
// m = alpha(z)^T n for some z is decided by solving the logarithmic system
// log|sigma(phi(m)/phi(n))| = sum_j z_j log|sigma(chi_j)| at certified
// precision and checking the integer candidate exactly.

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/number_field.hpp"
#include "nilmix/spectrum/action.hpp"
#include "nilmix/spectrum/lyapunov.hpp"
#include "nilmix/toral/trig_polynomial.hpp"

namespace nilmix {

class DualOrbitIndex {
 public:
  explicit DualOrbitIndex(const ZlAction& action, long precision_bits = 128, long cap = 2048)
      : action_(action), bits_(precision_bits), cap_(cap) {
    auto chars = simultaneous_spectrum(action);
    std::vector<bool> seen;
    for (const auto& c : chars) {
      if (c.orbit >= static_cast<int>(seen.size())) seen.resize(c.orbit + 1, false);
      if (seen[c.orbit]) continue;
      seen[c.orbit] = true;
      reps_.push_back(c);
    }
    for (const auto& g : action.generators()) transposed_.push_back(g.transpose());
  }

  const ZlAction& action() const { return action_; }

  /// alpha(z)^T n.
  Frequency act(const IntVector& z, const Frequency& n) const {
    Frequency out = n;
    for (int j = 0; j < action_.rank(); ++j)
      if (z[j] != 0) out = transform_frequency(transposed_[j].power(z[j]).matrix(), out);
    return out;
  }

  /// The z with alpha(z)^T n = m, if one exists. For a free dual action it
  /// is unique.
  std::optional<IntVector> relate(const Frequency& n, const Frequency& m) const {
    const int l = action_.rank();
    if (n == m) return IntVector(l, 0);
    if (is_zero_frequency(n) || is_zero_frequency(m)) return std::nullopt;
    struct Part {
      const Character* chi;
      NumberFieldElement ratio;
    };
    std::vector<Part> parts;
    for (const auto& c : reps_) {
      NumberFieldElement pn = form(c, n), pm = form(c, m);
      if (pn.is_zero() != pm.is_zero()) return std::nullopt;
      if (pn.is_zero()) continue;
      NumberFieldElement r = pm / pn;
      mpq_class nr = r.norm();
      if (nr != 1 && nr != -1) return std::nullopt;
      parts.push_back({&c, r});
    }
    for (long bits = bits_; bits <= cap_; bits *= 2) {
      std::vector<std::vector<Interval>> rows;
      std::vector<Interval> rhs;
      for (const auto& p : parts) {
        std::vector<std::vector<CertifiedComplex>> values;
        for (const auto& v : p.chi->values) values.push_back(v.embeddings(bits));
        auto rv = p.ratio.embeddings(bits);
        for (size_t e = 0; e < rv.size(); ++e) {
          std::vector<Interval> row;
          for (int j = 0; j < l; ++j) row.push_back(log(values[j][e].modulus()));
          rows.push_back(row);
          rhs.push_back(log(rv[e].modulus()));
        }
      }
      if (static_cast<int>(rows.size()) < l) throw UnsupportedInput("dual action is not faithful on this frequency");
      std::optional<std::vector<Interval>> sol;
      bool any_invertible = false;
      detail::for_each_subset(static_cast<int>(rows.size()), l, [&](const std::vector<int>& idx) {
        if (sol) return;
        std::vector<std::vector<Interval>> a;
        std::vector<Interval> b;
        for (int i : idx) {
          a.push_back(rows[i]);
          b.push_back(rhs[i]);
        }
        auto s = detail::interval_solve(a, b);
        if (s) {
          any_invertible = true;
          sol = s;
        }
      });
      if (!any_invertible) {
        if (bits * 2 > cap_) throw UnsupportedInput("logarithmic system is singular: dual action is not free");
        continue;
      }
      IntVector z(l);
      bool decided = true;
      for (int j = 0; j < l; ++j) {
        const Interval& x = (*sol)[j];
        double lo = std::ceil(x.lo_d()), hi = std::floor(x.hi_d());
        if (lo > hi) return std::nullopt;  // no integer in the enclosure
        if (lo < hi) {
          decided = false;
          break;
        }
        z[j] = static_cast<long>(lo);
      }
      if (!decided) continue;
      if (act(z, n) == m) return z;
      return std::nullopt;
    }
    throw PrecisionExhausted("could not isolate the exponent relating two frequencies");
  }

  static bool is_zero_frequency(const Frequency& n) {
    return std::all_of(n.begin(), n.end(), [](const mpz_class& v) { return v == 0; });
  }

 private:
  static NumberFieldElement form(const Character& c, const Frequency& n) {
    NumberFieldElement s = NumberFieldElement::rational(c.field(), 0);
    for (size_t i = 0; i < n.size(); ++i)
      if (n[i] != 0) s = s + NumberFieldElement::rational(c.field(), mpq_class(n[i])) * c.eigenvector[i];
    return s;
  }

  ZlAction action_;
  std::vector<Character> reps_;
  std::vector<UnimodularMatrix> transposed_;
  long bits_, cap_;
};

/// One orbit of a single matrix a^T restricted to a finite frequency set:
/// members are listed by their position k, meaning frequency (a^T)^k rep.
struct DualOrbitSegment {
  Frequency representative;
  std::vector<std::pair<long, Frequency>> members;  ///< sorted by position
  long first() const { return members.front().first; }
  long last() const { return members.back().first; }
};

struct DualOrbitDecomposition {
  std::vector<DualOrbitSegment> orbits;
};

/// Partitions the nonzero frequencies of `support` into orbits of a^T; each
/// representative is the member of smallest position, placed at position 0.
inline DualOrbitDecomposition dual_orbits(const DualOrbitIndex& index, const std::vector<Frequency>& support) {
  if (index.action().rank() != 1) throw InvalidInput("dual orbit segments need a single matrix");
  DualOrbitDecomposition out;
  for (const auto& n : support) {
    if (DualOrbitIndex::is_zero_frequency(n)) continue;
    bool placed = false;
    for (auto& o : out.orbits) {
      auto z = index.relate(o.representative, n);
      if (!z) continue;
      bool dup = false;
      for (const auto& mem : o.members) dup |= mem.first == (*z)[0];
      if (!dup) o.members.push_back({(*z)[0], n});
      placed = true;
      break;
    }
    if (!placed) out.orbits.push_back({n, {{0, n}}});
  }
  for (auto& o : out.orbits) {
    std::sort(o.members.begin(), o.members.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    long shift = o.members.front().first;
    for (auto& mem : o.members) mem.first -= shift;
    o.representative = o.members.front().second;
  }
  return out;
}

}  // namespace nilmix
