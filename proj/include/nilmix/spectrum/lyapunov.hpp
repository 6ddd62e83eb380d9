#pragma once

// The Lyapunov map of a Galois orbit, its uniform growth constant on the
// sup-norm sphere, and ergodicity / Anosov decisions.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/roots.hpp"
#include "nilmix/spectrum/action.hpp"

namespace nilmix {

/// Rows: orbit members; columns: generators. Entry log|chi(e_i)|.
inline std::vector<std::vector<Interval>> log_matrix(const GaloisOrbit& orbit, long precision_bits) {
  const int l = orbit.members.front().rank();
  std::vector<std::vector<CertifiedComplex>> emb;
  for (int i = 0; i < l; ++i) emb.push_back(orbit.members.front().values[i].embeddings(precision_bits));
  std::vector<std::vector<Interval>> out;
  for (const auto& c : orbit.members) {
    std::vector<Interval> row;
    for (int i = 0; i < l; ++i) row.push_back(log(emb[i][c.embedding_index].modulus()));
    out.push_back(std::move(row));
  }
  return out;
}

/// Certified enclosures of log|chi(z)| for each member of the orbit.
inline std::vector<Interval> lyapunov_map(const GaloisOrbit& orbit, const IntVector& z, long precision_bits = 128) {
  const int l = orbit.members.front().rank();
  if (static_cast<int>(z.size()) != l) throw InvalidInput("exponent vector has wrong length");
  auto lm = log_matrix(orbit, precision_bits);
  std::vector<Interval> out;
  for (const auto& row : lm) {
    Interval s(0, precision_bits);
    for (int i = 0; i < l; ++i)
      if (z[i] != 0) s = s + row[i] * Interval(z[i], precision_bits);
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

/// Determinant of a small interval matrix by elimination with midpoint pivoting.
inline Interval interval_det(std::vector<std::vector<Interval>> a, mpfr_prec_t prec) {
  const int n = static_cast<int>(a.size());
  Interval det(1, prec);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col].mid_d()) > std::fabs(a[piv][col].mid_d())) piv = r;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    if (a[col][col].contains_zero()) {
      for (int k = col; k < n; ++k) det = det * a[k][k];
      // Falls back to a (wide) enclosure containing zero.
      return hull(det, Interval(0, prec));
    }
    det = det * a[col][col];
    for (int r = col + 1; r < n; ++r) {
      Interval f = a[r][col] / a[col][col];
      for (int k = col; k < n; ++k) a[r][k] = a[r][k] - f * a[col][k];
    }
  }
  return det;
}

/// Solves A x = b; nullopt when a pivot enclosure contains zero.
inline std::optional<std::vector<Interval>> interval_solve(std::vector<std::vector<Interval>> a,
                                                           std::vector<Interval> b) {
  const int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col].mid_d()) > std::fabs(a[piv][col].mid_d())) piv = r;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    if (a[col][col].contains_zero()) return std::nullopt;
    for (int r = col + 1; r < n; ++r) {
      Interval f = a[r][col] / a[col][col];
      for (int k = col; k < n; ++k) a[r][k] = a[r][k] - f * a[col][k];
      b[r] = b[r] - f * b[col];
    }
  }
  std::vector<Interval> x(n, b.empty() ? Interval() : b[0]);
  for (int r = n - 1; r >= 0; --r) {
    Interval s = b[r];
    for (int k = r + 1; k < n; ++k) s = s - a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

template <typename F>
void for_each_subset(int n, int k, F&& f) {
  if (k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int t = pos + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

}  // namespace detail

struct GrowthConstant {
  Interval c;                   ///< certified enclosure
  std::vector<double> argmin;   ///< approximate minimiser on the unit sphere
};

/// The largest c with max_chi log|chi(z)| >= c ||z||_inf on R^l: the minimum of
/// the convex piecewise-linear function max_chi l_chi over the sup-norm unit
/// sphere, taken exactly over the vertices of each facet's epigraph LP.
inline GrowthConstant growth_constant(const GaloisOrbit& orbit, long precision_bits = 128) {
  const int l = orbit.members.front().rank();
  const mpfr_prec_t prec = precision_bits;
  auto lm = log_matrix(orbit, precision_bits);
  const int m = static_cast<int>(lm.size());
  const Interval one(1, prec);
  const Interval unit_box = hull(-one, one);
  auto value = [&](const std::vector<Interval>& z) {
    std::optional<Interval> best;
    for (const auto& row : lm) {
      Interval s(0, prec);
      for (int i = 0; i < l; ++i) s = s + row[i] * z[i];
      best = best ? max(*best, s) : s;
    }
    return *best;
  };

  std::optional<Interval> c_lo, c_hi;
  std::vector<double> argmin;
  for (int j = 0; j < l; ++j) {
    for (int sign : {1, -1}) {
      std::vector<int> free;
      for (int k = 0; k < l; ++k)
        if (k != j) free.push_back(k);
      const int nf = l - 1;
      // Each equation: coefficients over free coordinates and right-hand side.
      struct Eq {
        std::vector<Interval> a;
        Interval b;
      };
      std::vector<Eq> pool;
      for (int t = 0; t < nf; ++t)
        for (int s : {1, -1}) {
          Eq e{std::vector<Interval>(nf, Interval(0, prec)), Interval(s, prec)};
          e.a[t] = one;
          pool.push_back(std::move(e));
        }
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
          Eq e{{}, Interval(prec)};
          for (int k : free) e.a.push_back(lm[a][k] - lm[b][k]);
          e.b = (lm[b][j] - lm[a][j]) * Interval(sign, prec);
          pool.push_back(std::move(e));
        }
      auto consider = [&](std::vector<Interval> zf) {
        std::vector<Interval> z(l, Interval(sign, prec));
        std::vector<Interval> zmid(l, Interval(sign, prec));
        std::vector<double> approx(l, sign);
        for (int t = 0; t < nf; ++t) {
          if (!zf[t].intersects(unit_box)) return;
          z[free[t]] = intersect(zf[t], unit_box);
          double mid = std::clamp(zf[t].mid_d(), -1.0, 1.0);
          zmid[free[t]] = Interval::from_double(mid, prec);
          approx[free[t]] = mid;
        }
        Interval lo = value(z);
        Interval hi = value(zmid);
        if (!c_lo || mpfr_less_p(lo.lo(), c_lo->lo())) c_lo = lo;
        if (!c_hi || mpfr_less_p(hi.hi(), c_hi->hi())) {
          c_hi = hi;
          argmin = approx;
        }
      };
      if (nf == 0) {
        consider({});
        continue;
      }
      detail::for_each_subset(static_cast<int>(pool.size()), nf, [&](const std::vector<int>& idx) {
        std::vector<std::vector<Interval>> a;
        std::vector<Interval> b;
        for (int i : idx) {
          a.push_back(pool[i].a);
          b.push_back(pool[i].b);
        }
        if (auto x = detail::interval_solve(a, b)) consider(*x);
      });
    }
  }
  if (!c_lo || !c_hi) throw PrecisionExhausted("no certified vertex found for the growth constant");
  Interval c = Interval::span(*c_lo, *c_hi);
  if (!c.certainly_positive())
    throw DegenerateInstance("growth constant is not certified positive (enclosure touches 0)");
  return {c, argmin};
}

struct OrbitErgodicity {
  int orbit = 0;
  bool rank_certified = false;
  std::vector<int> minor_rows;  ///< rows of a nonsingular l x l minor of the log matrix
};

struct ErgodicityCertificate {
  bool ergodic = false;
  std::vector<OrbitErgodicity> orbits;
  /// Non-ergodic case: z with a root of unity among the eigenvalues of alpha(z).
  IntVector counterexample;
  int counterexample_orbit = -1;
  long root_of_unity_order = 0;
  IntVector trivialising;  ///< order * z, on which the orbit's characters are 1
};

struct ErgodicityOptions {
  int search_radius = 6;
  long precision_bits = 128;
  long precision_cap = kDefaultPrecisionCap;
};

namespace detail {

/// Nonzero integer vectors with first nonzero entry positive, by increasing
/// sup norm then lexicographically.
inline std::vector<IntVector> canonical_vectors(int l, int radius) {
  std::vector<IntVector> out;
  for (int r = 1; r <= radius; ++r) {
    IntVector z(l, -r);
    while (true) {
      long sup = 0;
      for (long v : z) sup = std::max(sup, std::labs(v));
      int first = 0;
      while (first < l && z[first] == 0) ++first;
      if (sup == r && first < l && z[first] > 0) out.push_back(z);
      int pos = l - 1;
      while (pos >= 0 && z[pos] == r) z[pos--] = -r;
      if (pos < 0) break;
      ++z[pos];
    }
  }
  return out;
}

}  // namespace detail

inline ErgodicityCertificate ergodicity_certificate(const ZlAction& action, const ErgodicityOptions& opt = {}) {
  const auto orbits = galois_orbits(simultaneous_spectrum(action));
  const int l = action.rank();
  ErgodicityCertificate cert;
  for (int o = 0; o < static_cast<int>(orbits.size()); ++o) {
    const GaloisOrbit& orbit = orbits[o];
    OrbitErgodicity oe;
    oe.orbit = o;
    std::optional<IntVector> undecided;
    for (long prec = opt.precision_bits; prec <= opt.precision_cap; prec *= 2) {
      auto lm = log_matrix(orbit, prec);
      detail::for_each_subset(static_cast<int>(lm.size()), l, [&](const std::vector<int>& rows) {
        if (oe.rank_certified) return;
        std::vector<std::vector<Interval>> a;
        for (int r : rows) a.push_back(lm[r]);
        if (detail::interval_det(a, prec).certainly_nonzero()) {
          oe.rank_certified = true;
          oe.minor_rows = rows;
        }
      });
      if (oe.rank_certified) break;
      undecided.reset();
      for (const auto& z : detail::canonical_vectors(l, opt.search_radius)) {
        bool in_kernel = true;
        for (const auto& row : lm) {
          Interval s(0, prec);
          for (int i = 0; i < l; ++i) s = s + row[i] * Interval(z[i], prec);
          if (!s.contains_zero()) {
            in_kernel = false;
            break;
          }
        }
        if (!in_kernel) continue;
        IntPolynomial mp = orbit.members.front().value_at(z).minpoly();
        if (auto k = cyclotomic_index(mp)) {
          cert.ergodic = false;
          cert.orbits.push_back(oe);
          cert.counterexample = z;
          cert.counterexample_orbit = o;
          cert.root_of_unity_order = *k;
          for (long v : z) cert.trivialising.push_back(v * *k);
          return cert;
        }
        if (!undecided) undecided = z;
      }
    }
    if (!oe.rank_certified) {
      std::string msg = "ergodicity undecided for orbit " + std::to_string(o);
      if (undecided) {
        msg += "; candidate z = (";
        for (size_t i = 0; i < undecided->size(); ++i) msg += (i ? "," : "") + std::to_string((*undecided)[i]);
        msg += ")";
      }
      throw Undecided(msg);
    }
    cert.orbits.push_back(oe);
  }
  cert.ergodic = true;
  return cert;
}

struct AnosovResult {
  bool anosov = true;
  int witness_orbit = -1;
  int witness_embedding = -1;
  IntPolynomial witness_minpoly;
  bool decided_exactly = false;  ///< true when the exact unit-circle test was needed
};

/// alpha(z) is Anosov iff no eigenvalue chi(z) has modulus exactly 1.
inline AnosovResult anosov_check(const ZlAction& action, const IntVector& z, long precision_bits = 64) {
  bool allzero = true;
  for (long v : z) allzero &= (v == 0);
  if (allzero) throw InvalidInput("anosov_check requires z != 0");
  const auto orbits = galois_orbits(simultaneous_spectrum(action));
  AnosovResult res;
  for (int o = 0; o < static_cast<int>(orbits.size()); ++o) {
    NumberFieldElement v = orbits[o].members.front().value_at(z);
    long prec = precision_bits;
    std::optional<bool> exact;
    while (true) {
      auto emb = v.embeddings(prec);
      int touching = -1;
      for (const auto& c : orbits[o].members) {
        Interval mod = emb[c.embedding_index].modulus();
        if (mod.contains(Interval(1, prec))) {
          touching = c.embedding_index;
          break;
        }
      }
      if (touching < 0) break;
      if (!exact) {
        exact = has_unit_circle_root(v.minpoly());
        res.decided_exactly = true;
      }
      if (*exact) {
        res.anosov = false;
        res.witness_orbit = o;
        res.witness_embedding = touching;
        res.witness_minpoly = v.minpoly();
        return res;
      }
      // Exactly no root on the unit circle: refine until the enclosures separate.
      prec *= 2;
      if (prec > kDefaultPrecisionCap * 4) throw PrecisionExhausted("could not separate eigenvalue moduli from 1");
    }
  }
  return res;
}

}  // namespace nilmix
