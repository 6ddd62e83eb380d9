#pragma once

// Box maps t -> v + t_1 w_1 + ... + t_k w_k into the Heisenberg Lie algebra
// and the two branches of their equidistribution dichotomy:
//   (i)  box averages of f(exp(u) exp(iota(t)) g) are delta-close to int f,
//   (ii) some nonzero z in Z^d has ||z|| <= C1 delta^{-L1} and
//        |<z, Dpi(w_i)>| <= C2 delta^{-L2} / T_i for all i.

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/number_field.hpp"
#include "nilmix/nil/heisenberg.hpp"
#include "nilmix/nil/monte_carlo.hpp"
#include "nilmix/nil/test_function.hpp"

namespace nilmix {

struct BoxMap {
  std::array<double, 3> base{0, 0, 0};
  std::vector<std::array<double, 3>> directions;
  std::vector<double> sides;

  int k() const { return static_cast<int>(directions.size()); }
  void validate() const {
    if (directions.empty() || directions.size() > 3) throw InvalidInput("box map needs 1 to 3 directions");
    if (sides.size() != directions.size()) throw InvalidInput("box map needs one side length per direction");
    for (double t : sides)
      if (!(t > 0)) throw InvalidInput("box sides must be positive");
    // Gram determinant, relative to the product of squared lengths.
    const int n = k();
    std::vector<std::vector<double>> g(n, std::vector<double>(n));
    double scale = 1;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        for (int c = 0; c < 3; ++c) g[i][j] += directions[i][c] * directions[j][c];
      scale *= g[i][i];
    }
    double det = n == 1 ? g[0][0]
                 : n == 2 ? g[0][0] * g[1][1] - g[0][1] * g[1][0]
                          : g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                                g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                                g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    if (!(scale > 0) || det <= 1e-12 * scale) throw InvalidInput("box directions are not linearly independent");
  }
  /// Polarized coordinates of exp(iota(t)).
  HeisPointF point(const std::vector<long double>& t) const {
    long double a = base[0], b = base[1], c = base[2];
    for (int i = 0; i < k(); ++i) {
      a += t[i] * directions[i][0];
      b += t[i] * directions[i][1];
      c += t[i] * directions[i][2];
    }
    return heis_exp(a, b, c);
  }
};

struct DichotomyParams {
  mpq_class delta{1, 20};
  mpq_class L1 = 1, L2 = 1, C1 = 1, C2 = 1;
  std::uint64_t budget = 50'000'000;
  long precision_bits = 128;
  long cap = 4096;
};

struct ObstructionResult {
  std::optional<std::vector<long>> z;  ///< smallest obstruction (sup norm, then lexicographic)
  bool partial = false;                ///< budget exhausted before the ball was covered
  long radius = 0;                     ///< searched ball: ||z||_inf <= radius
  std::uint64_t checked = 0;
  /// Vector minimising max_i T_i |<z, Dpi(w_i)>| over the searched ball, and
  /// the enclosures of |<z, Dpi(w_i)>| there.
  std::vector<long> best_z;
  std::vector<Interval> best_values;
};

namespace detail {

/// Largest integer n >= 0 with n^q <= x, for rational x >= 0.
inline long integer_root_floor(const mpq_class& x, unsigned long q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  mpz_class r;
  mpz_root(r.get_mpz_t(), f.get_mpz_t(), q);  // floor(x)^{1/q} floored equals the answer
  if (!r.fits_slong_p()) throw BudgetExceeded("obstruction ball radius is too large");
  return r.get_si();
}

/// C delta^{-L} as an enclosure (exact when L is an integer).
inline Interval scaled_power(const mpq_class& c, const mpq_class& delta, const mpq_class& l, long bits) {
  if (l.get_den() == 1) {
    mpq_class p = 1;
    for (mpz_class i = 0; i < l.get_num(); ++i) p /= delta;
    return Interval(c * p, bits);
  }
  return Interval(c, bits) * exp(-(Interval(l, bits) * log(Interval(delta, bits))));
}

inline int first_real_embedding(const NumberField& k) {
  auto roots = k.roots(64);
  for (int i = 0; i < static_cast<int>(roots.size()); ++i)
    if (roots[i].im().is_point() && roots[i].im().contains_zero()) return i;
  throw InvalidInput("direction field has no real embedding");
}

}  // namespace detail

/// Exhaustive search of the ball ||z||_inf <= C1 delta^{-L1} in order of sup
/// norm, then lexicographically. dpi_w[i] is the projection of w_i to the
/// abelianisation R^d, with entries in one number field, taken at a real
/// embedding.
inline ObstructionResult boxmap_obstruction_search(const BoxMap& bm,
                                                   const std::vector<std::vector<NumberFieldElement>>& dpi_w,
                                                   const DichotomyParams& p, int embedding = -1) {
  if (dpi_w.size() != bm.sides.size()) throw InvalidInput("need one projected direction per box side");
  if (!(p.delta > 0 && p.delta < 1)) throw InvalidInput("delta must lie in (0,1)");
  if (p.L1 <= 0 || p.L2 <= 0 || p.C1 <= 0 || p.C2 <= 0) throw InvalidInput("dichotomy constants must be positive");
  const int k = static_cast<int>(dpi_w.size());
  const int d = static_cast<int>(dpi_w[0].size());
  if (d < 1 || d > 4) throw InvalidInput("direct enumeration supports 1 <= d <= 4");
  FieldPtr field = dpi_w[0][0].field();
  for (const auto& w : dpi_w) {
    if (static_cast<int>(w.size()) != d) throw InvalidInput("projected directions differ in dimension");
    for (const auto& e : w)
      if (!(*e.field() == *field)) throw InvalidInput("projected directions lie in different fields");
  }
  if (embedding < 0) embedding = detail::first_real_embedding(*field);

  ObstructionResult res;
  // Ball radius floor(C1 delta^{-L1}) with L1 = a/b: largest n with n^b <= (C1^b) delta^{-a}.
  {
    mpq_class base = 1;
    for (mpz_class i = 0; i < p.L1.get_num(); ++i) base /= p.delta;
    mpq_class c = 1;
    for (mpz_class i = 0; i < p.L1.get_den(); ++i) c *= p.C1;
    res.radius = detail::integer_root_floor(c * base, p.L1.get_den().get_ui());
  }
  // Thresholds C2 delta^{-L2} / T_i.
  std::vector<mpq_class> sides;
  for (double t : bm.sides) sides.push_back(mpq_class(t));
  auto threshold = [&](int i, long bits) { return detail::scaled_power(p.C2, p.delta, p.L2, bits) / Interval(sides[i], bits); };
  std::vector<double> thr_d(k);
  for (int i = 0; i < k; ++i) thr_d[i] = threshold(i, 64).hi_d();
  std::vector<std::vector<double>> wd(k, std::vector<double>(d));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) wd[i][j] = dpi_w[i][j].embeddings(64)[embedding].re().mid_d();

  auto inner = [&](int i, const std::vector<long>& z) {
    NumberFieldElement s = NumberFieldElement::rational(field, 0);
    for (int j = 0; j < d; ++j)
      if (z[j] != 0) s = s + NumberFieldElement::rational(field, z[j]) * dpi_w[i][j];
    return s;
  };
  auto certified_abs = [&](const NumberFieldElement& e, long bits) {
    if (e.is_rational()) return Interval(abs(e.coords().empty() ? mpq_class(0) : e.coords()[0]), bits);
    return abs(e.embeddings(bits)[embedding].re());
  };
  // Certified |<z,w_i>| <= threshold_i.
  auto satisfies = [&](int i, const std::vector<long>& z) {
    NumberFieldElement e = inner(i, z);
    if (e.is_rational() && p.L2.get_den() == 1) {
      mpq_class t = p.C2 / sides[i];
      for (mpz_class j = 0; j < p.L2.get_num(); ++j) t /= p.delta;
      mpq_class v = e.coords().empty() ? mpq_class(0) : mpq_class(abs(e.coords()[0]));
      return v <= t;
    }
    for (long bits = p.precision_bits; bits <= p.cap; bits *= 2) {
      Interval v = certified_abs(e, bits), t = threshold(i, bits);
      if (v.certainly_leq(t)) return true;
      if (t.certainly_less(v)) return false;
    }
    throw PrecisionExhausted("could not compare |<z, Dpi(w)>| with its threshold");
  };

  double best = INFINITY;
  std::vector<long> z(d);
  for (long r = 1; r <= res.radius; ++r) {
    std::fill(z.begin(), z.end(), -r);
    while (true) {
      long norm = 0;
      for (long v : z) norm = std::max(norm, std::labs(v));
      if (norm == r) {
        if (res.checked >= p.budget) {
          res.partial = true;
          return res;
        }
        ++res.checked;
        bool maybe = true;
        double score = 0;
        for (int i = 0; i < k; ++i) {
          double s = 0, mag = 0;
          for (int j = 0; j < d; ++j) {
            s += static_cast<double>(z[j]) * wd[i][j];
            mag += std::abs(static_cast<double>(z[j]) * wd[i][j]);
          }
          double slack = 1e-9 * (1 + mag);
          if (std::abs(s) - slack > thr_d[i]) maybe = false;
          score = std::max(score, std::abs(s) * bm.sides[i]);
        }
        if (score < best) {
          best = score;
          res.best_z = z;
        }
        if (maybe) {
          bool all = true;
          for (int i = 0; i < k && all; ++i) all = satisfies(i, z);
          if (all) {
            res.z = z;
            res.best_z = z;
            break;
          }
        }
      }
      int pos = d - 1;
      while (pos >= 0 && z[pos] == r) z[pos--] = -r;
      if (pos < 0) break;
      ++z[pos];
    }
    if (res.z) break;
  }
  if (!res.best_z.empty())
    for (int i = 0; i < k; ++i) res.best_values.push_back(certified_abs(inner(i, res.best_z), p.precision_bits));
  return res;
}

struct EquidistributionOptions {
  std::uint64_t samples = 200'000;
  std::uint64_t seed = 1;
  int random_shifts = 4;  ///< random (u, g) pairs in addition to u = 0, g = identity
  unsigned jobs = 1;
};

struct EquidistributionResult {
  double discrepancy = 0;  ///< |box average - int f| at the worst (u, g)
  double std_error = 0;
  double tolerance = 0;    ///< delta * holder_scale(f)
  double box_average = 0;
  double integral = 0;
  int worst_shift = 0;     ///< 0 is the unshifted box
  bool pass = true;
};

/// Box averages of f(exp(u) exp(iota(t)) g Lambda) by Monte-Carlo over the
/// box, compared with the exact integral of f.
inline EquidistributionResult boxmap_equidistribution_test(const BoxMap& bm, const TestFunction& f, double delta,
                                                           const EquidistributionOptions& opt = {}) {
  bm.validate();
  if (!(delta > 0 && delta < 1)) throw InvalidInput("delta must lie in (0,1)");
  EquidistributionResult res;
  res.integral = f.integral().mid_d();
  res.tolerance = delta * f.holder_scale();
  if (f.is_constant()) {
    res.box_average = f.constant_term();
    return res;
  }
  std::mt19937_64 shifts(opt.seed ^ 0x5bd1e995ULL);
  double worst = -INFINITY;
  for (int s = 0; s <= opt.random_shifts; ++s) {
    HeisPointF u = HeisPointF::identity(), g = HeisPointF::identity();
    if (s > 0) {
      long double a = 2 * detail::uniform01(shifts) - 1, b = 2 * detail::uniform01(shifts) - 1,
                  c = 2 * detail::uniform01(shifts) - 1;
      u = heis_exp(a, b, c);
      g = uniform_point(shifts);
    }
    McOptions mo;
    mo.samples = opt.samples;
    mo.seed = opt.seed + static_cast<std::uint64_t>(s);
    mo.jobs = opt.jobs;
    McEstimate e = mc_mean(mo, [&](std::mt19937_64& r) {
      std::vector<long double> t(bm.k());
      for (int i = 0; i < bm.k(); ++i) t[i] = detail::uniform01(r) * bm.sides[i];
      return f(u * bm.point(t) * g);
    });
    double disc = std::abs(e.estimate - res.integral);
    if (disc - 3 * e.std_error > worst) {
      worst = disc - 3 * e.std_error;
      res.discrepancy = disc;
      res.std_error = e.std_error;
      res.box_average = e.estimate;
      res.worst_shift = s;
    }
    if (disc > res.tolerance + 3 * e.std_error) res.pass = false;
  }
  return res;
}

struct DichotomyOutcome {
  ObstructionResult obstruction;
  EquidistributionResult equidistribution;
  bool obstruction_found() const { return obstruction.z.has_value(); }
  /// Obstruction found while the box average is within half the tolerance.
  bool both() const {
    return obstruction_found() && equidistribution.discrepancy + 3 * equidistribution.std_error <=
                                      equidistribution.tolerance / 2;
  }
  /// Neither branch holds: contradicts the dichotomy within the configured constants.
  bool neither() const { return !obstruction_found() && !obstruction.partial && !equidistribution.pass; }
  /// Obstruction found exactly when the equidistribution test fails.
  bool resolves_to_one_branch() const { return obstruction_found() != equidistribution.pass; }
};

inline DichotomyOutcome boxmap_dichotomy(const BoxMap& bm, const std::vector<std::vector<NumberFieldElement>>& dpi_w,
                                         const TestFunction& f, const DichotomyParams& p,
                                         const EquidistributionOptions& opt = {}) {
  DichotomyOutcome o;
  o.obstruction = boxmap_obstruction_search(bm, dpi_w, p);
  o.equidistribution = boxmap_equidistribution_test(bm, f, p.delta.get_d(), opt);
  return o;
}

}  // namespace nilmix
