#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "nilmix/cocycle/cocycle.hpp"
#include "nilmix/cocycle/solution_space.hpp"

using namespace nilmix;

namespace {

Frequency freq(std::initializer_list<long> a) {
  Frequency f;
  for (long x : a) f.emplace_back(x);
  return f;
}

Frequency negate(Frequency a) {
  for (auto& x : a) x = -x;
  return a;
}

UnimodularMatrix cat() { return UnimodularMatrix{{2, 1}, {1, 1}}; }

ZlAction t3_action() {
  return ZlAction({UnimodularMatrix{{0, 0, 1}, {1, 0, 3}, {0, 1, 0}}, UnimodularMatrix{{-2, 1, 0}, {0, 1, 1}, {1, 0, 1}}});
}

TrigPolynomial cosine(const Frequency& a, const mpq_class& amp) {
  TrigPolynomial f(static_cast<int>(a.size()));
  f.add(a, {amp / 2, 0});
  f.add(negate(a), {amp / 2, 0});
  return f;
}

// Real-valued, zero-mean: conjugate pairs at +-a.
TrigPolynomial random_real(std::mt19937_64& rng, int dim, int radius, int pairs) {
  std::uniform_int_distribution<long> fr(-radius, radius), cf(-6, 6), den(1, 4);
  TrigPolynomial f(dim);
  for (int t = 0; t < pairs; ++t) {
    Frequency a(dim);
    for (auto& x : a) x = fr(rng);
    if (DualOrbitIndex::is_zero_frequency(a)) continue;
    mpq_class re(cf(rng), den(rng)), im(cf(rng), den(rng));
    re.canonicalize();
    im.canonicalize();
    f.add(a, {re, im});
    f.add(negate(a), {re, -im});
  }
  return f;
}

// <g, f> over coefficients.
ComplexQ inner(const TrigPolynomial& g, const TrigPolynomial& f) {
  ComplexQ s;
  for (const auto& [n, v] : g.coeffs()) s += v * f.coeff(n).conj();
  return s;
}

// Dense compatibility system over a window: unknowns are f_a then f_b on W.
QMatrix compatibility_matrix(const ZlAction& act, const std::vector<Frequency>& w) {
  const auto& a = act.generator(0);
  const auto& b = act.generator(1);
  std::map<Frequency, int> col;
  for (const auto& m : w) col.emplace(m, static_cast<int>(col.size()));
  const int n = static_cast<int>(col.size());
  // (f o g)^(g^T m) = f^(m): collect every image point and sum contributions.
  std::map<Frequency, std::map<int, mpq_class>> eqs;
  for (const auto& [m, i] : col) {
    eqs[transform_frequency(b.transpose().matrix(), m)][i] += 1;  // f_a o b
    eqs[m][n + i] += 1;                                          // f_b
    eqs[transform_frequency(a.transpose().matrix(), m)][n + i] -= 1;  // f_b o a
    eqs[m][i] -= 1;                                              // f_a
  }
  QMatrix mat(static_cast<int>(eqs.size()), 2 * n);
  int r = 0;
  for (const auto& [p, row] : eqs) {
    for (const auto& [c, v] : row) mat(r, c) = v;
    ++r;
  }
  return mat;
}

TorusCocycle coboundary_cocycle(const ZlAction& act, const TrigPolynomial& phi, const mpq_class& c1, const mpq_class& c2) {
  const int d = act.dim();
  return {act, coboundary_of(phi, act.generator(0)) + TrigPolynomial::constant(d, c1),
          coboundary_of(phi, act.generator(1)) + TrigPolynomial::constant(d, c2)};
}

}  // namespace

TEST(Validate, CoboundaryConstructionIsValid) {
  std::mt19937_64 rng(11);
  ZlAction act = t3_action();
  TorusCocycle c = coboundary_cocycle(act, random_real(rng, 3, 2, 4), 0, 0);
  CocycleCertificate cert = cocycle_validate(c);
  EXPECT_TRUE(cert.valid) << cert.report;
  EXPECT_TRUE(cert.c0_a.is_zero());
  EXPECT_TRUE(cert.c0_b.is_zero());
}

TEST(Validate, ConstantCocycleCarriesItsConstants) {
  ZlAction act = t3_action();
  TorusCocycle c{act, TrigPolynomial::constant(3, mpq_class(3, 2)), TrigPolynomial::constant(3, -2)};
  CocycleCertificate cert = cocycle_validate(c);
  EXPECT_TRUE(cert.valid);
  EXPECT_EQ(cert.c0_a, (ComplexQ{mpq_class(3, 2), 0}));
  EXPECT_EQ(cert.c0_b, (ComplexQ{-2, 0}));
  EXPECT_TRUE(cert.c0_additive);
}

// f_a = cos(2 pi x_1), f_b = 0 needs f_a o b = f_a; b^T e_1 = (-2, 1, 0).
TEST(Validate, ViolationListsTheCoefficients) {
  ZlAction act = t3_action();
  TorusCocycle c{act, cosine(freq({1, 0, 0}), 1), TrigPolynomial(3)};
  CocycleCertificate cert = cocycle_validate(c);
  EXPECT_FALSE(cert.valid);
  EXPECT_FALSE(cert.compatible);
  std::map<Frequency, std::pair<ComplexQ, ComplexQ>> got;
  for (const auto& m : cert.mismatches) got[m.frequency] = {m.lhs, m.rhs};
  const ComplexQ half{mpq_class(1, 2), 0}, zero{};
  std::map<Frequency, std::pair<ComplexQ, ComplexQ>> want{{freq({1, 0, 0}), {zero, half}},
                                                         {freq({-1, 0, 0}), {zero, half}},
                                                         {freq({-2, 1, 0}), {half, zero}},
                                                         {freq({2, -1, 0}), {half, zero}}};
  EXPECT_EQ(got.size(), want.size());
  for (const auto& [k, v] : want) {
    ASSERT_TRUE(got.count(k));
    EXPECT_EQ(got[k].first, v.first);
    EXPECT_EQ(got[k].second, v.second);
  }
  EXPECT_NE(cert.report.find("compatibility fails"), std::string::npos);
}

TEST(Validate, RejectsNonErgodicGenerator) {
  ZlAction act({UnimodularMatrix{{1, 0}, {0, 1}}, cat()});
  CocycleCertificate cert = cocycle_validate({act, TrigPolynomial(2), TrigPolynomial(2)});
  EXPECT_FALSE(cert.generators_ergodic);
  EXPECT_FALSE(cert.valid);
}

TEST(SubtractAverage, Examples) {
  ZlAction act = t3_action();
  auto [z, k] = subtract_average({act, TrigPolynomial::constant(3, 5), TrigPolynomial::constant(3, mpq_class(-1, 3))});
  EXPECT_EQ(z.f_a, TrigPolynomial(3));
  EXPECT_EQ(z.f_b, TrigPolynomial(3));
  EXPECT_EQ(k.first, (ComplexQ{5, 0}));
  EXPECT_EQ(k.second, (ComplexQ{mpq_class(-1, 3), 0}));

  TrigPolynomial g = cosine(freq({0, 1, 1}), 4);
  auto [z2, k2] = subtract_average({act, g, g});
  EXPECT_EQ(z2.f_a, g);
  EXPECT_TRUE(k2.first.is_zero() && k2.second.is_zero());

  TrigPolynomial mixed = g + TrigPolynomial::constant(3, mpq_class(7, 9));
  auto [z3, k3] = subtract_average({act, mixed, g});
  EXPECT_EQ(z3.f_a, g);
  EXPECT_EQ(k3.first, (ComplexQ{mpq_class(7, 9), 0}));
}

TEST(SigmaSquared, CosineOnCatMapIsTwo) {
  SigmaSquared s = sigma_squared(cosine(freq({1, 0}), 2), cat());
  EXPECT_EQ(s.value, 2);
  EXPECT_TRUE(s.routes_agree);
  EXPECT_EQ(s.orbits.orbits.size(), 2u);
  EXPECT_EQ(s.series_terms, 0);
}

TEST(SigmaSquared, ZeroAndCoboundary) {
  EXPECT_EQ(sigma_squared(TrigPolynomial(2), cat()).value, 0);
  std::mt19937_64 rng(5);
  TrigPolynomial phi = random_real(rng, 2, 3, 5);
  SigmaSquared s = sigma_squared(coboundary_of(phi, cat()), cat());
  EXPECT_EQ(s.value, 0);
  EXPECT_TRUE(s.routes_agree);
}

TEST(SigmaSquared, RejectsBadInput) {
  EXPECT_THROW(sigma_squared(TrigPolynomial::constant(2, 1), cat()), InvalidInput);
  TrigPolynomial complex_valued(2);
  complex_valued.add(freq({1, 0}), {1, 0});
  EXPECT_THROW(sigma_squared(complex_valued, cat()), InvalidInput);
  EXPECT_THROW(sigma_squared(cosine(freq({1, 0}), 1), UnimodularMatrix{{1, 1}, {0, 1}}), InvalidInput);
}

// Property: both routes agree exactly and the value is nonnegative; the
// series route is also rebuilt here term by term without the orbit span.
TEST(SigmaSquared, RoutesAgreeOnRandomPolynomials) {
  std::mt19937_64 rng(2024);
  ZlAction t3 = t3_action();
  for (int trial = 0; trial < 100; ++trial) {
    const bool torus3 = trial % 2 == 1;
    const UnimodularMatrix a = torus3 ? t3.generator(trial % 4 == 1 ? 0 : 1) : cat();
    TrigPolynomial f = random_real(rng, a.dim(), torus3 ? 2 : 4, torus3 ? 5 : 12);
    SigmaSquared s = sigma_squared(f, a);
    ASSERT_TRUE(s.routes_agree) << trial;
    EXPECT_GE(s.value, 0);
    ComplexQ series = inner(f, f);
    UnimodularMatrix p = a;
    for (long i = 1; i <= s.series_terms + 3; ++i, p = p * a) series += ComplexQ{2, 0} * inner(pullback(f, p), f);
    EXPECT_EQ(series, (ComplexQ{s.value, 0})) << trial;
  }
}

TEST(Coboundary, CosineOnCatMapIsObstructed) {
  CoboundaryResult r = coboundary_solve(cosine(freq({1, 0}), 2), cat());
  EXPECT_FALSE(r.phi);
  ASSERT_EQ(r.obstructions.size(), 2u);
  for (const auto& o : r.obstructions) EXPECT_EQ(o.sum, (ComplexQ{1, 0}));
}

TEST(Coboundary, ZeroGivesZero) {
  CoboundaryResult r = coboundary_solve(TrigPolynomial(2), cat());
  ASSERT_TRUE(r.phi);
  EXPECT_EQ(*r.phi, TrigPolynomial(2));
}

// Property: solving recovers a zero-mean phi_0 exactly.
TEST(Coboundary, RoundTrip) {
  std::mt19937_64 rng(99);
  ZlAction t3 = t3_action();
  for (int trial = 0; trial < 100; ++trial) {
    const bool torus3 = trial % 3 == 0;
    const UnimodularMatrix a = torus3 ? t3.generator(trial % 2) : cat();
    TrigPolynomial phi0 = random_real(rng, a.dim(), torus3 ? 2 : 5, torus3 ? 3 : 8);
    CoboundaryResult r = coboundary_solve(coboundary_of(phi0, a), a);
    ASSERT_TRUE(r.phi) << trial;
    EXPECT_TRUE(r.verified);
    EXPECT_EQ(*r.phi, phi0) << trial;
  }
}

TEST(Telescoping, HoldsOnCompatibleCocycles) {
  std::mt19937_64 rng(8);
  ZlAction act = t3_action();
  TorusCocycle c = coboundary_cocycle(act, random_real(rng, 3, 1, 2), 0, 0);
  for (long n = 1; n <= 6; ++n)
    for (long j = 1; j <= 6; ++j) EXPECT_TRUE(telescoping_identity_holds(c, n, j)) << n << "," << j;
}

// Oracle: direct summation of <f o a^i b^j, f> over a box of times.
TEST(HigherRank, MatchesDirectSummation) {
  ZlAction act = t3_action();
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    TrigPolynomial f = trial == 0 ? cosine(freq({1, 0, 0}), 2) : random_real(rng, 3, 1, 3);
    HigherRankSum h = higher_rank_sum(f, act);
    ComplexQ direct;
    std::vector<IntVector> nonzero;
    for (long i = -4; i <= 4; ++i)
      for (long j = -4; j <= 4; ++j) {
        ComplexQ t = inner(pullback(f, act.at({i, j})), f);
        if (t.is_zero()) continue;
        direct += t;
        nonzero.push_back({i, j});
      }
    EXPECT_EQ(h.value, direct) << trial;
    auto terms = h.terms;
    std::sort(terms.begin(), terms.end());
    std::sort(nonzero.begin(), nonzero.end());
    EXPECT_EQ(terms, nonzero) << trial;
  }
}

TEST(HigherRank, CoboundarySumVanishes) {
  std::mt19937_64 rng(4);
  ZlAction act = t3_action();
  TrigPolynomial f = coboundary_of(random_real(rng, 3, 1, 3), act.generator(0));
  EXPECT_TRUE(higher_rank_sum(f, act).value.is_zero());
}

TEST(Pipeline, RecoversCoboundaryPlusConstants) {
  std::mt19937_64 rng(17);
  ZlAction act = t3_action();
  for (int trial = 0; trial < 6; ++trial) {
    TrigPolynomial phi0 = random_real(rng, 3, 2, 3);
    mpq_class c1(trial - 2, 3), c2(5, trial + 1);
    c1.canonicalize();
    c2.canonicalize();
    RigidityReport r = rigidity_pipeline(coboundary_cocycle(act, phi0, c1, c2));
    EXPECT_EQ(r.constants.first, (ComplexQ{c1, 0}));
    EXPECT_EQ(r.constants.second, (ComplexQ{c2, 0}));
    ASSERT_TRUE(r.phi);
    EXPECT_EQ(*r.phi, phi0);
    EXPECT_TRUE(r.telescoping_ok);
    EXPECT_TRUE(r.second_generator_ok);
    EXPECT_FALSE(r.falsification) << r.trace;
    EXPECT_EQ(r.sigma.value, 0);
    EXPECT_TRUE(r.higher_rank.value.is_zero());
  }
}

TEST(Pipeline, RejectsIncompatibleInput) {
  ZlAction act = t3_action();
  EXPECT_THROW(rigidity_pipeline({act, cosine(freq({1, 0, 0}), 1), TrigPolynomial(3)}), InvalidInput);
}

// Independent dense null space of the compatibility system: every sampled
// solution is a valid cocycle with sigma^2 = 0 and a transfer function.
TEST(Pipeline, SampledCompatibleSolutionsAreCohomologousToConstants) {
  ZlAction act = t3_action();
  std::vector<Frequency> w = box_window(3, 1);
  auto basis = nullspace(compatibility_matrix(act, w), mpq_class(0), mpq_class(1));
  ASSERT_GE(basis.size(), 2u);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> cf(-4, 4);
  const int n = static_cast<int>(w.size());
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<mpq_class> v(2 * n, 0);
    for (const auto& b : basis) {
      mpq_class t = cf(rng);
      for (int i = 0; i < 2 * n; ++i) v[i] += t * b[i];
    }
    TrigPolynomial fa(3), fb(3);
    for (int i = 0; i < n; ++i) {
      fa.add(w[i], {v[i], 0});
      fb.add(w[i], {v[n + i], 0});
    }
    // Symmetrize to a real-valued cocycle; the system is invariant under m -> -m.
    TrigPolynomial fa_r(3), fb_r(3);
    for (int i = 0; i < n; ++i) {
      fa_r.add(w[i], {(fa.coeff(w[i]).re + fa.coeff(negate(w[i])).re) / 2, 0});
      fb_r.add(w[i], {(fb.coeff(w[i]).re + fb.coeff(negate(w[i])).re) / 2, 0});
    }
    TorusCocycle c{act, fa_r, fb_r};
    ASSERT_TRUE(cocycle_validate(c).valid) << trial;
    RigidityReport r = rigidity_pipeline(c);
    EXPECT_EQ(r.sigma.value, 0);
    EXPECT_FALSE(r.falsification) << r.trace;
    EXPECT_TRUE(r.phi);
  }
}

// The sparse rank agrees with a dense rank of the same system, and the
// compatible space is coboundaries plus constants.
TEST(SolutionSpace, DimensionsMatchOnBoxes) {
  ZlAction act = t3_action();
  for (long radius : {1L, 2L}) {
    std::vector<Frequency> w = box_window(3, radius);
    SolutionSpaceCheck s = solution_space_check(act, w);
    EXPECT_EQ(s.window_size, static_cast<int>(w.size()));
    EXPECT_EQ(s.constants_dim, 2);
    EXPECT_EQ(s.compatible_dim, 2 * s.window_size - rank(compatibility_matrix(act, w))) << radius;
    EXPECT_TRUE(s.matches()) << radius << ": " << s.compatible_dim << " vs " << s.coboundary_dim;
  }
}

TEST(SolutionSpace, WindowWithoutOriginHasNoConstants) {
  ZlAction act = t3_action();
  std::vector<Frequency> w;
  for (const auto& m : box_window(3, 1))
    if (!DualOrbitIndex::is_zero_frequency(m)) w.push_back(m);
  SolutionSpaceCheck s = solution_space_check(act, w);
  EXPECT_EQ(s.constants_dim, 0);
  EXPECT_TRUE(s.matches());
}

TEST(DualOrbits, PartitionTheSupport) {
  DualOrbitIndex index(ZlAction({cat()}));
  const UnimodularMatrix at = cat().transpose();
  Frequency m = freq({1, 0});
  std::vector<Frequency> support{m, transform_frequency(at.matrix(), transform_frequency(at.matrix(), m)), freq({0, 1}),
                                 negate(m)};
  DualOrbitDecomposition d = dual_orbits(index, support);
  size_t total = 0;
  for (const auto& o : d.orbits) {
    total += o.members.size();
    EXPECT_EQ(o.first(), 0);
    for (const auto& [k, f] : o.members) EXPECT_EQ(index.act({k}, o.representative), f);
  }
  EXPECT_EQ(total, support.size());
  // (0,1) and -(1,0) lie on their own orbits; (a^T)^2 (1,0) joins (1,0).
  ASSERT_EQ(d.orbits.size(), 3u);
  EXPECT_EQ(d.orbits[0].last(), 2);
}
