#pragma once

// The 3-dimensional Heisenberg group in polarized coordinates,
//   (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y'),
// its lattice Z^3, and the lattice-preserving automorphisms
//   (x,y,z) -> (A(x,y), z + kappa(x,y)),  det A = 1.

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/exact/matrix.hpp"

namespace nilmix {

template <class T>
struct HeisPoint {
  T x = 0, y = 0, z = 0;

  friend HeisPoint operator*(const HeisPoint& p, const HeisPoint& q) {
    return {p.x + q.x, p.y + q.y, p.z + q.z + p.x * q.y};
  }
  HeisPoint inverse() const { return {-x, -y, -z + x * y}; }
  friend bool operator==(const HeisPoint& p, const HeisPoint& q) { return p.x == q.x && p.y == q.y && p.z == q.z; }
  static HeisPoint identity() { return {0, 0, 0}; }
};

using HeisPointQ = HeisPoint<mpq_class>;
using HeisPointF = HeisPoint<long double>;

namespace detail {
inline mpq_class floor_of(const mpq_class& v) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return mpq_class(f);
}
inline long double floor_of(long double v) { return std::floor(v); }
}  // namespace detail

template <class T>
struct Reduction {
  HeisPoint<T> rep;      ///< representative in [0,1)^3
  HeisPoint<T> lattice;  ///< lattice element with p = rep * lattice
};

/// p = r * lambda with r in [0,1)^3; y is reduced first, then x, then z.
template <class T>
Reduction<T> heis_reduce(const HeisPoint<T>& p) {
  Reduction<T> out;
  out.lattice.y = detail::floor_of(p.y);
  out.rep.y = p.y - out.lattice.y;
  out.lattice.x = detail::floor_of(p.x);
  out.rep.x = p.x - out.lattice.x;
  // r * lambda has z-coordinate r.z + lambda.z + r.x * lambda.y
  T rest = p.z - out.rep.x * out.lattice.y;
  out.lattice.z = detail::floor_of(rest);
  out.rep.z = rest - out.lattice.z;
  return out;
}

/// Polarized coordinates of exp(v) for v in the Lie algebra.
template <class T>
HeisPoint<T> heis_exp(const T& a, const T& b, const T& c) {
  return {a, b, c + a * b / 2};
}

class HeisAuto {
 public:
  HeisAuto() : HeisAuto(UnimodularMatrix{{1, 0}, {0, 1}}, 0, 0) {}
  /// kappa(x,y) = ((ax+by)(cx+dy) - xy)/2 + l1 x + l2 y, which must be
  /// integral on Z^2.
  HeisAuto(UnimodularMatrix block, mpq_class l1, mpq_class l2) : a_(std::move(block)), l1_(l1), l2_(l2) {
    if (a_.dim() != 2) throw InvalidInput("Heisenberg automorphism block must be 2x2");
    if (a_.det() != 1) throw InvalidInput("Heisenberg automorphism block must have determinant 1");
    for (const auto& v : {kappa(mpq_class(1), mpq_class(0)), kappa(mpq_class(0), mpq_class(1))})
      if (v.get_den() != 1) throw InvalidInput("kappa is not integral on the lattice");
  }
  /// The block with the linear term of smallest magnitude that makes kappa
  /// integral.
  static HeisAuto canonical(const UnimodularMatrix& block) {
    const IntMatrix& m = block.matrix();
    mpq_class qx = mpq_class(m(0, 0) * m(1, 0)) / 2, qy = mpq_class(m(0, 1) * m(1, 1)) / 2;
    auto fix = [](const mpq_class& q) { return q.get_den() == 1 ? mpq_class(0) : mpq_class(-1, 2); };
    return HeisAuto(block, fix(qx), fix(qy));
  }

  const UnimodularMatrix& block() const { return a_; }
  const mpq_class& linear_x() const { return l1_; }
  const mpq_class& linear_y() const { return l2_; }

  template <class T>
  T quadratic(const T& x, const T& y) const {
    return quadratic_of(a_, x, y);
  }
  /// ((ax+by)(cx+dy) - xy)/2 for the block [[a,b],[c,d]].
  template <class T>
  static T quadratic_of(const UnimodularMatrix& block, const T& x, const T& y) {
    const IntMatrix& m = block.matrix();
    T u = coef<T>(m(0, 0)) * x + coef<T>(m(0, 1)) * y;
    T v = coef<T>(m(1, 0)) * x + coef<T>(m(1, 1)) * y;
    return (u * v - x * y) / 2;
  }
  template <class T>
  T kappa(const T& x, const T& y) const {
    return quadratic(x, y) + coef<T>(l1_) * x + coef<T>(l2_) * y;
  }
  template <class T>
  HeisPoint<T> apply(const HeisPoint<T>& p) const {
    const IntMatrix& m = a_.matrix();
    return {coef<T>(m(0, 0)) * p.x + coef<T>(m(0, 1)) * p.y, coef<T>(m(1, 0)) * p.x + coef<T>(m(1, 1)) * p.y,
            p.z + kappa(p.x, p.y)};
  }

  /// this o other
  HeisAuto compose(const HeisAuto& other) const {
    UnimodularMatrix prod = a_ * other.a_;
    auto composed_kappa = [&](const mpq_class& x, const mpq_class& y) -> mpq_class {
      HeisPointQ p = other.apply(HeisPointQ{x, y, 0});
      return apply(p).z;
    };
    mpq_class l1 = composed_kappa(1, 0) - quadratic_of(prod, mpq_class(1), mpq_class(0));
    mpq_class l2 = composed_kappa(0, 1) - quadratic_of(prod, mpq_class(0), mpq_class(1));
    return HeisAuto(prod, l1, l2);
  }
  HeisAuto inverse() const {
    UnimodularMatrix inv = a_.inverse();
    const IntMatrix& m = inv.matrix();
    auto inv_kappa = [&](const mpq_class& x, const mpq_class& y) -> mpq_class {
      return -kappa(mpq_class(m(0, 0) * x + m(0, 1) * y), mpq_class(m(1, 0) * x + m(1, 1) * y));
    };
    mpq_class l1 = inv_kappa(1, 0) - quadratic_of(inv, mpq_class(1), mpq_class(0));
    mpq_class l2 = inv_kappa(0, 1) - quadratic_of(inv, mpq_class(0), mpq_class(1));
    return HeisAuto(inv, l1, l2);
  }
  HeisAuto power(long n) const {
    if (n < 0) return inverse().power(-n);
    HeisAuto result, base = *this;
    for (; n > 0; n >>= 1) {
      if (n & 1) result = result.compose(base);
      base = base.compose(base);
    }
    return result;
  }

  /// beta(p q) == beta(p) beta(q), exactly.
  bool is_homomorphic_at(const HeisPointQ& p, const HeisPointQ& q) const { return apply(p * q) == apply(p) * apply(q); }
  /// beta maps each lattice generator into the lattice.
  bool preserves_lattice() const {
    for (const HeisPointQ& g : {HeisPointQ{1, 0, 0}, HeisPointQ{0, 1, 0}, HeisPointQ{0, 0, 1}}) {
      HeisPointQ h = apply(g);
      if (h.x.get_den() != 1 || h.y.get_den() != 1 || h.z.get_den() != 1) return false;
    }
    return true;
  }

  friend bool operator==(const HeisAuto& a, const HeisAuto& b) {
    return a.a_ == b.a_ && a.l1_ == b.l1_ && a.l2_ == b.l2_;
  }

 private:
  template <class T>
  static T coef(const mpz_class& v) {
    if constexpr (std::is_same_v<T, long double>) return static_cast<long double>(v.get_d());
    else return T(v);
  }
  template <class T>
  static T coef(const mpq_class& v) {
    if constexpr (std::is_same_v<T, long double>)
      return static_cast<long double>(v.get_num().get_d()) / static_cast<long double>(v.get_den().get_d());
    else return T(v);
  }

  UnimodularMatrix a_;
  mpq_class l1_ = 0, l2_ = 0;
};

/// Z^l action on the Heisenberg nilmanifold by commuting automorphisms.
class HeisAction {
 public:
  HeisAction() = default;
  explicit HeisAction(std::vector<HeisAuto> generators) : gens_(std::move(generators)) {
    if (gens_.empty()) throw InvalidInput("Heisenberg action needs at least one generator");
    for (size_t i = 0; i < gens_.size(); ++i) {
      inverses_.push_back(gens_[i].inverse());
      for (size_t j = i + 1; j < gens_.size(); ++j)
        if (!(gens_[i].compose(gens_[j]) == gens_[j].compose(gens_[i])))
          throw InvalidInput("Heisenberg automorphisms do not commute");
    }
  }
  int rank() const { return static_cast<int>(gens_.size()); }
  const HeisAuto& generator(int i) const { return gens_.at(i); }

  /// The exact automorphism alpha(z).
  HeisAuto at(const std::vector<long>& z) const {
    check(z);
    HeisAuto r;
    for (size_t i = 0; i < z.size(); ++i) r = r.compose(gens_[i].power(z[i]));
    return r;
  }
  /// alpha(z) applied to a point of X, one generator step at a time with a
  /// reduction after each step to keep coordinates small.
  HeisPointF apply_reduced(const std::vector<long>& z, HeisPointF p) const {
    check(z);
    p = heis_reduce(p).rep;
    for (size_t i = 0; i < z.size(); ++i) {
      const HeisAuto& g = z[i] >= 0 ? gens_[i] : inverses_[i];
      for (long k = 0; k < std::labs(z[i]); ++k) p = heis_reduce(g.apply(p)).rep;
    }
    return p;
  }

 private:
  void check(const std::vector<long>& z) const {
    if (z.size() != gens_.size()) throw InvalidInput("word length differs from the action rank");
  }
  std::vector<HeisAuto> gens_, inverses_;
};

}  // namespace nilmix
