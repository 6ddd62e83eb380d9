#pragma once

// Dimension count for compatible cocycles with values supported in a finite
// frequency window W:
//   V = {(f_a, f_b) on W : f_a o b + f_b = f_b o a + f_a},
//   C = {(phi o a - phi, phi o b - phi) supported in W : phi zero-mean}.
// Every compatible cocycle is a coboundary plus constants iff
// dim V = dim C + 2.

#include <gmpxx.h>

#include <map>
#include <set>
#include <vector>

#include "nilmix/cocycle/dual_orbits.hpp"
#include "nilmix/errors.hpp"
#include "nilmix/spectrum/action.hpp"
#include "nilmix/toral/trig_polynomial.hpp"

namespace nilmix {

namespace detail {

using SparseRow = std::map<int, mpq_class>;

/// Rank of a sparse rational matrix by elimination on leading columns.
inline int sparse_rank(std::vector<SparseRow> rows) {
  std::map<int, SparseRow> pivots;  // leading column -> row with leading coefficient 1
  for (auto& row : rows) {
    while (!row.empty()) {
      auto lead = row.begin();
      auto p = pivots.find(lead->first);
      if (p == pivots.end()) {
        mpq_class inv = 1 / lead->second;
        for (auto& [c, v] : row) v *= inv;
        pivots.emplace(lead->first, std::move(row));
        break;
      }
      mpq_class factor = lead->second;
      for (const auto& [c, v] : p->second) {
        mpq_class& x = row[c];
        x -= factor * v;
        if (x == 0) row.erase(c);
      }
    }
  }
  return static_cast<int>(pivots.size());
}

inline void add_entry(SparseRow& row, int col, const mpq_class& v) {
  mpq_class& x = row[col];
  x += v;
  if (x == 0) row.erase(col);
}

}  // namespace detail

struct SolutionSpaceCheck {
  int window_size = 0;
  int compatible_dim = 0;  ///< dim V
  int coboundary_dim = 0;  ///< dim C
  int constants_dim = 0;   ///< 2 when 0 is in the window
  int hull_size = 0;       ///< nonzero frequencies carrying the transfer function
  bool matches() const { return compatible_dim == coboundary_dim + constants_dim; }
};

/// The window is the box ||m||_inf <= radius.
inline std::vector<Frequency> box_window(int d, long radius) {
  std::vector<Frequency> out;
  Frequency m(d, -radius);
  while (true) {
    out.push_back(m);
    int pos = d - 1;
    while (pos >= 0 && m[pos] == radius) m[pos--] = -radius;
    if (pos < 0) break;
    m[pos] += 1;
  }
  return out;
}

inline SolutionSpaceCheck solution_space_check(const ZlAction& action, const std::vector<Frequency>& window) {
  if (action.rank() != 2) throw InvalidInput("solution space check needs a rank-2 action");
  const UnimodularMatrix& a = action.generator(0);
  const UnimodularMatrix& b = action.generator(1);
  const IntMatrix at = a.transpose().matrix(), bt = b.transpose().matrix();
  const IntMatrix at_inv = a.transpose().inverse().matrix(), bt_inv = b.transpose().inverse().matrix();
  SolutionSpaceCheck out;
  std::map<Frequency, int> w;
  for (const auto& m : window) w.emplace(m, static_cast<int>(w.size()));
  out.window_size = static_cast<int>(w.size());
  const int n = out.window_size;

  // Compatibility: at each p, f_a((b^T)^{-1} p) + f_b(p) - f_b((a^T)^{-1} p) - f_a(p) = 0.
  std::set<Frequency> eq_points;
  for (const auto& [m, i] : w) {
    eq_points.insert(m);
    eq_points.insert(transform_frequency(at, m));
    eq_points.insert(transform_frequency(bt, m));
  }
  auto col = [&](const Frequency& m) {
    auto it = w.find(m);
    return it == w.end() ? -1 : it->second;
  };
  std::vector<detail::SparseRow> rows;
  for (const auto& p : eq_points) {
    detail::SparseRow r;
    int c;
    if ((c = col(transform_frequency(bt_inv, p))) >= 0) detail::add_entry(r, c, 1);
    if ((c = col(p)) >= 0) detail::add_entry(r, n + c, 1);
    if ((c = col(transform_frequency(at_inv, p))) >= 0) detail::add_entry(r, n + c, -1);
    if ((c = col(p)) >= 0) detail::add_entry(r, c, -1);
    if (!r.empty()) rows.push_back(std::move(r));
  }
  out.compatible_dim = 2 * n - detail::sparse_rank(rows);
  out.constants_dim = w.count(Frequency(action.dim(), 0)) ? 2 : 0;

  // Transfer functions live on the a^T-orbit hulls of the window.
  DualOrbitIndex index(ZlAction({a}));
  DualOrbitDecomposition dec = dual_orbits(index, window);
  std::map<Frequency, int> hull;
  for (const auto& o : dec.orbits) {
    Frequency m = o.representative;
    for (long k = 0; k <= o.last(); ++k) {
      hull.emplace(m, static_cast<int>(hull.size()));
      m = transform_frequency(at, m);
    }
  }
  out.hull_size = static_cast<int>(hull.size());
  // Coefficients of (phi o a - phi, phi o b - phi) outside the window must vanish.
  std::set<Frequency> out_points;
  for (const auto& [m, i] : hull) {
    for (const Frequency& p : {m, transform_frequency(at, m), transform_frequency(bt, m)})
      if (!w.count(p)) out_points.insert(p);
  }
  auto hcol = [&](const Frequency& m) {
    auto it = hull.find(m);
    return it == hull.end() ? -1 : it->second;
  };
  std::vector<detail::SparseRow> erows;
  for (const auto& p : out_points) {
    for (const IntMatrix* inv : {&at_inv, &bt_inv}) {
      detail::SparseRow r;
      int c;
      if ((c = hcol(transform_frequency(*inv, p))) >= 0) detail::add_entry(r, c, 1);
      if ((c = hcol(p)) >= 0) detail::add_entry(r, c, -1);
      if (!r.empty()) erows.push_back(std::move(r));
    }
  }
  out.coboundary_dim = out.hull_size - detail::sparse_rank(erows);
  return out;
}

}  // namespace nilmix
