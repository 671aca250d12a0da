#include "relupoly/simplex.hpp"

#include <vector>

namespace relupoly {

namespace {

// Tableau for  max c.z  s.t.  A z = b, z >= 0  with a known basic feasible basis.
struct Tableau {
  std::size_t m, n;
  std::vector<RatVec> row;     // m rows of length n+1 (last entry = rhs)
  RatVec obj;                  // length n+1 reduced-cost row; obj[n] = -current value
  std::vector<std::size_t> basis;

  void pivot(std::size_t r, std::size_t c) {
    Rat inv = Rat(1) / row[r][c];
    for (auto& q : row[r]) q *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || sgn(row[i][c]) == 0) continue;
      Rat f = row[i][c];
      for (std::size_t j = 0; j <= n; ++j) row[i][j] -= f * row[r][j];
    }
    if (sgn(obj[c]) != 0) {
      Rat f = obj[c];
      for (std::size_t j = 0; j <= n; ++j) obj[j] -= f * row[r][j];
    }
    basis[r] = c;
  }

  // Bland's rule: entering = smallest column with positive reduced cost,
  // leaving = smallest basic index among the ratio-test minimizers.
  LpStatus optimize(const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = n;
      for (std::size_t j = 0; j < n; ++j)
        if (allowed[j] && sgn(obj[j]) > 0) {
          enter = j;
          break;
        }
      if (enter == n) return LpStatus::Optimal;
      std::size_t leave = m;
      Rat best;
      for (std::size_t i = 0; i < m; ++i) {
        if (sgn(row[i][enter]) <= 0) continue;
        Rat ratio = row[i][n] / row[i][enter];
        if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult lp_solve(const RatMat& G, const RatVec& g, const RatMat& E, const RatVec& e,
                  const RatVec& c) {
  const std::size_t d = c.size();
  const std::size_t m1 = G.rows(), m2 = E.rows();
  if ((m1 && G.cols() != d) || (m2 && E.cols() != d) || g.size() != m1 || e.size() != m2)
    throw InternalError("lp_solve: shape mismatch");

  const std::size_t m = m1 + m2;
  // z = (u, v, s, a): x = u - v, slacks s for inequalities, artificials a.
  const std::size_t n_us = 2 * d + m1;
  const std::size_t n = n_us + m;

  Tableau t;
  t.m = m;
  t.n = n;
  t.row.assign(m, RatVec(n + 1, Rat(0)));
  t.basis.assign(m, 0);

  // G x + g >= 0  <=>  G u - G v - s = -g ; E u - E v = -e
  for (std::size_t i = 0; i < m; ++i) {
    const bool ineq = i < m1;
    for (std::size_t j = 0; j < d; ++j) {
      Rat a = ineq ? G(i, j) : E(i - m1, j);
      t.row[i][j] = a;
      t.row[i][d + j] = -a;
    }
    if (ineq) t.row[i][2 * d + i] = -1;
    t.row[i][n] = ineq ? -g[i] : -e[i - m1];
    if (sgn(t.row[i][n]) < 0)
      for (std::size_t j = 0; j <= n; ++j) t.row[i][j] = -t.row[i][j];
    t.row[i][n_us + i] = 1;
    t.basis[i] = n_us + i;
  }

  // Phase 1: maximize -(sum of artificials).
  t.obj.assign(n + 1, Rat(0));
  for (std::size_t i = 0; i < m; ++i) t.obj[n_us + i] = -1;
  for (std::size_t i = 0; i < m; ++i)  // price out the starting basis
    for (std::size_t j = 0; j <= n; ++j) t.obj[j] += t.row[i][j];
  std::vector<bool> allowed(n, true);
  if (t.optimize(allowed) != LpStatus::Optimal)
    throw InternalError("lp_solve: phase 1 unbounded");
  // Current value is -obj[n] after pricing; artificial sum left = obj[n] bookkeeping:
  // value stored implicitly; recompute feasibility from rhs of artificial columns.
  Rat art_sum(0);
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis[i] >= n_us) art_sum += t.row[i][n];
  if (sgn(art_sum) != 0) return {LpStatus::Infeasible, {}, Rat(0)};

  // Drive any degenerate basic artificials out of the basis.
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] < n_us) continue;
    std::size_t c2 = n;
    for (std::size_t j = 0; j < n_us; ++j)
      if (sgn(t.row[i][j]) != 0) {
        c2 = j;
        break;
      }
    if (c2 < n) t.pivot(i, c2);
    // else: redundant row; the artificial stays basic at value 0, harmless.
  }
  for (std::size_t j = n_us; j < n; ++j) allowed[j] = false;

  // Phase 2: maximize the real objective.
  t.obj.assign(n + 1, Rat(0));
  for (std::size_t j = 0; j < d; ++j) {
    t.obj[j] = c[j];
    t.obj[d + j] = -c[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t bj = t.basis[i];
    if (sgn(t.obj[bj]) == 0) continue;
    Rat f = t.obj[bj];
    for (std::size_t j = 0; j <= n; ++j) t.obj[j] -= f * t.row[i][j];
  }
  LpStatus st = t.optimize(allowed);
  if (st == LpStatus::Unbounded) return {LpStatus::Unbounded, {}, Rat(0)};

  RatVec z(n, Rat(0));
  for (std::size_t i = 0; i < m; ++i) z[t.basis[i]] = t.row[i][n];
  RatVec x(d);
  for (std::size_t j = 0; j < d; ++j) x[j] = z[j] - z[d + j];
  Rat value = dot(c, x);
  return {LpStatus::Optimal, std::move(x), std::move(value)};
}

}  // namespace relupoly
