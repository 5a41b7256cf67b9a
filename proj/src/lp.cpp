#include "kstab/lp.hpp"

namespace kstab {

namespace {

// Dense simplex on the tableau [B^{-1}A | B^{-1}b]; Bland's rule, so finite.
struct Tableau {
  int m, n;
  QMat t;                  // m rows x (n+1) cols
  std::vector<int> basis;  // basic variable per row

  // Minimizes cost over columns [0, allowed); returns false on unboundedness.
  bool iterate(const QVec& cost, int allowed, Rational& objective) {
    for (;;) {
      QVec basic_cost(m);
      for (int i = 0; i < m; ++i) basic_cost[i] = cost[basis[i]];
      int enter = -1;
      for (int j = 0; j < allowed && enter < 0; ++j) {
        Rational r = cost[j];
        for (int i = 0; i < m; ++i) r -= basic_cost[i] * t[i][j];
        if (r < 0) enter = j;  // Bland: smallest index
      }
      if (enter < 0) {
        objective = 0;
        for (int i = 0; i < m; ++i) objective += basic_cost[i] * t[i][n];
        return true;
      }
      int leave = -1;
      Rational best;
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= 0) continue;
        Rational ratio = t[i][n] / t[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(int row, int col) {
    Rational inv = t[row][col];
    for (int j = 0; j <= n; ++j) t[row][j] /= inv;
    for (int i = 0; i < m; ++i) {
      if (i == row || t[i][col] == 0) continue;
      Rational f = t[i][col];
      for (int j = 0; j <= n; ++j) t[i][j] -= f * t[row][j];
    }
    basis[row] = col;
  }

  void drop_row(int row) {
    t.erase(t.begin() + row);
    basis.erase(basis.begin() + row);
    --m;
  }
};

}  // namespace

LpResult solve_lp(const QMat& a, const QVec& b, const QVec& c) {
  const int m0 = static_cast<int>(a.size());
  const int n = m0 ? static_cast<int>(a[0].size()) : static_cast<int>(c.size());

  // Phase I with one artificial variable per row.
  Tableau tab;
  tab.m = m0;
  tab.n = n + m0;
  tab.t.assign(m0, QVec(n + m0 + 1, Rational(0)));
  tab.basis.resize(m0);
  for (int i = 0; i < m0; ++i) {
    int s = b[i] >= 0 ? 1 : -1;
    for (int j = 0; j < n; ++j) tab.t[i][j] = s * a[i][j];
    tab.t[i][n + i] = 1;
    tab.t[i][n + m0] = s * b[i];
    tab.basis[i] = n + i;
  }
  QVec phase1_cost(n + m0, Rational(0));
  for (int i = 0; i < m0; ++i) phase1_cost[n + i] = 1;
  Rational obj;
  tab.iterate(phase1_cost, n + m0, obj);  // phase I is always bounded
  if (obj != 0) return {LpStatus::kInfeasible, Rational(0), {}};

  // Remove artificials from the basis; rows that cannot pivot are redundant.
  for (int i = tab.m - 1; i >= 0; --i) {
    if (tab.basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j) {
      if (tab.t[i][j] != 0) { col = j; break; }
    }
    if (col >= 0) {
      tab.pivot(i, col);
    } else {
      tab.drop_row(i);
    }
  }

  QVec phase2_cost(n + m0, Rational(0));
  for (int j = 0; j < n; ++j) phase2_cost[j] = c[j];
  if (!tab.iterate(phase2_cost, n, obj)) {
    return {LpStatus::kUnbounded, Rational(0), {}};
  }
  QVec x(n, Rational(0));
  for (int i = 0; i < tab.m; ++i) {
    if (tab.basis[i] < n) x[tab.basis[i]] = tab.t[i][tab.n];
  }
  Rational value = 0;
  for (int j = 0; j < n; ++j) value += c[j] * x[j];
  return {LpStatus::kOptimal, value, x};
}

bool lp_feasible(const QMat& a, const QVec& b) {
  QVec c(a.empty() ? 0 : a[0].size(), Rational(0));
  return solve_lp(a, b, c).status == LpStatus::kOptimal;
}

}  // namespace kstab
