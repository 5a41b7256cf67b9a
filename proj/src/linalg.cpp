#include "kstab/linalg.hpp"

#include <algorithm>

namespace kstab {

Rational dot(const QVec& a, const QVec& b) {
  Rational s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rational dot(const QVec& a, const ZVec& b) {
  Rational s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

QVec add(const QVec& a, const QVec& b) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

QVec sub(const QVec& a, const QVec& b) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

QVec scale(const QVec& a, const Rational& c) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

bool lex_less(const QVec& a, const QVec& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return a.size() < b.size();
}

namespace {

// Row-reduces [a | rhs...] in place; returns pivot column per row.
std::vector<int> row_reduce(QMat& a) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  std::vector<int> pivot_cols;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i) {
      if (a[i][c] != 0) { p = i; break; }
    }
    if (p < 0) continue;
    std::swap(a[r], a[p]);
    Rational inv = a[r][c];
    for (int j = c; j < cols; ++j) a[r][j] /= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  return pivot_cols;
}

}  // namespace

std::optional<QVec> solve_linear(QMat a, QVec b) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) a[i].push_back(b[i]);
  std::vector<int> piv = row_reduce(a);
  if (static_cast<int>(piv.size()) != n) return std::nullopt;
  for (int i = 0; i < n; ++i) {
    if (piv[i] != i) return std::nullopt;  // singular square system
  }
  QVec x(n);
  for (int i = 0; i < n; ++i) x[i] = a[i][n];
  return x;
}

int rank(QMat a) { return static_cast<int>(row_reduce(a).size()); }

Rational determinant(QMat a) {
  const int n = static_cast<int>(a.size());
  Rational det = 1;
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int i = c; i < n; ++i) {
      if (a[i][c] != 0) { p = i; break; }
    }
    if (p < 0) return 0;
    if (p != c) { std::swap(a[p], a[c]); det = -det; }
    det *= a[c][c];
    for (int i = c + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      Rational f = a[i][c] / a[c][c];
      for (int j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

std::vector<QVec> kernel_basis(QMat a) {
  if (a.empty()) return {};
  const int cols = static_cast<int>(a[0].size());
  std::vector<int> piv = row_reduce(a);
  std::vector<bool> is_pivot(cols, false);
  for (int c : piv) is_pivot[c] = true;
  std::vector<QVec> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    QVec v(cols, Rational(0));
    v[f] = 1;
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -a[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<QVec> solve_least_structured(const QMat& a, const QVec& b) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  QMat aug = a;
  for (int i = 0; i < rows; ++i) aug[i].push_back(b[i]);
  std::vector<int> piv = row_reduce(aug);
  for (int c : piv) {
    if (c == cols) return std::nullopt;  // pivot in rhs column: inconsistent
  }
  QVec x(cols, Rational(0));
  for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug[r][cols];
  return x;
}

ZVec primitive(ZVec v) {
  Integer g = 0;
  for (const auto& e : v) g = boost::multiprecision::gcd(g, e);
  if (g == 0) throw InputError("primitive() of zero vector");
  for (auto& e : v) e /= g;
  return v;
}

ZVec primitive_direction(const QVec& v) {
  Integer lcm_den = 1;
  for (const auto& q : v) lcm_den = boost::multiprecision::lcm(lcm_den, denominator(q));
  ZVec z(v.size());
  for (size_t i = 0; i < v.size(); ++i) z[i] = numerator(v[i]) * (lcm_den / denominator(v[i]));
  return primitive(std::move(z));
}

ZMat unimodular_completion(const ZVec& u) {
  const int n = static_cast<int>(u.size());
  // Maintain U unimodular and w = u^T U; column operations drive w to e_1.
  ZMat U(n, ZVec(n, Integer(0)));
  for (int i = 0; i < n; ++i) U[i][i] = 1;
  ZVec w = u;
  auto col_addmul = [&](int dst, int src, const Integer& f) {
    for (int i = 0; i < n; ++i) U[i][dst] += f * U[i][src];
    w[dst] += f * w[src];
  };
  auto col_swap = [&](int a, int b) {
    for (int i = 0; i < n; ++i) std::swap(U[i][a], U[i][b]);
    std::swap(w[a], w[b]);
  };
  auto col_negate = [&](int c) {
    for (int i = 0; i < n; ++i) U[i][c] = -U[i][c];
    w[c] = -w[c];
  };
  for (int c = 1; c < n; ++c) {
    // Euclidean reduction of (w[0], w[c]) -> (gcd, 0).
    while (w[c] != 0) {
      if (w[0] == 0) { col_swap(0, c); continue; }
      Integer q = w[c] / w[0];
      col_addmul(c, 0, -q);
      if (w[c] != 0) col_swap(0, c);
    }
  }
  if (w[0] < 0) col_negate(0);
  if (w[0] != 1) throw InputError("unimodular_completion expects a primitive vector");
  return U;
}

QVec mat_vec(const QMat& a, const QVec& x) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = dot(a[i], x);
  return r;
}

QVec mat_vec(const ZMat& a, const QVec& x) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    Rational s = 0;
    for (size_t j = 0; j < x.size(); ++j) s += x[j] * a[i][j];
    r[i] = s;
  }
  return r;
}

ZVec mat_vec(const ZMat& a, const ZVec& x) {
  ZVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    Integer s = 0;
    for (size_t j = 0; j < x.size(); ++j) s += x[j] * a[i][j];
    r[i] = s;
  }
  return r;
}

ZMat transpose(const ZMat& a) {
  if (a.empty()) return {};
  ZMat t(a[0].size(), ZVec(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

SurjectionFactorization factor_surjection(const ZMat& p) {
  const int m = static_cast<int>(p.size());
  const int n = m ? static_cast<int>(p[0].size()) : 0;
  if (m == 0) {
    ZMat u(n, ZVec(n, Integer(0)));
    for (int i = 0; i < n; ++i) u[i][i] = 1;
    return {u, {}};
  }
  if (m > n) throw InputError("projection target dimension exceeds source");
  // Bring p to [D | 0] by unimodular column ops (tracked in U, n x n) and
  // unimodular row ops (tracked in Vinv, m x m); for a surjection D = I.
  ZMat a = p;
  ZMat U(n, ZVec(n, Integer(0)));
  for (int i = 0; i < n; ++i) U[i][i] = 1;
  ZMat V(m, ZVec(m, Integer(0)));
  for (int i = 0; i < m; ++i) V[i][i] = 1;

  auto col_addmul = [&](int dst, int src, const Integer& f) {
    for (int i = 0; i < m; ++i) a[i][dst] += f * a[i][src];
    for (int i = 0; i < n; ++i) U[i][dst] += f * U[i][src];
  };
  auto col_swap = [&](int x, int y) {
    for (int i = 0; i < m; ++i) std::swap(a[i][x], a[i][y]);
    for (int i = 0; i < n; ++i) std::swap(U[i][x], U[i][y]);
  };
  auto col_negate = [&](int c) {
    for (int i = 0; i < m; ++i) a[i][c] = -a[i][c];
    for (int i = 0; i < n; ++i) U[i][c] = -U[i][c];
  };
  auto row_addmul = [&](int dst, int src, const Integer& f) {
    for (int j = 0; j < n; ++j) a[dst][j] += f * a[src][j];
    for (int j = 0; j < m; ++j) V[dst][j] += f * V[src][j];
  };
  auto row_swap = [&](int x, int y) {
    std::swap(a[x], a[y]);
    std::swap(V[x], V[y]);
  };

  for (int k = 0; k < m; ++k) {
    // Move a nonzero into (k, k).
    int pi = -1, pj = -1;
    for (int i = k; i < m && pi < 0; ++i)
      for (int j = k; j < n; ++j)
        if (a[i][j] != 0) { pi = i; pj = j; break; }
    if (pi < 0) throw InputError("projection matrix is not of full rank");
    if (pi != k) row_swap(pi, k);
    if (pj != k) col_swap(pj, k);
    // Euclidean elimination in row k and column k.
    bool again = true;
    while (again) {
      again = false;
      for (int j = k + 1; j < n; ++j) {
        if (a[k][j] == 0) continue;
        Integer q = a[k][j] / a[k][k];
        col_addmul(j, k, -q);
        if (a[k][j] != 0) { col_swap(k, j); again = true; }
      }
      for (int i = k + 1; i < m; ++i) {
        if (a[i][k] == 0) continue;
        Integer q = a[i][k] / a[k][k];
        row_addmul(i, k, -q);
        if (a[i][k] != 0) { row_swap(k, i); again = true; }
      }
    }
    if (a[k][k] < 0) col_negate(k);
    if (a[k][k] != 1)
      throw InputError("projection matrix is not surjective onto the target lattice");
  }
  // Now V_ops * p * U = [I | 0]; i.e. p = V_ops^{-1} [I|0] U^{-1}. Rename so
  // the caller sees p = V [I|0] U with U := U^{-1}, V := V_ops^{-1}.
  // Invert the tracked unimodular matrices exactly.
  auto invert_unimodular = [](const ZMat& z) {
    const int k = static_cast<int>(z.size());
    QMat q(k, QVec(2 * k, Rational(0)));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) q[i][j] = Rational(z[i][j]);
      q[i][k + i] = 1;
    }
    // Gauss-Jordan.
    for (int c = 0; c < k; ++c) {
      int p = -1;
      for (int i = c; i < k; ++i)
        if (q[i][c] != 0) { p = i; break; }
      std::swap(q[p], q[c]);
      Rational inv = q[c][c];
      for (int j = 0; j < 2 * k; ++j) q[c][j] /= inv;
      for (int i = 0; i < k; ++i) {
        if (i == c || q[i][c] == 0) continue;
        Rational f = q[i][c];
        for (int j = 0; j < 2 * k; ++j) q[i][j] -= f * q[c][j];
      }
    }
    ZMat out(k, ZVec(k));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (denominator(q[i][k + j]) != 1)
          throw InputError("internal: unimodular inverse not integral");
        out[i][j] = numerator(q[i][k + j]);
      }
    return out;
  };
  return {invert_unimodular(U), invert_unimodular(V)};
}

}  // namespace kstab
