#include "kstab/dh.hpp"

#include <algorithm>

#include "kstab/errors.hpp"

namespace kstab {

Rational DHMeasure::total_mass() const {
  if (target_dim == 0) return atom_mass * Rational(factor);
  Rational t = 0;
  for (const auto& c : cells) t += integrate_polynomial(c.carrier, c.density);
  return t * Rational(factor);
}

Rational DHMeasure::integrate(const Polynomial& w) const {
  if (target_dim == 0) {
    if (!w.is_constant()) throw InputError("point measure integrates constants only");
    Rational c = w.terms().empty() ? Rational(0) : w.terms().begin()->second;
    return atom_mass * c * Rational(factor);
  }
  Rational t = 0;
  for (const auto& c : cells) t += integrate_polynomial(c.carrier, c.density * w);
  return t * Rational(factor);
}

namespace {

Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

struct WeightedCell {
  HPolytope carrier;
  Polynomial density;
};

// Facets of a full-dimensional simplex: for each vertex, the hyperplane
// through the others, oriented inward.
struct SimplexFacet {
  QVec normal;      // inner normal
  Rational offset;  // <x, normal> >= -offset inside
};

std::vector<SimplexFacet> simplex_facets(const std::vector<QVec>& verts) {
  const int k = static_cast<int>(verts[0].size());
  std::vector<SimplexFacet> facets;
  for (size_t skip = 0; skip < verts.size(); ++skip) {
    // Normal: kernel of the (k-1) x k difference matrix of the kept vertices.
    QMat diffs;
    size_t base = skip == 0 ? 1 : 0;
    for (size_t i = 0; i < verts.size(); ++i) {
      if (i == skip || i == base) continue;
      diffs.push_back(sub(verts[i], verts[base]));
    }
    auto ker = kernel_basis(diffs.empty() ? QMat{QVec(k, Rational(0))} : diffs);
    if (ker.empty()) throw GeometryError("degenerate simplex facet");
    QVec normal = ker[0];
    Rational offset = -dot(normal, verts[base]);
    // Orient toward the skipped vertex.
    if (dot(normal, verts[skip]) + offset < 0) {
      normal = scale(normal, Rational(-1));
      offset = -offset;
    }
    facets.push_back({std::move(normal), offset});
  }
  return facets;
}

// Integrates out the last coordinate of a polynomial density over a
// full-dimensional simplex; emits chamber cells in one dimension less.
void eliminate_last_simplex(const std::vector<QVec>& verts, const Polynomial& density,
                            std::vector<WeightedCell>& out) {
  const int k = static_cast<int>(verts[0].size());
  auto facets = simplex_facets(verts);

  // Classify: last-coordinate coefficient decides lower/upper/vertical.
  struct Bound {
    QVec coef;    // x_k = <coef, y> + c on the facet
    Rational c;
  };
  std::vector<Bound> lowers, uppers;
  std::vector<QHalfspace> shadow;  // vertical constraints on y
  for (const auto& f : facets) {
    Rational ck = f.normal[k - 1];
    QVec a(f.normal.begin(), f.normal.end() - 1);
    if (ck == 0) {
      shadow.push_back({a, f.offset});
      continue;
    }
    // <a, y> + ck x_k >= -offset  =>  x_k >=/<= (-offset - <a,y>)/ck.
    QVec coef(k - 1);
    for (int j = 0; j < k - 1; ++j) coef[j] = -a[j] / ck;
    Bound b{coef, -f.offset / ck};
    if (ck > 0) {
      lowers.push_back(std::move(b));
    } else {
      uppers.push_back(std::move(b));
    }
  }
  if (lowers.empty() || uppers.empty()) throw GeometryError("simplex fiber without bounds");

  for (size_t li = 0; li < lowers.size(); ++li) {
    for (size_t ui = 0; ui < uppers.size(); ++ui) {
      // Chamber where lower li dominates all lowers and upper ui all uppers.
      std::vector<QHalfspace> hs = shadow;
      auto affine_ge = [&](const Bound& hi_b, const Bound& lo_b) {
        // <hi - lo, y> + (c_hi - c_lo) >= 0.
        QVec normal(k - 1);
        for (int j = 0; j < k - 1; ++j) normal[j] = hi_b.coef[j] - lo_b.coef[j];
        return QHalfspace{normal, hi_b.c - lo_b.c};
      };
      bool degenerate = false;
      for (size_t l2 = 0; l2 < lowers.size(); ++l2) {
        if (l2 == li) continue;
        QHalfspace h = affine_ge(lowers[li], lowers[l2]);
        if (std::all_of(h.normal.begin(), h.normal.end(), [](const Rational& x) { return x == 0; })) {
          if (h.offset < 0) degenerate = true;
          continue;
        }
        hs.push_back(std::move(h));
      }
      for (size_t u2 = 0; u2 < uppers.size(); ++u2) {
        if (u2 == ui) continue;
        QHalfspace h = affine_ge(uppers[u2], uppers[ui]);
        if (std::all_of(h.normal.begin(), h.normal.end(), [](const Rational& x) { return x == 0; })) {
          if (h.offset < 0) degenerate = true;
          continue;
        }
        hs.push_back(std::move(h));
      }
      // Fiber nonempty: upper >= lower.
      {
        QHalfspace h = affine_ge(uppers[ui], lowers[li]);
        if (std::all_of(h.normal.begin(), h.normal.end(), [](const Rational& x) { return x == 0; })) {
          if (h.offset < 0) degenerate = true;
        } else {
          hs.push_back(std::move(h));
        }
      }
      if (degenerate) continue;
      auto chamber = HPolytope::try_intersection(k - 1, std::move(hs));
      if (!chamber) continue;
      // Integrate the density in x_k across the fiber.
      Polynomial anti = density.antiderivative(k - 1);
      Polynomial at_upper = anti.substitute_var(k - 1, uppers[ui].coef, uppers[ui].c);
      Polynomial at_lower = anti.substitute_var(k - 1, lowers[li].coef, lowers[li].c);
      out.push_back({std::move(*chamber), at_upper - at_lower});
    }
  }
}

std::vector<WeightedCell> eliminate_last(const std::vector<WeightedCell>& cells) {
  std::vector<WeightedCell> out;
  for (const auto& cell : cells) {
    for (const auto& simplex : triangulate_indices(cell.carrier)) {
      std::vector<QVec> verts;
      for (int i : simplex) verts.push_back(cell.carrier.vertices()[i]);
      if (simplex_volume(verts) == 0) continue;
      eliminate_last_simplex(verts, cell.density, out);
    }
  }
  return out;
}

}  // namespace

DHMeasure dh_measure(const HPolytope& p) {
  DHMeasure m;
  m.source_dim = p.dim();
  m.target_dim = p.dim();
  m.factor = factorial(p.dim());
  m.cells.push_back({p, Polynomial::constant(p.dim(), Rational(1))});
  return m;
}

DHMeasure pushforward(const HPolytope& p, const ZMat& proj) {
  const int n = p.dim();
  const int m = static_cast<int>(proj.size());
  if (m > 0 && static_cast<int>(proj[0].size()) != n)
    throw InputError("projection source dimension mismatch");

  DHMeasure out;
  out.source_dim = n;
  out.target_dim = m;
  out.factor = factorial(n);
  if (m == 0) {
    out.atom_mass = volume(p);
    return out;
  }
  if (m == n) {
    factor_surjection(proj);  // validates unimodularity
    HPolytope image = apply_unimodular(p, proj, ZVec(n, Integer(0)));
    out.cells.push_back({image, Polynomial::constant(m, Rational(1))});
    return out;
  }

  SurjectionFactorization f = factor_surjection(proj);
  // beta = V [I|0] U alpha: transform to alpha' = U alpha, drop coordinates,
  // then apply V.
  HPolytope transformed = apply_unimodular(p, f.u, ZVec(n, Integer(0)));

  std::vector<WeightedCell> cells{{transformed, Polynomial::constant(n, Rational(1))}};
  for (int k = n; k > m; --k) cells = eliminate_last(cells);

  for (auto& c : cells) {
    HPolytope mapped = apply_unimodular(c.carrier, f.v, ZVec(m, Integer(0)));
    // density in mapped coordinates: y = V z => z = V^{-1} y.
    QMat vq(m, QVec(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) vq[i][j] = Rational(f.v[i][j]);
    // Build V^{-1} exactly.
    QMat vinv(m, QVec(m, Rational(0)));
    for (int col = 0; col < m; ++col) {
      QVec e(m, Rational(0));
      e[col] = 1;
      auto x = solve_linear(vq, e);
      if (!x) throw InputError("projection factor not invertible");
      for (int row = 0; row < m; ++row) vinv[row][col] = (*x)[row];
    }
    std::vector<QVec> cols(m);
    for (int j = 0; j < m; ++j) {
      QVec col(m);
      for (int i = 0; i < m; ++i) col[i] = vinv[i][j];
      cols[j] = col;
    }
    Polynomial density = c.density.compose_affine(QVec(m, Rational(0)), cols);
    out.cells.push_back({std::move(mapped), std::move(density)});
  }
  return out;
}

}  // namespace kstab
