#include "kstab/potential.hpp"

#include <algorithm>
#include <map>

#include "kstab/errors.hpp"
#include "kstab/lp.hpp"

namespace kstab {

namespace {

// Vertices of the linearity complex of max_j (b_j - <w_j, eta>) in eta-space,
// optionally refined by a second complex: the points where the active set
// spans affinely full dimension. Enumerated per region pair.
std::vector<QVec> complex_vertices(const std::vector<std::pair<QVec, Rational>>& pts0,
                                   const std::vector<std::pair<QVec, Rational>>* pts1) {
  const int n = static_cast<int>(pts0[0].first.size());
  auto region_constraints = [&](const std::vector<std::pair<QVec, Rational>>& pts, size_t i) {
    // Region of point i: b_i - <w_i, eta> >= b_j - <w_j, eta>, i.e.
    // <eta, w_j - w_i> >= b_j - b_i.
    std::vector<std::pair<QVec, Rational>> cs;  // <eta, a> >= rhs
    for (size_t j = 0; j < pts.size(); ++j) {
      if (j == i) continue;
      cs.push_back({sub(pts[j].first, pts[i].first), pts[j].second - pts[i].second});
    }
    return cs;
  };

  std::vector<QVec> out;
  auto enumerate_pair = [&](const std::vector<std::pair<QVec, Rational>>& a_cs,
                            const std::vector<std::pair<QVec, Rational>>& b_cs) {
    std::vector<std::pair<QVec, Rational>> cs = a_cs;
    cs.insert(cs.end(), b_cs.begin(), b_cs.end());
    const int m = static_cast<int>(cs.size());
    if (m < n) return;
    std::vector<int> idx(n);
    auto rec = [&](auto&& self, int start, int depth) -> void {
      if (depth == n) {
        QMat mat(n, QVec(n));
        QVec rhs(n);
        for (int i = 0; i < n; ++i) {
          mat[i] = cs[idx[i]].first;
          rhs[i] = cs[idx[i]].second;
        }
        auto eta = solve_linear(std::move(mat), std::move(rhs));
        if (!eta) return;
        for (const auto& c : cs) {
          if (dot(*eta, c.first) < c.second) return;
        }
        out.push_back(std::move(*eta));
        return;
      }
      for (int i = start; i <= m - (n - depth); ++i) {
        idx[depth] = i;
        self(self, i + 1, depth + 1);
      }
    };
    rec(rec, 0, 0);
  };

  if (!pts1) {
    for (size_t i = 0; i < pts0.size(); ++i) {
      enumerate_pair(region_constraints(pts0, i), {});
    }
  } else {
    for (size_t i = 0; i < pts0.size(); ++i) {
      auto cs0 = region_constraints(pts0, i);
      for (size_t j = 0; j < pts1->size(); ++j) {
        enumerate_pair(cs0, region_constraints(*pts1, j));
      }
    }
  }
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<PLPiece> dedupe_pieces(std::vector<PLPiece> pieces) {
  // Identical slopes: the min-form keeps the smaller constant.
  std::map<QVec, Rational> best;
  for (auto& p : pieces) {
    auto it = best.find(p.slope);
    if (it == best.end()) {
      best.emplace(std::move(p.slope), std::move(p.c));
    } else if (p.c < it->second) {
      it->second = p.c;
    }
  }
  std::vector<PLPiece> out;
  for (auto& [slope, c] : best) out.push_back({slope, c});
  return out;
}

}  // namespace

PLConcave::PLConcave(HPolytope carrier, std::vector<PLPiece> pieces) : carrier_(std::move(carrier)) {
  if (pieces.empty()) throw InputError("PL function needs at least one piece");
  const int n = carrier_.dim();
  for (const auto& p : pieces) {
    if (static_cast<int>(p.slope.size()) != n) throw InputError("piece slope dimension mismatch");
  }
  std::vector<PLPiece> candidates = dedupe_pieces(std::move(pieces));

  // Activity: keep pieces whose cell {piece k minimal} is full-dimensional.
  for (size_t k = 0; k < candidates.size(); ++k) {
    std::vector<QHalfspace> hs;
    for (size_t j = 0; j < candidates.size(); ++j) {
      if (j == k) continue;
      // <alpha, xi_k> + c_k <= <alpha, xi_j> + c_j.
      hs.push_back({sub(candidates[j].slope, candidates[k].slope),
                    candidates[j].c - candidates[k].c});
    }
    auto cell = intersect(carrier_, hs);
    if (cell) {
      pieces_.push_back(candidates[k]);
      cells_.push_back(std::move(*cell));
    }
  }
  if (pieces_.empty()) throw InputError("internal: PL normalization removed all pieces");

  std::vector<QVec> verts;
  for (const auto& cell : cells_)
    for (const auto& v : cell.vertices()) verts.push_back(v);
  std::sort(verts.begin(), verts.end(), lex_less);
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  subdiv_vertices_ = std::move(verts);
}

PLConcave PLConcave::zero(const HPolytope& carrier) {
  return PLConcave(carrier, {{QVec(carrier.dim(), Rational(0)), Rational(0)}});
}

PLConcave PLConcave::affine(const HPolytope& carrier, const QVec& slope, const Rational& c) {
  return PLConcave(carrier, {{slope, c}});
}

bool PLConcave::pieces_eq(const PLConcave& o) const {
  if (pieces_.size() != o.pieces_.size()) return false;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].slope != o.pieces_[i].slope || pieces_[i].c != o.pieces_[i].c) return false;
  }
  return true;
}

Rational PLConcave::eval(const QVec& alpha) const {
  Rational best;
  bool first = true;
  for (const auto& p : pieces_) {
    Rational v = dot(alpha, p.slope) + p.c;
    if (first || v < best) best = v;
    first = false;
  }
  return best;
}

Rational PLConcave::max_over_carrier() const {
  Rational best;
  bool first = true;
  for (const auto& v : subdiv_vertices_) {
    Rational val = eval(v);
    if (first || val > best) best = val;
    first = false;
  }
  return best;
}

Integer PLConcave::multiplicity(int k) const {
  Integer b = 1;
  for (const auto& coord : pieces_[k].slope)
    b = boost::multiprecision::lcm(b, denominator(coord));
  return b;
}

PLConcave PLConcave::operator+(const Rational& constant) const {
  std::vector<PLPiece> shifted = pieces_;
  for (auto& p : shifted) p.c += constant;
  return PLConcave(carrier_, std::move(shifted));
}

Rational GTransform::eval(const QVec& eta) const {
  Rational best;
  bool first = true;
  for (const auto& [w, b] : points) {
    Rational v = b - dot(w, eta);
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

GTransform g_transform(const PLConcave& g) {
  GTransform gt;
  gt.dim = g.carrier().dim();
  std::vector<std::pair<QVec, Rational>> data;
  for (const auto& w : g.subdivision_vertices()) data.push_back({w, g.eval(w)});

  // Prune points below the upper hull: (w_i, b_i) is redundant when it is a
  // convex combination of the others with at least its own value.
  for (size_t i = 0; i < data.size(); ++i) {
    const int n = gt.dim;
    std::vector<size_t> others;
    for (size_t j = 0; j < data.size(); ++j)
      if (j != i) others.push_back(j);
    // Feasibility of: sum l_j w_j = w_i, sum l_j = 1, sum l_j b_j - s = b_i,
    // l >= 0, s >= 0.
    const int vars = static_cast<int>(others.size()) + 1;
    QMat a(n + 2, QVec(vars, Rational(0)));
    QVec rhs(n + 2);
    for (size_t jj = 0; jj < others.size(); ++jj) {
      for (int r = 0; r < n; ++r) a[r][jj] = data[others[jj]].first[r];
      a[n][jj] = 1;
      a[n + 1][jj] = data[others[jj]].second;
    }
    a[n + 1][vars - 1] = -1;
    for (int r = 0; r < n; ++r) rhs[r] = data[i].first[r];
    rhs[n] = 1;
    rhs[n + 1] = data[i].second;
    if (!lp_feasible(a, rhs)) gt.points.push_back(data[i]);
  }
  std::sort(gt.points.begin(), gt.points.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return lex_less(a.first, b.first);
    return a.second < b.second;
  });
  return gt;
}

std::vector<PLPiece> concave_hull_pieces(const std::vector<std::pair<QVec, Rational>>& points) {
  std::vector<QVec> etas = complex_vertices(points, nullptr);
  if (etas.empty()) throw GeometryError("hull data is affinely degenerate");
  std::vector<PLPiece> pieces;
  for (const auto& eta : etas) {
    Rational best;
    bool first = true;
    for (const auto& [w, b] : points) {
      Rational v = b - dot(w, eta);
      if (first || v > best) best = v;
      first = false;
    }
    pieces.push_back({eta, best});
  }
  return pieces;
}

PLConcave inv_g_transform(const GTransform& gt, const HPolytope& carrier) {
  // Gradients of the transform must lie in the (negated) carrier: every
  // support point must belong to the carrier, and the carrier must be
  // covered by their hull so the conjugate is finite on all of it.
  for (const auto& [w, b] : gt.points) {
    if (!carrier.contains(w))
      throw InputError("transform gradient outside the carrier polytope");
  }
  const int n = carrier.dim();
  for (const auto& v : carrier.vertices()) {
    const int vars = static_cast<int>(gt.points.size());
    QMat a(n + 1, QVec(vars, Rational(0)));
    QVec rhs(n + 1);
    for (int j = 0; j < vars; ++j) {
      for (int r = 0; r < n; ++r) a[r][j] = gt.points[j].first[r];
      a[n][j] = 1;
    }
    for (int r = 0; r < n; ++r) rhs[r] = v[r];
    rhs[n] = 1;
    if (!lp_feasible(a, rhs))
      throw InputError("transform support does not cover the carrier");
  }
  return PLConcave(carrier, concave_hull_pieces(gt.points));
}

Rational evaluate_potential(const PLConcave& g, const ToricValuation& xi) {
  // G_g(xi) + min_P <., xi>.
  Rational gmax;
  bool first = true;
  for (const auto& w : g.subdivision_vertices()) {
    Rational v = g.eval(w) - dot(w, xi);
    if (first || v > gmax) gmax = v;
    first = false;
  }
  SupportResult sup = lp_support(g.carrier(), xi);
  return gmax + sup.min;
}

Rational evaluate_potential_maxform(const std::vector<PLPiece>& max_pieces,
                                    const HPolytope& carrier, const ToricValuation& xi) {
  Rational best;
  bool first = true;
  for (const auto& p : max_pieces) {
    // Affine potential: h_P(slope - xi) + c + min_P <., xi>.
    Rational v = lp_support(carrier, sub(p.slope, xi)).max + p.c;
    if (first || v > best) best = v;
    first = false;
  }
  return best + lp_support(carrier, xi).min;
}

std::vector<Cell> subdivision(const PLConcave& g) {
  std::vector<Cell> cells;
  for (size_t k = 0; k < g.pieces().size(); ++k) {
    cells.push_back({g.cells()[k], g.pieces()[k].slope, g.multiplicity(static_cast<int>(k))});
  }
  return cells;
}

PathFamily::PathFamily(const PLConcave& g0, const PLConcave& g1) : carrier_(g0.carrier()) {
  if (!(g0.carrier() == g1.carrier()))
    throw InputError("path endpoints live on different carriers");
  std::vector<std::pair<QVec, Rational>> d0, d1;
  for (const auto& w : g0.subdivision_vertices()) d0.push_back({w, g0.eval(w)});
  for (const auto& w : g1.subdivision_vertices()) d1.push_back({w, g1.eval(w)});
  etas_ = complex_vertices(d0, &d1);
  if (etas_.empty()) throw GeometryError("internal: path refinement has no vertices");
  GTransform t0, t1;
  t0.points = d0;
  t1.points = d1;
  for (const auto& eta : etas_) {
    v0_.push_back(t0.eval(eta));
    v1_.push_back(t1.eval(eta));
  }
}

PLConcave PathFamily::at(const Rational& s) const {
  std::vector<PLPiece> pieces;
  for (size_t k = 0; k < etas_.size(); ++k) {
    pieces.push_back({etas_[k], v0_[k] + s * (v1_[k] - v0_[k])});
  }
  return PLConcave(carrier_, std::move(pieces));
}

const std::vector<int>& PathFamily::active_indices() const {
  if (!active_.empty() || etas_.empty()) return active_;
  PLConcave mid = at(make_rational(1, 2));
  for (size_t k = 0; k < etas_.size(); ++k) {
    Rational c_mid = v0_[k] + make_rational(1, 2) * (v1_[k] - v0_[k]);
    for (const auto& piece : mid.pieces()) {
      if (piece.slope == etas_[k] && piece.c == c_mid) {
        active_.push_back(static_cast<int>(k));
        break;
      }
    }
  }
  return active_;
}

PLConcave linear_path(const PLConcave& g0, const PLConcave& g1, const Rational& s) {
  if (s < 0 || s > 1) throw InputError("path parameter outside [0,1]");
  return PathFamily(g0, g1).at(s);
}

PLConcave scale_action(const PLConcave& g, const Rational& c) {
  if (c <= 0) throw InputError("scaling action needs a positive factor");
  std::vector<PLPiece> pieces;
  for (const auto& p : g.pieces()) pieces.push_back({scale(p.slope, c), p.c * c});
  return PLConcave(g.carrier(), std::move(pieces));
}

namespace {

// Vertices of the (possibly lower-dimensional) face of `cell` cut by the
// hyperplane <alpha, normal> = rhs.
std::vector<QVec> face_vertices(const HPolytope& cell, const QVec& normal, const Rational& rhs) {
  std::vector<QVec> out;
  for (const auto& v : cell.vertices()) {
    if (dot(v, normal) == rhs) out.push_back(v);
  }
  // Edge crossings: for each pair of vertices on opposite sides.
  for (size_t i = 0; i < cell.vertices().size(); ++i) {
    for (size_t j = i + 1; j < cell.vertices().size(); ++j) {
      Rational vi = dot(cell.vertices()[i], normal) - rhs;
      Rational vj = dot(cell.vertices()[j], normal) - rhs;
      if ((vi < 0 && vj > 0) || (vi > 0 && vj < 0)) {
        // Adjacency filter: share n-1 active facets.
        std::vector<int> shared;
        std::set_intersection(cell.vertex_active()[i].begin(), cell.vertex_active()[i].end(),
                              cell.vertex_active()[j].begin(), cell.vertex_active()[j].end(),
                              std::back_inserter(shared));
        if (static_cast<int>(shared.size()) < cell.dim() - 1) continue;
        Rational t = vi / (vi - vj);
        QVec pt = add(cell.vertices()[i],
                      scale(sub(cell.vertices()[j], cell.vertices()[i]), t));
        out.push_back(std::move(pt));
      }
    }
  }
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Envelope concave_envelope(const std::vector<PLPiece>& max_pieces, const HPolytope& carrier) {
  if (max_pieces.empty()) throw InputError("envelope needs at least one piece");
  // Arrangement vertices: vertices of the regions where each piece is max.
  std::vector<QVec> verts;
  for (size_t l = 0; l < max_pieces.size(); ++l) {
    std::vector<QHalfspace> hs;
    for (size_t m = 0; m < max_pieces.size(); ++m) {
      if (m == l) continue;
      // <alpha, z_l> + d_l >= <alpha, z_m> + d_m.
      hs.push_back({sub(max_pieces[l].slope, max_pieces[m].slope),
                    max_pieces[l].c - max_pieces[m].c});
    }
    auto region = intersect(carrier, hs);
    if (!region) continue;
    for (const auto& v : region->vertices()) verts.push_back(v);
  }
  std::sort(verts.begin(), verts.end(), lex_less);
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  if (verts.empty()) throw GeometryError("envelope arrangement has no vertices");

  auto f_eval = [&](const QVec& alpha) {
    Rational best;
    bool first = true;
    for (const auto& p : max_pieces) {
      Rational v = dot(alpha, p.slope) + p.c;
      if (first || v > best) best = v;
      first = false;
    }
    return best;
  };

  std::vector<std::pair<QVec, Rational>> data;
  for (const auto& w : verts) data.push_back({w, f_eval(w)});
  Envelope result{PLConcave(carrier, concave_hull_pieces(data)), {}};

  // Contact set {env = f}: per envelope cell, either the whole cell (when
  // the cell's piece is one of f's pieces there) or hyperplane faces.
  const PLConcave& env = result.env;
  for (size_t k = 0; k < env.pieces().size(); ++k) {
    const auto& cell = env.cells()[k];
    const auto& piece = env.pieces()[k];
    // Full-dimensional contact: env == f on the cell iff they agree at all
    // cell vertices (both are affine... f is convex, env affine there; they
    // agree on the cell iff equal at vertices and f is affine on the cell).
    bool full = true;
    for (const auto& v : cell.vertices()) {
      if (env.eval(v) != f_eval(v)) {
        full = false;
        break;
      }
    }
    if (full) {
      Envelope::ContactFace face;
      face.vertices = cell.vertices();
      face.full_dimensional = true;
      result.contact.push_back(std::move(face));
      continue;
    }
    for (const auto& fp : max_pieces) {
      // Face where the envelope piece equals this f-piece and f attains it.
      QVec normal = sub(piece.slope, fp.slope);
      Rational rhs = fp.c - piece.c;
      bool zero = std::all_of(normal.begin(), normal.end(),
                              [](const Rational& x) { return x == 0; });
      std::vector<QVec> face_pts;
      if (zero) {
        if (piece.c != fp.c) continue;
        face_pts = cell.vertices();
      } else {
        face_pts = face_vertices(cell, normal, rhs);
      }
      std::vector<QVec> contact_pts;
      for (const auto& pt : face_pts) {
        if (env.eval(pt) == f_eval(pt)) contact_pts.push_back(pt);
      }
      if (!contact_pts.empty()) {
        result.contact.push_back({std::move(contact_pts), false});
      }
    }
  }
  return result;
}

}  // namespace kstab
