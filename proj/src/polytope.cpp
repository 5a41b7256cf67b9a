#include "kstab/polytope.hpp"

#include <algorithm>
#include <map>

#include "kstab/errors.hpp"
#include "kstab/lp.hpp"

namespace kstab {

namespace {

struct NormalizedFacet {
  ZVec u;
  Rational c;
};

// Scales a rational normal to the primitive integer covector on its ray,
// rescaling the offset to keep the same half-space.
NormalizedFacet normalize_halfspace(const QHalfspace& h) {
  ZVec u = primitive_direction(h.normal);
  // h.normal = mu * u with mu > 0.
  Rational mu;
  for (size_t i = 0; i < u.size(); ++i) {
    if (u[i] != 0) {
      mu = h.normal[i] / Rational(u[i]);
      break;
    }
  }
  if (mu <= 0) throw InputError("internal: normalization produced nonpositive scale");
  return {std::move(u), h.offset / mu};
}

int affine_rank(const std::vector<QVec>& pts) {
  if (pts.empty()) return -1;
  QMat diffs;
  for (size_t i = 1; i < pts.size(); ++i) diffs.push_back(sub(pts[i], pts[0]));
  if (diffs.empty()) return 0;
  return rank(diffs);
}

// Recession cone of {Ud >= 0} is nontrivial iff the normals do not span, or
// {Ud >= 0, sum_i <u_i, d> = 1} is feasible.
bool has_unbounded_direction(const std::vector<NormalizedFacet>& fs, int n) {
  QMat normal_mat;
  for (const auto& f : fs) normal_mat.push_back(to_qvec(f.u));
  if (rank(normal_mat) < n) return true;
  const int m = static_cast<int>(fs.size());
  // Variables: d = p - q (2n), slacks s (m). Rows: <u_i, p - q> - s_i = 0
  // for each i, plus sum_i <u_i, p - q> = 1.
  QMat a(m + 1, QVec(2 * n + m, Rational(0)));
  QVec b(m + 1, Rational(0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      a[i][j] = Rational(fs[i].u[j]);
      a[i][n + j] = -Rational(fs[i].u[j]);
      a[m][j] += Rational(fs[i].u[j]);
      a[m][n + j] -= Rational(fs[i].u[j]);
    }
    a[i][2 * n + i] = -1;
  }
  b[m] = 1;
  return lp_feasible(a, b);
}

}  // namespace

bool HPolytope::facets_size_eq(const HPolytope& o) const {
  if (facets_.size() != o.facets_.size()) return false;
  for (size_t i = 0; i < facets_.size(); ++i) {
    if (facets_[i].normal != o.facets_[i].normal || facets_[i].offset != o.facets_[i].offset)
      return false;
  }
  return true;
}

bool HPolytope::contains(const QVec& p) const {
  for (const auto& f : facets_) {
    if (dot(p, f.normal) < -f.offset) return false;
  }
  return true;
}

// Shared construction path. Enumerates vertices over facet n-subsets,
// validates the polytope contract, strips redundant facets, canonicalizes.
namespace detail {
struct Fields {
  int dim;
  std::vector<Halfspace> facets;
  std::vector<QVec> vertices;
  std::vector<std::vector<int>> active;
};

enum class BuildStatus { kOk, kEmptyOrDegenerate, kUnbounded };

BuildStatus build_fields(int n, const std::vector<QHalfspace>& halfspaces, bool check_bounded,
                         Fields& out) {
  if (n < 1) throw InputError("polytope dimension must be >= 1");
  if (halfspaces.empty()) throw InputError("polytope needs at least one half-space");

  // Normalize and deduplicate parallel half-spaces (keep the tightest).
  std::map<ZVec, Rational> tightest;
  for (const auto& h : halfspaces) {
    if (static_cast<int>(h.normal.size()) != n) throw InputError("normal dimension mismatch");
    NormalizedFacet f = normalize_halfspace(h);
    auto it = tightest.find(f.u);
    if (it == tightest.end()) {
      tightest.emplace(f.u, f.c);
    } else if (f.c < it->second) {
      it->second = f.c;
    }
  }
  std::vector<NormalizedFacet> fs;
  for (const auto& [u, c] : tightest) fs.push_back({u, c});
  const int fcount = static_cast<int>(fs.size());

  if (check_bounded && has_unbounded_direction(fs, n)) return BuildStatus::kUnbounded;

  // Vertex candidates: solve every n-subset of facet equalities.
  std::vector<QVec> verts;
  std::vector<int> subset(n);
  auto try_subset = [&](const std::vector<int>& idx) {
    QMat a(n, QVec(n));
    QVec b(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a[i][j] = Rational(fs[idx[i]].u[j]);
      b[i] = -fs[idx[i]].c;
    }
    auto x = solve_linear(std::move(a), std::move(b));
    if (!x) return;
    for (const auto& f : fs) {
      if (dot(*x, f.u) < -f.c) return;
    }
    verts.push_back(std::move(*x));
  };
  std::vector<int> idx(n);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      try_subset(idx);
      return;
    }
    for (int i = start; i <= fcount - (n - depth); ++i) {
      idx[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);

  std::sort(verts.begin(), verts.end(), lex_less);
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());

  if (verts.empty()) return BuildStatus::kEmptyOrDegenerate;
  if (affine_rank(verts) < n) return BuildStatus::kEmptyOrDegenerate;

  // Facet activity, then redundancy: a genuine facet carries an (n-1)-face.
  std::vector<std::vector<int>> facet_verts(fcount);
  for (int f = 0; f < fcount; ++f) {
    for (size_t v = 0; v < verts.size(); ++v) {
      if (dot(verts[v], fs[f].u) == -fs[f].c) facet_verts[f].push_back(static_cast<int>(v));
    }
  }
  std::vector<int> keep;
  for (int f = 0; f < fcount; ++f) {
    std::vector<QVec> pts;
    for (int v : facet_verts[f]) pts.push_back(verts[v]);
    if (!pts.empty() && affine_rank(pts) == n - 1) keep.push_back(f);
  }

  std::vector<Halfspace> facets;
  for (int f : keep) facets.push_back({fs[f].u, fs[f].c});
  std::vector<size_t> order(facets.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (facets[a].normal != facets[b].normal) return facets[a].normal < facets[b].normal;
    return facets[a].offset < facets[b].offset;
  });
  std::vector<Halfspace> sorted;
  for (size_t i : order) sorted.push_back(facets[i]);

  std::vector<std::vector<int>> active(verts.size());
  for (size_t v = 0; v < verts.size(); ++v) {
    for (size_t f = 0; f < sorted.size(); ++f) {
      if (dot(verts[v], sorted[f].normal) == -sorted[f].offset)
        active[v].push_back(static_cast<int>(f));
    }
  }

  out.dim = n;
  out.facets = std::move(sorted);
  out.vertices = std::move(verts);
  out.active = std::move(active);
  return BuildStatus::kOk;
}

}  // namespace detail

HPolytope HPolytope::from_halfspaces(int dim, std::vector<QHalfspace> halfspaces,
                                     bool check_bounded) {
  detail::Fields f;
  auto status = detail::build_fields(dim, halfspaces, check_bounded, f);
  if (status == detail::BuildStatus::kUnbounded)
    throw GeometryError("polytope is unbounded");
  if (status == detail::BuildStatus::kEmptyOrDegenerate)
    throw GeometryError("polytope is empty or lower-dimensional");
  HPolytope p;
  p.dim_ = f.dim;
  p.facets_ = std::move(f.facets);
  p.vertices_ = std::move(f.vertices);
  p.vertex_active_ = std::move(f.active);
  return p;
}

std::optional<HPolytope> HPolytope::try_intersection(int dim,
                                                     std::vector<QHalfspace> halfspaces) {
  detail::Fields f;
  auto status = detail::build_fields(dim, halfspaces, /*check_bounded=*/false, f);
  if (status != detail::BuildStatus::kOk) return std::nullopt;
  HPolytope p;
  p.dim_ = f.dim;
  p.facets_ = std::move(f.facets);
  p.vertices_ = std::move(f.vertices);
  p.vertex_active_ = std::move(f.active);
  return p;
}

std::optional<HPolytope> intersect(const HPolytope& p, const std::vector<QHalfspace>& halfspaces) {
  std::vector<QHalfspace> all;
  for (const auto& f : p.facets()) all.push_back({to_qvec(f.normal), f.offset});
  for (const auto& h : halfspaces) all.push_back(h);
  return HPolytope::try_intersection(p.dim(), std::move(all));
}

Rational simplex_volume(const std::vector<QVec>& verts) {
  const int n = static_cast<int>(verts.size()) - 1;
  QMat j(n, QVec(n));
  for (int i = 0; i < n; ++i) j[i] = sub(verts[i + 1], verts[0]);
  Rational det = determinant(std::move(j));
  Integer nf = 1;
  for (int i = 2; i <= n; ++i) nf *= i;
  return abs(det) / Rational(nf);
}

Rational integrate_polynomial_simplex(const std::vector<QVec>& verts, const Polynomial& poly) {
  const int n = static_cast<int>(verts.size()) - 1;
  QMat jm(n, QVec(n));
  std::vector<QVec> cols;
  for (int i = 0; i < n; ++i) {
    jm[i] = sub(verts[i + 1], verts[0]);
    cols.push_back(jm[i]);
  }
  Rational jac = abs(determinant(std::move(jm)));
  if (jac == 0) return Rational(0);
  Polynomial in_bary = poly.compose_affine(verts[0], cols);
  // Integral over the standard simplex of prod lambda_i^{a_i} is
  // prod(a_i!) / (n + sum a_i)!.
  Rational total = 0;
  for (const auto& [e, c] : in_bary.terms()) {
    Integer num = 1;
    int deg = 0;
    for (int a : e) {
      for (int k = 2; k <= a; ++k) num *= k;
      deg += a;
    }
    Integer den = 1;
    for (int k = 2; k <= n + deg; ++k) den *= k;
    total += c * make_rational(num, den);
  }
  return total * jac;
}

namespace {

// Chart vertex coordinates of a parent vertex: solve basis * y = v - base.
QVec chart_coords(const FacetChart& chart, const QVec& v) {
  const int n = static_cast<int>(v.size());
  const int m = static_cast<int>(chart.basis.size());
  QMat a(n, QVec(m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) a[i][j] = chart.basis[j][i];
  auto y = solve_least_structured(a, sub(v, chart.base));
  if (!y) throw GeometryError("internal: facet chart solve failed");
  return *y;
}

}  // namespace

FacetChart facet_chart(const HPolytope& p, int facet_index) {
  const int n = p.dim();
  const auto& f = p.facets()[facet_index];
  FacetChart chart;

  std::vector<int> active;
  for (size_t v = 0; v < p.vertices().size(); ++v) {
    const auto& acts = p.vertex_active()[v];
    if (std::find(acts.begin(), acts.end(), facet_index) != acts.end())
      active.push_back(static_cast<int>(v));
  }
  if (active.empty()) throw GeometryError("facet without vertices");
  chart.base = p.vertices()[active[0]];

  ZMat u_comp = unimodular_completion(f.normal);
  // Columns 2..n of the completion span the lattice u^perp.
  for (int j = 1; j < n; ++j) {
    QVec col(n);
    for (int i = 0; i < n; ++i) col[i] = Rational(u_comp[i][j]);
    chart.basis.push_back(std::move(col));
  }

  if (n == 1) {
    chart.parent_vertices = active;
    return chart;
  }

  // H-representation of the facet in chart coordinates.
  std::vector<QHalfspace> hs;
  for (size_t g = 0; g < p.facets().size(); ++g) {
    if (static_cast<int>(g) == facet_index) continue;
    const auto& other = p.facets()[g];
    QVec normal(n - 1);
    bool zero = true;
    for (int j = 0; j < n - 1; ++j) {
      normal[j] = dot(chart.basis[j], other.normal);
      if (normal[j] != 0) zero = false;
    }
    if (zero) continue;
    Rational offset = other.offset + dot(chart.base, other.normal);
    hs.push_back({std::move(normal), offset});
  }
  auto facet_poly = HPolytope::try_intersection(n - 1, std::move(hs));
  if (!facet_poly) throw GeometryError("internal: facet chart degenerate");

  // Match chart vertices back to parent vertex indices.
  chart.parent_vertices.assign(facet_poly->vertices().size(), -1);
  for (int pv : active) {
    QVec y = chart_coords(chart, p.vertices()[pv]);
    for (size_t i = 0; i < facet_poly->vertices().size(); ++i) {
      if (facet_poly->vertices()[i] == y) {
        chart.parent_vertices[i] = pv;
        break;
      }
    }
  }
  for (int idx : chart.parent_vertices) {
    if (idx < 0) throw GeometryError("internal: facet chart vertex mismatch");
  }
  chart.poly = std::move(*facet_poly);
  return chart;
}

std::vector<std::vector<int>> triangulate_indices(const HPolytope& p) {
  const int n = p.dim();
  if (n == 1) {
    return {{0, 1}};
  }
  std::vector<std::vector<int>> simplices;
  const auto& apex_active = p.vertex_active()[0];
  for (size_t f = 0; f < p.facets().size(); ++f) {
    if (std::find(apex_active.begin(), apex_active.end(), static_cast<int>(f)) !=
        apex_active.end())
      continue;
    FacetChart chart = facet_chart(p, static_cast<int>(f));
    for (const auto& sub_simplex : triangulate_indices(*chart.poly)) {
      std::vector<int> s{0};
      for (int i : sub_simplex) s.push_back(chart.parent_vertices[i]);
      simplices.push_back(std::move(s));
    }
  }
  return simplices;
}

Rational volume(const HPolytope& p) {
  Rational total = 0;
  for (const auto& s : triangulate_indices(p)) {
    std::vector<QVec> verts;
    for (int i : s) verts.push_back(p.vertices()[i]);
    total += simplex_volume(verts);
  }
  return total;
}

Rational integrate_polynomial(const HPolytope& p, const Polynomial& poly) {
  Rational total = 0;
  for (const auto& s : triangulate_indices(p)) {
    std::vector<QVec> verts;
    for (int i : s) verts.push_back(p.vertices()[i]);
    total += integrate_polynomial_simplex(verts, poly);
  }
  return total;
}

SupportResult lp_support(const HPolytope& p, const QVec& eta) {
  SupportResult r;
  bool first = true;
  for (size_t v = 0; v < p.vertices().size(); ++v) {
    Rational val = dot(p.vertices()[v], eta);
    if (first || val > r.max) {
      r.max = val;
      r.argmax_vertices = {static_cast<int>(v)};
    } else if (val == r.max) {
      r.argmax_vertices.push_back(static_cast<int>(v));
    }
    if (first || val < r.min) {
      r.min = val;
      r.argmin_vertices = {static_cast<int>(v)};
    } else if (val == r.min) {
      r.argmin_vertices.push_back(static_cast<int>(v));
    }
    first = false;
  }
  return r;
}

FacetMeasure::FacetMeasure(const HPolytope& p) : p_(p) {
  const int n = p_.dim();
  for (size_t f = 0; f < p_.facets().size(); ++f) {
    FacetChart chart = facet_chart(p_, static_cast<int>(f));
    if (n == 1) {
      sigma_.push_back(Rational(1));
    } else {
      sigma_.push_back(volume(*chart.poly));
    }
    charts_.push_back(std::move(chart));
  }
}

Rational FacetMeasure::total() const {
  Rational t = 0;
  for (const auto& s : sigma_) t += s;
  return t;
}

Rational FacetMeasure::integrate(int facet, const Polynomial& density) const {
  const auto& chart = charts_[facet];
  if (p_.dim() == 1) return density.eval(chart.base);
  Polynomial in_chart = density.compose_affine(chart.base, chart.basis);
  return integrate_polynomial(*chart.poly, in_chart);
}

HPolytope apply_unimodular(const HPolytope& p, const ZMat& m, const ZVec& t) {
  const int n = p.dim();
  // beta = M alpha + t maps {<alpha,u> >= -c} to {<beta, M^{-T}u> >= -c + <t, M^{-T}u>}.
  QMat mq(n, QVec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mq[i][j] = Rational(m[i][j]);
  std::vector<QHalfspace> hs;
  for (const auto& f : p.facets()) {
    // Solve M^T w = u for w.
    QMat mt(n, QVec(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mt[i][j] = Rational(m[j][i]);
    auto w = solve_linear(std::move(mt), to_qvec(f.normal));
    if (!w) throw InputError("apply_unimodular: matrix not invertible");
    Rational shift = 0;
    for (int i = 0; i < n; ++i) shift += (*w)[i] * t[i];
    hs.push_back({*w, f.offset - shift});
  }
  return HPolytope::from_halfspaces(n, std::move(hs), /*check_bounded=*/false);
}

}  // namespace kstab
