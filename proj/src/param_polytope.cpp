#include "kstab/param_polytope.hpp"

#include <algorithm>
#include <cmath>

#include "kstab/errors.hpp"

namespace kstab {

ParamPolytope::ParamPolytope(int dim, int nparams, std::vector<ParamHalfspace> halfspaces)
    : dim_(dim), nparams_(nparams), hs_(std::move(halfspaces)) {
  for (const auto& h : hs_) {
    if (static_cast<int>(h.normal.size()) != dim_ ||
        static_cast<int>(h.cslope.size()) != nparams_)
      throw InputError("parametric half-space dimension mismatch");
  }
}

ParamPolytope ParamPolytope::restricted(int free_param, const QVec& fixed) const {
  std::vector<ParamHalfspace> hs;
  hs.reserve(hs_.size());
  for (const auto& h : hs_) {
    Rational c0 = h.c0;
    for (int j = 0; j < nparams_; ++j) {
      if (j == free_param) continue;
      c0 += h.cslope[j] * fixed[j];
    }
    hs.push_back({h.normal, c0, QVec{h.cslope[free_param]}});
  }
  return ParamPolytope(dim_, 1, std::move(hs));
}

CellSnapshot ParamPolytope::snapshot(const QVec& tau) const {
  CellSnapshot snap;
  std::vector<QHalfspace> hs;
  for (const auto& h : hs_) hs.push_back({h.normal, h.offset_at(tau)});
  auto poly = HPolytope::try_intersection(dim_, std::move(hs));
  if (!poly) return snap;  // empty (or degenerate) at the probe
  snap.empty = false;

  // Tight patterns with respect to the raw constraint list.
  const auto& verts = poly->vertices();
  for (const auto& v : verts) {
    std::vector<int> tight;
    for (size_t i = 0; i < hs_.size(); ++i) {
      if (dot(v, hs_[i].normal) == -hs_[i].offset_at(tau)) tight.push_back(static_cast<int>(i));
    }
    // Defining subset: first lex n-subset of the tight set with independent
    // normals (deterministic).
    std::vector<int> defs;
    QMat rows;
    for (int i : tight) {
      QMat trial = rows;
      trial.push_back(hs_[i].normal);
      if (rank(trial) == static_cast<int>(trial.size())) {
        rows = std::move(trial);
        defs.push_back(i);
        if (static_cast<int>(defs.size()) == dim_) break;
      }
    }
    if (static_cast<int>(defs.size()) != dim_)
      throw GeometryError("internal: vertex without defining subset");
    snap.vertex_defs.push_back(std::move(defs));
    snap.vertex_tight.push_back(std::move(tight));
  }
  snap.simplices = triangulate_indices(*poly);
  return snap;
}

std::optional<std::vector<QVec>> ParamPolytope::evaluate(const CellSnapshot& s,
                                                         const QVec& tau) const {
  if (s.empty) return std::vector<QVec>{};
  std::vector<Rational> offsets(hs_.size());
  for (size_t i = 0; i < hs_.size(); ++i) offsets[i] = hs_[i].offset_at(tau);
  std::vector<QVec> verts;
  verts.reserve(s.vertex_defs.size());
  for (size_t v = 0; v < s.vertex_defs.size(); ++v) {
    QMat a(dim_, QVec(dim_));
    QVec b(dim_);
    for (int i = 0; i < dim_; ++i) {
      a[i] = hs_[s.vertex_defs[v][i]].normal;
      b[i] = -offsets[s.vertex_defs[v][i]];
    }
    auto x = solve_linear(std::move(a), std::move(b));
    if (!x) return std::nullopt;
    // Feasibility and unchanged tight pattern.
    std::vector<int> tight;
    for (size_t i = 0; i < hs_.size(); ++i) {
      Rational val = dot(*x, hs_[i].normal) + offsets[i];
      if (val < 0) return std::nullopt;
      if (val == 0) tight.push_back(static_cast<int>(i));
    }
    if (tight != s.vertex_tight[v]) return std::nullopt;
    verts.push_back(std::move(*x));
  }
  return verts;
}

Rational ParamPolytope::integrate(const CellSnapshot& s, const std::vector<QVec>& verts,
                                  const Polynomial& poly) {
  Rational total = 0;
  for (const auto& simplex : s.simplices) {
    std::vector<QVec> pts;
    for (int i : simplex) pts.push_back(verts[i]);
    total += integrate_polynomial_simplex(pts, poly);
  }
  return total;
}

namespace {

// Nodes/weights for Gauss-Legendre on [0,1].
void gauss_rule(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  // Newton iteration on Legendre polynomials, standard construction.
  nodes.resize(order);
  weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = order * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = 0.5 * (x + 1.0);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

// Maps the tensor Gauss grid on [0,1]^n through the Duffy-style split of the
// standard simplex, integrating f over one coordinate simplex.
double gauss_simplex(const std::vector<std::vector<double>>& verts,
                     const std::function<double(const std::vector<double>&)>& f, int order) {
  const int n = static_cast<int>(verts.size()) - 1;
  std::vector<double> nodes, weights;
  gauss_rule(order, nodes, weights);
  // Volume factor: |det J| / n! times the Duffy Jacobian handled below.
  std::vector<std::vector<double>> jac(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jac[j][i] = verts[i + 1][j] - verts[0][j];
  // det via Gaussian elimination (n <= 3).
  double det = 1.0;
  {
    auto m = jac;
    for (int c = 0; c < n; ++c) {
      int p = c;
      for (int r = c + 1; r < n; ++r)
        if (std::fabs(m[r][c]) > std::fabs(m[p][c])) p = r;
      if (m[p][c] == 0.0) return 0.0;
      if (p != c) {
        std::swap(m[p], m[c]);
        det = -det;
      }
      det *= m[c][c];
      for (int r = c + 1; r < n; ++r) {
        double fac = m[r][c] / m[c][c];
        for (int cc = c; cc < n; ++cc) m[r][cc] -= fac * m[c][cc];
      }
    }
  }
  det = std::fabs(det);

  double total = 0.0;
  std::vector<int> idx(n, 0);
  std::vector<double> lambda(n), point(n);
  for (;;) {
    double w = 1.0;
    // Duffy: lambda_1 = u1, lambda_2 = u2(1-u1), ... maps cube to simplex.
    double remaining = 1.0;
    for (int i = 0; i < n; ++i) {
      double u = nodes[idx[i]];
      lambda[i] = u * remaining;
      w *= weights[idx[i]] * remaining;
      remaining -= lambda[i];
    }
    for (int j = 0; j < n; ++j) {
      double x = verts[0][j];
      for (int i = 0; i < n; ++i) x += lambda[i] * (verts[i + 1][j] - verts[0][j]);
      point[j] = x;
    }
    total += w * f(point);
    int c = 0;
    while (c < n && ++idx[c] == order) idx[c++] = 0;
    if (c == n) break;
  }
  return total * det;
}

}  // namespace

double ParamPolytope::integrate_numeric(const CellSnapshot& s, const std::vector<QVec>& verts,
                                        const std::function<double(const std::vector<double>&)>& f,
                                        double rel_tol, double* achieved_err) {
  std::vector<std::vector<std::vector<double>>> simplices;
  for (const auto& simplex : s.simplices) {
    std::vector<std::vector<double>> pts;
    for (int i : simplex) {
      std::vector<double> p;
      for (const auto& c : verts[i]) p.push_back(to_double(c));
      pts.push_back(std::move(p));
    }
    simplices.push_back(std::move(pts));
  }
  int order = 4;
  double prev = 0.0;
  for (const auto& sp : simplices) prev += gauss_simplex(sp, f, order);
  double err = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 8; ++round) {
    order *= 2;
    double cur = 0.0;
    for (const auto& sp : simplices) cur += gauss_simplex(sp, f, order);
    err = std::fabs(cur - prev);
    prev = cur;
    if (err <= rel_tol * std::max(1.0, std::fabs(cur))) break;
  }
  if (achieved_err) *achieved_err = err;
  if (err > rel_tol * std::max(1.0, std::fabs(prev)))
    throw QuadratureError("simplex quadrature did not converge", err);
  return prev;
}

SubdivisionFamily::SubdivisionFamily(int dim, int nparams, std::vector<ParamHalfspace> carrier,
                                     std::vector<Piece> pieces)
    : dim_(dim),
      nparams_(nparams),
      carrier_(std::move(carrier)),
      pieces_(std::move(pieces)),
      carrier_poly_(dim, nparams, carrier_) {
  if (pieces_.empty()) throw InputError("subdivision needs at least one piece");
  for (int k = 0; k < static_cast<int>(pieces_.size()); ++k)
    cell_polys_.push_back(build_cell_polytope(k));
}

ParamPolytope SubdivisionFamily::build_cell_polytope(int k) const {
  // Piece k minimal: <alpha, xi_k> + c_k(tau) <= <alpha, xi_j> + c_j(tau), i.e.
  // <alpha, xi_j - xi_k> >= -(c_j(tau) - c_k(tau)).
  std::vector<ParamHalfspace> hs = carrier_;
  for (size_t j = 0; j < pieces_.size(); ++j) {
    if (static_cast<int>(j) == k) continue;
    QVec normal = sub(pieces_[j].slope, pieces_[k].slope);
    bool zero = true;
    for (const auto& x : normal)
      if (x != 0) zero = false;
    if (zero) continue;  // identical slopes handled by piece normalization upstream
    Rational c0 = pieces_[j].c0 - pieces_[k].c0;
    QVec cs(nparams_);
    for (int t = 0; t < nparams_; ++t) cs[t] = pieces_[j].cslope[t] - pieces_[k].cslope[t];
    hs.push_back({std::move(normal), c0, std::move(cs)});
  }
  return ParamPolytope(dim_, nparams_, std::move(hs));
}

SubdivisionFamily::Snapshot SubdivisionFamily::snapshot(const QVec& tau) const {
  Snapshot snap;
  snap.carrier = carrier_poly_.snapshot(tau);
  if (snap.carrier.empty) throw GeometryError("subdivision carrier is empty at probe");
  for (size_t k = 0; k < pieces_.size(); ++k) {
    snap.cells.push_back(cell_polytope(static_cast<int>(k)).snapshot(tau));
  }
  return snap;
}

std::optional<std::vector<Rational>> SubdivisionFamily::cell_integrals(
    const Snapshot& s, const QVec& tau, const Polynomial& weight) const {
  auto carrier_verts = carrier_poly_.evaluate(s.carrier, tau);
  if (!carrier_verts) return std::nullopt;
  Rational carrier_total = ParamPolytope::integrate(s.carrier, *carrier_verts, weight);

  std::vector<Rational> vals(pieces_.size(), Rational(0));
  Rational tile_sum = 0;
  for (size_t k = 0; k < pieces_.size(); ++k) {
    if (s.cells[k].empty) continue;
    const ParamPolytope& cell = cell_polytope(static_cast<int>(k));
    auto verts = cell.evaluate(s.cells[k], tau);
    if (!verts) return std::nullopt;
    vals[k] = ParamPolytope::integrate(s.cells[k], *verts, weight);
    tile_sum += vals[k];
  }
  // Exact tiling certificate; also catches cells silently opening up.
  if (tile_sum != carrier_total) return std::nullopt;
  return vals;
}

std::optional<std::vector<double>> SubdivisionFamily::cell_integrals_numeric(
    const Snapshot& s, const QVec& tau,
    const std::function<double(const std::vector<double>&)>& f, double rel_tol,
    double* achieved_err) const {
  auto carrier_verts = carrier_poly_.evaluate(s.carrier, tau);
  if (!carrier_verts) return std::nullopt;
  std::vector<double> vals(pieces_.size(), 0.0);
  double err_total = 0.0;
  for (size_t k = 0; k < pieces_.size(); ++k) {
    if (s.cells[k].empty) continue;
    const ParamPolytope& cell = cell_polytope(static_cast<int>(k));
    auto verts = cell.evaluate(s.cells[k], tau);
    if (!verts) return std::nullopt;
    double err = 0.0;
    vals[k] = ParamPolytope::integrate_numeric(s.cells[k], *verts, f, rel_tol, &err);
    err_total += err;
  }
  if (achieved_err) *achieved_err = err_total;
  return vals;
}

std::optional<Chamber> snapshot_chamber(const ParamPolytope& poly, const CellSnapshot& snap,
                                        const Rational& probe) {
  if (snap.empty) return std::nullopt;  // emptiness has no vertex certificate
  const auto& hs = poly.halfspaces();
  QVec probe_v{probe};
  QVec probe_v1{probe + 1};
  auto at0 = poly.evaluate(snap, probe_v);
  if (!at0) return std::nullopt;

  // Vertex coordinates are affine in the parameter: recover slopes from a
  // second solve of the same defining systems.
  std::vector<QVec> dv(at0->size());
  {
    std::vector<Rational> offsets1(hs.size());
    for (size_t i = 0; i < hs.size(); ++i) offsets1[i] = hs[i].offset_at(probe_v1);
    for (size_t v = 0; v < snap.vertex_defs.size(); ++v) {
      const int n = poly.dim();
      QMat a(n, QVec(n));
      QVec b(n);
      for (int i = 0; i < n; ++i) {
        a[i] = hs[snap.vertex_defs[v][i]].normal;
        b[i] = -offsets1[snap.vertex_defs[v][i]];
      }
      auto x1 = solve_linear(std::move(a), std::move(b));
      if (!x1) return std::nullopt;
      dv[v] = sub(*x1, (*at0)[v]);
    }
  }

  Chamber ch;
  for (size_t v = 0; v < at0->size(); ++v) {
    for (size_t i = 0; i < hs.size(); ++i) {
      Rational val0 = dot((*at0)[v], hs[i].normal) + hs[i].offset_at(probe_v);
      Rational slope = dot(dv[v], hs[i].normal) + hs[i].cslope[0];
      bool tight = std::find(snap.vertex_tight[v].begin(), snap.vertex_tight[v].end(),
                             static_cast<int>(i)) != snap.vertex_tight[v].end();
      if (tight) {
        if (slope != 0) return std::nullopt;  // non-generic probe: face leaves immediately
        continue;
      }
      if (val0 <= 0) return std::nullopt;
      if (slope < 0) {
        Rational event = probe + val0 / (-slope);
        if (!ch.hi || event < *ch.hi) ch.hi = event;
      } else if (slope > 0) {
        Rational event = probe - val0 / slope;
        if (!ch.lo || event > *ch.lo) ch.lo = event;
      }
    }
  }
  return ch;
}

Chamber chamber_intersect(const Chamber& a, const Chamber& b) {
  Chamber c = a;
  if (b.lo && (!c.lo || *b.lo > *c.lo)) c.lo = b.lo;
  if (b.hi && (!c.hi || *b.hi < *c.hi)) c.hi = b.hi;
  return c;
}

std::optional<Chamber> family_chamber(const SubdivisionFamily& fam,
                                      const SubdivisionFamily::Snapshot& snap,
                                      const Rational& probe) {
  auto ch = snapshot_chamber(fam.carrier(), snap.carrier, probe);
  if (!ch) return std::nullopt;
  for (size_t k = 0; k < snap.cells.size(); ++k) {
    if (snap.cells[k].empty) continue;
    auto cell_ch = snapshot_chamber(fam.cell_polytope(static_cast<int>(k)), snap.cells[k], probe);
    if (!cell_ch) return std::nullopt;
    *ch = chamber_intersect(*ch, *cell_ch);
  }
  return ch;
}

std::optional<Chamber> family_chamber_restricted(const SubdivisionFamily& fam,
                                                 const SubdivisionFamily::Snapshot& snap,
                                                 int free_param, const QVec& fixed,
                                                 const Rational& probe) {
  auto ch = snapshot_chamber(fam.carrier().restricted(free_param, fixed), snap.carrier, probe);
  if (!ch) return std::nullopt;
  for (size_t k = 0; k < snap.cells.size(); ++k) {
    if (snap.cells[k].empty) continue;
    auto cell_ch = snapshot_chamber(
        fam.cell_polytope(static_cast<int>(k)).restricted(free_param, fixed), snap.cells[k],
        probe);
    if (!cell_ch) return std::nullopt;
    *ch = chamber_intersect(*ch, *cell_ch);
  }
  return ch;
}

StableChamber stable_chamber_to_zero(const SubdivisionFamily& fam, Rational probe_hint) {
  Rational t0 = probe_hint;
  for (int attempt = 0; attempt < 80; ++attempt) {
    SubdivisionFamily::Snapshot snap;
    try {
      snap = fam.snapshot(QVec{t0});
    } catch (const GeometryError&) {
      t0 /= 2;
      continue;
    }
    auto ch = family_chamber(fam, snap, t0);
    if (!ch) {
      t0 = t0 * make_rational(7, 16);  // nudge off a non-generic probe
      continue;
    }
    if (ch->lo && *ch->lo > 0) {
      t0 = *ch->lo / 2;
      continue;
    }
    Rational hi = ch->hi ? *ch->hi : t0 * 2;
    return {std::move(snap), hi};
  }
  throw CombinatorialCollapse("no stable deformation chamber above zero");
}

Rational integrate_chambered(ChamberedFunction& f, const Rational& a, const Rational& b) {
  if (b <= a) return Rational(0);
  const int deg = f.max_degree();

  struct Segment {
    Rational a, b;
  };
  Rational total = 0;
  std::vector<Segment> stack{{a, b}};
  int guard = 0;
  while (!stack.empty()) {
    if (++guard > 4000) throw NonConvergence("chamber walk budget exceeded", 0.0);
    Segment seg = stack.back();
    stack.pop_back();
    if (seg.b <= seg.a) continue;

    // Probe a few interior points until the structure is generic.
    std::optional<Chamber> ch;
    Rational probe;
    static const std::pair<int, int> kFractions[] = {{1, 2}, {1, 3}, {2, 3}, {2, 5},
                                                     {3, 5}, {1, 7}, {6, 7}};
    for (const auto& [num, den] : kFractions) {
      probe = seg.a + (seg.b - seg.a) * Rational(num) / Rational(den);
      ch = f.rebuild(probe);
      if (ch) break;
    }
    if (!ch) throw NonConvergence("no generic probe found in chamber walk", 0.0);

    Rational lo = ch->lo && *ch->lo > seg.a ? *ch->lo : seg.a;
    Rational hi = ch->hi && *ch->hi < seg.b ? *ch->hi : seg.b;

    // Interpolate on (lo, hi) with one cross-check node.
    const int samples = deg + 2;
    QVec xs(samples), ys(samples);
    for (int i = 0; i < samples; ++i) {
      xs[i] = lo + (hi - lo) * Rational(i + 1) / Rational(samples + 1);
      ys[i] = f.eval(xs[i]);
    }
    QVec fit_x(xs.begin(), xs.begin() + deg + 1);
    QVec fit_y(ys.begin(), ys.begin() + deg + 1);
    QVec coeffs = interpolate_polynomial(fit_x, fit_y);
    if (eval_univariate(coeffs, xs[samples - 1]) != ys[samples - 1])
      throw DiagnosticError("integrand is not polynomial on a certified chamber");
    total += integrate_univariate(coeffs, lo, hi);

    if (lo > seg.a) stack.push_back({seg.a, lo});
    if (hi < seg.b) stack.push_back({hi, seg.b});
  }
  return total;
}

double integrate_numeric(const HPolytope& p,
                         const std::function<double(const std::vector<double>&)>& f,
                         double rel_tol, double* achieved_err) {
  std::vector<std::vector<std::vector<double>>> simplices;
  for (const auto& simplex : triangulate_indices(p)) {
    std::vector<std::vector<double>> pts;
    for (int i : simplex) {
      std::vector<double> pt;
      for (const auto& c : p.vertices()[i]) pt.push_back(to_double(c));
      pts.push_back(std::move(pt));
    }
    simplices.push_back(std::move(pts));
  }
  int order = 4;
  double prev = 0.0;
  for (const auto& sp : simplices) prev += gauss_simplex(sp, f, order);
  double err = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 8; ++round) {
    order *= 2;
    double cur = 0.0;
    for (const auto& sp : simplices) cur += gauss_simplex(sp, f, order);
    err = std::fabs(cur - prev);
    prev = cur;
    if (err <= rel_tol * std::max(1.0, std::fabs(cur))) break;
  }
  if (achieved_err) *achieved_err = err;
  if (err > rel_tol * std::max(1.0, std::fabs(prev)))
    throw QuadratureError("polytope quadrature did not converge", err);
  return prev;
}

}  // namespace kstab
