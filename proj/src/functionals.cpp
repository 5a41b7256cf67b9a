#include "kstab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "kstab/errors.hpp"

namespace kstab {

namespace {

Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Shared structural data for the path from zero to g, pruned to the pieces
// active on the open interval.
struct PathContext {
  PathContext(const PLConcave& g_in) : g(g_in), path(PLConcave::zero(g_in.carrier()), g_in) {
    const auto& act = path.active_indices();
    for (int k : act) {
      slopes.push_back(path.slopes()[k]);
      c0.push_back(path.g0_values()[k]);
      c1.push_back(path.g1_values()[k]);
      phi.push_back(evaluate_potential(g_in, path.slopes()[k]));
    }
    nf = Rational(factorial(g_in.carrier().dim()));
  }

  // Families over the pruned pieces. Parameters: (s) or (s, t).
  SubdivisionFamily family(bool with_deformation, const std::vector<Rational>* shifts) const {
    const HPolytope& p = g.carrier();
    const int nparams = with_deformation ? 2 : 1;
    std::vector<ParamHalfspace> carrier;
    for (const auto& f : p.facets()) {
      QVec cs(nparams, Rational(0));
      if (with_deformation) cs[1] = -1;
      carrier.push_back({to_qvec(f.normal), f.offset, cs});
    }
    std::vector<SubdivisionFamily::Piece> pieces;
    for (size_t k = 0; k < slopes.size(); ++k) {
      QVec cs(nparams, Rational(0));
      cs[0] = c1[k] - c0[k];
      if (with_deformation) cs[1] = (*shifts)[k];
      pieces.push_back({slopes[k], c0[k], cs});
    }
    return SubdivisionFamily(p.dim(), nparams, std::move(carrier), std::move(pieces));
  }

  const PLConcave& g;
  PathFamily path;
  std::vector<QVec> slopes;
  QVec c0, c1;
  std::vector<Rational> phi;
  Rational nf;
};

class EnergyIntegrand : public ChamberedFunction {
 public:
  EnergyIntegrand(const PathContext& ctx, const Weight& v)
      : ctx_(ctx), fam_(ctx.family(false, nullptr)), v_(v) {
    degree_ = ctx.g.carrier().dim() + (v.is_polynomial() ? v.poly().total_degree() : 0);
  }

  int max_degree() const override { return degree_; }

  std::optional<Chamber> rebuild(const Rational& probe) override {
    snap_ = fam_.snapshot(QVec{probe});
    return family_chamber(fam_, snap_, probe);
  }

  Rational eval(const Rational& s) override {
    auto vals = fam_.cell_integrals(snap_, QVec{s}, v_.poly());
    if (!vals) throw DiagnosticError("path integrand invalid inside certified chamber");
    Rational total = 0;
    for (size_t k = 0; k < ctx_.phi.size(); ++k) total += ctx_.phi[k] * (*vals)[k];
    return total * ctx_.nf;
  }

  double eval_numeric(const Rational& s, double* err) {
    auto vals = fam_.cell_integrals_numeric(
        snap_, QVec{s}, [&](const std::vector<double>& x) { return v_.eval_double(x); },
        kExpQuadratureRelTol, err);
    if (!vals) throw DiagnosticError("path integrand invalid inside certified chamber");
    double total = 0.0;
    for (size_t k = 0; k < ctx_.phi.size(); ++k) total += to_double(ctx_.phi[k]) * (*vals)[k];
    return total * to_double(ctx_.nf);
  }

 private:
  const PathContext& ctx_;
  SubdivisionFamily fam_;
  SubdivisionFamily::Snapshot snap_;
  Weight v_;
  int degree_ = 0;
};

template <typename F>
Scalar integrate_chambers_numeric(F& f, const Rational& a, const Rational& b, double rel_tol) {
  struct Segment {
    Rational a, b;
  };
  double total = 0.0, err_total = 0.0;
  std::vector<Segment> stack{{a, b}};
  int guard = 0;
  while (!stack.empty()) {
    if (++guard > 4000) throw NonConvergence("chamber walk budget exceeded", err_total);
    Segment seg = stack.back();
    stack.pop_back();
    if (seg.b <= seg.a) continue;
    std::optional<Chamber> ch;
    Rational probe;
    static const std::pair<int, int> kFractions[] = {{1, 2}, {1, 3}, {2, 3}, {2, 5}, {3, 5}};
    for (const auto& [num, den] : kFractions) {
      probe = seg.a + (seg.b - seg.a) * Rational(num) / Rational(den);
      ch = f.rebuild(probe);
      if (ch) break;
    }
    if (!ch) throw NonConvergence("no generic probe found in chamber walk", err_total);
    Rational lo = ch->lo && *ch->lo > seg.a ? *ch->lo : seg.a;
    Rational hi = ch->hi && *ch->hi < seg.b ? *ch->hi : seg.b;

    double width = to_double(hi - lo);
    double prev = 0.0, cur = 0.0, node_err = 0.0;
    for (int order = 8, round = 0; round < 6; order *= 2, ++round) {
      cur = 0.0;
      node_err = 0.0;
      for (int i = 0; i < order; ++i) {
        Rational s = lo + (hi - lo) * Rational(2 * i + 1) / Rational(2 * order);
        double e = 0.0;
        cur += f.eval_numeric(s, &e);
        node_err += e;
      }
      cur *= width / order;
      node_err *= width / order;
      if (round > 0 && std::fabs(cur - prev) <= rel_tol * std::max(1.0, std::fabs(cur))) break;
      prev = cur;
    }
    total += cur;
    err_total += std::fabs(cur - prev) + node_err;
    if (lo > seg.a) stack.push_back({seg.a, lo});
    if (hi < seg.b) stack.push_back({hi, seg.b});
  }
  return Scalar::approx(total, err_total);
}

Scalar energy_with_context(const PathContext& ctx, const Weight& v) {
  EnergyIntegrand integrand(ctx, v);
  if (v.is_polynomial()) {
    return Scalar(integrate_chambered(integrand, Rational(0), Rational(1)));
  }
  return integrate_chambers_numeric(integrand, Rational(0), Rational(1), 1e-9);
}

// Twisted pairing integrand: per path position s, the t-derivative at zero
// of the weighted cell degrees along the canonical deformation with
// log-discrepancy shifts, paired against the potential values. One frozen
// two-parameter snapshot per chamber, evaluated on an (s, t) grid.
class RicciIntegrand : public ChamberedFunction {
 public:
  RicciIntegrand(const FanData& fan, const PathContext& ctx, const Weight& v)
      : ctx_(ctx), v_(v) {
    for (const auto& eta : ctx.slopes) shifts_.push_back(-log_discrepancy(fan, eta));
    fam2_ = std::make_unique<SubdivisionFamily>(ctx.family(true, &shifts_));
    fam_s_ = std::make_unique<SubdivisionFamily>(ctx.family(false, nullptr));
    degree_ = ctx.g.carrier().dim() + (v.is_polynomial() ? v.poly().total_degree() : 0);
  }

  int max_degree() const override { return degree_; }

  std::optional<Chamber> rebuild(const Rational& probe) override {
    // Deformation range at the probe: a one-parameter family in t.
    SubdivisionFamily t_fam = t_family_at(probe);
    StableChamber stable = stable_chamber_to_zero(t_fam, make_rational(1, 8));
    // Freeze the two-parameter structure at (probe, t*) and re-derive the
    // s-chamber along the t = t* line, intersected with the t = 0 line.
    for (int shrink = 0; shrink < 24; ++shrink) {
      t_hi_ = stable.hi * make_rational(1, 1 + shrink);
      Rational t_star = t_hi_ / 2;
      try {
        snap2_ = fam2_->snapshot(QVec{probe, t_star});
      } catch (const GeometryError&) {
        continue;
      }
      auto ch2 = family_chamber_restricted(*fam2_, snap2_, 0, QVec{Rational(0), t_star}, probe);
      if (!ch2) continue;
      snap_s_ = fam_s_->snapshot(QVec{probe});
      auto ch0 = family_chamber(*fam_s_, snap_s_, probe);
      if (!ch0) return std::nullopt;
      Chamber ch = chamber_intersect(*ch2, *ch0);
      // Validate the full t-node ladder at the probe once.
      t_nodes_.clear();
      const int fit_nodes = degree_ + 1;  // t-degree bound + 1 points with t=0
      for (int j = 0; j < fit_nodes + 1; ++j)
        t_nodes_.push_back(t_hi_ * Rational(j + 1) / Rational(fit_nodes + 2));
      if (!grid_valid_at(probe)) continue;
      return ch;
    }
    return std::nullopt;
  }

  Rational eval(const Rational& s) override {
    auto rows = grid_rows(s);
    if (!rows) throw CombinatorialCollapse("deformation grid invalid inside chamber");
    Rational total = 0;
    const int fit = static_cast<int>(t_nodes_.size());  // points: t=0 plus nodes, last checks
    for (size_t k = 0; k < ctx_.phi.size(); ++k) {
      QVec xs{Rational(0)}, ys{(*rows)[0][k]};
      for (int j = 0; j + 1 < fit; ++j) {
        xs.push_back(t_nodes_[j]);
        ys.push_back((*rows)[j + 1][k]);
      }
      QVec coeffs = interpolate_polynomial(xs, ys);
      if (eval_univariate(coeffs, t_nodes_.back()) != (*rows)[fit][k])
        throw CombinatorialCollapse(
            "twisted cell degree is not polynomial across the deformation nodes");
      if (coeffs.size() > 1) total += ctx_.phi[k] * coeffs[1];
    }
    return total * ctx_.nf;
  }

 private:
  SubdivisionFamily t_family_at(const Rational& s) const {
    const HPolytope& p = ctx_.g.carrier();
    std::vector<ParamHalfspace> carrier;
    for (const auto& f : p.facets())
      carrier.push_back({to_qvec(f.normal), f.offset, QVec{Rational(-1)}});
    std::vector<SubdivisionFamily::Piece> pieces;
    for (size_t k = 0; k < ctx_.slopes.size(); ++k) {
      Rational c = ctx_.c0[k] + s * (ctx_.c1[k] - ctx_.c0[k]);
      pieces.push_back({ctx_.slopes[k], c, QVec{shifts_[k]}});
    }
    return SubdivisionFamily(p.dim(), 1, std::move(carrier), std::move(pieces));
  }

  // Cell integral rows at (s, 0), (s, t_0), ..., (s, t_last).
  std::optional<std::vector<std::vector<Rational>>> grid_rows(const Rational& s) {
    std::vector<std::vector<Rational>> rows;
    auto base = fam_s_->cell_integrals(snap_s_, QVec{s}, v_.poly());
    if (!base) return std::nullopt;
    rows.push_back(std::move(*base));
    for (const auto& t : t_nodes_) {
      auto vals = fam2_->cell_integrals(snap2_, QVec{s, t}, v_.poly());
      if (!vals) return std::nullopt;
      rows.push_back(std::move(*vals));
    }
    return rows;
  }

  bool grid_valid_at(const Rational& s) {
    try {
      return grid_rows(s).has_value();
    } catch (const GeometryError&) {
      return false;
    }
  }

  const PathContext& ctx_;
  Weight v_;
  std::vector<Rational> shifts_;
  std::unique_ptr<SubdivisionFamily> fam2_, fam_s_;
  SubdivisionFamily::Snapshot snap2_, snap_s_;
  Rational t_hi_;
  std::vector<Rational> t_nodes_;
  int degree_ = 0;
};

Scalar ricci_with_context(const FanData& fan, const PathContext& ctx, const Weight& v) {
  if (!v.is_polynomial()) {
    // Numeric lane: direct midpoint refinement of the twisted pairing.
    PathFamily path(PLConcave::zero(ctx.g.carrier()), ctx.g);
    auto pairing = [&](double sd) {
      Rational s = rationalize(sd, 40);
      PLConcave gs = path.at(s);
      AtomicMeasure tw = ma_twisted_canonical(fan, v, gs);
      double total = 0.0;
      for (const auto& atom : tw.atoms)
        total += to_double(evaluate_potential(ctx.g, atom.xi)) * atom.mass.value();
      return total;
    };
    double prev = 0.0, cur = 0.0;
    for (int order = 16, round = 0; round < 6; order *= 2, ++round) {
      cur = 0.0;
      for (int i = 0; i < order; ++i) cur += pairing((2.0 * i + 1.0) / (2.0 * order));
      cur /= order;
      if (round > 0 && std::fabs(cur - prev) < 1e-9 * std::max(1.0, std::fabs(cur))) break;
      prev = cur;
    }
    return Scalar::approx(cur, std::fabs(cur - prev) + 1e-12);
  }
  RicciIntegrand integrand(fan, ctx, v);
  return Scalar(integrate_chambered(integrand, Rational(0), Rational(1)));
}

}  // namespace

Scalar energy_weighted(const Weight& v, const PLConcave& g) {
  PathContext ctx(g);
  return energy_with_context(ctx, v);
}

Scalar ricci_energy(const FanData& fan, const Weight& v, const PLConcave& g) {
  PathContext ctx(g);
  return ricci_with_context(fan, ctx, v);
}

Scalar entropy_weighted(const FanData& fan, const Weight& v, const PLConcave& g) {
  AtomicMeasure m = ma_weighted(v, g);
  Scalar total;
  for (const auto& atom : m.atoms) {
    total += atom.mass * Scalar(log_discrepancy(fan, atom.xi));
  }
  return total;
}

Rational donaldson_boundary_formula(const PLConcave& g) {
  const HPolytope& p = g.carrier();
  const int n = p.dim();
  const Rational nf = Rational(factorial(n));
  Weight one = Weight::constant(n, Rational(1));
  Rational mean_degree = -degree_derivative_canonical(p, one).rational() /
                         integrate_weight(p, one).rational();

  // Bulk term: n! * mean * int_P g.
  Rational bulk = 0;
  for (size_t k = 0; k < g.pieces().size(); ++k) {
    Polynomial piece = Polynomial::affine(g.pieces()[k].slope, g.pieces()[k].c);
    bulk += integrate_polynomial(g.cells()[k], piece);
  }

  // Boundary term: n! * int_{dP} g dsigma, cellwise on each facet chart.
  Rational boundary = 0;
  for (size_t f = 0; f < p.facets().size(); ++f) {
    FacetChart chart = facet_chart(p, static_cast<int>(f));
    for (size_t k = 0; k < g.pieces().size(); ++k) {
      Polynomial piece = Polynomial::affine(g.pieces()[k].slope, g.pieces()[k].c);
      if (n == 1) {
        if (g.cells()[k].contains(chart.base)) {
          boundary += piece.eval(chart.base);
          break;  // one cell owns the vertex-facet
        }
        continue;
      }
      // Pull the cell back to chart coordinates and intersect with the facet.
      std::vector<QHalfspace> hs;
      bool infeasible = false;
      for (const auto& cf : g.cells()[k].facets()) {
        QVec normal(n - 1);
        bool zero = true;
        for (int j = 0; j < n - 1; ++j) {
          normal[j] = dot(chart.basis[j], cf.normal);
          if (normal[j] != 0) zero = false;
        }
        Rational offset = cf.offset + dot(chart.base, cf.normal);
        if (zero) {
          if (offset < 0) {
            infeasible = true;
            break;
          }
          continue;
        }
        hs.push_back({std::move(normal), offset});
      }
      if (infeasible || hs.empty()) continue;
      auto piece_region = HPolytope::try_intersection(n - 1, std::move(hs));
      if (!piece_region) continue;
      Polynomial in_chart = piece.compose_affine(chart.base, chart.basis);
      boundary += integrate_polynomial(*piece_region, in_chart);
    }
  }
  return nf * (mean_degree * bulk - boundary);
}

FunctionalReport mabuchi(const FanData& fan, const Weight& v, const Weight& w,
                         const PLConcave& g) {
  FunctionalReport rep;
  const HPolytope& p = g.carrier();
  PathContext ctx(g);
  rep.deg_v = integrate_weight(p, v);
  rep.deg_v_canonical = degree_derivative_canonical(p, v);
  rep.e_v = energy_with_context(ctx, v);
  rep.h_v = entropy_weighted(fan, v, g);
  rep.r_v = ricci_with_context(fan, ctx, v);
  Weight vw = v * w;
  rep.e_vw = energy_with_context(ctx, vw);
  rep.m_vw = rep.h_v + rep.r_v + rep.e_vw;
  rep.mass_balance = integrate_weight(p, vw) + rep.deg_v_canonical;
  rep.translation_invariant =
      rep.mass_balance.exact() ? rep.mass_balance.rational() == 0
                               : std::fabs(rep.mass_balance.value()) <= rep.mass_balance.error();

  // Boundary-integral cross-check for constant weights with w at the mean
  // weighted scalar degree.
  if (v.is_polynomial() && w.is_polynomial() && v.poly().is_constant() &&
      w.poly().is_constant()) {
    Rational cv = v.poly().terms().empty() ? Rational(0) : v.poly().terms().begin()->second;
    Rational cw = w.poly().terms().empty() ? Rational(0) : w.poly().terms().begin()->second;
    Weight one = Weight::constant(p.dim(), Rational(1));
    Rational mean = -degree_derivative_canonical(p, one).rational() /
                    integrate_weight(p, one).rational();
    if (cw == mean && cv != 0) {
      Scalar oracle = Scalar(cv * donaldson_boundary_formula(g));
      rep.boundary_oracle = oracle;
      rep.boundary_oracle_gap = std::fabs(oracle.value() - rep.m_vw.value());
    }
  }
  return rep;
}

Scalar futaki(const HPolytope& p, const FanData& fan, const Weight& v, const Weight& w,
              const ToricValuation& xi) {
  PLConcave g = PLConcave::affine(p, xi, Rational(0));
  return mabuchi(fan, v, w, g).m_vw;
}

ExtremalFunction extremal_function(const HPolytope& p, const FanData& fan, const Weight& v,
                                   const Weight& w) {
  const int n = p.dim();
  if (!v.is_polynomial() || !w.is_polynomial())
    throw InputError("extremal function requires polynomial weights");
  auto wpos = w.check_positivity(p);
  if (!wpos.positive_on_samples)
    throw InputError("extremal function requires w > 0 on the polytope (sample-certified)");

  // Unknowns (lambda_1..lambda_n, c); rows: Futaki vanishing in each basis
  // direction, then the mass balance. Only the energy term depends on the
  // affine function, linearly through the weight v*w*l.
  QMat a(n + 1, QVec(n + 1));
  QVec rhs(n + 1);
  Weight vw = v * w;
  for (int i = 0; i < n; ++i) {
    QVec ei(n, Rational(0));
    ei[i] = 1;
    PLConcave gi = PLConcave::affine(p, ei, Rational(0));
    PathContext ctx(gi);
    Scalar hi = entropy_weighted(fan, v, gi);
    Scalar ri = ricci_with_context(fan, ctx, v);
    for (int j = 0; j < n; ++j) {
      Weight vwj = Weight::polynomial(vw.poly() * Polynomial::coordinate(n, j));
      a[i][j] = energy_with_context(ctx, vwj).rational();
    }
    a[i][n] = energy_with_context(ctx, vw).rational();
    rhs[i] = -(hi + ri).rational();
  }
  for (int j = 0; j < n; ++j) {
    Weight vwj = Weight::polynomial(vw.poly() * Polynomial::coordinate(n, j));
    a[n][j] = integrate_weight(p, vwj).rational();
  }
  a[n][n] = integrate_weight(p, vw).rational();
  rhs[n] = -degree_derivative_canonical(p, v).rational();

  auto sol = solve_linear(a, rhs);
  if (!sol) {
    auto kernel = kernel_basis(a);
    std::string desc = "kernel dimension " + std::to_string(kernel.size());
    for (const auto& k : kernel) {
      desc += "; [";
      for (size_t i = 0; i < k.size(); ++i) desc += (i ? ", " : "") + to_string(k[i]);
      desc += "]";
    }
    throw SingularSystem("extremal system is singular", desc);
  }
  ExtremalFunction ext;
  ext.lambda.assign(sol->begin(), sol->begin() + n);
  ext.c = (*sol)[n];
  // Rough conditioning diagnostic: Frobenius norms of the matrix and its
  // columnwise inverse images.
  double anorm = 0.0, inorm = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) anorm += to_double(a[i][j]) * to_double(a[i][j]);
  for (int col = 0; col <= n; ++col) {
    QVec e(n + 1, Rational(0));
    e[col] = 1;
    auto x = solve_linear(a, e);
    if (x)
      for (const auto& xij : *x) inorm += to_double(xij) * to_double(xij);
  }
  ext.condition_estimate = std::sqrt(anorm) * std::sqrt(inorm);
  return ext;
}

}  // namespace kstab
