#include "kstab/measure.hpp"

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

Integer valuation_multiplicity(const ToricValuation& xi) {
  Integer b = 1;
  for (const auto& c : xi) b = boost::multiprecision::lcm(b, denominator(c));
  return b;
}

}  // namespace

Scalar AtomicMeasure::total() const {
  Scalar t;
  for (const auto& a : atoms) t += a.mass;
  return t;
}

AtomicMeasure AtomicMeasure::from_atoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return lex_less(a.xi, b.xi); });
  AtomicMeasure m;
  for (auto& a : atoms) {
    if (!m.atoms.empty() && m.atoms.back().xi == a.xi) {
      m.atoms.back().mass += a.mass;
    } else {
      a.multiplicity = valuation_multiplicity(a.xi);
      m.atoms.push_back(std::move(a));
    }
  }
  return m;
}

const Atom* AtomicMeasure::find(const ToricValuation& xi) const {
  for (const auto& a : atoms) {
    if (a.xi == xi) return &a;
  }
  return nullptr;
}

AtomicMeasure ma_weighted(const Weight& v, const PLConcave& g) {
  const HPolytope& p = g.carrier();
  const Rational nf = Rational(factorial(p.dim()));
  std::vector<Atom> atoms;
  for (size_t k = 0; k < g.pieces().size(); ++k) {
    Scalar mass;
    if (v.is_polynomial()) {
      mass = Scalar(integrate_polynomial(g.cells()[k], v.poly()) * nf);
    } else {
      double err = 0.0;
      double val = integrate_numeric(
          g.cells()[k], [&](const std::vector<double>& x) { return v.eval_double(x); },
          kExpQuadratureRelTol, &err);
      mass = Scalar::approx(val * to_double(nf), err * to_double(nf));
    }
    atoms.push_back({g.pieces()[k].slope, mass, Integer(1)});
  }
  return AtomicMeasure::from_atoms(std::move(atoms));
}

namespace {

// One-parameter family: carrier P_t (every offset reduced by t), pieces
// shifted by -t * A(xi_k). Returns the family and the per-piece shifts.
SubdivisionFamily twisted_family(const FanData& fan, const PLConcave& g) {
  const HPolytope& p = g.carrier();
  std::vector<ParamHalfspace> carrier;
  for (const auto& f : p.facets())
    carrier.push_back({to_qvec(f.normal), f.offset, QVec{Rational(-1)}});
  std::vector<SubdivisionFamily::Piece> pieces;
  for (const auto& piece : g.pieces()) {
    Rational a = log_discrepancy(fan, piece.slope);
    pieces.push_back({piece.slope, piece.c, QVec{-a}});
  }
  return SubdivisionFamily(p.dim(), 1, std::move(carrier), std::move(pieces));
}

}  // namespace

AtomicMeasure ma_twisted_canonical(const FanData& fan, const Weight& v, const PLConcave& g) {
  const HPolytope& p = g.carrier();
  const int n = p.dim();
  const Rational nf = Rational(factorial(n));
  SubdivisionFamily fam = twisted_family(fan, g);

  // Probe scale: a fraction of the inradius-ish bound from facet offsets.
  Rational scale_hint = 1;
  {
    // Largest t with P_t nonempty is at most min over vertices... use a
    // conservative start and let the chamber search shrink it.
    scale_hint = make_rational(1, 8);
  }
  StableChamber ch = stable_chamber_to_zero(fam, scale_hint);

  const int deg = n + (v.is_polynomial() ? v.poly().total_degree() : 0);
  const int nodes_needed = deg + 1;

  std::vector<Atom> atoms;
  if (v.is_polynomial()) {
    // Exact node evaluations inside (0, hi), one extra cross-check node,
    // plus the exact value at t = 0 from the plain subdivision.
    QVec xs;
    std::vector<std::vector<Rational>> ys;  // per node, per cell
    for (int j = 0; j <= nodes_needed; ++j) {
      Rational t = ch.hi * Rational(j + 1) / Rational(nodes_needed + 3);
      auto vals = fam.cell_integrals(ch.snap, QVec{t}, v.poly());
      if (!vals) throw CombinatorialCollapse("deformation chamber failed node validation");
      xs.push_back(t);
      ys.push_back(std::move(*vals));
    }
    const size_t cells = g.pieces().size();
    for (size_t k = 0; k < cells; ++k) {
      QVec cell_ys;
      for (const auto& row : ys) cell_ys.push_back(row[k]);
      QVec coeffs = interpolate_polynomial(QVec(xs.begin(), xs.begin() + nodes_needed),
                                           QVec(cell_ys.begin(), cell_ys.begin() + nodes_needed));
      // Cross-checks: the extra node and the exact t = 0 cell integral.
      if (eval_univariate(coeffs, xs[nodes_needed]) != cell_ys[nodes_needed])
        throw CombinatorialCollapse("twisted cell integral is not polynomial on the chamber");
      if (eval_univariate(coeffs, Rational(0)) != integrate_polynomial(g.cells()[k], v.poly()))
        throw CombinatorialCollapse("twisted chamber does not extend to the undeformed polytope");
      Rational deriv = coeffs.size() > 1 ? coeffs[1] : Rational(0);
      atoms.push_back({g.pieces()[k].slope, Scalar(deriv * nf), Integer(1)});
    }
  } else {
    // Numeric lane: same node scheme in doubles.
    QVec xs;
    std::vector<std::vector<double>> ys;
    double node_err = 0.0;
    for (int j = 0; j < nodes_needed; ++j) {
      Rational t = ch.hi * Rational(j + 1) / Rational(nodes_needed + 3);
      double err = 0.0;
      auto vals = fam.cell_integrals_numeric(
          ch.snap, QVec{t}, [&](const std::vector<double>& x) { return v.eval_double(x); },
          kExpQuadratureRelTol, &err);
      if (!vals) throw CombinatorialCollapse("deformation chamber failed node validation");
      node_err = std::max(node_err, err);
      xs.push_back(t);
      ys.push_back(std::move(*vals));
    }
    for (size_t k = 0; k < g.pieces().size(); ++k) {
      // Derivative at zero of the Lagrange interpolant.
      double deriv = 0.0, sensitivity = 0.0;
      for (int j = 0; j < nodes_needed; ++j) {
        // dL_j/dt at 0.
        double lj = 1.0, dz = 0.0;
        for (int l = 0; l < nodes_needed; ++l) {
          if (l == j) continue;
          double xj = to_double(xs[j]), xl = to_double(xs[l]);
          dz = dz * (-xl) / (xj - xl) + lj * 1.0 / (xj - xl);
          lj *= (0.0 - xl) / (xj - xl);
        }
        deriv += dz * ys[j][k];
        sensitivity += std::fabs(dz);
      }
      double f = to_double(nf);
      atoms.push_back({g.pieces()[k].slope,
                       Scalar::approx(deriv * f, node_err * sensitivity * f), Integer(1)});
    }
  }
  return AtomicMeasure::from_atoms(std::move(atoms));
}

Scalar i_functional(const Weight& v, const PLConcave& g, const PLConcave& h) {
  if (!(g.carrier() == h.carrier())) throw InputError("I functional needs a shared carrier");
  AtomicMeasure mg = ma_weighted(v, g);
  AtomicMeasure mh = ma_weighted(v, h);
  std::vector<ToricValuation> support;
  for (const auto& a : mg.atoms) support.push_back(a.xi);
  for (const auto& a : mh.atoms) support.push_back(a.xi);
  std::sort(support.begin(), support.end(), lex_less);
  support.erase(std::unique(support.begin(), support.end()), support.end());

  Scalar total;
  for (const auto& xi : support) {
    Rational gap = evaluate_potential(g, xi) - evaluate_potential(h, xi);
    const Atom* ag = mg.find(xi);
    const Atom* ah = mh.find(xi);
    Scalar diff = (ah ? ah->mass : Scalar()) - (ag ? ag->mass : Scalar());
    total += Scalar(gap) * diff;
  }
  return total;
}

Rational d1_product(const HPolytope& p, const ToricValuation& xi, const ToricValuation& xi2) {
  QVec delta = sub(xi, xi2);
  bool zero = std::all_of(delta.begin(), delta.end(), [](const Rational& x) { return x == 0; });
  if (zero) return Rational(0);
  Polynomial lin(p.dim());
  for (int i = 0; i < p.dim(); ++i) lin += Polynomial::coordinate(p.dim(), i) * delta[i];
  Rational pos = 0, neg = 0;
  if (auto above = intersect(p, {{delta, Rational(0)}})) pos = integrate_polynomial(*above, lin);
  if (auto below = intersect(p, {{scale(delta, Rational(-1)), Rational(0)}}))
    neg = integrate_polynomial(*below, lin);
  return (pos - neg) / volume(p);
}

PLConcave solve_ma(const HPolytope& p, const Weight& v, const AtomicMeasure& mu,
                   const SolveOptions& options, SolveDiagnostics* diag) {
  const int n = p.dim();
  const int r = static_cast<int>(mu.atoms.size());
  if (r == 0) throw InputError("cannot invert the empty measure");
  for (const auto& a : mu.atoms) {
    if (a.mass.value() <= 0) throw MassMismatch("measure must be strictly positive");
  }
  Scalar deg = integrate_weight(p, v);
  {
    double total = mu.total().value();
    if (std::fabs(total - deg.value()) > options.mass_rel_tol * std::fabs(deg.value()))
      throw MassMismatch("measure mass differs from the weighted degree");
  }

  // Pieces <alpha, xi_i> - min_P <., xi_i> + t_i.
  std::vector<Rational> base(r);
  std::vector<ToricValuation> xis(r);
  for (int i = 0; i < r; ++i) {
    xis[i] = mu.atoms[i].xi;
    base[i] = -lp_support(p, xis[i]).min;
  }
  const Rational nf = Rational(factorial(n));

  auto masses_and_energy = [&](const std::vector<Rational>& t, std::vector<double>& masses,
                               double& energy) {
    std::vector<PLPiece> pieces(r);
    for (int i = 0; i < r; ++i) pieces[i] = {xis[i], base[i] + t[i]};
    // Cells per piece, aligned; inactive pieces get zero mass.
    masses.assign(r, 0.0);
    energy = 0.0;
    for (int i = 0; i < r; ++i) {
      std::vector<QHalfspace> hs;
      for (int j = 0; j < r; ++j) {
        if (j == i) continue;
        hs.push_back({sub(pieces[j].slope, pieces[i].slope), pieces[j].c - pieces[i].c});
      }
      auto cell = intersect(p, hs);
      if (!cell) continue;
      Polynomial piece_poly = Polynomial::affine(pieces[i].slope, pieces[i].c);
      if (v.is_polynomial()) {
        masses[i] = to_double(integrate_polynomial(*cell, v.poly()) * nf);
        energy += to_double(integrate_polynomial(*cell, v.poly() * piece_poly) * nf);
      } else {
        double err = 0.0;
        masses[i] = to_double(nf) * integrate_numeric(
            *cell, [&](const std::vector<double>& x) { return v.eval_double(x); },
            1e-10, &err);
        energy += to_double(nf) * integrate_numeric(
            *cell,
            [&](const std::vector<double>& x) {
              double lin = to_double(pieces[i].c);
              for (int d = 0; d < n; ++d) lin += to_double(pieces[i].slope[d]) * x[d];
              return v.eval_double(x) * lin;
            },
            1e-10, &err);
      }
    }
  };

  std::vector<double> target(r);
  for (int i = 0; i < r; ++i) target[i] = mu.atoms[i].mass.value();

  std::vector<Rational> t(r, Rational(0));
  std::vector<double> masses;
  double energy = 0.0;
  masses_and_energy(t, masses, energy);
  auto objective = [&](const std::vector<Rational>& tt, double en) {
    double obj = en;
    for (int i = 0; i < r; ++i) obj -= to_double(tt[i]) * target[i];
    return obj;
  };
  double fbest = objective(t, energy);
  double residual = 0.0;
  for (int i = 0; i < r; ++i) residual = std::max(residual, std::fabs(masses[i] - target[i]));
  double best_residual = residual;

  double step = 0.25;
  long iter = 0;
  while (residual > options.residual_tol && iter < options.max_iterations) {
    ++iter;
    // Supergradient direction of the concave dual objective.
    std::vector<Rational> trial(r);
    bool improved = false;
    for (int back = 0; back < 40; ++back) {
      for (int i = 0; i < r; ++i)
        trial[i] = t[i] + rationalize(step * (masses[i] - target[i]), 48);
      // Gauge: keep min t = 0.
      Rational tmin = trial[0];
      for (const auto& x : trial) tmin = std::min(tmin, x);
      for (auto& x : trial) x -= tmin;
      std::vector<double> trial_masses;
      double trial_energy = 0.0;
      masses_and_energy(trial, trial_masses, trial_energy);
      double ftrial = objective(trial, trial_energy);
      if (ftrial > fbest - 1e-18) {
        t = trial;
        masses = trial_masses;
        fbest = ftrial;
        improved = true;
        step *= 1.6;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    residual = 0.0;
    for (int i = 0; i < r; ++i) residual = std::max(residual, std::fabs(masses[i] - target[i]));
    best_residual = std::min(best_residual, residual);
  }

  if (diag) {
    diag->residual = residual;
    diag->iterations = iter;
  }
  if (residual > options.residual_tol) {
    throw NonConvergence("Monge-Ampere inversion stalled", best_residual);
  }
  std::vector<PLPiece> pieces(r);
  for (int i = 0; i < r; ++i) pieces[i] = {xis[i], base[i] + t[i]};
  PLConcave g(p, std::move(pieces));
  return g + (-g.max_over_carrier());
}

}  // namespace kstab
