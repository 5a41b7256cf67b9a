#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kstab/measure.hpp"
#include "test_helpers.hpp"

using namespace kstab;
using namespace kstab::testing;

namespace {

PLConcave crease(const HPolytope& p, const Rational& c) {
  return PLConcave(p, {{QVec{q(1)}, q(0)}, {QVec{q(0)}, c}});
}

PLConcave random_concave(std::mt19937& rng, const HPolytope& p, int pieces) {
  std::vector<PLPiece> ps;
  for (int k = 0; k < pieces; ++k) {
    QVec slope(p.dim());
    for (int i = 0; i < p.dim(); ++i) slope[i] = random_rational(rng, 2);
    ps.push_back({slope, random_rational(rng, 2)});
  }
  return PLConcave(p, std::move(ps));
}

Weight random_poly_weight(std::mt19937& rng, int n, int deg) {
  Polynomial poly = Polynomial::constant(n, q(2) + random_rational(rng, 1));
  if (deg >= 1) {
    for (int i = 0; i < n; ++i)
      poly += Polynomial::coordinate(n, i) * (random_rational(rng, 1) / 4);
  }
  if (deg >= 2) {
    poly += Polynomial::coordinate(n, 0) * Polynomial::coordinate(n, 0) *
            (random_rational(rng, 1) / 8);
  }
  return Weight::polynomial(poly);
}

}  // namespace

TEST_CASE("ma_weighted: spec examples") {
  HPolytope seg = interval(q(0), q(1));
  Weight one = Weight::constant(1, q(1));

  AtomicMeasure m0 = ma_weighted(one, PLConcave::zero(seg));
  REQUIRE(m0.atoms.size() == 1);
  CHECK(is_trivial(m0.atoms[0].xi));
  CHECK(m0.atoms[0].mass.rational() == q(1));

  AtomicMeasure m1 = ma_weighted(one, crease(seg, q(1, 2)));
  REQUIRE(m1.atoms.size() == 2);
  CHECK(m1.atoms[0].xi == qv({0}));
  CHECK(m1.atoms[0].mass.rational() == q(1, 2));
  CHECK(m1.atoms[1].xi == qv({1}));
  CHECK(m1.atoms[1].mass.rational() == q(1, 2));

  Weight coord = Weight::polynomial(Polynomial::coordinate(1, 0));
  AtomicMeasure m2 = ma_weighted(coord, crease(seg, q(1, 2)));
  CHECK(m2.atoms[1].mass.rational() == q(1, 8));   // int_0^{1/2} a
  CHECK(m2.atoms[0].mass.rational() == q(3, 8));   // int_{1/2}^1 a
}

TEST_CASE("ma mass conservation on random instances") {
  std::mt19937 rng(71);
  for (int n = 1; n <= 3; ++n) {
    for (int rep = 0; rep < 6; ++rep) {
      HPolytope p = random_polytope(rng, n, 2);
      Weight v = random_poly_weight(rng, n, 2);
      PLConcave g = random_concave(rng, p, n == 3 ? 3 : 5);
      AtomicMeasure m = ma_weighted(v, g);
      CHECK(m.total().rational() == integrate_weight(p, v).rational());
    }
  }
}

TEST_CASE("ma_twisted_canonical: spec examples") {
  HPolytope seg2 = interval(q(0), q(2));
  FanData fan = normal_fan(seg2);
  Weight one = Weight::constant(1, q(1));

  // Product datum g = a: all twisted mass -2 at v_1.
  AtomicMeasure prod = ma_twisted_canonical(fan, one, PLConcave::affine(seg2, qv({1}), q(0)));
  REQUIRE(prod.atoms.size() == 1);
  CHECK(prod.atoms[0].xi == qv({1}));
  CHECK(prod.atoms[0].mass.rational() == q(-2));

  // Path point g = min(a, c): atom masses (0 at v_1, -2 at trivial).
  for (const auto& c : {q(1, 2), q(1), q(3, 2)}) {
    AtomicMeasure m = ma_twisted_canonical(fan, one, crease(seg2, c));
    REQUIRE(m.atoms.size() == 2);
    CHECK(m.atoms[0].xi == qv({0}));
    CHECK(m.atoms[0].mass.rational() == q(-2));
    CHECK(m.atoms[1].xi == qv({1}));
    CHECK(m.atoms[1].mass.rational() == q(0));
  }

  // g = 0 on the unit square: single atom of mass -8.
  HPolytope sq = unit_cube(2);
  Weight one2 = Weight::constant(2, q(1));
  AtomicMeasure msq = ma_twisted_canonical(normal_fan(sq), one2, PLConcave::zero(sq));
  REQUIRE(msq.atoms.size() == 1);
  CHECK(msq.atoms[0].mass.rational() == q(-8));
}

TEST_CASE("twisted mass conservation on random instances") {
  std::mt19937 rng(73);
  for (int n = 1; n <= 2; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      HPolytope p = random_polytope(rng, n, 2);
      Weight v = random_poly_weight(rng, n, 2);
      PLConcave g = random_concave(rng, p, 4);
      AtomicMeasure m = ma_twisted_canonical(normal_fan(p), v, g);
      CHECK(m.total().rational() == degree_derivative_canonical(p, v).rational());
    }
  }
}

TEST_CASE("comparison bounds: weighted masses between extremes of the weight") {
  std::mt19937 rng(79);
  HPolytope p = random_polytope(rng, 2, 2);
  Weight v = random_poly_weight(rng, 2, 2);
  Weight one = Weight::constant(2, q(1));
  PLConcave g = random_concave(rng, p, 4);
  // Vertex-certified bounds of v on P.
  Rational vmin, vmax;
  bool first = true;
  for (const auto& vert : p.vertices()) {
    Rational val = v.poly().eval(vert);
    if (first || val < vmin) vmin = val;
    if (first || val > vmax) vmax = val;
    first = false;
  }
  AtomicMeasure mv = ma_weighted(v, g);
  AtomicMeasure m1 = ma_weighted(one, g);
  // The weight is affine-ish and positive; interior extrema may undercut the
  // vertex certificate slightly, so only assert when certified: linear case.
  if (v.poly().total_degree() <= 1) {
    for (size_t i = 0; i < mv.atoms.size(); ++i) {
      CHECK(mv.atoms[i].mass.rational() >= vmin * m1.atoms[i].mass.rational());
      CHECK(mv.atoms[i].mass.rational() <= vmax * m1.atoms[i].mass.rational());
    }
  }
}

TEST_CASE("i_functional: spec examples") {
  HPolytope seg = interval(q(0), q(1));
  Weight one = Weight::constant(1, q(1));
  PLConcave zero = PLConcave::zero(seg);
  PLConcave lin = PLConcave::affine(seg, qv({1}), q(0));

  CHECK(i_functional(one, lin, lin).rational() == q(0));
  CHECK(i_functional(one, zero, lin).rational() == q(1));
  CHECK(i_functional(one, zero, scale_action(lin, q(2))).rational() == q(2));
}

TEST_CASE("i_functional nonnegative on random pairs") {
  std::mt19937 rng(83);
  Weight one = Weight::constant(2, q(1));
  for (int rep = 0; rep < 8; ++rep) {
    HPolytope p = random_polytope(rng, 2, 2);
    PLConcave g = random_concave(rng, p, 3);
    PLConcave h = random_concave(rng, p, 3);
    CHECK(i_functional(one, g, h).rational() >= 0);
  }
}

TEST_CASE("d1_product: spec examples and metric axioms") {
  HPolytope seg = interval(q(0), q(1));
  CHECK(d1_product(seg, qv({1}), qv({1})) == q(0));
  CHECK(d1_product(seg, qv({1}), qv({0})) == q(1, 2));
  HPolytope sq = unit_cube(2);
  CHECK(d1_product(sq, qv({1, 0}), qv({0, 1})) == q(1, 3));

  std::mt19937 rng(89);
  for (int rep = 0; rep < 10; ++rep) {
    QVec a = {random_rational(rng, 3), random_rational(rng, 3)};
    QVec b = {random_rational(rng, 3), random_rational(rng, 3)};
    QVec c = {random_rational(rng, 3), random_rational(rng, 3)};
    Rational ab = d1_product(sq, a, b);
    Rational ba = d1_product(sq, b, a);
    CHECK(ab == ba);
    CHECK(d1_product(sq, a, c) <= ab + d1_product(sq, b, c));
    // Translation invariance.
    QVec shift = {q(1, 3), q(-2, 5)};
    CHECK(d1_product(sq, add(a, shift), add(b, shift)) == ab);
  }
}

TEST_CASE("solve_ma: spec examples") {
  HPolytope seg = interval(q(0), q(1));
  Weight one = Weight::constant(1, q(1));

  AtomicMeasure trivial;
  trivial.atoms.push_back({qv({0}), Scalar(q(1)), Integer(1)});
  PLConcave g0 = solve_ma(seg, one, trivial);
  CHECK(g0 == PLConcave::zero(seg));

  AtomicMeasure half = AtomicMeasure::from_atoms(
      {{qv({1}), Scalar(q(1, 2)), Integer(1)}, {qv({0}), Scalar(q(1, 2)), Integer(1)}});
  PLConcave g1 = solve_ma(seg, one, half);
  // Expect min(a, 1/2) - 1/2 up to solver tolerance.
  CHECK(std::fabs(to_double(g1.eval(qv({0})))   - (-0.5)) < 2e-6);
  CHECK(std::fabs(to_double(g1.eval(qv({1})))   - 0.0) < 2e-6);
  CHECK(std::fabs(to_double(g1.eval(QVec{q(1, 2)}))) < 2e-6);

  AtomicMeasure point;
  point.atoms.push_back({qv({1}), Scalar(q(1)), Integer(1)});
  PLConcave g2 = solve_ma(seg, one, point);
  CHECK(g2 == PLConcave::affine(seg, qv({1}), q(-1)));

  AtomicMeasure wrong;
  wrong.atoms.push_back({qv({1}), Scalar(q(2)), Integer(1)});
  CHECK_THROWS_AS(solve_ma(seg, one, wrong), MassMismatch);
}

TEST_CASE("solve_ma round-trips ma_weighted on random instances") {
  std::mt19937 rng(97);
  Weight one2 = Weight::constant(2, q(1));
  int done = 0;
  for (int rep = 0; rep < 12 && done < 6; ++rep) {
    HPolytope p = random_polytope(rng, 2, 1);
    PLConcave g = random_concave(rng, p, 3);
    AtomicMeasure mu = ma_weighted(one2, g);
    bool positive = true;
    for (const auto& a : mu.atoms) positive = positive && a.mass.rational() > 0;
    if (!positive) continue;
    ++done;
    PLConcave back = solve_ma(p, one2, mu);
    AtomicMeasure round = ma_weighted(one2, back);
    REQUIRE(round.atoms.size() == mu.atoms.size());
    for (size_t i = 0; i < mu.atoms.size(); ++i) {
      CHECK(round.atoms[i].xi == mu.atoms[i].xi);
      CHECK(std::fabs(round.atoms[i].mass.value() - mu.atoms[i].mass.value()) < 1e-6);
    }
  }
  CHECK(done >= 4);
}
