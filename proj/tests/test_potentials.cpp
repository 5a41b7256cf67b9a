#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kstab/potential.hpp"
#include "test_helpers.hpp"

using namespace kstab;
using namespace kstab::testing;

namespace {

PLConcave crease_half(const HPolytope& p) {
  // min(a, 1/2) on [0,1].
  return PLConcave(p, {{qv({1}), q(0)}, {qv({0}), q(1, 2)}});
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

}  // namespace

TEST_CASE("normalization drops inactive pieces and dedupes slopes") {
  HPolytope seg = interval(q(0), q(1));
  // min(a, a + 1, 5) = a on [0,1]: the duplicate-slope piece with larger
  // constant and the never-active constant piece both disappear.
  PLConcave g(seg, {{qv({1}), q(0)}, {qv({1}), q(1)}, {qv({0}), q(5)}});
  CHECK(g.pieces().size() == 1);
  CHECK(g.pieces()[0].slope == qv({1}));
  CHECK(g.eval(qv({1})) == q(1));
}

TEST_CASE("g_transform: spec examples on [0,1]") {
  HPolytope seg = interval(q(0), q(1));

  // g = 0: G = max(0, -eta), support data {(0,0),(1,0)}.
  GTransform t0 = g_transform(PLConcave::zero(seg));
  REQUIRE(t0.points.size() == 2);
  CHECK(t0.eval(qv({2})) == q(0));
  CHECK(t0.eval(qv({-1})) == q(1));

  // g = a: G = max(1-eta, 0).
  GTransform t1 = g_transform(PLConcave::affine(seg, qv({1}), q(0)));
  CHECK(t1.eval(qv({0})) == q(1));
  CHECK(t1.eval(qv({1})) == q(0));
  CHECK(t1.eval(qv({3})) == q(0));

  // g = min(a, 1/2): G = max(0, (1-eta)/2, 1/2 - eta), vertex data at
  // alpha in {0, 1/2, 1}.
  GTransform t2 = g_transform(crease_half(seg));
  CHECK(t2.points.size() == 3);
  CHECK(t2.eval(qv({0})) == q(1, 2));
  CHECK(t2.eval(qv({1})) == q(0));
  CHECK(t2.eval(QVec{q(1, 2)}) == q(1, 4));
  CHECK(t2.eval(qv({-1})) == q(3, 2));
}

TEST_CASE("inv_g_transform: spec examples and errors") {
  HPolytope seg = interval(q(0), q(1));

  GTransform t;
  t.dim = 1;
  t.points = {{qv({0}), q(0)}, {qv({1}), q(0)}};
  CHECK(inv_g_transform(t, seg) == PLConcave::zero(seg));

  t.points = {{qv({0}), q(0)}, {qv({1}), q(1)}};
  CHECK(inv_g_transform(t, seg) == PLConcave::affine(seg, qv({1}), q(0)));

  t.points = {{qv({0}), q(0)}, {QVec{q(1, 2)}, q(1, 2)}, {qv({1}), q(1, 2)}};
  CHECK(inv_g_transform(t, seg) == crease_half(seg));

  // Gradient outside the carrier.
  t.points = {{qv({0}), q(0)}, {qv({2}), q(0)}};
  CHECK_THROWS_AS(inv_g_transform(t, seg), InputError);
}

TEST_CASE("round trip inv(g_transform(g)) == g on random data") {
  std::mt19937 rng(101);
  for (int n = 1; n <= 3; ++n) {
    for (int rep = 0; rep < 6; ++rep) {
      HPolytope p = random_polytope(rng, n, 2);
      PLConcave g = random_concave(rng, p, n == 3 ? 3 : 5);
      PLConcave back = inv_g_transform(g_transform(g), p);
      CHECK(back == g);
    }
  }
}

TEST_CASE("evaluate_potential: spec examples") {
  HPolytope seg = interval(q(0), q(1));
  PLConcave zero = PLConcave::zero(seg);
  PLConcave lin = PLConcave::affine(seg, qv({1}), q(0));

  for (long xi : {-3L, -1L, 0L, 1L, 2L}) {
    CHECK(evaluate_potential(zero, qv({xi})) == q(0));
  }
  // Trivial valuation gives max of g.
  CHECK(evaluate_potential(lin, qv({0})) == q(1));
  CHECK(evaluate_potential(crease_half(seg), qv({0})) == q(1, 2));
  // phi_a at v_{1} and v_{-1}.
  CHECK(evaluate_potential(lin, qv({1})) == q(0));
  CHECK(evaluate_potential(lin, qv({-1})) == q(1));
}

TEST_CASE("subdivision: spec examples") {
  HPolytope seg = interval(q(0), q(1));

  auto cells0 = subdivision(PLConcave::zero(seg));
  REQUIRE(cells0.size() == 1);
  CHECK(cells0[0].multiplicity == 1);
  CHECK(volume(cells0[0].polytope) == q(1));

  auto cells1 = subdivision(crease_half(seg));
  REQUIRE(cells1.size() == 2);
  // Sorted by slope: (0, 1/2) then (1, 0).
  CHECK(cells1[0].slope == qv({0}));
  CHECK(cells1[0].polytope.vertices()[0][0] == q(1, 2));
  CHECK(cells1[1].slope == qv({1}));
  CHECK(volume(cells1[1].polytope) == q(1, 2));

  auto cells2 = subdivision(PLConcave::affine(seg, qv({1}), q(0)));
  CHECK(cells2[0].multiplicity == 1);
  PLConcave half_slope(seg, {{{q(1, 2)}, q(0)}});
  CHECK(subdivision(half_slope)[0].multiplicity == 2);

  // Cells tile the carrier.
  std::mt19937 rng(55);
  for (int rep = 0; rep < 6; ++rep) {
    HPolytope p = random_polytope(rng, 2);
    PLConcave g = random_concave(rng, p, 4);
    Rational total = 0;
    for (const auto& c : subdivision(g)) total += volume(c.polytope);
    CHECK(total == volume(p));
  }
}

TEST_CASE("linear_path: spec examples") {
  HPolytope seg = interval(q(0), q(1));
  PLConcave zero = PLConcave::zero(seg);
  PLConcave lin = PLConcave::affine(seg, qv({1}), q(0));

  CHECK(linear_path(zero, lin, q(0)) == zero);
  CHECK(linear_path(zero, lin, q(1)) == lin);
  CHECK(linear_path(zero, lin, q(1, 2)) == crease_half(seg));

  HPolytope seg2 = interval(q(0), q(2));
  PLConcave zero2 = PLConcave::zero(seg2);
  PLConcave lin2 = PLConcave::affine(seg2, qv({1}), q(0));
  for (long num = 1; num <= 3; ++num) {
    Rational s = make_rational(num, 4);
    PLConcave expect(seg2, {{qv({1}), q(0)}, {qv({0}), 2 * s}});
    CHECK(linear_path(zero2, lin2, s) == expect);
  }
}

TEST_CASE("linear_path potentials interpolate exactly (defining property)") {
  std::mt19937 rng(77);
  for (int n = 1; n <= 2; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      HPolytope p = random_polytope(rng, n, 2);
      PLConcave g0 = random_concave(rng, p, 3);
      PLConcave g1 = random_concave(rng, p, 3);
      PathFamily fam(g0, g1);
      for (const auto& s : {q(1, 4), q(1, 2), q(2, 3)}) {
        PLConcave gs = fam.at(s);
        for (int probe = 0; probe < 4; ++probe) {
          QVec xi(n);
          for (int i = 0; i < n; ++i) xi[i] = random_rational(rng, 2);
          Rational lhs = evaluate_potential(gs, xi);
          Rational rhs =
              (1 - s) * evaluate_potential(g0, xi) + s * evaluate_potential(g1, xi);
          CHECK(lhs == rhs);
        }
      }
    }
  }
}

TEST_CASE("scale_action: spec examples and equivariance") {
  HPolytope seg = interval(q(0), q(1));
  PLConcave g = crease_half(seg);
  CHECK(scale_action(g, q(1)) == g);
  PLConcave doubled = scale_action(g, q(2));
  PLConcave expect(seg, {{qv({2}), q(0)}, {qv({0}), q(1)}});
  CHECK(doubled == expect);
  CHECK_THROWS_AS(scale_action(g, q(0)), InputError);

  // Equivariance: phi_{c.g}(v_{c xi}) = c * phi_g(v_xi).
  std::mt19937 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    HPolytope p = random_polytope(rng, 2, 2);
    PLConcave h = random_concave(rng, p, 3);
    Rational c = make_rational(1 + (rep % 4), 1 + (rep % 2));
    QVec xi = {random_rational(rng, 2), random_rational(rng, 2)};
    PLConcave hc = scale_action(h, c);
    CHECK(evaluate_potential(hc, scale(xi, c)) == c * evaluate_potential(h, xi));
  }
}

TEST_CASE("monotonicity of potentials") {
  std::mt19937 rng(41);
  for (int rep = 0; rep < 6; ++rep) {
    HPolytope p = random_polytope(rng, 2, 2);
    PLConcave g = random_concave(rng, p, 3);
    PLConcave h = g + q(3, 7);  // g <= h pointwise
    for (int probe = 0; probe < 4; ++probe) {
      QVec xi = {random_rational(rng, 2), random_rational(rng, 2)};
      CHECK(evaluate_potential(g, xi) <= evaluate_potential(h, xi));
    }
  }
}

TEST_CASE("concave_envelope: spec examples") {
  HPolytope seg = interval(q(0), q(1));

  // Affine input is its own envelope.
  Envelope e0 = concave_envelope({{qv({1}), q(1, 3)}}, seg);
  CHECK(e0.env == PLConcave::affine(seg, qv({1}), q(1, 3)));
  REQUIRE(e0.contact.size() == 1);
  CHECK(e0.contact[0].full_dimensional);

  // f = max(1/2 - a, a - 1/2): env = 1/2, contact at {0, 1}.
  Envelope e1 = concave_envelope({{qv({-1}), q(1, 2)}, {qv({1}), q(-1, 2)}}, seg);
  CHECK(e1.env == PLConcave(seg, {{qv({0}), q(1, 2)}}));
  std::vector<QVec> contact_pts;
  for (const auto& face : e1.contact)
    for (const auto& v : face.vertices) contact_pts.push_back(v);
  std::sort(contact_pts.begin(), contact_pts.end(), lex_less);
  contact_pts.erase(std::unique(contact_pts.begin(), contact_pts.end()), contact_pts.end());
  CHECK(contact_pts == std::vector<QVec>{qv({0}), qv({1})});

  // f = max(0, a - 1/2): env = a/2, contact at {0, 1}.
  Envelope e2 = concave_envelope({{qv({0}), q(0)}, {qv({1}), q(-1, 2)}}, seg);
  CHECK(e2.env == PLConcave(seg, {{{q(1, 2)}, q(0)}}));
}

TEST_CASE("envelope properties: majorant, idempotent, above f") {
  std::mt19937 rng(61);
  for (int rep = 0; rep < 8; ++rep) {
    HPolytope p = random_polytope(rng, 2, 2);
    std::vector<PLPiece> pieces;
    for (int k = 0; k < 3; ++k) {
      pieces.push_back({{random_rational(rng, 2), random_rational(rng, 2)},
                        random_rational(rng, 1)});
    }
    Envelope e = concave_envelope(pieces, p);
    auto f_eval = [&](const QVec& a) {
      Rational best;
      bool first = true;
      for (const auto& pc : pieces) {
        Rational v = dot(a, pc.slope) + pc.c;
        if (first || v > best) best = v;
        first = false;
      }
      return best;
    };
    // env >= f at sampled points; env <= any affine majorant (each piece of
    // the envelope is itself a majorant by construction, so compare minima).
    for (const auto& v : e.env.subdivision_vertices()) {
      CHECK(e.env.eval(v) >= f_eval(v));
    }
    // Idempotence: envelope of the envelope's min-form as max-data points.
    std::vector<PLPiece> again;
    for (const auto& pc : e.env.pieces()) again.push_back(pc);
    // env is concave: max over its pieces is not the same function, but the
    // envelope of each affine piece alone must return the piece.
    for (const auto& pc : again) {
      Envelope single = concave_envelope({pc}, p);
      CHECK(single.env == PLConcave(p, {pc}));
    }
  }
}
