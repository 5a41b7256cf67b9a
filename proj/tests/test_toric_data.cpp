#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kstab/toric.hpp"
#include "kstab/weight.hpp"
#include "test_helpers.hpp"

using namespace kstab;
using namespace kstab::testing;

TEST_CASE("normal fan of the segment and the plane triangle") {
  HPolytope seg = interval(q(0), q(1));
  FanData fan = normal_fan(seg);
  REQUIRE(fan.rays.size() == 2);
  CHECK(fan.max_cones.size() == 2);
  CHECK(!fan.has_nonsmooth_cone);

  FanData tri = normal_fan(p2_triangle());
  REQUIRE(tri.rays.size() == 3);
  bool found = false;
  for (const auto& r : tri.rays) found = found || r == zv({-1, -1});
  CHECK(found);
  CHECK(!tri.has_nonsmooth_cone);
}

TEST_CASE("log_discrepancy: spec examples") {
  FanData fan = normal_fan(interval(q(0), q(1)));
  CHECK(log_discrepancy(fan, qv({1})) == q(1));
  CHECK(log_discrepancy(fan, QVec{q(1, 2)}) == q(1, 2));
  CHECK(log_discrepancy(fan, qv({0})) == q(0));
  CHECK(log_discrepancy(fan, qv({-1})) == q(1));

  // Fan of the plane: A((1,1)) = 2 in the cone spanned by e1, e2.
  FanData tri = normal_fan(p2_triangle());
  CHECK(log_discrepancy(tri, qv({1, 1})) == q(2));
  CHECK(log_discrepancy(tri, qv({1, 0})) == q(1));
  CHECK(log_discrepancy(tri, qv({-1, -1})) == q(1));
  CHECK(log_discrepancy(tri, qv({-2, -2})) == q(2));
}

TEST_CASE("log_discrepancy homogeneity and positivity on random directions") {
  std::mt19937 rng(17);
  for (int n = 1; n <= 3; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      HPolytope p = random_polytope(rng, n);
      FanData fan = normal_fan(p);
      for (int probe = 0; probe < 6; ++probe) {
        QVec xi(n);
        bool zero = true;
        for (int i = 0; i < n; ++i) {
          xi[i] = random_rational(rng, 3);
          if (xi[i] != 0) zero = false;
        }
        if (zero) continue;
        Rational a = log_discrepancy(fan, xi);
        CHECK(a > 0);
        Rational c = make_rational(3, 2);
        CHECK(log_discrepancy(fan, scale(xi, c)) == c * a);
      }
    }
  }
}

TEST_CASE("deform_canonical: spec examples") {
  HPolytope seg = interval(q(0), q(1));
  HPolytope d = deform_canonical(seg, q(1, 4));
  CHECK(d.vertices()[0][0] == q(1, 4));
  CHECK(d.vertices()[1][0] == q(3, 4));

  HPolytope sq = unit_cube(2);
  HPolytope dsq = deform_canonical(sq, q(1, 10));
  CHECK(volume(dsq) == make_rational(16, 25));

  CHECK_THROWS_AS(deform_canonical(seg, q(1, 2)), CombinatorialCollapse);
  // Beyond the radius on the triangle: vertex truncation type change.
  HPolytope tri = p2_triangle();
  CHECK_THROWS_AS(deform_canonical(tri, q(2)), CombinatorialCollapse);
}

TEST_CASE("volume derivative of the canonical deformation matches -sigma total") {
  std::mt19937 rng(29);
  for (int n = 1; n <= 3; ++n) {
    HPolytope p = random_polytope(rng, n);
    FacetMeasure fm(p);
    QVec nodes, vols;
    for (int k = 0; k <= n; ++k) {
      Rational s = make_rational(k, 200);
      nodes.push_back(s);
      vols.push_back(volume(k == 0 ? p : deform_canonical(p, s)));
    }
    QVec poly = interpolate_polynomial(nodes, vols);
    CHECK(poly[1] == -fm.total());
  }
}
