#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "specres/contour.hpp"

using namespace specres;

TEST_CASE("winding_count: simple, double and absent zeros") {
  const Rectangle box(-1, 1, -1, 1);
  const Complex z0(0.25, -0.35);

  const auto c1 = winding_count([&](Complex z) { return z - z0; }, box);
  CHECK(c1.valid());
  CHECK(c1.winding == 1);

  const auto c2 = winding_count([&](Complex z) { return (z - z0) * (z - z0); }, box);
  CHECK(c2.valid());
  CHECK(c2.winding == 2);

  const auto c0 = winding_count([&](Complex z) { return z - Complex(3, 3); }, box);
  CHECK(c0.valid());
  CHECK(c0.winding == 0);

  // a zero sitting on the boundary is flagged, not counted silently
  const auto cb = winding_count([&](Complex z) { return z - Complex(1.0, 0.0); }, box);
  CHECK(!cb.valid());

  // a zero close to (but off) the boundary trips the modulus margin
  const auto cn = winding_count([&](Complex z) { return z - Complex(1.0 - 1e-13, 0.0); }, box);
  CHECK(!cn.valid());
}

TEST_CASE("winding on a polygon contour") {
  // L-shaped hexagon around the origin
  std::vector<Complex> poly = {{-1, -1}, {1, -1}, {1, 0}, {0.2, 0}, {0.2, 1}, {-1, 1}};
  const auto c = winding_count([](Complex z) { return z; }, poly);
  CHECK(c.valid());
  CHECK(c.winding == 1);
  const auto c2 = winding_count([](Complex z) { return z - Complex(0.6, 0.5); }, poly);
  CHECK(c2.valid());
  CHECK(c2.winding == 0);  // that point is inside the notch
}

TEST_CASE("refine_root: pinned seeds") {
  const auto f = [](Complex z) { return z * z - 1.0; };
  const auto fp = [](Complex z) { return 2.0 * z; };
  const Complex r = refine_root(f, fp, Complex(0.9, 0), 1e-12);
  CHECK(std::abs(r - 1.0) < 1e-12);

  const auto g = [](Complex z) { return z * z * z - z; };
  const auto gp = [](Complex z) { return 3.0 * z * z - 1.0; };
  const Complex r2 = refine_root(g, gp, Complex(0.6, 0.1), 1e-12);
  CHECK(std::abs(r2 - 1.0) < 1e-12);  // nearest root of {-1, 0, 1}
}

TEST_CASE("locate_all_roots: constructed quadratic and empty box") {
  oracles::FactoredPoly p;
  p.roots = {{0.3, -0.2}, {0.7, -0.5}};
  const Rectangle box(0, 1, -1, 0);
  const auto found = locate_all_roots([&](Complex z) { return p(z); },
                                      [&](Complex z) { return p.derivative(z); }, box, 1e-12);
  REQUIRE(found.size() == 2);
  int total = 0;
  for (const auto& e : found) {
    total += e.multiplicity;
    double best = 1e9;
    for (const auto& r : p.roots) best = std::min(best, std::abs(e.root - r));
    CHECK(best < 1e-10);
  }
  CHECK(total == 2);

  const auto none = locate_all_roots([&](Complex z) { return p(z); },
                                     [&](Complex z) { return p.derivative(z); },
                                     Rectangle(2, 3, 1, 2), 1e-12);
  CHECK(none.empty());
}

TEST_CASE("locate_all_roots: double zero reported once with multiplicity two") {
  const Complex z0(0.4, -0.6);
  const auto f = [&](Complex z) { return (z - z0) * (z - z0); };
  const auto fp = [&](Complex z) { return 2.0 * (z - z0); };
  const auto found = locate_all_roots(f, fp, Rectangle(0, 1, -1, 0), 1e-10);
  REQUIRE(found.size() == 1);
  CHECK(found[0].multiplicity == 2);
  CHECK(std::abs(found[0].root - z0) < 1e-6);
}

TEST_CASE("locate_all_roots: randomized polynomial oracle") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_int_distribution<int> du(1, 6);
  const Rectangle box(0, 1, 0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    oracles::FactoredPoly p;
    const int deg = du(rng);
    int inside = 0;
    for (int i = 0; i < deg; ++i) {
      if (i % 2 == 0 || trial % 3 == 0) {
        p.roots.push_back({u(rng), u(rng)});
        ++inside;
      } else {
        p.roots.push_back({u(rng) + 2.0, u(rng) - 3.0});  // outside the box
      }
    }
    const auto found = locate_all_roots([&](Complex z) { return p(z); },
                                        [&](Complex z) { return p.derivative(z); }, box, 1e-10);
    int total = 0;
    for (const auto& e : found) {
      total += e.multiplicity;
      double best = 1e9;
      for (const auto& r : p.roots) best = std::min(best, std::abs(e.root - r));
      CHECK(best < 1e-8);
    }
    CHECK(total == inside);
  }
}

TEST_CASE("winding additivity across quadrants") {
  oracles::FactoredPoly p;
  p.roots = {{0.21, 0.33}, {0.77, 0.72}, {0.52, 0.18}};
  const Rectangle box(0, 1, 0, 1);
  const auto f = [&](Complex z) { return p(z); };
  const auto whole = winding_count(f, box);
  REQUIRE(whole.valid());
  const double xs = box.re_min + 0.5 * box.width();
  const double ys = box.im_min + 0.5 * box.height();
  int sum = 0;
  for (const Rectangle& q :
       {Rectangle(box.re_min, xs, box.im_min, ys), Rectangle(xs, box.re_max, box.im_min, ys),
        Rectangle(box.re_min, xs, ys, box.im_max), Rectangle(xs, box.re_max, ys, box.im_max)}) {
    const auto c = winding_count(f, q);
    REQUIRE(c.valid());
    sum += c.winding;
  }
  CHECK(sum == whole.winding);
  CHECK(whole.winding == 3);
}

TEST_CASE("image_curve and is_simple") {
  const Rectangle box(-1, 1, -1, 1);
  const auto corners = box.corners();

  const auto ident = image_curve([](Complex z) { return z; }, corners, true);
  CHECK(ident.closed);
  CHECK(is_simple(ident));

  // z^2 on a contour encircling 0 doubles the argument: not simple
  const auto squared = image_curve([](Complex z) { return z * z; }, corners, true);
  CHECK(!is_simple(squared));

  // winding of the image of the identity around an interior / exterior point
  CHECK(polyline_winding_around(ident.points, Complex(0.2, 0.1)) == 1);
  CHECK(polyline_winding_around(ident.points, Complex(5, 5)) == 0);
}

TEST_CASE("polyline winding rejects on-curve queries") {
  std::vector<Complex> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polyline_winding_around(square, Complex(0.5, 0.5)) == 1);
  CHECK_THROWS_AS(polyline_winding_around(square, Complex(0.5, 0.0)), DomainError);
}
