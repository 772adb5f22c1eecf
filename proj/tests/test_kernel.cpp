#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "specres/kernel.hpp"

using namespace specres;

TEST_CASE("theta: pinned values and branch invariants") {
  CHECK(std::abs(theta(Complex(0, 0)) - Complex(-oracles::kPi / 2, 0)) < 1e-14);
  CHECK(std::abs(theta(Complex(std::sqrt(2.0), 0)) - Complex(-oracles::kPi / 4, 0)) < 1e-14);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ur(-6, 6), ui(1e-6, 4);
  for (int i = 0; i < 10000; ++i) {
    const bool upper = i % 2 == 0;
    Complex E(ur(rng), upper ? ui(rng) : -ui(rng));
    const Complex th = theta(E);
    CHECK(std::abs(2.0 * std::cos(th) - E) <= 1e-12 * std::max(1.0, std::abs(E)));
    CHECK(th.real() > -oracles::kPi);
    CHECK(th.real() < 0.0);
    if (upper) CHECK(th.imag() > 0.0);
    if (!upper) CHECK(th.imag() < 0.0);
  }
  // real segment: theta real, increasing from -pi to 0
  double prev = -oracles::kPi;
  for (int s = 1; s < 400; ++s) {
    const double E = -2.0 + 4.0 * double(s) / 400.0;
    const Complex th = theta(Complex(E, 0));
    CHECK(std::abs(th.imag()) < 1e-12);
    CHECK(th.real() > prev);
    prev = th.real();
  }
  CHECK_THROWS_AS(theta(Complex(2.5, 0)), DomainError);
  CHECK_THROWS_AS(theta(Complex(-3.0, 0)), DomainError);
  CHECK_THROWS_AS(theta(Complex(2.0 + 1e-16, 0)), DomainError);
}

TEST_CASE("theta continuity on compacts away from the branch points") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const Complex E(u(rng), u(rng) * 0.5);
    if (std::abs(E - 2.0) < 0.3 || std::abs(E + 2.0) < 0.3) continue;
    const Complex h(1e-7, -1e-7);
    if (E.imag() == 0.0 || (E + h).imag() == 0.0) continue;
    if ((E.imag() > 0) != ((E + h).imag() > 0)) continue;  // same half-plane only
    CHECK(std::abs(theta(E + h) - theta(E)) < 1e-5);
  }
}

TEST_CASE("theta_prime: pinned values and finite differences") {
  CHECK(std::abs(theta_prime(Complex(0, 0)) - Complex(0.5, 0)) < 1e-13);
  CHECK(std::abs(theta_prime(Complex(std::sqrt(2.0), 0)) - Complex(1.0 / std::sqrt(2.0), 0)) <
        1e-13);
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> ur(-1.8, 1.8), ui(0.01, 2);
  for (int i = 0; i < 100; ++i) {
    const Complex E(ur(rng), (i % 2 ? 1 : -1) * ui(rng));
    const Complex fd = oracles::central_diff([](Complex z) { return theta(z); }, E, 1e-6);
    CHECK(std::abs(theta_prime(E) - fd) < 1e-6 * std::max(1.0, std::abs(theta_prime(E))));
  }
}

TEST_CASE("S_L: single pole, upper-half mapping, high-precision oracle") {
  SpectralData pair;
  pair.lambdas = VectorXd::Zero(1);
  pair.weights = VectorXd::Constant(1, 1.0);
  pair.first_components = pair.weights;
  CHECK(std::abs(S_L(Complex(1, 0), pair) - Complex(-1, 0)) < 1e-15);

  PeriodicPotential V{1.3, -0.4};
  const Index L = 200;
  const SpectralData sd = eigen_decompose(assemble(V, L));
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> ur(-4, 4), ui(1e-4, 3);
  for (int i = 0; i < 100; ++i) {
    const Complex E(ur(rng), ui(rng));
    CHECK(S_L(E, sd).imag() > 0.0);
  }

  PeriodicPotential zero{0.0};
  const SpectralData sd50 = eigen_decompose(assemble(zero, 50));
  const Complex probe(3.0, 0.0);
  const Complex expect = oracles::highprec_rational_sum(sd50.lambdas, sd50.weights, probe);
  CHECK(std::abs(S_L(probe, sd50) - expect) < 1e-14);

  CHECK_THROWS_AS(S_L(Complex(sd50.lambdas[3], 0.0), sd50), PoleError);
}

TEST_CASE("residual: no real zeros inside the band, derivative consistency") {
  PeriodicPotential zero{0.0};
  const Index L = 80;
  const SpectralData sd = eigen_decompose(assemble(zero, L));
  // on the real axis inside (-2, 2) the forcing has positive imaginary part
  for (double E : {-1.5, -0.2, 0.7, 1.9}) {
    bool pole = false;
    Complex r;
    try {
      r = residual(Complex(E, 0), sd);
    } catch (const PoleError&) {
      pole = true;
    }
    if (!pole) CHECK(r.imag() > 0.0);
  }
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> ur(-1.5, 1.5), ui(0.05, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Complex E(ur(rng), (i % 2 ? 1 : -1) * ui(rng));
    const Complex fd =
        oracles::central_diff([&](Complex z) { return residual(z, sd); }, E, 1e-6);
    const Complex an = residual_prime(E, sd);
    CHECK(std::abs(an - fd) < 1e-5 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("f_L: consistency with the unrescaled residual and Schwarz symmetry") {
  PeriodicPotential zero{0.0};
  const Index L = 300;
  const SpectralData sd = eigen_decompose(assemble(zero, L));
  const RescaledFrame fr = rescale(sd, -2.0, L);

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ur(0.5, 200), ui(0.1, 30);
  for (int i = 0; i < 100; ++i) {
    const Complex z(ur(rng), -ui(rng));
    // rescaled residual equals (1/L)(S_L + e^{-i theta}) at E = E0 + z/L^2
    const Complex E = fr.E_of_z(z);
    const Complex lhs = rescaled_residual(z, fr);
    const Complex rhs = residual(E, sd) / double(L);
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
    // Schwarz symmetry of the rational part
    CHECK(std::abs(f_L(std::conj(z), fr) - std::conj(f_L(z, fr))) <
          1e-12 * std::max(1.0, std::abs(f_L(z, fr))));
  }
}

TEST_CASE("f_L midpoint value against the extended-precision oracle") {
  PeriodicPotential zero{0.0};
  const Index L = 100;
  const SpectralData sd = eigen_decompose(assemble(zero, L));
  const RescaledFrame fr = rescale(sd, -2.0, L);
  const double mid = 0.5 * (fr.lambda_tilde[0] + fr.lambda_tilde[1]);
  const Complex expect =
      oracles::highprec_rational_sum(fr.lambda_tilde, fr.a_tilde, Complex(mid, 0));
  CHECK(std::abs(f_L(Complex(mid, 0), fr) - expect) < 1e-12 * std::abs(expect));
  // real on the real axis off poles
  CHECK(f_L(Complex(mid, 0), fr).imag() == 0.0);
  CHECK_THROWS_AS(f_L(Complex(fr.lambda_tilde[4], 0), fr), PoleError);
}

TEST_CASE("near-pole split: additivity, tail bound shape, tail monotonicity") {
  PeriodicPotential V{-2.0, 0.0};  // nongeneric edge structure at 0 for odd L
  const Index L = 201;
  const SpectralData sd = eigen_decompose(assemble(V, L));
  const BandStructure bs = band_structure(V);
  const int bi = bs.band_of(1e-6);
  REQUIRE(bi >= 0);
  const auto en = enumerate_in_band(sd, bs.bands[std::size_t(bi)], bi);
  const RescaledFrame fr = rescale(sd, 0.0, L);

  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> uy(0.01, 5.0);
  double tail_const = 0;
  for (Index n = 0; n + 1 < std::min<Index>(en.count(), 8); ++n) {
    const double lo = fr.lambda_tilde[en.global_index[std::size_t(n)]];
    const double hi = fr.lambda_tilde[en.global_index[std::size_t(n + 1)]];
    for (int i = 0; i < 12; ++i) {
      const double x = lo + (hi - lo) * double(i + 1) / 14.0;
      const Complex z(x, -uy(rng));
      const auto split = near_pole_split(z, fr, en, n);
      const Complex whole = f_L(z, fr);
      CHECK(std::abs(split.near_part + split.tail - whole) <
            1e-12 * std::max(1.0, std::abs(whole)));
      // tail bound |tail| <= C (ln(n+1)+1)/(n+1) with a stable constant
      const double bound = (std::log(double(n + 1)) + 1.0) / double(n + 1);
      tail_const = std::max(tail_const, std::abs(split.tail) / bound);
    }
    // tail' > 0 on the real segment between the poles
    for (int i = 1; i < 8; ++i) {
      const double x = lo + (hi - lo) * double(i) / 8.0;
      CHECK(near_pole_tail_prime(Complex(x, 0), fr, en, n).real() > 0.0);
    }
  }
  CHECK(tail_const > 0);
  CHECK(tail_const < 50.0);  // constant of the (ln(n+1)+1)/(n+1) law stays tame
  CHECK_THROWS_AS(near_pole_split(Complex(1, -1), fr, en, en.count() - 1), DomainError);
}

TEST_CASE("rescaled_residual derivative against finite differences") {
  PeriodicPotential zero{0.0};
  const Index L = 120;
  const SpectralData sd = eigen_decompose(assemble(zero, L));
  const RescaledFrame fr = rescale(sd, -2.0, L);
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> ur(1.0, 300), ui(0.05, 5);
  for (int i = 0; i < 60; ++i) {
    const Complex z(ur(rng), -ui(rng));
    const Complex fd = oracles::central_diff(
        [&](Complex w) { return rescaled_residual(w, fr); }, z, 1e-5);
    const Complex an = rescaled_residual_prime(z, fr);
    CHECK(std::abs(an - fd) < 2e-5 * std::max(1e-6, std::abs(an)));
  }
}
