#include "specres/kernel.hpp"

#include <cmath>

namespace specres {

Complex theta(Complex E) {
  if (std::abs(E - 2.0) < 1e-14 || std::abs(E + 2.0) < 1e-14)
    throw DomainError("theta: evaluation at a branch point +-2");
  if (E.imag() == 0.0 && std::abs(E.real()) >= 2.0)
    throw DomainError("theta: evaluation on a branch cut");
  // principal acos maps the cut plane to {Re in (0, pi)} with Im acos < 0 on
  // the upper half-plane, so -acos realizes the required branch
  return -std::acos(E / 2.0);
}

Complex theta_prime(Complex E) {
  const Complex th = theta(E);
  const Complex s = std::sin(th);
  if (std::abs(s) < 1e-12) throw DomainError("theta_prime: sin(theta) underflow near band edge");
  return -1.0 / (2.0 * s);
}

Complex S_L(Complex E, const SpectralData& sd) {
  const Index n = sd.lambdas.size();
  for (Index k = 0; k < n; ++k)
    if (std::abs(Complex(sd.lambdas[k], 0.0) - E) < 1e-300)
      throw PoleError("S_L: evaluation at an eigenvalue", k, E);
  return pairwise_sum<Complex>(0, n, [&](Index k) {
    return sd.weights[k] / (sd.lambdas[k] - E);
  });
}

Complex S_L_prime(Complex E, const SpectralData& sd) {
  const Index n = sd.lambdas.size();
  return pairwise_sum<Complex>(0, n, [&](Index k) {
    const Complex d = sd.lambdas[k] - E;
    return sd.weights[k] / (d * d);
  });
}

Complex residual(Complex E, const SpectralData& sd) {
  return S_L(E, sd) + std::exp(Complex(0, -1) * theta(E));
}

Complex residual_prime(Complex E, const SpectralData& sd) {
  const Complex th = theta(E);
  return S_L_prime(E, sd) +
         Complex(0, -1) * theta_prime(E) * std::exp(Complex(0, -1) * th);
}

namespace {

inline void pole_guard(Complex z, const RescaledFrame& fr) {
  const Index n = fr.lambda_tilde.size();
  for (Index k = 0; k < n; ++k) {
    const double guard = 1e-13 * std::max(1.0, std::abs(fr.lambda_tilde[k]));
    if (std::abs(Complex(fr.lambda_tilde[k], 0.0) - z) < guard)
      throw PoleError("f_L: evaluation too close to a rescaled eigenvalue", k, z);
  }
}

}  // namespace

Complex f_L(Complex z, const RescaledFrame& fr) {
  pole_guard(z, fr);
  return pairwise_sum<Complex>(0, fr.lambda_tilde.size(), [&](Index k) {
    return fr.a_tilde[k] / (fr.lambda_tilde[k] - z);
  });
}

Complex f_L_prime(Complex z, const RescaledFrame& fr) {
  pole_guard(z, fr);
  return pairwise_sum<Complex>(0, fr.lambda_tilde.size(), [&](Index k) {
    const Complex d = fr.lambda_tilde[k] - z;
    return fr.a_tilde[k] / (d * d);
  });
}

Complex rescaled_residual(Complex z, const RescaledFrame& fr) {
  const double L = double(fr.L);
  return f_L(z, fr) + std::exp(Complex(0, -1) * theta(fr.E_of_z(z))) / L;
}

Complex rescaled_residual_prime(Complex z, const RescaledFrame& fr) {
  const double L = double(fr.L);
  const Complex E = fr.E_of_z(z);
  const Complex forcing = std::exp(Complex(0, -1) * theta(E)) / L;
  return f_L_prime(z, fr) + Complex(0, -1) * theta_prime(E) * forcing / (L * L);
}

NearPoleSplit near_pole_split(Complex z, const RescaledFrame& fr,
                              const BandLocalEnumeration& en, Index n) {
  if (n < 0 || n + 1 >= en.count())
    throw DomainError("near_pole_split: band-local index out of range");
  const Index g0 = en.global_index[std::size_t(n)];
  const Index g1 = en.global_index[std::size_t(n + 1)];
  pole_guard(z, fr);
  NearPoleSplit out;
  out.near_part = fr.a_tilde[g0] / (fr.lambda_tilde[g0] - z) +
                  fr.a_tilde[g1] / (fr.lambda_tilde[g1] - z);
  out.tail = pairwise_sum<Complex>(0, fr.lambda_tilde.size(), [&](Index k) {
    if (k == g0 || k == g1) return Complex(0, 0);
    return fr.a_tilde[k] / (fr.lambda_tilde[k] - z);
  });
  return out;
}

Complex near_pole_tail_prime(Complex z, const RescaledFrame& fr,
                             const BandLocalEnumeration& en, Index n) {
  if (n < 0 || n + 1 >= en.count())
    throw DomainError("near_pole_tail_prime: band-local index out of range");
  const Index g0 = en.global_index[std::size_t(n)];
  const Index g1 = en.global_index[std::size_t(n + 1)];
  pole_guard(z, fr);
  return pairwise_sum<Complex>(0, fr.lambda_tilde.size(), [&](Index k) {
    if (k == g0 || k == g1) return Complex(0, 0);
    const Complex d = fr.lambda_tilde[k] - z;
    return fr.a_tilde[k] / (d * d);
  });
}

}  // namespace specres
