#pragma once

#include "specres/tridiag.hpp"
#include "specres/types.hpp"

namespace specres {

/// Branch of E = 2 cos(theta) analytic on C \ ((-inf,-2] u [2,inf)), fixed by
/// Im theta > 0, Re theta in (-pi, 0) on the upper half-plane; real and in
/// (-pi, 0) on (-2, 2).  Throws DomainError on the cuts and within 1e-14 of
/// the branch points +-2.
Complex theta(Complex E);

/// theta'(E) = -1 / (2 sin theta(E)); throws when sin(theta) underflows.
Complex theta_prime(Complex E);

/// Weighted resolvent trace S_L(E) = sum a_k / (lambda_k - E), ascending
/// index, pairwise.  Throws PoleError within 1e-300 of an eigenvalue.
Complex S_L(Complex E, const SpectralData& sd);
Complex S_L_prime(Complex E, const SpectralData& sd);

/// Resonance residual S_L(E) + e^{-i theta(E)}; resonances are its zeros
/// in the cut plane (all in the open lower half-plane).
Complex residual(Complex E, const SpectralData& sd);
Complex residual_prime(Complex E, const SpectralData& sd);

/// Rescaled sum f_L(z) = sum a~_k / (lambda~_k - z); real on real z off the
/// poles.  Pole guard: 1e-13 * max(1, |lambda~_k|).
Complex f_L(Complex z, const RescaledFrame& fr);
Complex f_L_prime(Complex z, const RescaledFrame& fr);

/// f_L(z) + (1/L) e^{-i theta(E0 + z/L^2)}: the rescaled resonance residual,
/// equal to (1/L) [S_L(E) + e^{-i theta(E)}] at E = E0 + z/L^2.
Complex rescaled_residual(Complex z, const RescaledFrame& fr);
Complex rescaled_residual_prime(Complex z, const RescaledFrame& fr);

/// Two adjacent-pole terms around band-local gap n, and the remainder:
/// f_{n,L} keeps poles n, n+1 of the enumeration; tail = f_L - f_{n,L},
/// summed independently so the additivity identity is a genuine check.
struct NearPoleSplit {
  Complex near_part;
  Complex tail;
};
NearPoleSplit near_pole_split(Complex z, const RescaledFrame& fr,
                              const BandLocalEnumeration& en, Index n);

/// d/dz of the tail part (used for the tail monotonicity checks).
Complex near_pole_tail_prime(Complex z, const RescaledFrame& fr,
                             const BandLocalEnumeration& en, Index n);

}  // namespace specres
