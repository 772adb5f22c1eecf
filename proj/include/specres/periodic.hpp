#pragma once

#include <optional>
#include <vector>

#include "specres/types.hpp"

namespace specres {

using Matrix2c = Eigen::Matrix2cd;

/// One-step transfer matrix ((E - V_l, -1), (1, 0)) of the full-line operator.
Matrix2c transfer_matrix(Complex E, Index site, const PeriodicPotential& V);

/// Monodromy over one period starting at site `base`:
/// T_{base+p-1}(E) ... T_{base}(E). Unimodular up to rounding.
Matrix2c monodromy(Complex E, Index base, const PeriodicPotential& V);

/// Discriminant Delta(E) = tr of the base-0 monodromy; a monic degree-p
/// polynomial in E whose |.| <= 2 sublevel set is the essential spectrum.
Complex discriminant(Complex E, const PeriodicPotential& V);

// --- polynomial form ------------------------------------------------------

/// Coefficients, ascending powers.  polyval uses Horner.
double polyval(const VectorXd& coeffs, double x);
Complex polyval(const VectorXd& coeffs, Complex x);
VectorXd polyder(const VectorXd& coeffs);

/// Entries of the base-0 monodromy as polynomials in E:
/// T~_0 = ((a_p, b_p), (a_pm1, b_pm1)); discriminant = a_p + b_pm1.
struct MonodromyPolys {
  VectorXd a_p, b_p, a_pm1, b_pm1;
};
MonodromyPolys monodromy_polys(const PeriodicPotential& V);

VectorXd discriminant_coeffs(const PeriodicPotential& V);

/// All real roots of a polynomial inside [lo, hi], isolated through the
/// derivative chain (each derivative's roots split the line into monotone
/// pieces) and polished.  Intended for the low-degree discriminant
/// polynomials here, where every root is real.
std::vector<double> poly_real_roots(const VectorXd& coeffs, double lo, double hi, double tol);

// --- band structure -------------------------------------------------------

struct BandStructure {
  struct Band {
    double lo = 0, hi = 0;
    std::vector<double> closed_gaps;  // interior |Delta| = 2 touch points
  };
  std::vector<Band> bands;    // pairwise disjoint, ascending
  std::vector<double> edges;  // boundary of the essential spectrum, ascending

  /// Index of the band whose closed interval contains E (within slack), or -1.
  int band_of(double E, double slack = 0.0) const;
};

/// Bands of { E : |Delta(E)| <= 2 }.  Roots of Delta -+ 2 are found to
/// absolute accuracy `tol`; a touching root (|Delta| = 2, Delta' = 0) is a
/// closed gap, interior to its band, and is not an edge.
BandStructure band_structure(const PeriodicPotential& V, double tol = 1e-12);

/// Floquet quasi-momentum theta_p(E) on a band: the continuous increasing
/// branch with 2 cos(p theta_p) = Delta, mapping band i onto
/// sum_{l<i}(1+c_l) pi/p + (pi/p)[0, c_i+1].
double quasimomentum(double E, const PeriodicPotential& V, const BandStructure& bs);
double quasimomentum(double E, const PeriodicPotential& V);

// --- band-edge classification (boundary-weight dichotomy) ------------------

enum class EdgeCase { Generic, NonGeneric, Indeterminate };

/// Diagnostics of the boundary-weight law at an edge E0 for L = N p + j:
/// nongeneric (a_k of order 1/L) iff a0_pm1 != 0 and d_j1 = 0.
struct EdgeClassification {
  double edge = 0;
  Index j = 0;
  EdgeCase kind = EdgeCase::Generic;
  double a0_pm1 = 0;  // lower-left monodromy entry at E0
  double d_j1 = 0;    // a_{j+1}(E0)(a^0_p(E0) - 1/rho) + b_{j+1}(E0) a^0_{p-1}(E0)
  double rho = 1;     // +-1 monodromy eigenvalue, Delta(E0)/2
  double a_j1 = 0, b_j1 = 0;
};

EdgeClassification classify_band_edge(double E0, Index j, const PeriodicPotential& V);

const char* to_string(EdgeCase c);

}  // namespace specres
