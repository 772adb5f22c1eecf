#pragma once

#include <optional>
#include <vector>

#include "specres/periodic.hpp"
#include "specres/pool.hpp"
#include "specres/types.hpp"

namespace specres {

/// Dirichlet truncation H_L on sites 0..L: symmetric tridiagonal with
/// diagonal V(0..L) and unit off-diagonals, no coupling past the ends.
struct TruncatedOperator {
  PeriodicPotential V;
  Index L = 1;

  Index dim() const { return L + 1; }
  Index j() const { return L % V.period(); }
  double diag(Index i) const { return V(i); }
  double norm_inf() const {
    return V.values.cwiseAbs().maxCoeff() + 2.0;  // Gershgorin bound
  }
};

TruncatedOperator assemble(const PeriodicPotential& V, Index L);

/// Full spectral data of H_L: ascending eigenvalues, boundary weights
/// a_k = |phi_k(L)|^2 and the diagnostic first components |phi_k(0)|^2.
struct SpectralData {
  VectorXd lambdas;
  VectorXd weights;
  VectorXd first_components;

  double weight_sum() const;  // pairwise, fixed order
};

/// Sturm-sequence bisection for every eigenvalue (certified brackets),
/// then inverse iteration for the two boundary components, with
/// reorthogonalization inside clusters tighter than 1e-8 * ||H||.
SpectralData eigen_decompose(const TruncatedOperator& op, const WorkerPool* pool = nullptr);

/// Distinct eigenvalues inside a closed band, ascending, with global indices.
struct BandLocalEnumeration {
  int band_index = 0;
  double band_lo = 0, band_hi = 0;
  std::vector<Index> global_index;  // representative index per distinct value
  VectorXd values;

  Index count() const { return values.size(); }
};

BandLocalEnumeration enumerate_in_band(const SpectralData& sd, const BandStructure::Band& band,
                                       int band_index);

/// Window z = L^2 (E - E0) around a band edge, with rescaled spectral data
/// lambda~_k = L^2(lambda_k - E0) and a~_k = L a_k (all L+1 entries).
struct RescaledFrame {
  double E0 = 0;
  Index L = 1;
  VectorXd lambda_tilde;
  VectorXd a_tilde;

  Complex z_of_E(Complex E) const { return double(L) * double(L) * (E - E0); }
  Complex E_of_z(Complex z) const { return E0 + z / (double(L) * double(L)); }
};

RescaledFrame rescale(const SpectralData& sd, double E0, Index L);

/// Two-sided spacing-law ratios near a left band edge (eligible pairs
/// n < k <= eps (L - j)): L^2 |dlambda| / |k^2 - n^2| and
/// L^2 (lambda_k - E0) / (k+1)^2.
struct SpacingReport {
  double pair_ratio_min = 0, pair_ratio_max = 0;
  double edge_ratio_min = 0, edge_ratio_max = 0;
  Index pairs_used = 0, points_used = 0;

  double alpha() const;  // smallest window [1/alpha, alpha] containing all ratios
  bool pass(double alpha_window) const;
};

SpacingReport check_spacing_law(const BandLocalEnumeration& en, double E0, double eps, Index L,
                                Index j);

/// Eigenvalues outside the essential spectrum, matched across an L grid
/// (fixed residue mod p) by proximity; their successive differences should
/// decay geometrically.
struct DecayReport {
  struct Chain {
    std::vector<double> values;  // one per L in the grid (where matched)
    std::vector<double> diffs;
    double log_slope = 0, r2 = 0;
    bool converged_below_eps = false;  // diffs at rounding level already
  };
  std::vector<Chain> chains;
  bool vacuous = false;  // no outside eigenvalues at any L
  bool pass = false;
};

DecayReport check_outside_band_convergence(const PeriodicPotential& V,
                                           const std::vector<Index>& L_list,
                                           const BandStructure& bs,
                                           const WorkerPool* pool = nullptr);

}  // namespace specres
