#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specres/contour.hpp"
#include "specres/kernel.hpp"
#include "specres/periodic.hpp"
#include "specres/pool.hpp"
#include "specres/tridiag.hpp"

namespace specres {

struct LabParams {
  double eps = 0.1;
  double kappa = 20.0;
  double C1 = 10.0;
  double delta1 = 0.0;  // <= 0 selects the default lambda~_0 / 2
  double eta = 0.0;     // <= 0 selects the default eps / kappa
  double tol_root = 1e-12;
  double tol_residual = 1e-9;  // bound on the unrescaled residual per record
  int grid_density = 64;
  double forcing_box_C = 10.0;   // half-width constant of the forcing-point box
  double pole_margin_rel = 1e-9;  // search rectangles stop this close to a pole

  double eta_of() const { return eta > 0 ? eta : eps / kappa; }
};

/// Corner-square size (n+1) / (kappa (ln(n+1) + 1)).
double delta_n(Index n, double kappa);

enum class Regime { DeepWindow, ShallowWindow };
const char* to_string(Regime r);

/// The rectangles of one pole gap [lambda~_n, lambda~_{n+1}] in the rescaled
/// plane: searched sub-regions, the two certified resonance-free corner
/// squares, and the deep strip.
struct RegionFamily {
  Index n = 0;
  double lam_lo = 0, lam_hi = 0;
  double delta = 0;        // Delta_n
  double x0 = 0;           // lambda~_{n+1} - lambda~_n
  double strip_depth = 0;  // x0^2 / (eps L)
  double d_depth = 0;      // eps^5 L^2
  Regime regime = Regime::DeepWindow;

  Rectangle D;  // [lambda~_n, lambda~_{n+1}] x [-eps^5 L^2, 0]
  Rectangle corner_left, corner_right;
  std::optional<Rectangle> inner_box;   // [ln+D, ln1-D] x [-Delta_n, 0]
  std::optional<Rectangle> lower_box;   // [ln, ln1] x [-strip, -Delta_n] (deep-window regime)
  std::optional<Rectangle> gap_window;  // [ln+D, ln1-D] x [-strip, 0]
  std::optional<Rectangle> deep_strip;  // [ln, ln1] x [-eps^5 L^2, -strip]

  /// Positively oriented boundary of the searched gap region
  /// inner_box u lower_box (deep-window regime).
  std::vector<Complex> gap_region_polygon() const;
};

RegionFamily build_regions(const RescaledFrame& fr, const BandLocalEnumeration& en, Index n,
                           const LabParams& params);

/// Rectangles left of the first in-band pole: R^i, the searched strip
/// Omega^i, the pole-adjacent corner square and the deep strip.  Absent when the
/// edge itself is an eigenvalue (lambda~_0 = 0).
struct EdgeRegions {
  double delta1 = 0;
  Rectangle R;           // [0, lambda~_0] x [-eps^4 L^2, 0]
  Rectangle edge_window_rect;  // [0, lambda~_0 - delta1] x [-1/(eps L), 0]
  std::optional<Rectangle> corner_square;  // [lambda~_0 - delta1, lambda~_0] x [-delta1, 0]
  std::optional<Rectangle> deep_strip;     // [0, lambda~_0] x [-eps^4 L^2, -1/(eps L)]
};

std::optional<EdgeRegions> build_edge_regions(const RescaledFrame& fr,
                                              const BandLocalEnumeration& en,
                                              const LabParams& params);

// --- certificates and records ----------------------------------------------

/// Grid evidence that a region is resonance free, with the margin ratio
/// against the predicted lower bound (1/Delta_n for corner squares,
/// 1/(eps L) for strips, 1/delta1 for the edge square).
struct FreeRegionCertificate {
  std::string region_id;
  Rectangle region{0, 1, -1, 0};
  int grid_nx = 0, grid_ny = 0;
  double min_residual = 0;   // min |rescaled_residual| over the grid
  double min_abs_f = 0;      // min |f_L|
  double min_abs_im_f = 0;   // min |Im f_L|
  double bound_ratio = 0;    // margin against the predicted lower bound
  long skipped_pole_points = 0;
  bool pass = false;                 // min_residual > 0 on a non-empty grid
  bool contradicted_by_root = false;  // a located zero lies inside
};

enum class FreeRegionKind { CornerSquare, DeepStrip, EdgeSquare, EdgeStrip };

FreeRegionCertificate certify_free_region(const Rectangle& region, FreeRegionKind kind,
                                          const std::string& id, const RescaledFrame& fr,
                                          const LabParams& params, int grid_density = 0);

enum class EdgeSide { Left, Right };
struct EdgeSelect {
  int band_index = 0;
  EdgeSide side = EdgeSide::Left;
};
const char* to_string(EdgeSide s);

struct ResonanceRecord {
  Index gap_index = -1;  // band-local n of the hosting gap, -1 for R^i
  Complex z;             // rescaled root, effective (left-edge) coordinates
  Complex E;             // unrescaled energy in the original problem
  double residual_abs = 0;
  std::string region_label;
  int multiplicity = 1;
  ZeroCertificate cert;
  bool unresolved = false;
};

/// Shared per-(V, L, edge) pipeline state.  Right band edges are handled by
/// the exact reflection E -> -E, V -> -V; `reflected` marks that the frame,
/// enumeration and spectral data live in the reflected coordinates, while
/// record energies are mapped back to the original problem.
struct EdgeComputation {
  PeriodicPotential V_eff;
  bool reflected = false;
  double E0_orig = 0;
  double E0_eff = 0;
  int band_index_eff = 0;
  BandStructure bands_eff;
  SpectralData sd;
  BandLocalEnumeration en;
  RescaledFrame frame;
  EdgeClassification cls;
  Index n_max = 0;  // gaps searched: n <= eps L / C1
};

EdgeComputation prepare_edge(const PeriodicPotential& V, Index L, EdgeSelect edge,
                             const LabParams& params, const WorkerPool* pool = nullptr);

Complex map_back_z(const EdgeComputation& ec, Complex z_eff);
Complex map_back_E(const EdgeComputation& ec, Complex z_eff);

struct FindReport {
  EdgeComputation prep;
  std::vector<ResonanceRecord> records;
  std::vector<FreeRegionCertificate> certificates;
  bool lower_half_ok = true;    // every record has Im E < 0
  bool residuals_ok = true;     // every record residual <= tol
  bool consistency_ok = true;   // no root inside a certified-free region
};

/// Locates every zero of the rescaled residual in the D^i_n rectangles
/// (n <= eps L / C1) and in R^i, labels each by sub-region and certifies the
/// resonance-free zones.
FindReport find_resonances_near_edge(const PeriodicPotential& V, Index L, EdgeSelect edge,
                                     const LabParams& params, const WorkerPool* pool = nullptr);
FindReport find_resonances_near_edge(const EdgeComputation& ec, const LabParams& params,
                                     const WorkerPool* pool = nullptr);

// --- structural verification ---------------------------------------------

struct DichotomyReport {
  Index n = 0;
  bool image_simple = false;
  bool image_budget_exhausted = false;
  bool member_defined = false;  // forcing point not on the image curve
  bool member_inner = false;    // -(1/L) e^{-i theta(E0)} inside f_L(inner box)
  int inner_winding = -1;
  int lower_winding = -1;
  int region_winding = -1;  // on the full gap-region polygon
  ZeroCertificate inner_cert, lower_cert, region_cert;
  std::optional<Complex> root;  // unique inner-box root when the member case holds
  double width = 0;
  double delta = 0;
  bool width_le_delta = false;
  bool consistent = false;  // membership case agrees with the windings
  std::size_t image_points = 0;
  bool pass = false;      // region winding >= 1 and the member obligations hold
  ContourImage image;     // f_L on the inner-box boundary, for figure export
  Complex forcing_point;  // -(1/L) e^{-i theta(E0)}
};

/// Conformal-image machinery on one gap: image of the inner-box boundary,
/// its simplicity, the membership of the forcing point, and the cross-check
/// against direct winding counts.
DichotomyReport verify_gap_dichotomy(const EdgeComputation& ec, Index n, const LabParams& params);

struct GapWindowEntry {
  Index n = 0;
  int winding = -1;
  ZeroCertificate cert;
  Complex z;
  double width = 0;
  double C_n = 0;  // width * eps L / (n+1)^2
  bool pass = false;
};

struct EdgeWindowResult {
  bool r_empty = false;  // lambda~_0 = 0: R^i is empty, vacuous pass
  int region_winding = -1;
  ZeroCertificate region_cert;
  int r_winding = -1;
  ZeroCertificate r_cert;
  bool pass = false;
};

struct EdgeVerifyReport {
  EdgeSelect edge;
  double E0 = 0;
  Index L = 0;
  EdgeClassification cls;
  bool hypothesis_nongeneric = false;  // standing assumption of the structure checks
  bool reflected = false;
  EdgeWindowResult edge_check;
  std::vector<GapWindowEntry> gap_windows;  // n < eta L / ln L
  std::vector<DichotomyReport> dichotomies;  // deep-window regime n <= eps L / C1
  FindReport find;
  bool gap_windows_all_pass = false;
  bool dichotomies_all_pass = false;
  bool certificates_all_valid = false;
};

/// Full per-edge suite: the edge window Omega^i and R^i must be resonance
/// free, each gap window Omega~^i_n with n < eta L / ln L holds exactly one
/// resonance, every searched gap region holds at least one (with the
/// inner-box membership dichotomy), and the free-region certificates hold.
EdgeVerifyReport verify_edge(const PeriodicPotential& V, Index L, EdgeSelect edge,
                             const LabParams& params, const WorkerPool* pool = nullptr);

// --- scaling and classification ----------------------------------------------

struct ScalingReport {
  struct Point {
    Index L = 0;
    Index n = 0;
    double width = 0;
    bool in_gap_window_regime = false;  // n < eta L / ln L
  };
  std::vector<Point> points;
  double slope = 0, intercept = 0, r2 = 0;
  double spearman = 0;   // width vs n rank correlation, pooled per L
  double C_max = 0;      // max width * eps L / (n+1)^2
  bool pass = false;     // slope in [0.8, 1.2] and R^2 >= 0.9
};

/// Widths |Im z_n| across an L grid against the n^2/(eps L) law.
ScalingReport scaling_study(const PeriodicPotential& V, EdgeSelect edge,
                            const std::vector<Index>& L_grid, const LabParams& params,
                            const WorkerPool* pool = nullptr);

struct ClassificationReport {
  struct PerResidue {
    Index j = 0;
    EdgeClassification cls;
    double cv_inverse_law = 0;  // spread of a_k (L-j)
    double cv_edge_law = 0;     // spread of a_k (L-j) / |lambda_k - E0|
    std::string empirical;      // law with the smaller spread
    bool agree = false;
    Index samples = 0;
  };
  double E0 = 0;
  std::vector<PerResidue> rows;
  bool all_decided_agree = true;
};

/// Analytic d_{j+1} classification for every residue j, cross-checked by
/// regressing the computed a_k against both candidate laws over the L grid.
ClassificationReport classify_and_crosscheck(const PeriodicPotential& V, double E0,
                                             EdgeSide side, const std::vector<Index>& L_grid,
                                             const LabParams& params,
                                             const WorkerPool* pool = nullptr);

struct NonGenericHit {
  VectorXd values;
  double edge = 0;
  Index j = 0;
  double abs_d = 0;
};

/// Random search over period-2 and period-3 potentials for d_{j+1} = 0
/// candidates.  An empty result is a valid outcome.
std::vector<NonGenericHit> scan_nongeneric(int trials, unsigned seed = 12345);

}  // namespace specres
