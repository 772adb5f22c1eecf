#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specres/types.hpp"

namespace specres {

using Evaluator = std::function<Complex(Complex)>;

struct Rectangle {
  double re_min = 0, re_max = 1, im_min = 0, im_max = 1;

  Rectangle() = default;
  Rectangle(double re_lo, double re_hi, double im_lo, double im_hi)
      : re_min(re_lo), re_max(re_hi), im_min(im_lo), im_max(im_hi) {
    if (!(re_min < re_max && im_min < im_max))
      throw DomainError("Rectangle: degenerate extents");
  }

  Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double diameter() const { return std::hypot(width(), height()); }
  bool contains(Complex z, double slack = 0.0) const {
    return z.real() >= re_min - slack && z.real() <= re_max + slack &&
           z.imag() >= im_min - slack && z.imag() <= im_max + slack;
  }
  std::vector<Complex> corners() const {
    return {{re_min, im_min}, {re_max, im_min}, {re_max, im_max}, {re_min, im_max}};
  }
  Rectangle dilated(double factor) const {
    const double dx = 0.5 * width() * factor, dy = 0.5 * height() * factor;
    return Rectangle(re_min - dx, re_max + dx, im_min - dy, im_max + dy);
  }
};

enum class CertStatus {
  Valid,
  BoundaryZeroSuspected,  // min modulus below threshold: perturb and retry
  PoleOnBoundary,         // evaluator reported a pole hit
  RefinementBudget,       // argument steps would not settle below pi/2
};

const char* to_string(CertStatus s);

/// Winding count on a closed contour with its validity evidence: positive
/// boundary modulus margin and settled (< pi/2) argument steps.
struct ZeroCertificate {
  int winding = 0;
  double min_modulus = 0;
  double median_modulus = 0;
  long samples_used = 0;
  int refinement_depth = 0;
  CertStatus status = CertStatus::Valid;

  bool valid() const { return status == CertStatus::Valid; }
};

struct WindingOptions {
  int max_depth = 48;        // per-edge bisection depth cap
  int min_depth = 3;         // forced initial subdivisions (anti-aliasing)
  double boundary_zero_rel = 1e-10;  // min |f| must exceed rel * median |f|
};

/// Zero count (with multiplicity) inside a closed polygon, by continuous
/// argument tracking of f along the adaptively refined boundary.
ZeroCertificate winding_count(const Evaluator& f, const std::vector<Complex>& polygon,
                              const WindingOptions& opt = {});
ZeroCertificate winding_count(const Evaluator& f, const Rectangle& rect,
                              const WindingOptions& opt = {});

/// Damped Newton refinement; throws ConvergenceError after 100 damped steps.
Complex refine_root(const Evaluator& f, const Evaluator& fprime, Complex seed, double tol);

struct RootEntry {
  Complex root;
  int multiplicity = 0;
  ZeroCertificate cert;
  bool unresolved_cluster = false;  // never separated above the depth cap
};

struct LocateOptions {
  int max_depth = 40;
  WindingOptions winding;
  int dilate_retries = 5;      // 1% perturbations on a suspicious boundary
  double dilate_step = 0.01;
};

/// All zeros of f inside rect: adaptive quadrisection driven by winding
/// counts, Newton polish on isolated zeros, clusters reported honestly.
std::vector<RootEntry> locate_all_roots(const Evaluator& f, const Evaluator& fprime,
                                        const Rectangle& rect, double tol,
                                        const LocateOptions& opt = {});

/// Adaptively sampled image of a polyline under f.
struct ContourImage {
  std::vector<double> t;        // parameter in [0, #segments]
  std::vector<Complex> points;  // f(gamma(t))
  bool closed = false;
  bool budget_exhausted = false;
};

struct ImageOptions {
  double chord_tol = 0.05;  // midpoint deviation, relative to the chord
  int max_depth = 16;
  std::size_t max_points = 200000;
};

ContourImage image_curve(const Evaluator& f, const std::vector<Complex>& polyline, bool closed,
                         const ImageOptions& opt = {});

/// Segment-intersection test on the image polyline (adjacent segments share
/// an endpoint and do not count).
bool is_simple(const ContourImage& img);

/// Winding number of a closed polyline around w (point-in-polygon for simple
/// curves); throws DomainError if w lies on the polyline within tolerance.
int polyline_winding_around(const std::vector<Complex>& pts, Complex w, bool closed = true);

}  // namespace specres
