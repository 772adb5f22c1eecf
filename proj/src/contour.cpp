#include "specres/contour.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace specres {

const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::Valid: return "valid";
    case CertStatus::BoundaryZeroSuspected: return "boundary-zero-suspected";
    case CertStatus::PoleOnBoundary: return "pole-on-boundary";
    default: return "refinement-budget";
  }
}

namespace {

struct ArgTracker {
  double total = 0;
  double min_modulus = std::numeric_limits<double>::infinity();
  std::vector<double> moduli;
  long samples = 0;
  int depth_seen = 0;
};

// Refine one boundary segment until consecutive image arguments step by less
// than pi/2; accumulate the continuous argument.
bool track_segment(const Evaluator& f, Complex za, Complex zb, Complex wa, Complex wb,
                   int depth, const WindingOptions& opt, ArgTracker& tr) {
  const double da = std::arg(wb / wa);
  if (depth >= opt.min_depth && std::abs(da) < M_PI / 2) {
    tr.total += da;
    tr.min_modulus = std::min({tr.min_modulus, std::abs(wa), std::abs(wb)});
    tr.moduli.push_back(std::abs(wb));
    tr.depth_seen = std::max(tr.depth_seen, depth);
    return true;
  }
  if (depth > opt.max_depth) return false;
  const Complex zm = 0.5 * (za + zb);
  const Complex wm = f(zm);
  ++tr.samples;
  return track_segment(f, za, zm, wa, wm, depth + 1, opt, tr) &&
         track_segment(f, zm, zb, wm, wb, depth + 1, opt, tr);
}

double median_of(std::vector<double>& v) {
  if (v.empty()) return 0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + long(mid), v.end());
  return v[mid];
}

}  // namespace

ZeroCertificate winding_count(const Evaluator& f, const std::vector<Complex>& polygon,
                              const WindingOptions& opt) {
  ZeroCertificate cert;
  if (polygon.size() < 3) throw DomainError("winding_count: need a closed polygon");
  ArgTracker tr;
  const std::size_t m = polygon.size();
  std::vector<Complex> w(m);
  try {
    for (std::size_t i = 0; i < m; ++i) w[i] = f(polygon[i]);
    tr.samples += long(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (!track_segment(f, polygon[i], polygon[(i + 1) % m], w[i], w[(i + 1) % m], 0, opt,
                         tr)) {
        cert.status = CertStatus::RefinementBudget;
        cert.samples_used = tr.samples;
        return cert;
      }
    }
  } catch (const PoleError&) {
    cert.status = CertStatus::PoleOnBoundary;
    cert.samples_used = tr.samples;
    return cert;
  }
  cert.samples_used = tr.samples;
  cert.refinement_depth = tr.depth_seen;
  cert.min_modulus = tr.min_modulus;
  cert.median_modulus = median_of(tr.moduli);
  const double turns = tr.total / (2 * M_PI);
  cert.winding = int(std::lround(turns));
  if (std::abs(turns - double(cert.winding)) > 0.25) {
    cert.status = CertStatus::RefinementBudget;
    return cert;
  }
  if (cert.min_modulus <= opt.boundary_zero_rel * cert.median_modulus)
    cert.status = CertStatus::BoundaryZeroSuspected;
  return cert;
}

ZeroCertificate winding_count(const Evaluator& f, const Rectangle& rect,
                              const WindingOptions& opt) {
  return winding_count(f, rect.corners(), opt);
}

Complex refine_root(const Evaluator& f, const Evaluator& fprime, Complex seed, double tol) {
  Complex z = seed;
  Complex fz = f(z);
  for (int it = 0; it < 100; ++it) {
    const Complex d = fprime(z);
    if (d == Complex(0, 0)) throw ConvergenceError("refine_root: vanishing derivative");
    const Complex step = fz / d;
    double damp = 1.0;
    bool moved = false;
    Complex zn = z, fn = fz;
    for (int half = 0; half < 40; ++half) {
      const Complex zc = z - damp * step;
      Complex fc;
      try {
        fc = f(zc);
      } catch (const PoleError&) {
        damp *= 0.5;
        continue;
      }
      if (std::abs(fc) <= std::abs(fz) || damp < 1e-9) {
        zn = zc;
        fn = fc;
        moved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!moved) throw ConvergenceError("refine_root: step damping exhausted");
    z = zn;
    fz = fn;
    if (std::abs(damp * step) <= tol * std::max(1.0, std::abs(z))) {
      const double local_scale = std::max(1.0, std::abs(d) * std::max(1.0, std::abs(z)));
      if (std::abs(fz) <= tol * local_scale) return z;
    }
  }
  throw ConvergenceError("refine_root: no convergence after 100 damped steps");
}

namespace {

ZeroCertificate winding_robust(const Evaluator& f, const Rectangle& rect,
                               const LocateOptions& opt, Rectangle& used) {
  Rectangle r = rect;
  ZeroCertificate cert = winding_count(f, r, opt.winding);
  for (int attempt = 0; attempt < opt.dilate_retries && !cert.valid(); ++attempt) {
    r = r.dilated(opt.dilate_step);
    cert = winding_count(f, r, opt.winding);
  }
  used = r;
  return cert;
}

void locate_recurse(const Evaluator& f, const Evaluator& fprime, const Rectangle& rect,
                    double tol, const LocateOptions& opt, int depth,
                    std::vector<RootEntry>& out) {
  Rectangle used = rect;
  ZeroCertificate cert = winding_robust(f, rect, opt, used);
  if (!cert.valid()) {
    RootEntry e;
    e.root = rect.center();
    e.multiplicity = 0;
    e.cert = cert;
    e.unresolved_cluster = true;
    out.push_back(e);
    return;
  }
  if (cert.winding == 0) return;

  if (cert.winding == 1) {
    try {
      const Complex root = refine_root(f, fprime, used.center(), tol);
      if (used.contains(root, 1e-9 * used.diameter())) {
        out.push_back(RootEntry{root, 1, cert, false});
        return;
      }
    } catch (const ConvergenceError&) {
      // fall through to subdivision
    } catch (const PoleError&) {
      // Newton wandered onto a pole; subdivision will dodge it
    }
  }

  // cluster exits below: polish the centroid first, so an m-fold zero is
  // reported at the zero itself rather than at a box center
  auto push_cluster = [&](const Rectangle& box, const ZeroCertificate& c, bool jammed) {
    RootEntry e;
    e.root = box.center();
    e.multiplicity = c.winding;
    e.cert = c;
    e.unresolved_cluster = jammed || c.winding > 1;
    try {
      const Complex polished = refine_root(f, fprime, box.center(), tol);
      if (std::abs(polished - e.root) < 4 * box.diameter()) {
        e.root = polished;
        if (c.winding == 1) e.unresolved_cluster = false;
      }
    } catch (const ConvergenceError&) {
    } catch (const PoleError&) {
    }
    out.push_back(e);
  };

  if (depth >= opt.max_depth || used.diameter() < std::max(tol, 1e-13)) {
    push_cluster(used, cert, false);
    return;
  }

  // quadrisect; jitter the split point if a child boundary lands on a zero
  static const double fractions[3] = {0.5, 0.46337, 0.54289};
  for (double fr : fractions) {
    const double xs = used.re_min + fr * used.width();
    const double ys = used.im_min + fr * used.height();
    const Rectangle quads[4] = {
        Rectangle(used.re_min, xs, used.im_min, ys),
        Rectangle(xs, used.re_max, used.im_min, ys),
        Rectangle(used.re_min, xs, ys, used.im_max),
        Rectangle(xs, used.re_max, ys, used.im_max)};
    int total = 0;
    bool conclusive = true;
    ZeroCertificate qc[4];
    for (int q = 0; q < 4 && conclusive; ++q) {
      qc[q] = winding_count(f, quads[q], opt.winding);
      if (!qc[q].valid())
        conclusive = false;
      else
        total += qc[q].winding;
    }
    if (!conclusive || total != cert.winding) continue;  // try the next split
    std::vector<RootEntry> found;
    for (int q = 0; q < 4; ++q) {
      if (qc[q].winding == 0) continue;
      locate_recurse(f, fprime, quads[q], tol, opt, depth + 1, found);
    }
    out.insert(out.end(), found.begin(), found.end());
    return;
  }

  // no split separated cleanly: report the box as one cluster
  push_cluster(used, cert, true);
}

}  // namespace

std::vector<RootEntry> locate_all_roots(const Evaluator& f, const Evaluator& fprime,
                                        const Rectangle& rect, double tol,
                                        const LocateOptions& opt) {
  std::vector<RootEntry> out;
  locate_recurse(f, fprime, rect, tol, opt, 0, out);
  // merge duplicates that Newton pulled across an internal boundary,
  // keeping the better-refined position
  auto abs_f = [&](Complex z) {
    try {
      return std::abs(f(z));
    } catch (const PoleError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  std::vector<RootEntry> merged;
  for (const auto& e : out) {
    bool dup = false;
    for (auto& m : merged) {
      if (e.multiplicity > 0 && m.multiplicity > 0 &&
          std::abs(e.root - m.root) < 10 * std::max(tol, 1e-13)) {
        if (abs_f(e.root) < abs_f(m.root)) m.root = e.root;
        m.multiplicity += e.multiplicity;
        m.unresolved_cluster = m.unresolved_cluster && e.unresolved_cluster;
        dup = true;
        break;
      }
    }
    if (!dup) merged.push_back(e);
  }
  return merged;
}

ContourImage image_curve(const Evaluator& f, const std::vector<Complex>& polyline, bool closed,
                         const ImageOptions& opt) {
  if (polyline.size() < 2) throw DomainError("image_curve: need at least one segment");
  ContourImage img;
  img.closed = closed;

  struct Seg {
    Complex za, zb;
    Complex wa, wb;
    double ta, tb;
    int depth;
  };

  const std::size_t nseg = polyline.size() - (closed ? 0 : 1);
  std::vector<Seg> stack;
  auto emit = [&](double t, Complex w) {
    img.t.push_back(t);
    img.points.push_back(w);
  };

  for (std::size_t i = 0; i < nseg; ++i) {
    const Complex za = polyline[i];
    const Complex zb = polyline[(i + 1) % polyline.size()];
    Complex wa = f(za), wb = f(zb);
    if (i == 0) emit(0.0, wa);
    stack.clear();
    stack.push_back(Seg{za, zb, wa, wb, double(i), double(i + 1), 0});
    while (!stack.empty()) {
      Seg s = stack.back();
      stack.pop_back();
      if (img.points.size() > opt.max_points) {
        img.budget_exhausted = true;
        return img;
      }
      const Complex zm = 0.5 * (s.za + s.zb);
      const Complex wm = f(zm);
      const Complex chord_mid = 0.5 * (s.wa + s.wb);
      const double chord = std::abs(s.wb - s.wa);
      const bool flat = std::abs(wm - chord_mid) <= opt.chord_tol * std::max(chord, 1e-300);
      if ((flat && s.depth >= 2) || s.depth >= opt.max_depth) {
        emit(0.5 * (s.ta + s.tb), wm);
        emit(s.tb, s.wb);
      } else {
        const double tm = 0.5 * (s.ta + s.tb);
        stack.push_back(Seg{zm, s.zb, wm, s.wb, tm, s.tb, s.depth + 1});
        stack.push_back(Seg{s.za, zm, s.wa, wm, s.ta, tm, s.depth + 1});
      }
    }
  }
  if (closed && img.points.size() > 1) {
    // the final emitted point duplicates f(polyline[0]); the wraparound
    // segment in consumers closes the curve instead
    img.t.pop_back();
    img.points.pop_back();
  }
  return img;
}

namespace {

int orient(Complex a, Complex b, Complex c, double eps) {
  const double v = (b.real() - a.real()) * (c.imag() - a.imag()) -
                   (b.imag() - a.imag()) * (c.real() - a.real());
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

bool on_segment(Complex a, Complex b, Complex c, double eps) {
  return std::min(a.real(), b.real()) - eps <= c.real() &&
         c.real() <= std::max(a.real(), b.real()) + eps &&
         std::min(a.imag(), b.imag()) - eps <= c.imag() &&
         c.imag() <= std::max(a.imag(), b.imag()) + eps;
}

bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2, double eps_area,
                        double eps_len) {
  const int o1 = orient(p1, p2, q1, eps_area);
  const int o2 = orient(p1, p2, q2, eps_area);
  const int o3 = orient(q1, q2, p1, eps_area);
  const int o4 = orient(q1, q2, p2, eps_area);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1, eps_len)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2, eps_len)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1, eps_len)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2, eps_len)) return true;
  return false;
}

}  // namespace

bool is_simple(const ContourImage& img) {
  const auto& p = img.points;
  const std::size_t n = p.size();
  if (n < 3) return true;
  const std::size_t nseg = n - (img.closed ? 0 : 1);

  double scale = 0;
  for (const auto& w : p) scale = std::max(scale, std::abs(w));
  const double eps = 1e-12 * std::max(scale, 1e-30);
  const double eps_area = eps * eps;

  // coarse spatial buckets over segment bounding boxes
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& w : p) {
    xmin = std::min(xmin, w.real());
    xmax = std::max(xmax, w.real());
    ymin = std::min(ymin, w.imag());
    ymax = std::max(ymax, w.imag());
  }
  const int cells = std::max(1, int(std::sqrt(double(nseg) / 4.0)));
  const double cw = std::max((xmax - xmin) / cells, 1e-300);
  const double ch = std::max((ymax - ymin) / cells, 1e-300);
  std::map<std::pair<int, int>, std::vector<std::size_t>> grid;
  auto seg_pts = [&](std::size_t i) {
    return std::pair<Complex, Complex>(p[i], p[(i + 1) % n]);
  };
  for (std::size_t i = 0; i < nseg; ++i) {
    auto [a, b] = seg_pts(i);
    const int cx0 = int((std::min(a.real(), b.real()) - xmin) / cw);
    const int cx1 = int((std::max(a.real(), b.real()) - xmin) / cw);
    const int cy0 = int((std::min(a.imag(), b.imag()) - ymin) / ch);
    const int cy1 = int((std::max(a.imag(), b.imag()) - ymin) / ch);
    for (int cx = cx0; cx <= cx1; ++cx)
      for (int cy = cy0; cy <= cy1; ++cy) grid[{cx, cy}].push_back(i);
  }
  auto adjacent = [&](std::size_t i, std::size_t j) {
    if (i == j) return true;
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    if (hi - lo == 1) return true;
    if (img.closed && lo == 0 && hi == nseg - 1) return true;
    return false;
  };
  for (const auto& [cell, segs] : grid) {
    for (std::size_t ii = 0; ii < segs.size(); ++ii)
      for (std::size_t jj = ii + 1; jj < segs.size(); ++jj) {
        const std::size_t i = segs[ii], j = segs[jj];
        if (adjacent(i, j)) continue;
        auto [a, b] = seg_pts(i);
        auto [c, d] = seg_pts(j);
        if (segments_intersect(a, b, c, d, eps_area, eps)) return false;
      }
  }
  return true;
}

int polyline_winding_around(const std::vector<Complex>& pts, Complex w, bool closed) {
  const std::size_t n = pts.size();
  if (n < 3) throw DomainError("polyline_winding_around: need a polygon");
  double scale = 0;
  for (const auto& q : pts) scale = std::max(scale, std::abs(q - w));
  const double eps = 1e-13 * scale;
  double total = 0;
  const std::size_t nseg = n - (closed ? 0 : 1);
  for (std::size_t i = 0; i < nseg; ++i) {
    const Complex a = pts[i] - w, b = pts[(i + 1) % n] - w;
    // distance from w to the segment, not just to its endpoints
    const Complex d = b - a;
    const double len2 = std::norm(d);
    double dist;
    if (len2 == 0.0) {
      dist = std::abs(a);
    } else {
      const double t = std::clamp(-(a.real() * d.real() + a.imag() * d.imag()) / len2, 0.0, 1.0);
      dist = std::abs(a + t * d);
    }
    if (dist < eps) throw DomainError("polyline_winding_around: point lies on the curve");
    total += std::arg(b / a);
  }
  return int(std::lround(total / (2 * M_PI)));
}

}  // namespace specres
