#include "specres/lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace specres {

double delta_n(Index n, double kappa) {
  return double(n + 1) / (kappa * (std::log(double(n + 1)) + 1.0));
}

const char* to_string(Regime r) { return r == Regime::DeepWindow ? "deep-window" : "shallow-window"; }
const char* to_string(EdgeSide s) { return s == EdgeSide::Left ? "left" : "right"; }

std::vector<Complex> RegionFamily::gap_region_polygon() const {
  // positively oriented around inner_box u lower_box, notches excluded
  const double strip = strip_depth;
  return {
      {lam_lo, -strip},          // F
      {lam_hi, -strip},          // G
      {lam_hi, -delta},          // H
      {lam_hi - delta, -delta},  // C
      {lam_hi - delta, 0.0},     // B
      {lam_lo + delta, 0.0},     // A
      {lam_lo + delta, -delta},  // D
      {lam_lo, -delta},          // E
  };
}

RegionFamily build_regions(const RescaledFrame& fr, const BandLocalEnumeration& en, Index n,
                           const LabParams& params) {
  if (n < 0 || n + 1 >= en.count())
    throw DomainError("build_regions: gap index outside the enumeration");
  RegionFamily rf;
  rf.n = n;
  rf.lam_lo = fr.lambda_tilde[en.global_index[std::size_t(n)]];
  rf.lam_hi = fr.lambda_tilde[en.global_index[std::size_t(n + 1)]];
  rf.delta = delta_n(n, params.kappa);
  rf.x0 = rf.lam_hi - rf.lam_lo;
  const double L = double(fr.L);
  rf.strip_depth = rf.x0 * rf.x0 / (params.eps * L);
  rf.d_depth = std::pow(params.eps, 5) * L * L;
  rf.regime = rf.delta < rf.strip_depth ? Regime::DeepWindow : Regime::ShallowWindow;

  rf.D = Rectangle(rf.lam_lo, rf.lam_hi, -rf.d_depth, 0.0);
  rf.corner_left = Rectangle(rf.lam_lo, rf.lam_lo + rf.delta, -rf.delta, 0.0);
  rf.corner_right = Rectangle(rf.lam_hi - rf.delta, rf.lam_hi, -rf.delta, 0.0);
  if (rf.x0 > 2.0 * rf.delta) {
    rf.inner_box = Rectangle(rf.lam_lo + rf.delta, rf.lam_hi - rf.delta, -rf.delta, 0.0);
    rf.gap_window =
        Rectangle(rf.lam_lo + rf.delta, rf.lam_hi - rf.delta, -rf.strip_depth, 0.0);
  }
  if (rf.regime == Regime::DeepWindow)
    rf.lower_box = Rectangle(rf.lam_lo, rf.lam_hi, -rf.strip_depth, -rf.delta);
  if (rf.strip_depth < rf.d_depth)
    rf.deep_strip = Rectangle(rf.lam_lo, rf.lam_hi, -rf.d_depth, -rf.strip_depth);
  return rf;
}

std::optional<EdgeRegions> build_edge_regions(const RescaledFrame& fr,
                                              const BandLocalEnumeration& en,
                                              const LabParams& params) {
  if (en.count() < 1) throw DomainError("build_edge_regions: empty enumeration");
  const double lam0 = fr.lambda_tilde[en.global_index[0]];
  if (lam0 <= 0.0) return std::nullopt;  // the edge is itself an eigenvalue
  EdgeRegions er;
  er.delta1 = params.delta1 > 0 ? params.delta1 : lam0 / 2.0;
  if (er.delta1 >= lam0) er.delta1 = lam0 / 2.0;
  const double L = double(fr.L);
  const double r_depth = std::pow(params.eps, 4) * L * L;
  const double shallow = 1.0 / (params.eps * L);
  er.R = Rectangle(0.0, lam0, -r_depth, 0.0);
  er.edge_window_rect = Rectangle(0.0, lam0 - er.delta1, -shallow, 0.0);
  const double sq_lo = std::max(0.0, lam0 - er.delta1);  // clipped at the frame origin
  if (sq_lo < lam0) er.corner_square = Rectangle(sq_lo, lam0, -er.delta1, 0.0);
  if (shallow < r_depth) er.deep_strip = Rectangle(0.0, lam0, -r_depth, -shallow);
  return er;
}

FreeRegionCertificate certify_free_region(const Rectangle& region, FreeRegionKind kind,
                                          const std::string& id, const RescaledFrame& fr,
                                          const LabParams& params, int grid_density) {
  FreeRegionCertificate cert;
  cert.region_id = id;
  cert.region = region;
  const int n = std::max(grid_density > 0 ? grid_density : params.grid_density, 64);
  cert.grid_nx = n;
  cert.grid_ny = n;
  cert.min_residual = std::numeric_limits<double>::infinity();
  cert.min_abs_f = std::numeric_limits<double>::infinity();
  cert.min_abs_im_f = std::numeric_limits<double>::infinity();
  long valid = 0;
  const double L = double(fr.L);
  for (int iy = 0; iy < n; ++iy) {
    const double y = region.im_min + region.height() * double(iy) / double(n - 1);
    for (int ix = 0; ix < n; ++ix) {
      const double x = region.re_min + region.width() * double(ix) / double(n - 1);
      const Complex z(x, y);
      try {
        const Complex f = f_L(z, fr);
        const Complex forcing = std::exp(Complex(0, -1) * theta(fr.E_of_z(z))) / L;
        cert.min_residual = std::min(cert.min_residual, std::abs(f + forcing));
        cert.min_abs_f = std::min(cert.min_abs_f, std::abs(f));
        cert.min_abs_im_f = std::min(cert.min_abs_im_f, std::abs(f.imag()));
        ++valid;
      } catch (const PoleError&) {
        ++cert.skipped_pole_points;
      }
    }
  }
  switch (kind) {
    case FreeRegionKind::CornerSquare:
    case FreeRegionKind::EdgeSquare:
      cert.bound_ratio = cert.min_abs_f * std::max(region.width(), region.height());
      break;
    case FreeRegionKind::DeepStrip:
    case FreeRegionKind::EdgeStrip:
      cert.bound_ratio = cert.min_abs_im_f * params.eps * L;
      break;
  }
  cert.pass = valid > 0 && cert.min_residual > 0.0;
  return cert;
}

EdgeComputation prepare_edge(const PeriodicPotential& V, Index L, EdgeSelect edge,
                             const LabParams& params, const WorkerPool* pool) {
  const BandStructure bs = band_structure(V);
  if (edge.band_index < 0 || edge.band_index >= int(bs.bands.size()))
    throw DomainError("prepare_edge: band index out of range");
  const auto& band = bs.bands[std::size_t(edge.band_index)];
  EdgeComputation ec;
  ec.E0_orig = edge.side == EdgeSide::Left ? band.lo : band.hi;
  if (!(ec.E0_orig > -2.0 && ec.E0_orig < 2.0))
    throw DomainError("prepare_edge: edge outside (-2, 2); the continuation breaks down at +-2");

  ec.reflected = edge.side == EdgeSide::Right;
  ec.V_eff = ec.reflected ? V.negated() : V;
  ec.E0_eff = ec.reflected ? -ec.E0_orig : ec.E0_orig;
  ec.bands_eff = ec.reflected ? band_structure(ec.V_eff) : bs;
  ec.band_index_eff = ec.bands_eff.band_of(ec.E0_eff + 1e-9, 1e-8);
  if (ec.band_index_eff < 0 ||
      std::abs(ec.bands_eff.bands[std::size_t(ec.band_index_eff)].lo - ec.E0_eff) > 1e-8)
    throw DomainError("prepare_edge: reflected edge does not match a left band edge");

  ec.sd = eigen_decompose(assemble(ec.V_eff, L), pool);
  ec.en = enumerate_in_band(ec.sd, ec.bands_eff.bands[std::size_t(ec.band_index_eff)],
                            ec.band_index_eff);
  if (ec.en.count() < 2) throw DomainError("prepare_edge: fewer than two eigenvalues in band");
  ec.frame = rescale(ec.sd, ec.E0_eff, L);
  ec.cls = classify_band_edge(ec.E0_eff, L % ec.V_eff.period(), ec.V_eff);
  ec.n_max = std::min<Index>(Index(params.eps * double(L) / params.C1), ec.en.count() - 2);
  return ec;
}

Complex map_back_z(const EdgeComputation& ec, Complex z_eff) {
  return ec.reflected ? -std::conj(z_eff) : z_eff;
}

Complex map_back_E(const EdgeComputation& ec, Complex z_eff) {
  const double L2 = double(ec.frame.L) * double(ec.frame.L);
  return ec.E0_orig + map_back_z(ec, z_eff) / L2;
}

namespace {

Evaluator residual_eval(const RescaledFrame& fr) {
  return [&fr](Complex z) { return rescaled_residual(z, fr); };
}

Evaluator residual_prime_eval(const RescaledFrame& fr) {
  return [&fr](Complex z) { return rescaled_residual_prime(z, fr); };
}

// Shrinks vertical edges that would graze a pole of f_L.
Rectangle pole_safe(Rectangle r, const RescaledFrame& fr, double margin) {
  for (Index k = 0; k < fr.lambda_tilde.size(); ++k) {
    const double p = fr.lambda_tilde[k];
    if (r.im_max < 0.0) break;  // poles are real; only rectangles touching the axis care
    if (std::abs(p - r.re_min) < margin) r.re_min = p + margin;
    if (std::abs(p - r.re_max) < margin) r.re_max = p - margin;
  }
  return Rectangle(r.re_min, r.re_max, r.im_min, r.im_max);  // revalidate
}

std::string label_of(const RegionFamily& rf, Complex z) {
  if (rf.corner_left.contains(z) || rf.corner_right.contains(z)) return "corner_square";
  if (rf.regime == Regime::DeepWindow) {
    if (rf.inner_box && rf.inner_box->contains(z)) return "inner_box";
    if (rf.lower_box && rf.lower_box->contains(z)) return "lower_box";
  } else if (rf.gap_window && rf.gap_window->contains(z)) {
    return "gap_window";
  }
  if (rf.deep_strip && rf.deep_strip->contains(z)) return "deep_strip";
  return "other";
}

}  // namespace

FindReport find_resonances_near_edge(const EdgeComputation& ec, const LabParams& params,
                                     const WorkerPool* pool) {
  FindReport rep;
  rep.prep = ec;
  const RescaledFrame& fr = rep.prep.frame;
  const double L = double(fr.L);
  const double margin = params.pole_margin_rel *
                        std::max(1.0, std::abs(fr.lambda_tilde[ec.en.global_index.back()]));

  struct GapTask {
    RegionFamily rf;
    std::vector<RootEntry> roots;
    std::vector<FreeRegionCertificate> certs;
  };
  std::vector<GapTask> tasks(std::size_t(ec.n_max + 1));

  WorkerPool serial(1);
  const WorkerPool& wp = pool ? *pool : serial;
  wp.for_each_index(tasks.size(), [&](std::size_t i) {
    GapTask& t = tasks[i];
    t.rf = build_regions(fr, ec.en, Index(i), params);
    // sweep D^i_n together with the part of Omega~^i_n / Omega^i_n that pokes
    // below it (at moderate L the x0^2/(eps L) line sits under eps^5 L^2)
    const double depth = std::max(t.rf.d_depth, t.rf.strip_depth);
    const Rectangle search =
        pole_safe(Rectangle(t.rf.lam_lo, t.rf.lam_hi, -depth, 0.0), fr, margin);
    t.roots = locate_all_roots(residual_eval(fr), residual_prime_eval(fr), search,
                               params.tol_root);
    t.certs.push_back(certify_free_region(t.rf.corner_left, FreeRegionKind::CornerSquare,
                                          "corner_left_n" + std::to_string(i), fr, params));
    t.certs.push_back(certify_free_region(t.rf.corner_right, FreeRegionKind::CornerSquare,
                                          "corner_right_n" + std::to_string(i), fr, params));
    if (t.rf.deep_strip)
      t.certs.push_back(certify_free_region(*t.rf.deep_strip, FreeRegionKind::DeepStrip,
                                            "deep_strip_n" + std::to_string(i), fr, params));
  });

  // R^i to the left of the first pole
  std::vector<RootEntry> r_roots;
  const auto er = build_edge_regions(fr, ec.en, params);
  if (er) {
    const Rectangle search = pole_safe(er->R, fr, margin);
    r_roots = locate_all_roots(residual_eval(fr), residual_prime_eval(fr), search,
                               params.tol_root);
    if (er->corner_square)
      rep.certificates.push_back(certify_free_region(
          *er->corner_square, FreeRegionKind::EdgeSquare, "r_square", fr, params));
    if (er->deep_strip)
      rep.certificates.push_back(certify_free_region(*er->deep_strip, FreeRegionKind::EdgeStrip,
                                                     "r_strip", fr, params));
  }

  auto add_record = [&](Index gap, const RootEntry& e, const std::string& label) {
    ResonanceRecord rec;
    rec.gap_index = gap;
    rec.z = e.root;
    rec.E = map_back_E(ec, e.root);
    rec.multiplicity = e.multiplicity;
    rec.cert = e.cert;
    rec.unresolved = e.unresolved_cluster;
    rec.region_label = label;
    if (!e.unresolved_cluster) {
      try {
        rec.residual_abs = L * std::abs(rescaled_residual(e.root, fr));
      } catch (const PoleError&) {
        rec.residual_abs = std::numeric_limits<double>::infinity();
      }
      if (rec.residual_abs > params.tol_residual) rep.residuals_ok = false;
      if (!(rec.E.imag() < 0.0)) rep.lower_half_ok = false;
    }
    rep.records.push_back(rec);
  };

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (const auto& e : tasks[i].roots)
      add_record(Index(i), e, label_of(tasks[i].rf, e.root));
    for (auto& c : tasks[i].certs) rep.certificates.push_back(c);
  }
  for (const auto& e : r_roots) {
    std::string label = "r_rect";
    if (er && er->corner_square && er->corner_square->contains(e.root)) label = "corner_square";
    if (er && er->edge_window_rect.contains(e.root)) label = "edge_window_rect";
    add_record(-1, e, label);
  }

  for (auto& cert : rep.certificates)
    for (const auto& rec : rep.records)
      if (!rec.unresolved && cert.region.contains(rec.z)) {
        cert.contradicted_by_root = true;
        rep.consistency_ok = false;
      }
  return rep;
}

FindReport find_resonances_near_edge(const PeriodicPotential& V, Index L, EdgeSelect edge,
                                     const LabParams& params, const WorkerPool* pool) {
  return find_resonances_near_edge(prepare_edge(V, L, edge, params, pool), params, pool);
}

DichotomyReport verify_gap_dichotomy(const EdgeComputation& ec, Index n, const LabParams& params) {
  const RescaledFrame& fr = ec.frame;
  const RegionFamily rf = build_regions(fr, ec.en, n, params);
  if (!rf.inner_box || rf.regime != Regime::DeepWindow)
    throw DomainError("verify_gap_dichotomy: gap is not in the deep-window regime");
  DichotomyReport rep;
  rep.n = n;
  rep.delta = rf.delta;

  const Evaluator f = [&fr](Complex z) { return f_L(z, fr); };
  rep.image = image_curve(f, rf.inner_box->corners(), true);
  const ContourImage& img = rep.image;
  rep.image_budget_exhausted = img.budget_exhausted;
  rep.image_points = img.points.size();
  rep.image_simple = !img.budget_exhausted && is_simple(img);

  const double L = double(fr.L);
  const Complex forcing = -std::exp(Complex(0, -1) * theta(Complex(fr.E0, 0))) / L;
  rep.forcing_point = forcing;
  try {
    rep.member_inner = polyline_winding_around(img.points, forcing) != 0;
    rep.member_defined = true;
  } catch (const DomainError&) {
    rep.member_defined = false;
  }

  rep.inner_cert = winding_count(residual_eval(fr), *rf.inner_box);
  rep.inner_winding = rep.inner_cert.valid() ? rep.inner_cert.winding : -1;
  if (rf.lower_box) {
    rep.lower_cert = winding_count(residual_eval(fr), *rf.lower_box);
    rep.lower_winding = rep.lower_cert.valid() ? rep.lower_cert.winding : -1;
  }
  rep.region_cert = winding_count(residual_eval(fr), rf.gap_region_polygon());
  rep.region_winding = rep.region_cert.valid() ? rep.region_cert.winding : -1;

  if (rep.member_defined && rep.member_inner && rep.inner_winding == 1) {
    const auto roots = locate_all_roots(residual_eval(fr), residual_prime_eval(fr), *rf.inner_box,
                                        params.tol_root);
    if (roots.size() == 1 && !roots[0].unresolved_cluster) {
      rep.root = roots[0].root;
      rep.width = std::abs(roots[0].root.imag());
      rep.width_le_delta = rep.width <= rf.delta;
    }
  }

  rep.consistent = rep.member_defined &&
                   ((rep.member_inner && rep.inner_winding == 1) ||
                    (!rep.member_inner && rep.inner_winding == 0 && rep.lower_winding >= 1));
  const bool member_obligations =
      !rep.member_defined || !rep.member_inner ||
      (rep.inner_winding == 1 && rep.root.has_value() && rep.width_le_delta);
  rep.pass = rep.region_cert.valid() && rep.region_winding >= 1 && member_obligations;
  return rep;
}

EdgeVerifyReport verify_edge(const PeriodicPotential& V, Index L, EdgeSelect edge,
                             const LabParams& params, const WorkerPool* pool) {
  EdgeVerifyReport rep;
  rep.edge = edge;
  rep.L = L;
  EdgeComputation ec = prepare_edge(V, L, edge, params, pool);
  rep.E0 = ec.E0_orig;
  rep.cls = ec.cls;
  rep.hypothesis_nongeneric = ec.cls.kind == EdgeCase::NonGeneric;
  rep.reflected = ec.reflected;

  const RescaledFrame& fr = ec.frame;
  const double margin =
      params.pole_margin_rel *
      std::max(1.0, std::abs(fr.lambda_tilde[ec.en.global_index.back()]));

  // edge window Omega^i (and all of R^i) must carry no resonances
  const auto er = build_edge_regions(fr, ec.en, params);
  if (!er) {
    rep.edge_check.r_empty = true;
    rep.edge_check.pass = true;
  } else {
    rep.edge_check.region_cert = winding_count(residual_eval(fr), er->edge_window_rect);
    rep.edge_check.region_winding =
        rep.edge_check.region_cert.valid() ? rep.edge_check.region_cert.winding : -1;
    rep.edge_check.r_cert = winding_count(residual_eval(fr), pole_safe(er->R, fr, margin));
    rep.edge_check.r_winding = rep.edge_check.r_cert.valid() ? rep.edge_check.r_cert.winding : -1;
    rep.edge_check.pass = rep.edge_check.region_cert.valid() && rep.edge_check.region_winding == 0;
  }

  // one and only one resonance per gap window Omega~^i_n, n < eta L / ln L
  const double n_small = params.eta_of() * double(L) / std::log(double(L));
  rep.gap_windows_all_pass = true;
  for (Index n = 0; n <= ec.n_max && double(n) < n_small; ++n) {
    GapWindowEntry e;
    e.n = n;
    const RegionFamily rf = build_regions(fr, ec.en, n, params);
    if (!rf.gap_window) continue;
    e.cert = winding_count(residual_eval(fr), *rf.gap_window);
    e.winding = e.cert.valid() ? e.cert.winding : -1;
    e.pass = e.cert.valid() && e.winding == 1;
    if (e.pass) {
      const auto roots = locate_all_roots(residual_eval(fr), residual_prime_eval(fr),
                                          *rf.gap_window, params.tol_root);
      if (roots.size() == 1 && !roots[0].unresolved_cluster) {
        e.z = roots[0].root;
        e.width = std::abs(e.z.imag());
        e.C_n = e.width * params.eps * double(L) / sqr(double(n + 1));
      } else {
        e.pass = false;
      }
    }
    rep.gap_windows_all_pass = rep.gap_windows_all_pass && e.pass;
    rep.gap_windows.push_back(e);
  }

  // existence / inner-box dichotomy on every deep-window gap up to n_max
  rep.dichotomies_all_pass = true;
  for (Index n = 0; n <= ec.n_max; ++n) {
    const RegionFamily rf = build_regions(fr, ec.en, n, params);
    if (rf.regime != Regime::DeepWindow || !rf.inner_box) continue;
    DichotomyReport a = verify_gap_dichotomy(ec, n, params);
    rep.dichotomies_all_pass = rep.dichotomies_all_pass && a.pass;
    rep.dichotomies.push_back(std::move(a));
  }

  rep.find = find_resonances_near_edge(ec, params, pool);

  bool certs = true;
  for (const auto& c : rep.find.certificates) certs = certs && c.pass;
  if (!rep.edge_check.r_empty)
    certs = certs && rep.edge_check.region_cert.valid() && rep.edge_check.r_cert.valid();
  for (const auto& e : rep.gap_windows) certs = certs && e.cert.valid();
  for (const auto& a : rep.dichotomies)
    certs = certs && a.region_cert.valid() && a.inner_cert.valid();
  rep.certificates_all_valid = certs;
  return rep;
}

ScalingReport scaling_study(const PeriodicPotential& V, EdgeSelect edge,
                            const std::vector<Index>& L_grid, const LabParams& params,
                            const WorkerPool* pool) {
  ScalingReport rep;
  std::vector<double> xs, ys;
  double spearman_min = 1.0;
  for (const Index L : L_grid) {
    EdgeComputation ec = prepare_edge(V, L, edge, params, pool);
    const RescaledFrame& fr = ec.frame;
    const double n_small = params.eta_of() * double(L) / std::log(double(L));
    std::vector<double> widths_this_L;
    for (Index n = 0; n <= ec.n_max; ++n) {
      const RegionFamily rf = build_regions(fr, ec.en, n, params);
      if (!rf.gap_window) continue;
      const auto cert = winding_count(residual_eval(fr), *rf.gap_window);
      if (!cert.valid() || cert.winding != 1) continue;
      const auto roots = locate_all_roots(residual_eval(fr), residual_prime_eval(fr),
                                          *rf.gap_window, params.tol_root);
      if (roots.size() != 1 || roots[0].unresolved_cluster) continue;
      ScalingReport::Point pt;
      pt.L = L;
      pt.n = n;
      pt.width = std::abs(roots[0].root.imag());
      pt.in_gap_window_regime = double(n) < n_small;
      rep.points.push_back(pt);
      widths_this_L.push_back(pt.width);
      rep.C_max = std::max(rep.C_max, pt.width * params.eps * double(L) / sqr(double(n + 1)));
      if (n >= 1) {
        // (n+1)^2 convention of the eigenvalue law; n^2 only asymptotically
        xs.push_back(std::log(sqr(double(n + 1)) / (params.eps * double(L))));
        ys.push_back(std::log(pt.width));
      }
    }
    // Spearman of width against n (identical ranks by construction of n)
    if (widths_this_L.size() >= 3) {
      std::vector<double> rank(widths_this_L.size());
      std::iota(rank.begin(), rank.end(), 0.0);
      std::vector<std::size_t> order(widths_this_L.size());
      std::iota(order.begin(), order.end(), std::size_t(0));
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return widths_this_L[a] < widths_this_L[b]; });
      std::vector<double> rw(widths_this_L.size());
      for (std::size_t r = 0; r < order.size(); ++r) rw[order[r]] = double(r);
      const double m = double(rw.size());
      double d2 = 0;
      for (std::size_t i = 0; i < rw.size(); ++i) d2 += sqr(rw[i] - double(i));
      spearman_min = std::min(spearman_min, 1.0 - 6.0 * d2 / (m * (m * m - 1.0)));
    }
  }
  if (rep.points.size() < 5)
    throw DomainError("scaling_study: fewer than 5 resonances located across the grid");
  rep.spearman = spearman_min;

  // least squares of log width against log(n^2/(eps L))
  const double m = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double cxy = sxy - sx * sy / m;
  rep.slope = cxy / vx;
  rep.intercept = (sy - rep.slope * sx) / m;
  rep.r2 = vy == 0 ? 1.0 : cxy * cxy / (vx * vy);
  rep.pass = rep.slope >= 0.8 && rep.slope <= 1.2 && rep.r2 >= 0.9;
  return rep;
}

ClassificationReport classify_and_crosscheck(const PeriodicPotential& V, double E0,
                                             EdgeSide side, const std::vector<Index>& L_grid,
                                             const LabParams& params, const WorkerPool* pool) {
  ClassificationReport rep;
  rep.E0 = E0;
  const Index p = V.period();
  const double eps1 = params.eps * params.eps;

  for (Index j = 0; j < p; ++j) {
    ClassificationReport::PerResidue row;
    row.j = j;
    row.cls = classify_band_edge(E0, j, V);

    std::vector<double> inv_ratios, edge_ratios;
    for (const Index L : L_grid) {
      if (L % p != j) continue;
      const SpectralData sd = eigen_decompose(assemble(V, L), pool);
      const Index kcap = Index(params.eps * double(L - j));
      Index taken = 0;
      for (Index k = 0; k < sd.lambdas.size() && taken < kcap; ++k) {
        const double d = side == EdgeSide::Left ? sd.lambdas[k] - E0 : E0 - sd.lambdas[k];
        if (d <= 1e-12 || d > eps1) continue;
        inv_ratios.push_back(sd.weights[k] * double(L - j));
        edge_ratios.push_back(sd.weights[k] * double(L - j) / d);
        ++taken;
      }
    }
    row.samples = Index(inv_ratios.size());
    if (row.samples >= 4) {
      auto cv = [](const std::vector<double>& v) {
        double mean = 0;
        for (double x : v) mean += x;
        mean /= double(v.size());
        double var = 0;
        for (double x : v) var += sqr(x - mean);
        var /= double(v.size());
        return mean != 0 ? std::sqrt(var) / std::abs(mean) : 0.0;
      };
      row.cv_inverse_law = cv(inv_ratios);
      row.cv_edge_law = cv(edge_ratios);
      row.empirical = row.cv_edge_law < row.cv_inverse_law ? "edge-law" : "inverse-law";
      if (row.cls.kind == EdgeCase::Generic)
        row.agree = row.empirical == "edge-law";
      else if (row.cls.kind == EdgeCase::NonGeneric)
        row.agree = row.empirical == "inverse-law";
      else
        row.agree = true;  // indeterminate analytic class is reported, not judged
      if ((row.cls.kind == EdgeCase::Generic || row.cls.kind == EdgeCase::NonGeneric) &&
          !row.agree)
        rep.all_decided_agree = false;
    } else {
      row.empirical = "insufficient-data";
      row.agree = true;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<NonGenericHit> scan_nongeneric(int trials, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  std::vector<NonGenericHit> hits;
  for (int t = 0; t < trials; ++t) {
    const Index p = 2 + Index(t % 2);
    VectorXd v(p);
    for (Index i = 0; i < p; ++i) v[i] = u(rng);
    PeriodicPotential V(v);
    BandStructure bs;
    try {
      bs = band_structure(V);
    } catch (const ConvergenceError&) {
      continue;
    }
    for (double e : bs.edges) {
      if (!(e > -2.0 && e < 2.0)) continue;
      for (Index j = 0; j < p; ++j) {
        const EdgeClassification cls = classify_band_edge(e, j, V);
        if (cls.kind == EdgeCase::NonGeneric || cls.kind == EdgeCase::Indeterminate) {
          NonGenericHit h;
          h.values = v;
          h.edge = e;
          h.j = j;
          h.abs_d = std::abs(cls.d_j1);
          hits.push_back(h);
        }
      }
    }
  }
  return hits;
}

}  // namespace specres
