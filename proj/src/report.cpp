#include "specres/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace specres::report {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const Rectangle& r) {
  return json{{"re_min", r.re_min}, {"re_max", r.re_max}, {"im_min", r.im_min},
              {"im_max", r.im_max}};
}

json to_json(const BandStructure& bs) {
  json bands = json::array();
  for (const auto& b : bs.bands)
    bands.push_back(json{{"lo", b.lo}, {"hi", b.hi}, {"closed_gaps", b.closed_gaps}});
  return json{{"bands", bands}, {"edges", bs.edges}};
}

json to_json(const EdgeClassification& c) {
  return json{{"edge", c.edge},     {"j", c.j},       {"case", to_string(c.kind)},
              {"a0_pm1", c.a0_pm1}, {"d_j1", c.d_j1}, {"rho", c.rho},
              {"a_j1", c.a_j1},     {"b_j1", c.b_j1}};
}

json to_json(const SpacingReport& r) {
  return json{{"pair_ratio_min", r.pair_ratio_min}, {"pair_ratio_max", r.pair_ratio_max},
              {"edge_ratio_min", r.edge_ratio_min}, {"edge_ratio_max", r.edge_ratio_max},
              {"pairs_used", r.pairs_used},         {"points_used", r.points_used},
              {"alpha", r.alpha()}};
}

json to_json(const DecayReport& r) {
  json chains = json::array();
  for (const auto& c : r.chains)
    chains.push_back(json{{"values", c.values},
                          {"diffs", c.diffs},
                          {"log_slope", c.log_slope},
                          {"r2", c.r2},
                          {"converged_below_eps", c.converged_below_eps}});
  return json{{"vacuous", r.vacuous}, {"pass", r.pass}, {"chains", chains}};
}

json to_json(const ZeroCertificate& c) {
  return json{{"winding", c.winding},
              {"min_modulus", c.min_modulus},
              {"median_modulus", c.median_modulus},
              {"samples_used", c.samples_used},
              {"refinement_depth", c.refinement_depth},
              {"status", to_string(c.status)}};
}

json to_json(const FreeRegionCertificate& c) {
  return json{{"region_id", c.region_id},
              {"region", to_json(c.region)},
              {"grid", json::array({c.grid_nx, c.grid_ny})},
              {"min_residual", c.min_residual},
              {"min_abs_f", c.min_abs_f},
              {"min_abs_im_f", c.min_abs_im_f},
              {"bound_ratio", c.bound_ratio},
              {"skipped_pole_points", c.skipped_pole_points},
              {"pass", c.pass},
              {"contradicted_by_root", c.contradicted_by_root}};
}

json to_json(const ResonanceRecord& r) {
  return json{{"gap_index", r.gap_index},
              {"z", complex_json(r.z)},
              {"E", complex_json(r.E)},
              {"residual_abs", r.residual_abs},
              {"region_label", r.region_label},
              {"multiplicity", r.multiplicity},
              {"unresolved", r.unresolved},
              {"certificate", to_json(r.cert)}};
}

json to_json(const FindReport& r) {
  json records = json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  json certs = json::array();
  for (const auto& c : r.certificates) certs.push_back(to_json(c));
  return json{{"E0", r.prep.E0_orig},
              {"L", r.prep.frame.L},
              {"reflected", r.prep.reflected},
              {"classification", to_json(r.prep.cls)},
              {"n_max", r.prep.n_max},
              {"records", records},
              {"free_certificates", certs},
              {"lower_half_ok", r.lower_half_ok},
              {"residuals_ok", r.residuals_ok},
              {"consistency_ok", r.consistency_ok}};
}

json to_json(const DichotomyReport& r) {
  json out{{"n", r.n},
           {"image_simple", r.image_simple},
           {"image_points", r.image_points},
           {"image_budget_exhausted", r.image_budget_exhausted},
           {"member_defined", r.member_defined},
           {"member_inner", r.member_inner},
           {"inner_winding", r.inner_winding},
           {"lower_winding", r.lower_winding},
           {"region_winding", r.region_winding},
           {"inner_cert", to_json(r.inner_cert)},
           {"lower_cert", to_json(r.lower_cert)},
           {"region_cert", to_json(r.region_cert)},
           {"delta_n", r.delta},
           {"width", r.width},
           {"width_le_delta", r.width_le_delta},
           {"consistent", r.consistent},
           {"pass", r.pass}};
  if (r.root) out["root"] = complex_json(*r.root);
  return out;
}

json to_json(const EdgeVerifyReport& r) {
  json windows = json::array();
  for (const auto& e : r.gap_windows)
    windows.push_back(json{{"n", e.n},
                         {"winding", e.winding},
                         {"cert", to_json(e.cert)},
                         {"z", complex_json(e.z)},
                         {"width", e.width},
                         {"C_n", e.C_n},
                         {"pass", e.pass}});
  json dich = json::array();
  for (const auto& a : r.dichotomies) dich.push_back(to_json(a));
  return json{{"band", r.edge.band_index},
              {"side", to_string(r.edge.side)},
              {"E0", r.E0},
              {"L", r.L},
              {"classification", to_json(r.cls)},
              {"hypothesis_nongeneric", r.hypothesis_nongeneric},
              {"reflected", r.reflected},
              {"edge_window",
               json{{"r_empty", r.edge_check.r_empty},
                    {"region_winding", r.edge_check.region_winding},
                    {"region_cert", to_json(r.edge_check.region_cert)},
                    {"r_winding", r.edge_check.r_winding},
                    {"r_cert", to_json(r.edge_check.r_cert)},
                    {"pass", r.edge_check.pass}}},
              {"gap_windows", windows},
              {"gap_windows_all_pass", r.gap_windows_all_pass},
              {"gap_dichotomy", dich},
              {"gap_dichotomy_all_pass", r.dichotomies_all_pass},
              {"find", to_json(r.find)},
              {"certificates_all_valid", r.certificates_all_valid}};
}

json to_json(const ScalingReport& r) {
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back(json{{"L", p.L},
                       {"n", p.n},
                       {"width", p.width},
                       {"in_gap_window_regime", p.in_gap_window_regime}});
  return json{{"points", pts},     {"slope", r.slope}, {"intercept", r.intercept},
              {"r2", r.r2},        {"spearman", r.spearman},
              {"C_max", r.C_max},  {"pass", r.pass}};
}

json to_json(const ClassificationReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"j", row.j},
                        {"classification", to_json(row.cls)},
                        {"cv_inverse_law", row.cv_inverse_law},
                        {"cv_edge_law", row.cv_edge_law},
                        {"empirical", row.empirical},
                        {"agree", row.agree},
                        {"samples", row.samples}});
  return json{{"E0", r.E0}, {"rows", rows}, {"all_decided_agree", r.all_decided_agree}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

std::string bands_csv(const BandStructure& bs) {
  std::ostringstream os;
  os << "band,lo,hi,closed_gaps\n";
  for (std::size_t i = 0; i < bs.bands.size(); ++i) {
    os << i << "," << g17(bs.bands[i].lo) << "," << g17(bs.bands[i].hi) << ",";
    for (std::size_t g = 0; g < bs.bands[i].closed_gaps.size(); ++g)
      os << (g ? ";" : "") << g17(bs.bands[i].closed_gaps[g]);
    os << "\n";
  }
  return os.str();
}

std::string spectrum_csv(const SpectralData& sd) {
  std::ostringstream os;
  os << "k,lambda,a_k,phi0_sq\n";
  for (Index k = 0; k < sd.lambdas.size(); ++k)
    os << k << "," << g17(sd.lambdas[k]) << "," << g17(sd.weights[k]) << ","
       << g17(sd.first_components[k]) << "\n";
  return os.str();
}

std::string resonance_csv(const std::vector<ResonanceRecord>& records) {
  std::ostringstream os;
  os << "gap_index,re_z,im_z,re_E,im_E,residual_abs,multiplicity,region_label\n";
  for (const auto& r : records)
    os << r.gap_index << "," << g17(r.z.real()) << "," << g17(r.z.imag()) << ","
       << g17(r.E.real()) << "," << g17(r.E.imag()) << "," << g17(r.residual_abs) << ","
       << r.multiplicity << "," << r.region_label << "\n";
  return os.str();
}

std::string contour_csv(const ContourImage& img) {
  std::ostringstream os;
  os << "t,re_f,im_f\n";
  for (std::size_t i = 0; i < img.points.size(); ++i)
    os << g17(img.t[i]) << "," << g17(img.points[i].real()) << ","
       << g17(img.points[i].imag()) << "\n";
  return os.str();
}

std::string scaling_csv(const ScalingReport& rep) {
  std::ostringstream os;
  os << "L,n,width,in_gap_window_regime\n";
  for (const auto& p : rep.points)
    os << p.L << "," << p.n << "," << g17(p.width) << "," << (p.in_gap_window_regime ? 1 : 0)
       << "\n";
  return os.str();
}

namespace {

struct SvgFrame {
  double x0, x1, y0, y1;  // data window
  double w = 900, h = 540, pad = 50;

  double X(double x) const { return pad + (x - x0) / (x1 - x0) * (w - 2 * pad); }
  double Y(double y) const { return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad); }
};

void svg_open(std::ostringstream& os, const SvgFrame& fr) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fr.w << "\" height=\"" << fr.h
     << "\" viewBox=\"0 0 " << fr.w << " " << fr.h << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fr.w << "\" height=\"" << fr.h
     << "\" fill=\"white\"/>\n";
}

void svg_rect(std::ostringstream& os, const SvgFrame& fr, const Rectangle& r,
              const std::string& fill, const std::string& stroke, double opacity) {
  const double x = fr.X(r.re_min), y = fr.Y(r.im_max);
  const double w = fr.X(r.re_max) - x, h = fr.Y(r.im_min) - y;
  os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" stroke=\"" << stroke
     << "\" stroke-width=\"1\"/>\n";
}

void svg_text(std::ostringstream& os, double x, double y, const std::string& s) {
  os << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"12\" font-family=\"monospace\">"
     << s << "</text>\n";
}

}  // namespace

std::string delta_plot_svg(const PeriodicPotential& V, const BandStructure& bs, int samples) {
  const double lo = V.values.minCoeff() - 2.5;
  const double hi = V.values.maxCoeff() + 2.5;
  SvgFrame fr{lo, hi, -6.0, 6.0};
  std::ostringstream os;
  svg_open(os, fr);
  for (double guide : {2.0, -2.0})
    os << "<line x1=\"" << fr.X(lo) << "\" y1=\"" << fr.Y(guide) << "\" x2=\"" << fr.X(hi)
       << "\" y2=\"" << fr.Y(guide) << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
  os << "<line x1=\"" << fr.X(lo) << "\" y1=\"" << fr.Y(0) << "\" x2=\"" << fr.X(hi)
     << "\" y2=\"" << fr.Y(0) << "\" stroke=\"#555\"/>\n";
  for (const auto& b : bs.bands)
    os << "<line x1=\"" << fr.X(b.lo) << "\" y1=\"" << fr.Y(0) << "\" x2=\"" << fr.X(b.hi)
       << "\" y2=\"" << fr.Y(0) << "\" stroke=\"black\" stroke-width=\"5\"/>\n";
  os << "<path fill=\"none\" stroke=\"#1155cc\" stroke-width=\"1.5\" d=\"";
  bool first = true;
  for (int i = 0; i <= samples; ++i) {
    const double x = lo + (hi - lo) * double(i) / double(samples);
    double y = std::real(discriminant(Complex(x, 0), V));
    y = std::clamp(y, -6.0, 6.0);
    os << (first ? "M" : "L") << fr.X(x) << " " << fr.Y(y) << " ";
    first = false;
  }
  os << "\"/>\n";
  svg_text(os, fr.pad, 20, "discriminant with bands (|Delta| <= 2)");
  os << "</svg>\n";
  return os.str();
}

std::string regions_svg(const FindReport& rep, const LabParams& params) {
  const RescaledFrame& frame = rep.prep.frame;
  double xmax = 1, ymin = -1;
  std::vector<RegionFamily> fams;
  for (Index n = 0; n <= rep.prep.n_max; ++n) {
    fams.push_back(build_regions(frame, rep.prep.en, n, params));
    xmax = std::max(xmax, fams.back().lam_hi * 1.05);
    ymin = std::min(ymin, -fams.back().strip_depth * 1.1);
  }
  ymin = std::max(ymin, -3.0 * fams.back().strip_depth);
  SvgFrame fr{-0.02 * xmax, xmax, ymin, 0.15 * (-ymin)};
  std::ostringstream os;
  svg_open(os, fr);
  os << "<line x1=\"" << fr.X(fr.x0) << "\" y1=\"" << fr.Y(0) << "\" x2=\"" << fr.X(fr.x1)
     << "\" y2=\"" << fr.Y(0) << "\" stroke=\"#333\"/>\n";
  const auto er = build_edge_regions(frame, rep.prep.en, params);
  if (er) {
    svg_rect(os, fr, er->R, "none", "#888", 0.0);
    svg_rect(os, fr, er->edge_window_rect, "#cfe8cf", "#2a7", 0.5);
    if (er->corner_square) svg_rect(os, fr, *er->corner_square, "#bbb", "#777", 0.4);
  }
  for (const auto& f : fams) {
    svg_rect(os, fr, f.D, "none", "#bbb", 0.0);
    svg_rect(os, fr, f.corner_left, "#bbb", "#777", 0.4);
    svg_rect(os, fr, f.corner_right, "#bbb", "#777", 0.4);
    if (f.deep_strip) svg_rect(os, fr, *f.deep_strip, "#bbb", "#777", 0.4);
    if (f.regime == Regime::DeepWindow && f.inner_box) {
      svg_rect(os, fr, *f.inner_box, "#cfe0f5", "#15c", 0.5);
      if (f.lower_box) svg_rect(os, fr, *f.lower_box, "#e8f0fc", "#15c", 0.4);
    } else if (f.gap_window) {
      svg_rect(os, fr, *f.gap_window, "#cfe0f5", "#15c", 0.5);
    }
  }
  for (const auto& rec : rep.records) {
    os << "<circle cx=\"" << fr.X(rec.z.real()) << "\" cy=\"" << fr.Y(rec.z.imag())
       << "\" r=\"3\" fill=\"#c22\"/>\n";
  }
  svg_text(os, fr.pad, 20,
           "rescaled plane near the band edge: searched (blue/green) and certified-free "
           "(grey) regions, resonances (red)");
  os << "</svg>\n";
  return os.str();
}

std::string image_curve_svg(const ContourImage& img, Complex marker) {
  double xmin = marker.real(), xmax = marker.real(), ymin = marker.imag(), ymax = marker.imag();
  for (const auto& p : img.points) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  const double mx = 0.05 * std::max(xmax - xmin, 1e-12);
  const double my = 0.05 * std::max(ymax - ymin, 1e-12);
  SvgFrame fr{xmin - mx, xmax + mx, ymin - my, ymax + my};
  std::ostringstream os;
  svg_open(os, fr);
  os << "<path fill=\"none\" stroke=\"#1155cc\" stroke-width=\"1\" d=\"";
  for (std::size_t i = 0; i < img.points.size(); ++i)
    os << (i ? "L" : "M") << fr.X(img.points[i].real()) << " " << fr.Y(img.points[i].imag())
       << " ";
  if (img.closed && !img.points.empty())
    os << "L" << fr.X(img.points[0].real()) << " " << fr.Y(img.points[0].imag());
  os << "\"/>\n";
  os << "<circle cx=\"" << fr.X(marker.real()) << "\" cy=\"" << fr.Y(marker.imag())
     << "\" r=\"4\" fill=\"#c22\"/>\n";
  svg_text(os, fr.pad, 20, "image curve with the forcing point");
  os << "</svg>\n";
  return os.str();
}

}  // namespace specres::report
