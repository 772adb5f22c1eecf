#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "specres/lab.hpp"
#include "specres/report.hpp"

using namespace specres;

namespace {

LabParams small_params() {
  LabParams p;
  p.eps = 0.1;
  p.kappa = 20.0;
  return p;
}

}  // namespace

TEST_CASE("delta_n formula values") {
  CHECK(delta_n(0, 20.0) == doctest::Approx(1.0 / 20.0).epsilon(1e-14));
  CHECK(delta_n(9, 10.0) == doctest::Approx(1.0 / (std::log(10.0) + 1.0)).epsilon(1e-14));
  for (Index n = 2; n < 40; ++n) CHECK(delta_n(n + 1, 20.0) > delta_n(n, 20.0));
}

TEST_CASE("build_regions: geometry and regime flag") {
  PeriodicPotential V{-2.0, 0.0};
  const Index L = 201;
  const LabParams params = small_params();
  EdgeComputation ec = prepare_edge(V, L, {1, EdgeSide::Left}, params);
  REQUIRE(ec.bands_eff.bands[std::size_t(ec.band_index_eff)].lo == doctest::Approx(0.0));

  for (Index n = 0; n <= ec.n_max; ++n) {
    const RegionFamily rf = build_regions(ec.frame, ec.en, n, params);
    CHECK(rf.delta == doctest::Approx(delta_n(n, params.kappa)));
    CHECK(rf.x0 == doctest::Approx(rf.lam_hi - rf.lam_lo));
    const bool fig1 = rf.delta < rf.x0 * rf.x0 / (params.eps * double(L));
    CHECK((rf.regime == Regime::DeepWindow) == fig1);
    CHECK(rf.corner_left.width() == doctest::Approx(rf.delta));
    CHECK(rf.corner_right.width() == doctest::Approx(rf.delta));
    if (rf.inner_box) {
      CHECK(rf.inner_box->re_min == doctest::Approx(rf.lam_lo + rf.delta));
      CHECK(rf.inner_box->re_max == doctest::Approx(rf.lam_hi - rf.delta));
    }
    const auto poly = rf.gap_region_polygon();
    CHECK(poly.size() == 8);
  }
  CHECK_THROWS_AS(build_regions(ec.frame, ec.en, ec.en.count(), params), DomainError);
}

TEST_CASE("build_edge_regions: present for a clean edge, absent when pinned") {
  PeriodicPotential V{-2.0, 0.0};
  const LabParams params = small_params();
  EdgeComputation ec = prepare_edge(V, 201, {1, EdgeSide::Left}, params);
  const auto er = build_edge_regions(ec.frame, ec.en, params);
  REQUIRE(er.has_value());
  const double lam0 = ec.frame.lambda_tilde[ec.en.global_index[0]];
  CHECK(er->delta1 == doctest::Approx(lam0 / 2.0));
  CHECK(er->R.re_max == doctest::Approx(lam0));
  CHECK(er->edge_window_rect.im_min == doctest::Approx(-1.0 / (params.eps * 201.0)));

  // synthetic frame with the edge eigenvalue pinned at zero
  RescaledFrame fr;
  fr.E0 = 0;
  fr.L = 100;
  fr.lambda_tilde = VectorXd(3);
  fr.lambda_tilde << 0.0, 10.0, 40.0;
  fr.a_tilde = VectorXd::Constant(3, 1.0);
  BandLocalEnumeration en;
  en.values = fr.lambda_tilde;
  en.global_index = {0, 1, 2};
  CHECK(!build_edge_regions(fr, en, params).has_value());
}

TEST_CASE("prepare_edge: right edges run reflected with exact energy mapping") {
  PeriodicPotential V{2.0, 0.0};
  const LabParams params = small_params();
  // band 0 of V is [1-sqrt5, 0]; its right edge 0 reflects onto the left
  // edge of [0, sqrt5-1] for -V
  EdgeComputation ec = prepare_edge(V, 201, {0, EdgeSide::Right}, params);
  CHECK(ec.reflected);
  CHECK(ec.E0_orig == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ec.E0_eff == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ec.cls.kind == EdgeCase::NonGeneric);  // j = 1 at this edge

  const Complex z_eff(3.0, -0.5);
  const Complex E = map_back_E(ec, z_eff);
  CHECK(E.real() == doctest::Approx(-3.0 / (201.0 * 201.0)));
  CHECK(E.imag() == doctest::Approx(-0.5 / (201.0 * 201.0)));

  // spectra mirror each other
  const SpectralData orig = eigen_decompose(assemble(V, 201));
  for (Index k = 0; k < 10; ++k)
    CHECK(ec.sd.lambdas[k] ==
          doctest::Approx(-orig.lambdas[orig.lambdas.size() - 1 - k]).epsilon(1e-10));

  CHECK_THROWS_AS(prepare_edge(V, 201, {1, EdgeSide::Left}, params), DomainError);  // edge at 2
  CHECK_THROWS_AS(prepare_edge(V, 201, {7, EdgeSide::Left}, params), DomainError);
}

TEST_CASE("find_resonances_near_edge: nongeneric edge hosts one resonance per gap") {
  PeriodicPotential V{2.0, 0.0};
  const Index L = 201;
  const LabParams params = small_params();
  const FindReport rep = find_resonances_near_edge(V, L, {0, EdgeSide::Right}, params);
  CHECK(rep.prep.cls.kind == EdgeCase::NonGeneric);
  CHECK(rep.lower_half_ok);
  CHECK(rep.residuals_ok);
  CHECK(rep.consistency_ok);

  // one resolved root in every searched gap, none inside corner squares
  std::vector<int> per_gap(std::size_t(rep.prep.n_max + 1), 0);
  for (const auto& r : rep.records) {
    CHECK(!r.unresolved);
    CHECK(r.E.imag() < 0.0);
    CHECK(r.residual_abs <= params.tol_residual);
    CHECK(r.region_label != "corner_square");
    if (r.gap_index >= 0) per_gap[std::size_t(r.gap_index)] += r.multiplicity;
  }
  for (int c : per_gap) CHECK(c == 1);
  for (const auto& c : rep.certificates) {
    CHECK(c.pass);
    CHECK(!c.contradicted_by_root);
    CHECK(c.bound_ratio > 0.0);
  }

  // the unrescaled residual of each record vanishes for the original problem
  const SpectralData orig = eigen_decompose(assemble(V, L));
  for (const auto& r : rep.records) {
    const Complex res = residual(r.E, orig);
    CHECK(std::abs(res) <= 10 * params.tol_residual);
  }
}

TEST_CASE("find report is deterministic across worker counts") {
  PeriodicPotential V{2.0, 0.0};
  const LabParams params = small_params();
  WorkerPool one(1), eight(8);
  const FindReport a = find_resonances_near_edge(V, 201, {0, EdgeSide::Right}, params, &one);
  const FindReport b = find_resonances_near_edge(V, 201, {0, EdgeSide::Right}, params, &eight);
  CHECK(report::to_json(a).dump() == report::to_json(b).dump());
}

TEST_CASE("winding consistency: roots found in a gap match the gap winding") {
  PeriodicPotential V{-2.0, 0.0};
  const Index L = 201;
  const LabParams params = small_params();
  EdgeComputation ec = prepare_edge(V, L, {1, EdgeSide::Left}, params);
  const FindReport rep = find_resonances_near_edge(ec, params);
  for (Index n = 0; n <= ec.n_max; ++n) {
    const RegionFamily rf = build_regions(ec.frame, ec.en, n, params);
    const double g = 1e-7 * std::max(1.0, rf.lam_hi);
    const Rectangle search(rf.lam_lo + g, rf.lam_hi - g,
                           -std::max(rf.d_depth, rf.strip_depth), 0.0);
    const auto cert =
        winding_count([&](Complex z) { return rescaled_residual(z, ec.frame); }, search);
    REQUIRE(cert.valid());
    int mult = 0;
    for (const auto& r : rep.records)
      if (r.gap_index == n) mult += r.multiplicity;
    CHECK(mult == cert.winding);
  }
}

TEST_CASE("verify_gap_dichotomy: image is simple and consistent with windings") {
  PeriodicPotential V{-2.0, 0.0};
  const LabParams params = small_params();
  EdgeComputation ec = prepare_edge(V, 401, {1, EdgeSide::Left}, params);
  bool saw_member = false, saw_nonmember = false;
  for (Index n = 0; n <= std::min<Index>(ec.n_max, 3); ++n) {
    const DichotomyReport rep = verify_gap_dichotomy(ec, n, params);
    CHECK(rep.image_simple);
    CHECK(rep.member_defined);
    // the top edge of the inner box maps into the real axis
    for (std::size_t i = 0; i < rep.image.t.size(); ++i)
      if (rep.image.t[i] > 2.0 && rep.image.t[i] < 3.0)
        CHECK(std::abs(rep.image.points[i].imag()) < 1e-14);
    CHECK(rep.consistent);
    CHECK(rep.region_winding >= 1);
    if (rep.member_inner) {
      saw_member = true;
      CHECK(rep.inner_winding == 1);
      CHECK(rep.width_le_delta);
    } else {
      saw_nonmember = true;
      CHECK(rep.lower_winding >= 1);
    }
    CHECK(rep.pass);
  }
  CHECK((saw_member || saw_nonmember));
}

TEST_CASE("verify_edge: structure checks on a nongeneric configuration") {
  PeriodicPotential V{2.0, 0.0};
  const LabParams params = small_params();
  const EdgeVerifyReport rep = verify_edge(V, 201, {0, EdgeSide::Right}, params);
  CHECK(rep.hypothesis_nongeneric);
  CHECK(rep.edge_check.pass);
  if (!rep.edge_check.r_empty) {
    CHECK(rep.edge_check.region_winding == 0);
    CHECK(rep.edge_check.r_winding == 0);
  }
  REQUIRE(!rep.gap_windows.empty());
  for (const auto& e : rep.gap_windows) {
    CHECK(e.winding == 1);
    CHECK(e.width > 0.0);
    CHECK(e.pass);
  }
  CHECK(rep.gap_windows_all_pass);
  CHECK(rep.dichotomies_all_pass);
  CHECK(rep.certificates_all_valid);
  CHECK(rep.find.lower_half_ok);
}

TEST_CASE("scaling study: widths follow the n^2/(eps L) law, slope stable in L") {
  PeriodicPotential V{2.0, 0.0};
  const LabParams params = small_params();
  const ScalingReport rep = scaling_study(V, {0, EdgeSide::Right}, {201, 401}, params);
  CHECK(rep.points.size() >= 5);
  CHECK(rep.slope == doctest::Approx(1.0).epsilon(0.2));
  CHECK(rep.r2 >= 0.9);
  CHECK(rep.pass);
  CHECK(rep.spearman >= 0.9);
  CHECK(rep.C_max > 0.0);
  CHECK_THROWS_AS(scaling_study(V, {0, EdgeSide::Right}, {21}, params), DomainError);

  const ScalingReport shifted = scaling_study(V, {0, EdgeSide::Right}, {401, 801}, params);
  CHECK(std::abs(shifted.slope - rep.slope) < 0.1);
}

TEST_CASE("classification cross-check: free case and the nongeneric residue") {
  PeriodicPotential zero{0.0};
  const LabParams params = small_params();
  const ClassificationReport free_case =
      classify_and_crosscheck(zero, -2.0, EdgeSide::Left, {200, 300, 400}, params);
  REQUIRE(free_case.rows.size() == 1);
  CHECK(free_case.rows[0].cls.kind == EdgeCase::Generic);
  CHECK(free_case.rows[0].empirical == "edge-law");
  CHECK(free_case.rows[0].agree);
  CHECK(free_case.all_decided_agree);

  PeriodicPotential V{2.0, 0.0};
  const ClassificationReport mixed =
      classify_and_crosscheck(V, 0.0, EdgeSide::Right, {200, 201, 400, 401}, params);
  REQUIRE(mixed.rows.size() == 2);
  CHECK(mixed.rows[0].cls.kind == EdgeCase::Generic);
  CHECK(mixed.rows[1].cls.kind == EdgeCase::NonGeneric);
  CHECK(mixed.rows[1].empirical == "inverse-law");
  CHECK(mixed.all_decided_agree);
}

TEST_CASE("nongeneric scan returns verified candidates or nothing") {
  const auto hits = scan_nongeneric(60);
  for (const auto& h : hits) {
    PeriodicPotential V(h.values);
    const EdgeClassification cls = classify_band_edge(h.edge, h.j, V);
    CHECK(cls.kind != EdgeCase::Generic);
  }
}

TEST_CASE("svg and csv emitters produce well-formed output") {
  PeriodicPotential V{2.0, 0.0};
  const BandStructure bs = band_structure(V);
  const std::string svg = report::delta_plot_svg(V, bs, 200);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(report::bands_csv(bs).find("band,lo,hi") == 0);

  const LabParams params = small_params();
  const FindReport fr = find_resonances_near_edge(V, 201, {0, EdgeSide::Right}, params);
  const std::string rsvg = report::regions_svg(fr, params);
  CHECK(rsvg.find("</svg>") != std::string::npos);
  const std::string csv = report::resonance_csv(fr.records);
  CHECK(csv.find("gap_index") == 0);
}
