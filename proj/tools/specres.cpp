// Batch front-end: parses a JSON config, dispatches the computations and
// writes tables, figures and certificate reports into a run directory.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "specres/report.hpp"

namespace fs = std::filesystem;
using namespace specres;
using report::json;

namespace {

struct RunConfig {
  PeriodicPotential potential;
  std::vector<Index> L_list;             // single L or a grid
  std::vector<EdgeSelect> edges;         // resolved edge selectors
  bool edges_all_interior = false;
  LabParams params;
  double spacing_eps = 0.1;
};

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file: " + path.string());
  return json::parse(in);
}

RunConfig parse_config(const json& j) {
  RunConfig cfg;
  if (!j.contains("potential") || !j["potential"].contains("values"))
    throw DomainError("config: missing potential.values");
  const auto& vals = j["potential"]["values"];
  VectorXd v(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) v[Index(i)] = vals[i].get<double>();
  if (j["potential"].contains("p") && j["potential"]["p"].get<Index>() != v.size())
    throw DomainError("config: potential.p disagrees with values length");
  cfg.potential = PeriodicPotential(v);

  if (j.contains("L_grid")) {
    for (const auto& x : j["L_grid"]) cfg.L_list.push_back(x.get<Index>());
  } else if (j.contains("L")) {
    cfg.L_list.push_back(j["L"].get<Index>());
  } else {
    throw DomainError("config: need L or L_grid");
  }
  for (Index L : cfg.L_list)
    if (L < 2) throw DomainError("config: L must be >= 2");
  const Index p = cfg.potential.period();
  for (std::size_t i = 1; i < cfg.L_list.size(); ++i)
    if (cfg.L_list[i] % p != cfg.L_list[0] % p)
      throw DomainError("config: L_grid residues must agree mod p");

  if (j.contains("edges") && j["edges"].get<std::string>() == "interior") {
    cfg.edges_all_interior = true;
  } else if (j.contains("edge")) {
    EdgeSelect e;
    e.band_index = j["edge"].at("band").get<int>();
    const std::string side = j["edge"].at("side").get<std::string>();
    if (side != "left" && side != "right") throw DomainError("config: edge.side");
    e.side = side == "left" ? EdgeSide::Left : EdgeSide::Right;
    cfg.edges.push_back(e);
  }

  auto opt = [&](const char* key, double dflt) {
    return j.contains(key) && !j[key].is_null() ? j[key].get<double>() : dflt;
  };
  cfg.params.eps = opt("eps", 0.1);
  cfg.params.kappa = opt("kappa", 20.0);
  cfg.params.C1 = opt("C1", 10.0);
  cfg.params.delta1 = opt("delta1", 0.0);
  cfg.params.eta = opt("eta", 0.0);
  cfg.params.grid_density = int(opt("grid_density", 64));
  if (j.contains("tol")) {
    cfg.params.tol_root = j["tol"].value("root", 1e-12);
    cfg.params.tol_residual = j["tol"].value("residual", 1e-9);
  }
  cfg.spacing_eps = opt("spacing_eps", cfg.params.eps);
  return cfg;
}

std::vector<EdgeSelect> resolve_edges(const RunConfig& cfg, const BandStructure& bs) {
  if (!cfg.edges_all_interior) {
    if (cfg.edges.empty()) throw DomainError("config: need edge or edges=interior");
    return cfg.edges;
  }
  std::vector<EdgeSelect> out;
  for (int b = 0; b < int(bs.bands.size()); ++b) {
    if (bs.bands[std::size_t(b)].lo > -2.0 && bs.bands[std::size_t(b)].lo < 2.0)
      out.push_back({b, EdgeSide::Left});
    if (bs.bands[std::size_t(b)].hi > -2.0 && bs.bands[std::size_t(b)].hi < 2.0)
      out.push_back({b, EdgeSide::Right});
  }
  if (out.empty()) throw DomainError("no interior band edges in (-2, 2)");
  return out;
}

json config_echo(const RunConfig& cfg) {
  // computational parameters only: execution details (threads, paths,
  // timestamps) stay out so reports are byte-stable across runs
  json e;
  e["potential"] = json{{"p", cfg.potential.period()},
                        {"values", std::vector<double>(cfg.potential.values.begin(),
                                                       cfg.potential.values.end())}};
  e["L_list"] = cfg.L_list;
  e["eps"] = cfg.params.eps;
  e["kappa"] = cfg.params.kappa;
  e["C1"] = cfg.params.C1;
  e["delta1"] = cfg.params.delta1;
  e["eta"] = cfg.params.eta_of();
  e["grid_density"] = cfg.params.grid_density;
  e["tol"] = json{{"root", cfg.params.tol_root}, {"residual", cfg.params.tol_residual}};
  return e;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", std::localtime(&t));
  return buf;
}

struct RunDir {
  fs::path dir;

  void write(const std::string& name, const std::string& text) const {
    report::write_text(dir / name, text);
  }
  void write_json(const std::string& name, const json& j) const {
    write(name, j.dump(2) + "\n");
  }
};

RunDir make_run_dir(const std::string& out, const std::string& run_name,
                    const std::string& command) {
  RunDir rd;
  rd.dir = fs::path(out) / (run_name.empty() ? command + "-" + timestamp() : run_name);
  fs::create_directories(rd.dir);
  return rd;
}

json edge_json(const EdgeSelect& e) {
  return json{{"band", e.band_index}, {"side", to_string(e.side)}};
}

int finish(const RunDir& rd, const json& manifest, const json& rep, bool certified) {
  rd.write_json("manifest.json", manifest);
  rd.write_json("report.json", rep);
  std::cout << "report: " << (rd.dir / "report.json").string() << "\n";
  return certified ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resonances of truncated periodic half-line operators"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "runs", run_name;
  unsigned threads = 0;
  double tol_override = 0;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory root");
  app.add_option("--run-name", run_name, "fixed run sub-directory name");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--tol", tol_override, "override residual tolerance");

  auto* cmd_bands = app.add_subcommand("bands", "band structure table and discriminant plot");
  auto* cmd_spectrum = app.add_subcommand("spectrum", "spectral data and spacing report");
  auto* cmd_res = app.add_subcommand("resonances", "locate resonances near band edges");
  auto* cmd_verify = app.add_subcommand("verify", "full certificate suite per edge");
  auto* cmd_classify = app.add_subcommand("classify", "band-edge classification report");
  auto* cmd_scaling = app.add_subcommand("scaling", "resonance-width scaling study");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg0 = parse_config(load_json(config_path));
    RunConfig cfg = cfg0;
    if (tol_override > 0) cfg.params.tol_residual = tol_override;
    WorkerPool pool(threads);

    const std::string command = app.get_subcommands().front()->get_name();
    const RunDir rd = make_run_dir(out_dir, run_name, command);
    json manifest{{"command", command},
                  {"timestamp", timestamp()},
                  {"threads", pool.size()},
                  {"config_path", config_path}};

    const BandStructure bs = band_structure(cfg.potential);

    if (cmd_bands->parsed()) {
      json rep{{"config", config_echo(cfg)}, {"bands", report::to_json(bs)}};
      rd.write("bands.csv", report::bands_csv(bs));
      rd.write("delta.svg", report::delta_plot_svg(cfg.potential, bs));
      return finish(rd, manifest, rep, true);
    }

    if (cmd_spectrum->parsed()) {
      json runs = json::array();
      bool ok = true;
      for (Index L : cfg.L_list) {
        const SpectralData sd = eigen_decompose(assemble(cfg.potential, L), &pool);
        rd.write("spectrum_L" + std::to_string(L) + ".csv", report::spectrum_csv(sd));
        json jr{{"L", L},
                {"j", L % cfg.potential.period()},
                {"weight_sum", sd.weight_sum()},
                {"count", sd.lambdas.size()}};
        ok = ok && std::abs(sd.weight_sum() - 1.0) < 1e-10;
        if (cfg.potential.values.cwiseAbs().maxCoeff() == 0.0) {
          // free case: compare against the closed-form spectrum
          double dl = 0, da = 0;
          for (Index k = 0; k <= L; ++k) {
            const double lam = 2.0 * std::cos(double(L + 1 - k) * M_PI / double(L + 2));
            const double s = std::sin(double(L + 1 - k) * M_PI / double(L + 2));
            dl = std::max(dl, std::abs(sd.lambdas[k] - lam));
            da = std::max(da, std::abs(sd.weights[k] - 2.0 / double(L + 2) * s * s));
          }
          jr["free_case_match"] = dl < 1e-9 && da < 1e-9;
          ok = ok && dl < 1e-9 && da < 1e-9;
        }
        // JSON mirror of the spectral table with its metadata
        json mirror{{"V", json{{"p", cfg.potential.period()},
                               {"values", std::vector<double>(cfg.potential.values.begin(),
                                                              cfg.potential.values.end())}}},
                    {"L", L},
                    {"j", L % cfg.potential.period()},
                    {"tolerances", json{{"root", cfg.params.tol_root},
                                        {"residual", cfg.params.tol_residual}}},
                    {"lambda", std::vector<double>(sd.lambdas.begin(), sd.lambdas.end())},
                    {"a_k", std::vector<double>(sd.weights.begin(), sd.weights.end())},
                    {"phi0_sq", std::vector<double>(sd.first_components.begin(),
                                                    sd.first_components.end())}};
        rd.write_json("spectrum_L" + std::to_string(L) + ".json", mirror);
        // per-band counts against the quantization prediction
        json bandcounts = json::array();
        for (int b = 0; b < int(bs.bands.size()); ++b) {
          const auto en = enumerate_in_band(sd, bs.bands[std::size_t(b)], b);
          const double span =
              std::abs(quasimomentum(bs.bands[std::size_t(b)].hi - 1e-9, cfg.potential, bs) -
                       quasimomentum(bs.bands[std::size_t(b)].lo + 1e-9, cfg.potential, bs));
          const double predicted = double(L - L % cfg.potential.period()) * span / M_PI;
          bandcounts.push_back(json{{"band", b},
                                    {"count", en.count()},
                                    {"predicted", predicted},
                                    {"within_2", std::abs(double(en.count()) - predicted) <= 2.0}});
          ok = ok && std::abs(double(en.count()) - predicted) <= 2.0;
        }
        jr["band_counts"] = bandcounts;
        // spacing report at the first configured edge when one applies
        const auto edges = resolve_edges(cfg, bs);
        const EdgeSelect e0 = edges.front();
        const auto& band = bs.bands[std::size_t(e0.band_index)];
        if (e0.side == EdgeSide::Left) {
          const auto en = enumerate_in_band(sd, band, e0.band_index);
          jr["spacing"] = report::to_json(
              check_spacing_law(en, band.lo, cfg.spacing_eps, L, L % cfg.potential.period()));
        }
        runs.push_back(jr);
      }
      json rep{{"config", config_echo(cfg)}, {"runs", runs}};
      return finish(rd, manifest, rep, ok);
    }

    if (cmd_res->parsed()) {
      json runs = json::array();
      bool ok = true;
      std::vector<ResonanceRecord> all;
      for (Index L : cfg.L_list)
        for (const EdgeSelect& e : resolve_edges(cfg, bs)) {
          const FindReport fr = find_resonances_near_edge(cfg.potential, L, e, cfg.params, &pool);
          json jr = report::to_json(fr);
          jr["edge_select"] = edge_json(e);
          runs.push_back(jr);
          const std::string tag =
              "L" + std::to_string(L) + "_b" + std::to_string(e.band_index) + "_" +
              to_string(e.side);
          rd.write("resonances_" + tag + ".csv", report::resonance_csv(fr.records));
          rd.write("regions_" + tag + ".svg", report::regions_svg(fr, cfg.params));
          ok = ok && fr.lower_half_ok && fr.residuals_ok;
          for (const auto& r : fr.records) all.push_back(r);
        }
      json rep{{"config", config_echo(cfg)}, {"runs", runs}};
      rep["total_records"] = all.size();
      return finish(rd, manifest, rep, ok);
    }

    if (cmd_verify->parsed()) {
      json runs = json::array();
      bool ok = true;
      for (Index L : cfg.L_list)
        for (const EdgeSelect& e : resolve_edges(cfg, bs)) {
          const EdgeVerifyReport vr = verify_edge(cfg.potential, L, e, cfg.params, &pool);
          runs.push_back(report::to_json(vr));
          const std::string tag =
              "L" + std::to_string(L) + "_b" + std::to_string(e.band_index) + "_" +
              to_string(e.side);
          rd.write("resonances_" + tag + ".csv", report::resonance_csv(vr.find.records));
          rd.write("regions_" + tag + ".svg", report::regions_svg(vr.find, cfg.params));
          if (!vr.dichotomies.empty()) {
            const DichotomyReport& a = vr.dichotomies.front();
            rd.write("inner_image_" + tag + ".csv", report::contour_csv(a.image));
            rd.write("inner_image_" + tag + ".svg",
                     report::image_curve_svg(a.image, a.forcing_point));
          }
          ok = ok && vr.certificates_all_valid && vr.edge_check.pass && vr.gap_windows_all_pass &&
               vr.dichotomies_all_pass && vr.find.lower_half_ok && vr.find.residuals_ok;
        }
      json rep{{"config", config_echo(cfg)}, {"runs", runs}};
      return finish(rd, manifest, rep, ok);
    }

    if (cmd_classify->parsed()) {
      json runs = json::array();
      bool ok = true;
      for (const EdgeSelect& e : resolve_edges(cfg, bs)) {
        const auto& band = bs.bands[std::size_t(e.band_index)];
        const double E0 = e.side == EdgeSide::Left ? band.lo : band.hi;
        const ClassificationReport cr =
            classify_and_crosscheck(cfg.potential, E0, e.side, cfg.L_list, cfg.params, &pool);
        json jr = report::to_json(cr);
        jr["edge_select"] = edge_json(e);
        runs.push_back(jr);
        ok = ok && cr.all_decided_agree;
      }
      json rep{{"config", config_echo(cfg)}, {"runs", runs}};
      return finish(rd, manifest, rep, ok);
    }

    if (cmd_scaling->parsed()) {
      const auto edges = resolve_edges(cfg, bs);
      const ScalingReport sr =
          scaling_study(cfg.potential, edges.front(), cfg.L_list, cfg.params, &pool);
      rd.write("scaling.csv", report::scaling_csv(sr));
      json rep{{"config", config_echo(cfg)},
               {"edge_select", edge_json(edges.front())},
               {"scaling", report::to_json(sr)}};
      return finish(rd, manifest, rep, sr.pass);
    }

    return 1;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 2;
  }
}
