#pragma once

// Datasets behind the published figures: a sweep definition per panel plus the
// exact configuration used, written as CSV with a JSON sidecar.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lc_cooldown/config.hpp"
#include "lc_cooldown/sweep.hpp"

namespace lcc {

/// Reference device: 1 MHz membrane and LC circuit, 8 mm cavity with finesse
/// 5e4, driven on the red mechanical sideband, couplings fixed directly.
inline json reference_config(double quality_QLC = 4e4, double temperature = 10e-3,
                             double G_over_kappa = 0.8, double g_over_kappa = 0.12,
                             bool spring_shift = true) {
  const double omega0 = constants::two_pi * 1e6;
  return {
      {"optics",
       {{"wavelength_lambda", 1064e-9},
        {"cavity_length_Lc", 8e-3},
        {"finesse_F", 5e4},
        {"kappa_in_fraction", 0.4},
        {"membrane_reflectivity_Rm", 0.4},
        {"overlap_Theta", 1.0},
        {"membrane_axial_position_z0", 1064e-9 / 16.0},
        {"detuning_Delta", omega0}}},
      {"mechanics", {{"mass_m", 0.7e-10}, {"omega0", omega0}, {"quality_Qm", 1e6}}},
      {"circuit",
       {{"inductance_L", 1e-3},
        {"omegaLC", omega0},
        {"quality_QLC", quality_QLC},
        {"effective_area_Aeff", 1.1e-7},
        {"gap_h0", 2e-6}}},
      {"baths", {{"T_mech", temperature}, {"T_LC", temperature}}},
      {"coupling_mode",
       {{"type", "Direct"},
        {"G_over_kappa", G_over_kappa},
        {"g_over_kappa", g_over_kappa},
        {"apply_spring_shift", spring_shift}}},
  };
}

struct FigureDataset {
  std::string id;
  std::string description;
  std::string regime;  // "quantum", "classical", or "electromechanics"
  json base;
  SweepSpec spec;
};

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig2",  "fig3a", "fig3b", "fig3c",
                                               "fig3d", "fig4a", "fig4b"};
  return ids;
}

namespace figure_detail {

inline SweepAxis log_axis(const std::string& path, std::size_t count) {
  return {path, make_grid(1e-3, 1.0, count, "log")};
}

inline void set_both_temperatures(json& doc, double T) {
  doc["baths"]["T_mech"] = T;
  doc["baths"]["T_LC"] = T;
}

}  // namespace figure_detail

inline FigureDataset figure_definition(const std::string& id) {
  using figure_detail::log_axis;
  using O = SweepOutput;
  FigureDataset f;
  f.id = id;
  const std::string g_path = "coupling_mode.g_over_kappa";
  const std::string G_path = "coupling_mode.G_over_kappa";
  if (id == "fig2") {
    f.description = "electromechanical coupling g versus DC bias and electrode gap";
    f.regime = "electromechanics";
    f.base = reference_config();
    f.base["coupling_mode"] = {{"type", "Physical"}};
    f.base["optics"]["input_power_P"] = 1e-3;
    f.base["drives"] = {{"V_DC", 0.0}};
    f.spec.axes = {{"circuit.gap_h0", make_grid(1e-6, 4e-6, 31, "linear")},
                   {"drives.V_DC", make_grid(0.0, 100.0, 101, "linear")}};
    f.spec.outputs = {O::g_rad_s, O::x_s, O::omega_m_rad_s};
  } else if (id == "fig3a" || id == "fig3c") {
    const bool a = id == "fig3a";
    f.description = "cooling efficiency over the (g/kappa, G/kappa) plane";
    f.regime = "quantum";
    f.base = a ? reference_config(1e6, 0.3) : reference_config(4e4, 10e-3);
    f.spec.axes = {log_axis(G_path, 50), log_axis(g_path, 50)};
    f.spec.outputs = {O::eta, O::n_lc_eff, O::V_DC};
  } else if (id == "fig3b" || id == "fig3d") {
    const bool b = id == "fig3b";
    f.description = "LC occupancy versus g/kappa at G/kappa = 0.8";
    f.regime = "quantum";
    f.base = b ? reference_config(1e6, 0.3) : reference_config(4e4, 10e-3);
    f.spec.axes = {log_axis(g_path, 100)};
    f.spec.outputs = {O::n_lc_eff, O::approx_n_lc_eff, O::n_m_eff, O::eta, O::omega_m_rad_s, O::V_DC};
  } else if (id == "fig4a" || id == "fig4b") {
    const bool a = id == "fig4a";
    f.description = "exact and approximate LC occupancy versus g/kappa at G/kappa = 0.8";
    f.regime = a ? "classical" : "quantum";
    f.base = reference_config();
    figure_detail::set_both_temperatures(f.base, a ? 300.0 : 0.3);
    f.spec.axes = {{"circuit.quality_QLC", a ? std::vector<double>{1e2, 1e3} : std::vector<double>{1e5, 1e7}},
                   log_axis(g_path, 100)};
    f.spec.outputs = {O::n_lc_eff, O::approx_n_lc_eff, O::n_m_eff};
  } else {
    throw ConfigError("unknown figure '" + id + "'");
  }
  return f;
}

struct FigureFiles {
  std::filesystem::path csv;
  std::filesystem::path sidecar;
  std::vector<SweepRecord> records;
};

/// Sidecar describing exactly what produced a dataset.
inline json figure_sidecar(const FigureDataset& f, const std::string& timestamp = {}) {
  json side = {{"figure", f.id},
               {"description", f.description},
               {"regime", f.regime},
               {"config", f.base},
               {"sweep", to_json(f.spec)},
               {"provenance", provenance(parse_parameter_set(f.base))}};
  if (!timestamp.empty()) side["generated_at"] = timestamp;
  return side;
}

inline FigureFiles reproduce_figure(const std::string& id, const std::filesystem::path& out_dir,
                                    unsigned threads = 1, const std::string& timestamp = {}) {
  const auto f = figure_definition(id);
  FigureFiles files;
  files.records = run_sweep(f.base, f.spec, threads);
  std::filesystem::create_directories(out_dir);
  files.csv = out_dir / (id + ".csv");
  files.sidecar = out_dir / (id + ".json");
  {
    std::ofstream out(files.csv);
    if (!out) throw ConfigError("cannot write '" + files.csv.string() + "'");
    write_sweep_csv(out, f.spec, files.records);
  }
  std::ofstream side(files.sidecar);
  if (!side) throw ConfigError("cannot write '" + files.sidecar.string() + "'");
  side << figure_sidecar(f, timestamp).dump(2) << '\n';
  return files;
}

}  // namespace lcc
