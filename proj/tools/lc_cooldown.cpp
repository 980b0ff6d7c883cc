// lc-cooldown: command-line front end of the lc_cooldown library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lc_cooldown/lc_cooldown.hpp"

namespace fs = std::filesystem;
using namespace lcc;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kInstability = 3, kNumerical = 4 };

struct Options {
  std::string config;
  std::string out;
  unsigned threads = 0;
  bool no_timestamp = false;
  std::string figure = "all";
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

unsigned thread_count(const Options& opt) {
  if (opt.threads > 0) return opt.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

json with_header(json body, const ParameterSet& p, const Options& opt) {
  body["provenance"] = provenance(p);
  if (!opt.no_timestamp) body["generated_at"] = utc_timestamp();
  return body;
}

// Writes `text` to <out>/<name>, or to stdout without --out.
void emit(const Options& opt, const std::string& name, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(opt.out);
  const auto path = fs::path(opt.out) / name;
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
}

// JSON sidecar of a CSV output; only written with --out.
void emit_sidecar(const Options& opt, const std::string& name, const json& j) {
  if (!opt.out.empty()) emit(opt, name, j.dump(2) + "\n");
}

json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json load_config(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config is required for this command");
  return load_json_file(opt.config);
}

struct FrequencyGrid {
  std::vector<double> omega;
};

// {omega_min | omega_min_hz, omega_max | omega_max_hz, count, spacing}, plus
// extra numeric keys listed in `extra`.
FrequencyGrid read_grid(const json& doc, const char* name, const ParameterSet& p,
                        std::map<std::string, double>& extra) {
  const double wlc = p.circuit.omegaLC;
  double lo = 0.8 * wlc;
  double hi = 1.2 * wlc;
  double count = 401;
  std::string spacing = "linear";
  if (doc.contains(name)) {
    config_detail::ObjectReader r(doc.at(name), name);
    if (auto v = r.frequency("omega_min")) lo = *v;
    if (auto v = r.frequency("omega_max")) hi = *v;
    if (r.has("count")) count = r.number("count");
    if (r.has("spacing")) spacing = r.string("spacing");
    for (auto& [key, value] : extra)
      if (r.has(key)) value = r.number(key);
    r.finish();
  }
  if (!(count >= 1.0) || count != std::floor(count)) throw ConfigError(std::string(name) + ".count must be a positive integer");
  if (!(hi >= lo)) throw ConfigError(std::string(name) + ": omega_max must be >= omega_min");
  return {make_grid(lo, hi, std::size_t(count), spacing)};
}

int cmd_workpoint(const Options& opt) {
  const auto p = parse_parameter_set(load_config(opt));
  const auto wp = working_point(p);
  json j = {{"x_s", wp.x_s},
            {"n_cav", wp.n_cav},
            {"alpha_s", complex_json(wp.alpha_s)},
            {"q_s", wp.q_s},
            {"omega_m", wp.omega_m},
            {"G", wp.G},
            {"g", wp.g},
            {"Delta", wp.Delta},
            {"C_at_xs", wp.C_at_xs},
            {"V_pull", wp.V_pull},
            {"V_DC", wp.V_DC},
            {"couplings_source", wp.couplings_source == CouplingSource::Direct ? "Direct" : "Physical"},
            {"omega_m_squared_terms",
             {{"bare", wp.omega_m_terms.bare},
              {"radiation", wp.omega_m_terms.radiation},
              {"electrostatic", wp.omega_m_terms.electrostatic}}}};
  emit(opt, "workpoint.json", with_header(j, p, opt).dump(2) + "\n");
  return kOk;
}

int cmd_stability(const Options& opt) {
  const auto p = parse_parameter_set(load_config(opt));
  const auto dc = derive_constants(p);
  const auto wp = working_point(p);
  const auto rep = stability(drift_matrix(wp, p, dc));
  std::ostringstream csv;
  csv << "index,real_rad_s,imag_rad_s\n";
  for (int i = 0; i < 6; ++i)
    csv << i << ',' << format_number(rep.eigenvalues[i].real()) << ','
        << format_number(rep.eigenvalues[i].imag()) << '\n';
  emit(opt, "stability.csv", csv.str());
  emit_sidecar(opt, "stability.json",
               with_header({{"stable", rep.stable}, {"margin", rep.margin}, {"tolerance", rep.tolerance}}, p, opt));
  return rep.stable ? kOk : kInstability;
}

int cmd_steady(const Options& opt) {
  const auto p = parse_parameter_set(load_config(opt));
  const auto s = steady_state(p);
  const double eta = cooling_efficiency(p, s.n_lc_eff);
  json V = json::array();
  for (int i = 0; i < 6; ++i) {
    json row = json::array();
    for (int k = 0; k < 6; ++k) row.push_back(s.covariance.V(i, k));
    V.push_back(row);
  }
  json j = {{"n_lc_eff", s.n_lc_eff},
            {"n_m_eff", s.n_m_eff},
            {"eta", eta},
            {"residual_norm", s.covariance.residual_norm},
            {"stability_margin", s.stability.margin},
            {"omega_m", s.working.omega_m},
            {"G", s.working.G},
            {"g", s.working.g},
            {"V", V}};
  emit(opt, "steady.json", with_header(j, p, opt).dump(2) + "\n");
  if (!opt.out.empty()) {
    std::ostringstream csv;
    csv << "dx,dp,dq,dphi,dX,dY\n";
    for (int i = 0; i < 6; ++i)
      for (int k = 0; k < 6; ++k) csv << format_number(s.covariance.V(i, k)) << (k == 5 ? '\n' : ',');
    emit(opt, "covariance.csv", csv.str());
  }
  return kOk;
}

LinearRates rates_for(const ParameterSet& p, WorkingPoint& wp_out, DerivedConstants& dc_out) {
  dc_out = derive_constants(p);
  wp_out = working_point(p);
  const auto r = linear_rates(p, dc_out, wp_out);
  const auto rep = stability(drift_matrix(r));
  if (!rep.stable) throw InstabilityError("the working point is not stable; spectra are undefined");
  return r;
}

int cmd_spectrum(const Options& opt) {
  const auto doc = load_config(opt);
  const auto p = parse_parameter_set(doc);
  std::map<std::string, double> extra = {{"S_imp_C", 0.0}, {"S_imp_L", 0.0}};
  const auto grid = read_grid(doc, "spectrum", p, extra);
  WorkingPoint wp;
  DerivedConstants dc;
  const auto r = rates_for(p, wp, dc);
  const VoltageCalibration cal{dc.q_zpf, wp.C_at_xs};

  std::ostringstream csv;
  csv << "omega_rad_s,S_dq,S_dVC,S_dVL,abs_chi_LC_eff,abs_chi_mc\n";
  for (double w : grid.omega) {
    const auto s = spectrum_sample(r, cal, w, extra["S_imp_C"], extra["S_imp_L"]);
    csv << format_number(w) << ',' << format_number(s.S_dq) << ',' << format_number(s.S_dVC) << ','
        << format_number(s.S_dVL) << ',' << format_number(std::abs(s.effective.chi_LC_eff)) << ','
        << format_number(std::abs(s.effective.chi_mc)) << '\n';
  }
  emit(opt, "spectrum.csv", csv.str());

  json summary = {{"volts_squared_per_unit", cal.volts_squared()}};
  const auto var = integrate_spectrum(r);
  summary["var_q"] = var.var_q;
  summary["var_phi"] = var.var_phi;
  if (r.g == 0.0 || r.G != 0.0) {
    const auto lor = lorentzian_params(r);
    const double peak = spectrum_peak(r);
    summary["omega_LC_eff"] = lor.omega_LC_eff;
    summary["gamma_LC_eff"] = lor.gamma_LC_eff;
    summary["S_dq_peak"] = peak;
    summary["S_dq_peak_volts"] = cal.volts_squared() * peak;
    summary["S_dq_at_omegaLC"] = charge_noise_spectrum(r, r.omegaLC);
    const double s_imp = std::max(extra["S_imp_C"], extra["S_imp_L"]);
    const double margin = detectability(r, cal, s_imp);
    summary["detectability_margin"] = std::isinf(margin) ? json("inf") : json(margin);
    summary["detectable"] = margin > kDetectableMargin;
  }
  emit_sidecar(opt, "spectrum.json", with_header(summary, p, opt));
  return kOk;
}

int cmd_probe(const Options& opt) {
  const auto doc = load_config(opt);
  const auto p = parse_parameter_set(doc);
  std::map<std::string, double> extra = {{"V_AC", 1e-6}};
  const auto grid = read_grid(doc, "probe", p, extra);
  WorkingPoint wp;
  DerivedConstants dc;
  const auto r = rates_for(p, wp, dc);
  const double v_ac = extra["V_AC"];

  std::ostringstream csv;
  csv << "omega_rad_s,V_AC_volts,V_AC_scaled,delta_q_re,delta_q_im,abs_delta_q\n";
  for (double w : grid.omega) {
    const auto dq = ac_response(r, w, v_ac, dc.phi_zpf);
    csv << format_number(w) << ',' << format_number(v_ac) << ',' << format_number(v_ac / dc.phi_zpf)
        << ',' << format_number(dq.real()) << ',' << format_number(dq.imag()) << ','
        << format_number(std::abs(dq)) << '\n';
  }
  emit(opt, "probe.csv", csv.str());
  if (r.g == 0.0 || r.G != 0.0) {
    const auto lor = lorentzian_params(r);
    emit_sidecar(opt, "probe.json",
                 with_header({{"gamma_LC", r.gamma_LC},
                              {"gamma_LC_eff", lor.gamma_LC_eff},
                              {"omega_LC_eff", lor.omega_LC_eff},
                              {"indirect_occupancy", indirect_occupancy(r.gamma_LC, lor.gamma_LC_eff, r.nbar_LC)}},
                             p, opt));
  }
  return kOk;
}

int cmd_sideband(const Options& opt) {
  const auto p = parse_parameter_set(load_config(opt));
  const auto dc = derive_constants(p);
  const auto wp = working_point(p);
  const auto r = linear_rates(p, dc, wp);
  const auto c = cooling_rates(r.G, r.g, r.kappa, r.Delta, r.omega_m, r.gamma_m, r.omegaLC, r.gamma_LC,
                               r.nbar_m, r.nbar_LC);
  const bool renormalized = wp.omega_m != p.mechanics.omega0;
  json j = {{"A_plus", c.optical.A_plus},
            {"A_minus", c.optical.A_minus},
            {"Gamma_m", c.optical.Gamma_m},
            {"gamma_m_eff", c.optical.gamma_m_eff},
            {"A_plus_LC", c.lc.A_plus},
            {"A_minus_LC", c.lc.A_minus},
            {"Gamma_LC", c.lc.Gamma_LC},
            {"gamma_LC_eff", c.lc.gamma_LC_eff},
            {"C_om", c.coop.C_om},
            {"C_em", c.coop.C_em},
            {"regime_ok", c.coop.regime_ok},
            {"n_m_eff_approx", c.n_m_eff},
            {"n_lc_eff_approx", c.n_lc_eff},
            {"omega_m_used", c.omega_m_used},
            {"omega_m_source", renormalized ? "renormalized" : "omega0"}};
  emit(opt, "sideband.json", with_header(j, p, opt).dump(2) + "\n");
  return kOk;
}

int cmd_sweep(const Options& opt) {
  const auto doc = load_config(opt);
  if (!doc.contains("sweep")) throw ConfigError("the configuration has no 'sweep' section");
  const auto spec = parse_sweep_spec(doc.at("sweep"));
  const auto records = run_sweep(doc, spec, thread_count(opt));
  std::ostringstream csv;
  write_sweep_csv(csv, spec, records);
  emit(opt, "sweep.csv", csv.str());
  json side = {{"config", doc}, {"sweep", to_json(spec)}};
  side["provenance"] = provenance(parse_parameter_set(sweep_point_config(doc, spec, sweep_point(spec, 0))));
  if (!opt.no_timestamp) side["generated_at"] = utc_timestamp();
  emit_sidecar(opt, "sweep.json", side);
  return kOk;
}

int cmd_figure(const Options& opt) {
  std::vector<std::string> ids;
  if (opt.figure == "all")
    ids = figure_ids();
  else
    ids = {opt.figure};
  for (const auto& id : ids) figure_definition(id);  // validate before running
  const std::string stamp = opt.no_timestamp ? std::string() : utc_timestamp();
  const fs::path dir = opt.out.empty() ? fs::path(".") : fs::path(opt.out);
  for (const auto& id : ids) {
    const auto files = reproduce_figure(id, dir, thread_count(opt), stamp);
    std::cerr << id << ": " << files.csv.string() << " (" << files.records.size() << " points)\n";
  }
  return kOk;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const InstabilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInstability;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Working point, steady state, spectra and sweeps of a cavity / membrane / LC cooling setup",
               "lc-cooldown"};
  app.require_subcommand(1);
  Options opt;
  auto common = [&opt](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "JSON configuration file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (default: stdout)");
    sub->add_option("--threads", opt.threads, "worker threads for sweeps (default: all cores)");
    sub->add_flag("--no-header-timestamp", opt.no_timestamp, "omit the generation timestamp");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const std::vector<Command> commands = {
      {"workpoint", "classical working point and couplings (JSON)", cmd_workpoint},
      {"stability", "eigenvalues of the drift matrix (CSV)", cmd_stability},
      {"steady", "stationary covariance matrix and occupancies", cmd_steady},
      {"spectrum", "charge and voltage noise spectra (CSV)", cmd_spectrum},
      {"probe", "response to an AC voltage drive (CSV)", cmd_probe},
      {"sideband", "approximate sideband-cooling rates (JSON)", cmd_sideband},
      {"sweep", "one- or two-axis parameter sweep (CSV)", cmd_sweep},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    common(sub, true);
    sub->callback([&selected, run = c.run] { selected = run; });
  }
  auto* fig = app.add_subcommand("figure", "datasets of the published figures (CSV + JSON sidecar)");
  common(fig, false);
  fig->add_option("id", opt.figure, "figure id: fig2, fig3a..fig3d, fig4a, fig4b, or all");
  fig->callback([&selected] { selected = cmd_figure; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  return guarded([&] { return selected(opt); });
}
