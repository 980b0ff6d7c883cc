#pragma once

// Parameter sweeps over one or two configuration fields. Every grid point is
// an independent computation; points that are unstable or past pull-in are
// tagged and kept.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "lc_cooldown/config.hpp"
#include "lc_cooldown/sideband.hpp"
#include "lc_cooldown/steady_state.hpp"

namespace lcc {

enum class SweepOutput {
  n_lc_eff,
  n_m_eff,
  eta,
  stability_margin,
  C_om,
  C_em,
  approx_n_lc_eff,
  g_rad_s,
  G_rad_s,
  omega_m_rad_s,
  V_DC,
  x_s,
};

inline const std::vector<std::pair<SweepOutput, std::string>>& sweep_output_names() {
  static const std::vector<std::pair<SweepOutput, std::string>> names = {
      {SweepOutput::n_lc_eff, "n_lc_eff"},
      {SweepOutput::n_m_eff, "n_m_eff"},
      {SweepOutput::eta, "eta"},
      {SweepOutput::stability_margin, "stability_margin"},
      {SweepOutput::C_om, "C_om"},
      {SweepOutput::C_em, "C_em"},
      {SweepOutput::approx_n_lc_eff, "approx_n_lc_eff"},
      {SweepOutput::g_rad_s, "g_rad_s"},
      {SweepOutput::G_rad_s, "G_rad_s"},
      {SweepOutput::omega_m_rad_s, "omega_m_rad_s"},
      {SweepOutput::V_DC, "V_DC"},
      {SweepOutput::x_s, "x_s"},
  };
  return names;
}

inline const std::string& to_string(SweepOutput o) {
  for (const auto& [key, name] : sweep_output_names())
    if (key == o) return name;
  throw ConfigError("unknown sweep output");
}

inline SweepOutput parse_sweep_output(const std::string& name) {
  for (const auto& [key, n] : sweep_output_names())
    if (n == name) return key;
  throw ConfigError("unknown sweep output '" + name + "'");
}

struct SweepAxis {
  std::string parameter_path;
  std::vector<double> values;
};

struct SweepSpec {
  std::vector<SweepAxis> axes;
  std::vector<SweepOutput> outputs;
  std::optional<std::string> mode;  // "Physical" or "Direct"; overrides coupling_mode.type
};

enum class PointStatus { ok, unstable, pull_in, numerical, invalid };

inline const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::unstable: return "unstable";
    case PointStatus::pull_in: return "pull_in";
    case PointStatus::numerical: return "numerical";
    case PointStatus::invalid: return "invalid";
  }
  return "invalid";
}

struct SweepRecord {
  std::vector<double> axis_values;
  std::vector<double> outputs;  // NaN where not computed
  PointStatus status = PointStatus::ok;
  std::string message;
};

/// Evenly spaced grid, linear or logarithmic; endpoints are exact.
inline std::vector<double> make_grid(double min, double max, std::size_t count,
                                     const std::string& spacing) {
  if (count == 0) throw ConfigError("sweep axis count must be >= 1");
  if (!std::isfinite(min) || !std::isfinite(max)) throw ConfigError("sweep axis bounds must be finite");
  const bool log = spacing == "log";
  if (!log && spacing != "linear")
    throw ConfigError("sweep axis spacing must be \"linear\" or \"log\"");
  if (log && !(min > 0.0 && max > 0.0)) throw ConfigError("log-spaced sweep axis needs min, max > 0");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = min;
    return v;
  }
  const double a = log ? std::log10(min) : min;
  const double b = log ? std::log10(max) : max;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = a + (b - a) * double(i) / double(count - 1);
    v[i] = log ? std::pow(10.0, t) : t;
  }
  v.front() = min;
  v.back() = max;
  return v;
}

/// Reads the "sweep" section: {axes: [...], outputs: [...], mode?}.
inline SweepSpec parse_sweep_spec(const json& j) {
  using config_detail::ObjectReader;
  ObjectReader r(j, "sweep");
  SweepSpec spec;
  if (!r.has("axes") || !j.at("axes").is_array()) throw ConfigError("sweep.axes must be an array");
  for (const auto& a : j.at("axes")) {
    ObjectReader ar(a, "sweep.axes[]");
    SweepAxis axis;
    axis.parameter_path = ar.string("parameter_path");
    check_parameter_path(axis.parameter_path);
    if (ar.has("values")) {
      if (ar.has("min") || ar.has("max") || ar.has("count") || ar.has("spacing"))
        throw ConfigError("sweep axis '" + axis.parameter_path + "': give values or a range, not both");
      const auto& vals = a.at("values");
      if (!vals.is_array() || vals.empty())
        throw ConfigError("sweep axis '" + axis.parameter_path + "': values must be a non-empty array");
      for (const auto& v : vals) {
        if (!v.is_number()) throw ConfigError("sweep axis values must be numbers");
        axis.values.push_back(v.get<double>());
      }
      ar.mark_used("values");
    } else {
      const double min = ar.number("min");
      const double max = ar.number("max");
      const double count = ar.number("count");
      if (!(count >= 1.0) || count != std::floor(count))
        throw ConfigError("sweep axis count must be a positive integer");
      const std::string spacing = ar.has("spacing") ? ar.string("spacing") : "linear";
      axis.values = make_grid(min, max, std::size_t(count), spacing);
    }
    ar.finish();
    spec.axes.push_back(std::move(axis));
  }
  if (spec.axes.empty() || spec.axes.size() > 2) throw ConfigError("a sweep needs 1 or 2 axes");
  if (!r.has("outputs") || !j.at("outputs").is_array() || j.at("outputs").empty())
    throw ConfigError("sweep.outputs must be a non-empty array");
  for (const auto& o : j.at("outputs")) {
    if (!o.is_string()) throw ConfigError("sweep.outputs entries must be strings");
    spec.outputs.push_back(parse_sweep_output(o.get<std::string>()));
  }
  r.mark_used("axes");
  r.mark_used("outputs");
  if (r.has("mode")) {
    spec.mode = r.string("mode");
    if (*spec.mode != "Physical" && *spec.mode != "Direct")
      throw ConfigError("sweep.mode must be \"Physical\" or \"Direct\"");
  }
  r.finish();
  return spec;
}

inline json to_json(const SweepSpec& spec) {
  json j;
  j["axes"] = json::array();
  for (const auto& a : spec.axes) j["axes"].push_back({{"parameter_path", a.parameter_path}, {"values", a.values}});
  j["outputs"] = json::array();
  for (auto o : spec.outputs) j["outputs"].push_back(to_string(o));
  if (spec.mode) j["mode"] = *spec.mode;
  return j;
}

namespace sweep_detail {

inline bool needs_steady_state(const std::vector<SweepOutput>& outs) {
  for (auto o : outs)
    switch (o) {
      case SweepOutput::n_lc_eff:
      case SweepOutput::n_m_eff:
      case SweepOutput::eta:
      case SweepOutput::stability_margin:
        return true;
      default:
        break;
    }
  return false;
}

inline bool needs_rates(const std::vector<SweepOutput>& outs) {
  for (auto o : outs)
    if (o == SweepOutput::C_om || o == SweepOutput::C_em || o == SweepOutput::approx_n_lc_eff)
      return true;
  return needs_steady_state(outs);
}

}  // namespace sweep_detail

/// Requested outputs at one parameter point. Throws the library's errors.
inline std::vector<double> evaluate_outputs(const ParameterSet& p,
                                            const std::vector<SweepOutput>& outs) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values(outs.size(), nan);
  const auto dc = derive_constants(p);
  const auto wp = working_point(p);
  std::optional<SteadyState> ss;
  if (sweep_detail::needs_steady_state(outs)) ss = steady_state(p);
  std::optional<CoolingRates> cr;
  if (sweep_detail::needs_rates(outs)) {
    const auto r = linear_rates(p, dc, wp);
    cr = cooling_rates(r.G, r.g, r.kappa, r.Delta, r.omega_m, r.gamma_m, r.omegaLC, r.gamma_LC,
                       r.nbar_m, r.nbar_LC);
  }
  for (std::size_t i = 0; i < outs.size(); ++i) {
    switch (outs[i]) {
      case SweepOutput::n_lc_eff: values[i] = ss->n_lc_eff; break;
      case SweepOutput::n_m_eff: values[i] = ss->n_m_eff; break;
      case SweepOutput::eta: values[i] = cooling_efficiency(p, ss->n_lc_eff); break;
      case SweepOutput::stability_margin: values[i] = ss->stability.margin; break;
      case SweepOutput::C_om: values[i] = cr->coop.C_om; break;
      case SweepOutput::C_em: values[i] = cr->coop.C_em; break;
      case SweepOutput::approx_n_lc_eff: values[i] = cr->n_lc_eff; break;
      case SweepOutput::g_rad_s: values[i] = wp.g; break;
      case SweepOutput::G_rad_s: values[i] = wp.G; break;
      case SweepOutput::omega_m_rad_s: values[i] = wp.omega_m; break;
      case SweepOutput::V_DC: values[i] = wp.V_DC; break;
      case SweepOutput::x_s: values[i] = wp.x_s; break;
    }
  }
  return values;
}

inline std::size_t sweep_size(const SweepSpec& spec) {
  std::size_t n = 1;
  for (const auto& a : spec.axes) n *= a.values.size();
  return n;
}

/// Axis values of the i-th point in row-major order (last axis fastest).
inline std::vector<double> sweep_point(const SweepSpec& spec, std::size_t index) {
  std::vector<double> v(spec.axes.size());
  for (std::size_t k = spec.axes.size(); k-- > 0;) {
    const auto n = spec.axes[k].values.size();
    v[k] = spec.axes[k].values[index % n];
    index /= n;
  }
  return v;
}

/// Configuration document of one grid point.
inline json sweep_point_config(const json& base, const SweepSpec& spec, const std::vector<double>& at) {
  json doc = base;
  doc.erase("sweep");
  if (spec.mode) {
    if (*spec.mode != doc["coupling_mode"].value("type", std::string()))
      doc["coupling_mode"] = {{"type", *spec.mode}};
  }
  for (std::size_t k = 0; k < spec.axes.size(); ++k) set_parameter(doc, spec.axes[k].parameter_path, at[k]);
  return doc;
}

inline SweepRecord evaluate_sweep_point(const json& base, const SweepSpec& spec, std::size_t index) {
  SweepRecord rec;
  rec.axis_values = sweep_point(spec, index);
  rec.outputs.assign(spec.outputs.size(), std::numeric_limits<double>::quiet_NaN());
  try {
    const auto p = parse_parameter_set(sweep_point_config(base, spec, rec.axis_values));
    rec.outputs = evaluate_outputs(p, spec.outputs);
  } catch (const PullInError& e) {
    rec.status = PointStatus::pull_in;
    rec.message = e.what();
  } catch (const InstabilityError& e) {
    rec.status = PointStatus::unstable;
    rec.message = e.what();
  } catch (const NumericalError& e) {
    rec.status = PointStatus::numerical;
    rec.message = e.what();
  } catch (const Error& e) {
    rec.status = PointStatus::invalid;
    rec.message = e.what();
  }
  return rec;
}

/// Evaluates every grid point on `threads` workers; the result is in row-major
/// order and independent of the thread count.
inline std::vector<SweepRecord> run_sweep(const json& base, const SweepSpec& spec, unsigned threads = 1) {
  if (spec.axes.empty() || spec.axes.size() > 2) throw ConfigError("a sweep needs 1 or 2 axes");
  for (const auto& a : spec.axes) {
    check_parameter_path(a.parameter_path);
    if (a.values.empty()) throw ConfigError("sweep axis '" + a.parameter_path + "' has no values");
  }
  // Fail on a malformed base document before any computation.
  parse_parameter_set(sweep_point_config(base, spec, sweep_point(spec, 0)));

  const std::size_t n = sweep_size(spec);
  std::vector<SweepRecord> records(n);
  threads = std::max(1u, std::min<unsigned>(threads, unsigned(n)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) records[i] = evaluate_sweep_point(base, spec, i);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

/// Scientific notation with 9 significant digits, locale independent.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

inline void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                            const std::vector<SweepRecord>& records) {
  for (const auto& a : spec.axes) out << a.parameter_path << ',';
  for (auto o : spec.outputs) out << to_string(o) << ',';
  out << "status\n";
  for (const auto& r : records) {
    for (double v : r.axis_values) out << format_number(v) << ',';
    for (double v : r.outputs) out << format_number(v) << ',';
    out << to_string(r.status) << '\n';
  }
}

}  // namespace lcc
