#pragma once

// JSON ingestion and emission of ParameterSet.
//
// Frequencies may be given either in rad/s under the plain field name or in Hz
// under the same name suffixed `_hz`; Direct-mode couplings additionally accept
// `_over_kappa`. Unknown fields anywhere in the document are rejected.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lc_cooldown/constants.hpp"
#include "lc_cooldown/errors.hpp"
#include "lc_cooldown/params.hpp"

namespace lcc {

using json = nlohmann::json;

namespace config_detail {

/// Reads fields of one JSON object, remembering which keys were consumed.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string section) : obj_(obj), section_(std::move(section)) {
    if (!obj_.is_object()) throw ConfigError("'" + section_ + "' must be a JSON object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    return v.get<double>();
  }

  bool boolean(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  /// A frequency given as `key` (rad/s) or `key_hz` (Hz); never both.
  std::optional<double> frequency(const std::string& key) {
    const bool rad = has(key);
    const bool hz = has(key + "_hz");
    if (rad && hz) throw ConfigError(where(key) + " given both in rad/s and in Hz");
    if (rad) return number(key);
    if (hz) return constants::two_pi * number(key + "_hz");
    return std::nullopt;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  double required_number(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required field " + where(key));
    return number(key);
  }

  double required_frequency(const std::string& key) {
    auto f = frequency(key);
    if (!f) throw ConfigError("missing required field " + where(key) + " (or " + key + "_hz)");
    return *f;
  }

  void mark_used(const std::string& key) { used_.insert(key); }

  /// Throws on any key that was not consumed.
  void finish() const {
    for (const auto& [key, _] : obj_.items())
      if (!used_.count(key)) throw ConfigError("unknown field " + where(key));
  }

  std::string where(const std::string& key) const { return "'" + section_ + "." + key + "'"; }

 private:
  const json& get(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required field " + where(key));
    used_.insert(key);
    return obj_.at(key);
  }

  const json& obj_;
  std::string section_;
  std::set<std::string> used_;
};

inline const json& section(const json& doc, const char* name) {
  if (!doc.contains(name)) throw ConfigError(std::string("missing required section '") + name + "'");
  return doc.at(name);
}

}  // namespace config_detail

/// Top-level sections a configuration document may contain.
inline const std::set<std::string>& known_sections() {
  static const std::set<std::string> names = {"optics", "mechanics", "circuit", "drives", "baths",
                                              "coupling_mode", "solver", "spectrum", "probe",
                                              "sweep"};
  return names;
}

/// Builds and validates a ParameterSet from a configuration document.
inline ParameterSet parse_parameter_set(const json& doc) {
  using config_detail::ObjectReader;
  using config_detail::section;
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (!known_sections().count(key)) throw ConfigError("unknown top-level field '" + key + "'");

  ParameterSet p;
  {
    ObjectReader r(section(doc, "optics"), "optics");
    auto& o = p.optics;
    o.wavelength_lambda = r.required_number("wavelength_lambda");
    o.cavity_length_Lc = r.required_number("cavity_length_Lc");
    o.finesse_F = r.required_number("finesse_F");
    o.kappa_in_fraction = r.required_number("kappa_in_fraction");
    o.membrane_reflectivity_Rm = r.required_number("membrane_reflectivity_Rm");
    o.overlap_Theta = r.optional_number("overlap_Theta").value_or(1.0);
    o.membrane_axial_position_z0 =
        r.optional_number("membrane_axial_position_z0").value_or(o.wavelength_lambda / 16.0);
    o.detuning_Delta = r.required_frequency("detuning_Delta");
    o.input_power_P = r.optional_number("input_power_P");
    r.finish();
  }
  {
    ObjectReader r(section(doc, "mechanics"), "mechanics");
    p.mechanics.mass_m = r.required_number("mass_m");
    p.mechanics.omega0 = r.required_frequency("omega0");
    p.mechanics.quality_Qm = r.required_number("quality_Qm");
    r.finish();
  }
  {
    ObjectReader r(section(doc, "circuit"), "circuit");
    auto& c = p.circuit;
    c.inductance_L = r.required_number("inductance_L");
    c.quality_QLC = r.required_number("quality_QLC");
    c.effective_area_Aeff = r.required_number("effective_area_Aeff");
    c.gap_h0 = r.required_number("gap_h0");
    c.tunable_capacitance_C0 = r.optional_number("tunable_capacitance_C0");
    auto w = r.frequency("omegaLC");
    if (c.tunable_capacitance_C0) {
      if (w) throw ConfigError("give either circuit.omegaLC or circuit.tunable_capacitance_C0, not both");
      detail::require_positive(*c.tunable_capacitance_C0, "circuit.tunable_capacitance_C0");
      detail::require_positive(c.inductance_L, "circuit.inductance_L");
      c.omegaLC = omega_lc_from_c0(c);
    } else {
      if (!w) throw ConfigError("missing required field 'circuit.omegaLC' (or omegaLC_hz)");
      c.omegaLC = *w;
    }
    r.finish();
  }
  if (doc.contains("drives")) {
    ObjectReader r(doc.at("drives"), "drives");
    p.drives.V_DC = r.optional_number("V_DC");
    r.finish();
  }
  {
    ObjectReader r(section(doc, "baths"), "baths");
    p.baths.T_mech = r.required_number("T_mech");
    p.baths.T_LC = r.required_number("T_LC");
    r.finish();
  }
  if (doc.contains("solver")) {
    ObjectReader r(doc.at("solver"), "solver");
    if (r.has("include_radiation")) p.solver.include_radiation = r.boolean("include_radiation");
    r.finish();
  }
  {
    ObjectReader r(section(doc, "coupling_mode"), "coupling_mode");
    const std::string type = r.has("type") ? r.string("type") : "";
    if (type == "Physical") {
      p.coupling_mode = PhysicalCoupling{};
    } else if (type == "Direct") {
      const double kappa = cavity_kappa(p.optics.cavity_length_Lc, p.optics.finesse_F);
      auto rate = [&](const std::string& key) {
        const int forms = int(r.has(key)) + int(r.has(key + "_hz")) + int(r.has(key + "_over_kappa"));
        if (forms != 1)
          throw ConfigError("Direct coupling mode needs exactly one of " + r.where(key) + ", " +
                            key + "_hz, " + key + "_over_kappa");
        if (r.has(key + "_over_kappa")) return kappa * r.number(key + "_over_kappa");
        return *r.frequency(key);
      };
      DirectCoupling d;
      d.G = rate("G");
      d.g = rate("g");
      if (r.has("apply_spring_shift")) d.apply_spring_shift = r.boolean("apply_spring_shift");
      p.coupling_mode = d;
    } else {
      throw ConfigError("'coupling_mode.type' must be \"Physical\" or \"Direct\"");
    }
    r.finish();
  }
  validate(p);
  return p;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

/// Canonical document (rad/s fields only); parse_parameter_set(to_json(p)) == p.
inline json to_json(const ParameterSet& p) {
  json doc;
  const auto& o = p.optics;
  doc["optics"] = {{"wavelength_lambda", o.wavelength_lambda},
                   {"cavity_length_Lc", o.cavity_length_Lc},
                   {"finesse_F", o.finesse_F},
                   {"kappa_in_fraction", o.kappa_in_fraction},
                   {"membrane_reflectivity_Rm", o.membrane_reflectivity_Rm},
                   {"overlap_Theta", o.overlap_Theta},
                   {"membrane_axial_position_z0", o.membrane_axial_position_z0},
                   {"detuning_Delta", o.detuning_Delta}};
  if (o.input_power_P) doc["optics"]["input_power_P"] = *o.input_power_P;
  doc["mechanics"] = {{"mass_m", p.mechanics.mass_m},
                      {"omega0", p.mechanics.omega0},
                      {"quality_Qm", p.mechanics.quality_Qm}};
  const auto& c = p.circuit;
  doc["circuit"] = {{"inductance_L", c.inductance_L},
                    {"quality_QLC", c.quality_QLC},
                    {"effective_area_Aeff", c.effective_area_Aeff},
                    {"gap_h0", c.gap_h0}};
  if (c.tunable_capacitance_C0)
    doc["circuit"]["tunable_capacitance_C0"] = *c.tunable_capacitance_C0;
  else
    doc["circuit"]["omegaLC"] = c.omegaLC;
  doc["drives"] = json::object();
  if (p.drives.V_DC) doc["drives"]["V_DC"] = *p.drives.V_DC;
  doc["baths"] = {{"T_mech", p.baths.T_mech}, {"T_LC", p.baths.T_LC}};
  doc["solver"] = {{"include_radiation", p.solver.include_radiation}};
  if (const auto* d = p.direct()) {
    doc["coupling_mode"] = {{"type", "Direct"},
                            {"G", d->G},
                            {"g", d->g},
                            {"apply_spring_shift", d->apply_spring_shift}};
  } else {
    doc["coupling_mode"] = {{"type", "Physical"}};
  }
  return doc;
}

inline json to_json(const DerivedConstants& dc) {
  return {{"kappa", dc.kappa},
          {"kappa_in", dc.kappa_in},
          {"kappa_ex", dc.kappa_ex},
          {"gamma_m", dc.gamma_m},
          {"gamma_LC", dc.gamma_LC},
          {"C_total_at_rest", dc.C_total_at_rest},
          {"C0", dc.C0},
          {"resistance_R", dc.resistance_R},
          {"x_zpf", dc.x_zpf},
          {"p_zpf", dc.p_zpf},
          {"q_zpf", dc.q_zpf},
          {"phi_zpf", dc.phi_zpf},
          {"nbar_m", dc.nbar_m},
          {"nbar_LC", dc.nbar_LC},
          {"omega_laser", dc.omega_laser},
          {"E_drive", dc.E_drive}};
}

/// Provenance block echoed by every output.
inline json provenance(const ParameterSet& p) {
  return {{"parameters", to_json(p)}, {"derived", to_json(derive_constants(p))}};
}

/// Fields of each section that a sweep axis may address. Alternative spellings
/// of the same quantity share one entry so that setting one removes the others.
inline const std::map<std::string, std::vector<std::vector<std::string>>>& addressable_fields() {
  static const std::map<std::string, std::vector<std::vector<std::string>>> table = {
      {"optics",
       {{"wavelength_lambda"}, {"cavity_length_Lc"}, {"finesse_F"}, {"kappa_in_fraction"},
        {"membrane_reflectivity_Rm"}, {"overlap_Theta"}, {"membrane_axial_position_z0"},
        {"detuning_Delta", "detuning_Delta_hz"}, {"input_power_P"}}},
      {"mechanics", {{"mass_m"}, {"omega0", "omega0_hz"}, {"quality_Qm"}}},
      {"circuit",
       {{"inductance_L"}, {"omegaLC", "omegaLC_hz", "tunable_capacitance_C0"}, {"quality_QLC"},
        {"effective_area_Aeff"}, {"gap_h0"}}},
      {"drives", {{"V_DC"}}},
      {"baths", {{"T_mech"}, {"T_LC"}}},
      {"coupling_mode", {{"G", "G_hz", "G_over_kappa"}, {"g", "g_hz", "g_over_kappa"}}},
  };
  return table;
}

/// Throws ConfigError unless `path` ("section.field") names an addressable field.
inline void check_parameter_path(const std::string& path) {
  const auto dot = path.find('.');
  if (dot == std::string::npos || path.find('.', dot + 1) != std::string::npos)
    throw ConfigError("parameter path '" + path + "' must have the form section.field");
  const auto sec = path.substr(0, dot);
  const auto field = path.substr(dot + 1);
  const auto it = addressable_fields().find(sec);
  if (it != addressable_fields().end())
    for (const auto& group : it->second)
      for (const auto& name : group)
        if (name == field) return;
  throw ConfigError("parameter path '" + path + "' does not resolve into the parameter set");
}

/// Sets a numeric field of a configuration document, dropping other spellings of it.
inline void set_parameter(json& doc, const std::string& path, double value) {
  check_parameter_path(path);
  const auto dot = path.find('.');
  const auto sec = path.substr(0, dot);
  const auto field = path.substr(dot + 1);
  for (const auto& group : addressable_fields().at(sec)) {
    if (std::find(group.begin(), group.end(), field) == group.end()) continue;
    if (doc.contains(sec))
      for (const auto& name : group) doc[sec].erase(name);
  }
  doc[sec][field] = value;
}

}  // namespace lcc
