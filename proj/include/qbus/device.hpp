#pragma once
// Physical device parameters and config-file ingestion.
//
// Frequencies and couplings in the config are ordinary (nu = omega/2pi)
// values in GHz/MHz as labeled, times in us. Conversion to angular units
// happens once, at Hamiltonian construction.

#include <qbus/common.hpp>

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>

namespace qbus {

struct ModeParams {
  double frequency_ghz = 0.0;
  double t1_us = 0.0;
  double t2_star_us = 0.0;
  double n_th = 0.0;
  double self_kerr_mhz = 0.0;  // negative for a softening nonlinearity
  std::string label;
};

struct CouplingParams {
  double chi_transmon_cavity_mhz[2] = {0.0, 0.0};
  double chi_snail_cavity_mhz[2] = {0.0, 0.0};
  double g_snail_bus_mhz[2] = {0.0, 0.0};
  // Lumped pump-induced dephasing of the beamsplitter process, 1/us.
  double bus_pure_dephasing_rate_per_us = 1.0 / 38.0;
};

struct SnailParams {
  double beta = 0.0;  // small/large junction Josephson-energy ratio
  double e_j_ghz = 0.0;
  double e_l_ghz = 0.0;
  double e_c_mhz = 0.0;
};

struct ReadoutParams {
  double f_g = 1.0;
  double f_e = 1.0;
};

// Default pump settings bundled with a device file; CLI flags override.
struct PumpDefaults {
  double g_bs_mhz = 0.5;
  double delta_mhz = 0.0;
  double ramp_ns = 50.0;
  double stark_coeff_mhz = 0.0;
  double phase_rad = 0.0;
};

struct DeviceConfig {
  ModeParams module1, module2, bus;
  CouplingParams couplings;
  SnailParams snail1, snail2;
  ReadoutParams readout1, readout2;
  std::optional<PumpDefaults> pump_defaults;
};

// 1/T_phi = 1/T2* - 1/(2 T1), clipped at zero. 1/us.
inline double pure_dephasing_rate(const ModeParams& mode) {
  return std::max(0.0, 1.0 / mode.t2_star_us - 1.0 / (2.0 * mode.t1_us));
}

inline double bus_pure_dephasing_rate(const DeviceConfig& config) {
  return config.couplings.bus_pure_dephasing_rate_per_us;
}

namespace detail {

inline double get_number(const nlohmann::json& j, const std::string& path,
                         const std::string& key) {
  if (!j.contains(key))
    throw ConfigError(path + "." + key + ": missing field");
  if (!j[key].is_number())
    throw ConfigError(path + "." + key + ": expected a number");
  return j[key].get<double>();
}

inline void check_mode(const ModeParams& m, const std::string& path) {
  if (m.t1_us <= 0.0) throw ConfigError(path + ".t1_us: must be > 0");
  if (m.t2_star_us <= 0.0)
    throw ConfigError(path + ".t2_star_us: must be > 0");
  if (m.n_th < 0.0 || m.n_th >= 1.0)
    throw ConfigError(path + ".n_th: must be in [0, 1)");
  if (m.t2_star_us > 2.0 * m.t1_us + 1e-9)
    throw ConfigError(path + ".t2_star_us: exceeds 2*t1 (unphysical pure "
                             "dephasing)");
}

inline ModeParams parse_mode(const nlohmann::json& j, const std::string& path) {
  ModeParams m;
  m.frequency_ghz = get_number(j, path, "frequency_ghz");
  m.t1_us = get_number(j, path, "t1_us");
  m.t2_star_us = get_number(j, path, "t2_star_us");
  m.n_th = get_number(j, path, "n_th");
  m.self_kerr_mhz = get_number(j, path, "self_kerr_mhz");
  m.label = j.value("label", path);
  check_mode(m, path);
  return m;
}

inline void parse_pair(const nlohmann::json& j, const std::string& path,
                       const std::string& key, double out[2]) {
  if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing field");
  const auto& arr = j[key];
  if (!arr.is_array() || arr.size() != 2)
    throw ConfigError(path + "." + key + ": expected [module1, module2]");
  out[0] = arr[0].get<double>();
  out[1] = arr[1].get<double>();
}

inline SnailParams parse_snail(const nlohmann::json& j,
                               const std::string& path) {
  SnailParams s;
  s.beta = get_number(j, path, "beta");
  s.e_j_ghz = get_number(j, path, "e_j_ghz");
  s.e_l_ghz = get_number(j, path, "e_l_ghz");
  s.e_c_mhz = get_number(j, path, "e_c_mhz");
  if (s.beta <= 0.0 || s.beta >= 1.0)
    throw ConfigError(path + ".beta: must be in (0, 1)");
  if (s.e_j_ghz <= 0.0 || s.e_l_ghz <= 0.0 || s.e_c_mhz <= 0.0)
    throw ConfigError(path + ": all energies must be positive");
  return s;
}

inline ReadoutParams parse_readout(const nlohmann::json& j,
                                   const std::string& path) {
  ReadoutParams r;
  r.f_g = get_number(j, path, "f_g");
  r.f_e = get_number(j, path, "f_e");
  if (r.f_g <= 0.0 || r.f_g > 1.0 || r.f_e <= 0.0 || r.f_e > 1.0)
    throw ConfigError(path + ": fidelities must be in (0, 1]");
  if (r.f_g + r.f_e <= 1.0)
    throw ConfigError(path + ": f_g + f_e must exceed 1 (invertibility)");
  return r;
}

}  // namespace detail

inline DeviceConfig parse_config(const nlohmann::json& j) {
  DeviceConfig c;
  for (const char* key :
       {"module1", "module2", "bus", "couplings", "snail1", "snail2",
        "readout1", "readout2"}) {
    if (!j.contains(key))
      throw ConfigError(std::string(key) + ": missing section");
  }
  c.module1 = detail::parse_mode(j["module1"], "module1");
  c.module2 = detail::parse_mode(j["module2"], "module2");
  c.bus = detail::parse_mode(j["bus"], "bus");

  const auto& cj = j["couplings"];
  detail::parse_pair(cj, "couplings", "chi_transmon_cavity_mhz",
                     c.couplings.chi_transmon_cavity_mhz);
  detail::parse_pair(cj, "couplings", "chi_snail_cavity_mhz",
                     c.couplings.chi_snail_cavity_mhz);
  detail::parse_pair(cj, "couplings", "g_snail_bus_mhz",
                     c.couplings.g_snail_bus_mhz);
  c.couplings.bus_pure_dephasing_rate_per_us =
      detail::get_number(cj, "couplings", "bus_pure_dephasing_rate_per_us");
  for (double v : {c.couplings.chi_transmon_cavity_mhz[0],
                   c.couplings.chi_transmon_cavity_mhz[1],
                   c.couplings.chi_snail_cavity_mhz[0],
                   c.couplings.chi_snail_cavity_mhz[1],
                   c.couplings.g_snail_bus_mhz[0],
                   c.couplings.g_snail_bus_mhz[1]}) {
    if (std::abs(v) >= 1000.0)
      throw ConfigError("couplings: magnitude exceeds 1 GHz sanity bound");
  }
  if (c.couplings.bus_pure_dephasing_rate_per_us < 0.0)
    throw ConfigError("couplings.bus_pure_dephasing_rate_per_us: negative");

  c.snail1 = detail::parse_snail(j["snail1"], "snail1");
  c.snail2 = detail::parse_snail(j["snail2"], "snail2");
  c.readout1 = detail::parse_readout(j["readout1"], "readout1");
  c.readout2 = detail::parse_readout(j["readout2"], "readout2");

  if (j.contains("pump_defaults")) {
    const auto& pj = j["pump_defaults"];
    PumpDefaults p;
    p.g_bs_mhz = detail::get_number(pj, "pump_defaults", "g_bs_mhz");
    p.delta_mhz = detail::get_number(pj, "pump_defaults", "delta_mhz");
    p.ramp_ns = detail::get_number(pj, "pump_defaults", "ramp_ns");
    p.stark_coeff_mhz =
        detail::get_number(pj, "pump_defaults", "stark_coeff_mhz");
    p.phase_rad = detail::get_number(pj, "pump_defaults", "phase_rad");
    if (p.g_bs_mhz < 0.0 || p.ramp_ns < 0.0)
      throw ConfigError("pump_defaults: g_bs and ramp must be >= 0");
    c.pump_defaults = p;
  }
  return c;
}

inline DeviceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

inline nlohmann::json config_to_json(const DeviceConfig& c) {
  nlohmann::json j;
  auto mode_json = [](const ModeParams& m) {
    return nlohmann::json{{"frequency_ghz", m.frequency_ghz},
                          {"t1_us", m.t1_us},
                          {"t2_star_us", m.t2_star_us},
                          {"n_th", m.n_th},
                          {"self_kerr_mhz", m.self_kerr_mhz},
                          {"label", m.label}};
  };
  j["module1"] = mode_json(c.module1);
  j["module2"] = mode_json(c.module2);
  j["bus"] = mode_json(c.bus);
  j["couplings"] = {
      {"chi_transmon_cavity_mhz",
       {c.couplings.chi_transmon_cavity_mhz[0],
        c.couplings.chi_transmon_cavity_mhz[1]}},
      {"chi_snail_cavity_mhz",
       {c.couplings.chi_snail_cavity_mhz[0],
        c.couplings.chi_snail_cavity_mhz[1]}},
      {"g_snail_bus_mhz",
       {c.couplings.g_snail_bus_mhz[0], c.couplings.g_snail_bus_mhz[1]}},
      {"bus_pure_dephasing_rate_per_us",
       c.couplings.bus_pure_dephasing_rate_per_us}};
  auto snail_json = [](const SnailParams& s) {
    return nlohmann::json{{"beta", s.beta},
                          {"e_j_ghz", s.e_j_ghz},
                          {"e_l_ghz", s.e_l_ghz},
                          {"e_c_mhz", s.e_c_mhz}};
  };
  j["snail1"] = snail_json(c.snail1);
  j["snail2"] = snail_json(c.snail2);
  j["readout1"] = {{"f_g", c.readout1.f_g}, {"f_e", c.readout1.f_e}};
  j["readout2"] = {{"f_g", c.readout2.f_g}, {"f_e", c.readout2.f_e}};
  if (c.pump_defaults) {
    j["pump_defaults"] = {{"g_bs_mhz", c.pump_defaults->g_bs_mhz},
                          {"delta_mhz", c.pump_defaults->delta_mhz},
                          {"ramp_ns", c.pump_defaults->ramp_ns},
                          {"stark_coeff_mhz", c.pump_defaults->stark_coeff_mhz},
                          {"phase_rad", c.pump_defaults->phase_rad}};
  }
  return j;
}

inline void save_config(const DeviceConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << config_to_json(c).dump(2) << "\n";
}

}  // namespace qbus
