#include "optomech/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <vector>

#include "optomech/constants.hpp"
#include "optomech/csv.hpp"
#include "optomech/errors.hpp"
#include "optomech/slab_optics.hpp"

namespace optomech {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      // mechanics
      "omega_m_hz", "q_factor", "gamma_m_hz", "mass_kg", "overlap",
      // bath
      "temperature_k", "quantum_occupation",
      // cavity
      "cavity_length_m", "finesse", "kappa0_hz", "kappa2_hz", "kappa_t_hz",
      // membrane
      "membrane_thickness_m", "membrane_n_real", "membrane_n_imag",
      "membrane_z0_m",
      // drive and probe
      "pump_power_w", "wavelength_m", "detuning_hz", "probe_power_w",
      "probe_kappa_hz", "probe_overlap",
      // dispersion
      "dispersion_mode", "delta0_hz", "domega_dz", "d2omega_dz2", "kappa1_hz",
      "dkappa1_dz", "target_g_over_omega_m", "target_h_over_omega_m",
      // solver and detection
      "solve_mode", "shot_floor_m_sqrt_hz",
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const ConfigMap& cfg) : cfg_(cfg) {}

  bool has(const std::string& key) const { return cfg_.count(key) != 0; }

  double number(const std::string& key) {
    const std::string& raw = at(key);
    const char* begin = raw.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
      fail(errc::bad_value, "key '" + key + "': not a finite number: '" + raw + "'");
    return v;
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  double positive(const std::string& key) {
    double v = number(key);
    if (!(v > 0.0))
      fail(errc::non_positive_value, "key '" + key + "' must be > 0, got " + at(key));
    return v;
  }

  double non_negative(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    double v = number(key);
    if (v < 0.0)
      fail(errc::non_positive_value, "key '" + key + "' must be >= 0, got " + at(key));
    return v;
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string& raw = at(key);
    if (raw == "1" || raw == "true") return true;
    if (raw == "0" || raw == "false") return false;
    fail(errc::bad_value, "key '" + key + "': expected 0/1/true/false, got '" + raw + "'");
  }

  std::string word(const std::string& key, const std::string& fallback) {
    return has(key) ? at(key) : fallback;
  }

 private:
  const std::string& at(const std::string& key) {
    auto it = cfg_.find(key);
    if (it == cfg_.end()) fail(errc::missing_key, "required key '" + key + "' not set");
    return it->second;
  }
  const ConfigMap& cfg_;
};

void require(const Reader& r, const std::string& key) {
  if (!r.has(key)) fail(errc::missing_key, "required key '" + key + "' not set");
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(errc::bad_value, "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      fail(errc::bad_value, "line " + std::to_string(lineno) + ": empty key or value");
    for (char c : key)
      if (!(std::islower(static_cast<unsigned char>(c)) ||
            std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
        fail(errc::bad_value, "line " + std::to_string(lineno) + ": bad key '" + key + "'");
    if (cfg.count(key))
      fail(errc::bad_value, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg[key] = value;
  }
  return cfg;
}

ConfigMap load_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

void apply_override(ConfigMap& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    fail(errc::bad_value, "--set expects key=value, got '" + assignment + "'");
  std::string key = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  if (key.empty() || value.empty())
    fail(errc::bad_value, "--set expects key=value, got '" + assignment + "'");
  cfg[key] = value;  // overrides may replace existing keys
}

SystemParams build_params(const ConfigMap& cfg) {
  for (const auto& [key, value] : cfg) {
    (void)value;
    if (!known_keys().count(key)) fail(errc::unknown_key, "unknown key '" + key + "'");
  }
  Reader r(cfg);
  SystemParams p{};

  // mechanics
  p.mech.omega_m = two_pi * r.positive("omega_m_hz");
  if (!r.has("q_factor") && !r.has("gamma_m_hz"))
    fail(errc::missing_key, "one of q_factor / gamma_m_hz must be set");
  if (r.has("q_factor")) {
    p.mech.q_factor = r.positive("q_factor");
    p.mech.gamma_m = p.mech.omega_m / p.mech.q_factor;
  }
  if (r.has("gamma_m_hz")) {
    const double gamma = two_pi * r.positive("gamma_m_hz");
    if (r.has("q_factor")) {
      const double implied = p.mech.omega_m / p.mech.q_factor;
      if (std::abs(gamma - implied) > 1e-3 * implied)
        fail(errc::inconsistent_pair,
             "gamma_m_hz and q_factor disagree by more than 0.1%");
    }
    p.mech.gamma_m = gamma;
    p.mech.q_factor = p.mech.omega_m / gamma;
  }
  p.mech.mass = r.positive("mass_kg");
  p.mech.overlap = r.number_or("overlap", 1.0);
  if (!(p.mech.overlap > 0.0) || p.mech.overlap > 1.0)
    fail(errc::bad_value, "overlap must be in (0, 1]");
  p.mech.x_zpf = zero_point_amplitude(p.mech.mass, p.mech.omega_m);

  // bath
  p.bath.temperature = r.positive("temperature_k");
  p.bath.quantum_occupation = r.flag("quantum_occupation", false);
  p.bath.n_thermal = thermal_occupation(p.mech.omega_m, p.bath.temperature,
                                        p.bath.quantum_occupation);

  // drive basics (needed to place the cavity reference mode)
  require(r, "pump_power_w");
  p.drive.power = r.non_negative("pump_power_w", 0.0);
  p.drive.wavelength = r.positive("wavelength_m");
  p.drive.omega_l = two_pi * c_light / p.drive.wavelength;
  require(r, "detuning_hz");
  p.drive.detuning = two_pi * r.number("detuning_hz");

  // cavity
  p.cavity.length = r.positive("cavity_length_m");
  p.cavity.finesse = r.positive("finesse");
  p.cavity.fsr = pi * c_light / p.cavity.length;
  const double kappa_mirror = p.cavity.fsr / (4.0 * p.cavity.finesse);
  p.cavity.kappa0 = r.has("kappa0_hz") ? two_pi * r.positive("kappa0_hz") : kappa_mirror;
  p.cavity.kappa2 = r.has("kappa2_hz") ? two_pi * r.positive("kappa2_hz") : p.cavity.kappa0;
  p.cavity.omega_ref = std::round(p.drive.omega_l / p.cavity.fsr) * p.cavity.fsr;

  // membrane
  p.dispersion = DispersionKind::direct;
  const std::string mode = r.word("dispersion_mode", "direct");
  if (mode == "slab") p.dispersion = DispersionKind::slab;
  else if (mode != "direct")
    fail(errc::bad_value, "dispersion_mode must be 'direct' or 'slab', got '" + mode + "'");

  p.membrane.z0 = r.number_or("membrane_z0_m", 0.0);
  if (p.dispersion == DispersionKind::slab) {
    require(r, "membrane_thickness_m");
    require(r, "membrane_n_real");
    p.membrane.thickness = r.positive("membrane_thickness_m");
    p.membrane.n_real = r.positive("membrane_n_real");
    p.membrane.n_imag = r.non_negative("membrane_n_imag", 0.0);
    if (std::abs(p.membrane.z0) + 0.5 * p.membrane.thickness >= 0.5 * p.cavity.length)
      fail(errc::bad_value, "membrane does not fit inside the cavity");
    if (r.has("target_g_over_omega_m") || r.has("target_h_over_omega_m") ||
        r.has("delta0_hz") || r.has("domega_dz") || r.has("d2omega_dz2") ||
        r.has("kappa1_hz") || r.has("dkappa1_dz"))
      fail(errc::inconsistent_pair,
           "direct-dispersion keys are not allowed with dispersion_mode = slab");
  } else {
    p.membrane.thickness = r.non_negative("membrane_thickness_m", 0.0);
    p.membrane.n_real = r.number_or("membrane_n_real", 1.0);
    p.membrane.n_imag = r.non_negative("membrane_n_imag", 0.0);
  }

  // probe
  p.drive.probe_power = r.non_negative("probe_power_w", 0.0);
  p.drive.probe_kappa = r.has("probe_kappa_hz") ? two_pi * r.positive("probe_kappa_hz")
                                                : p.cavity.kappa0;
  p.drive.probe_overlap = r.number_or("probe_overlap", 1.0);
  if (!(p.drive.probe_overlap > 0.0) || p.drive.probe_overlap > 1.0)
    fail(errc::bad_value, "probe_overlap must be in (0, 1]");

  p.drive.e_amp = std::sqrt(2.0 * p.drive.power * p.cavity.kappa0 / (hbar * p.drive.omega_l));

  const std::string solve = r.word("solve_mode", "detuning");
  if (solve == "detuning") p.solve_mode = SolveMode::detuning;
  else if (solve == "laser") p.solve_mode = SolveMode::laser;
  else fail(errc::bad_value, "solve_mode must be 'detuning' or 'laser', got '" + solve + "'");

  p.shot_floor = r.non_negative("shot_floor_m_sqrt_hz", 0.0);

  // membrane absorption at the reference position, for the loss budget
  double kappa1_ref = 0.0;
  if (p.dispersion == DispersionKind::direct) {
    p.direct.delta0 = r.has("delta0_hz") ? two_pi * r.number("delta0_hz") : p.drive.detuning;
    p.direct.kappa1 = r.has("kappa1_hz") ? two_pi * r.non_negative("kappa1_hz", 0.0) : 0.0;
    p.direct.dkappa1_dz = r.number_or("dkappa1_dz", 0.0);
    kappa1_ref = p.direct.kappa1;
  } else {
    kappa1_ref = solve_mode(p.cavity, p.membrane, p.membrane.z0).kappa1;
  }

  // total linewidth budget: kappa_t_hz pins the measured linewidth at the
  // reference position and the remainder is lumped into kappa_excess
  if (r.has("kappa_t_hz")) {
    const double kappa_t = two_pi * r.positive("kappa_t_hz");
    p.cavity.kappa_excess = kappa_t - p.cavity.kappa0 - p.cavity.kappa2 - kappa1_ref;
    // absorb round-trip rounding of an exactly-budgeted linewidth
    if (p.cavity.kappa_excess < 0.0 && p.cavity.kappa_excess > -1e-9 * kappa_t)
      p.cavity.kappa_excess = 0.0;
    if (p.cavity.kappa_excess < 0.0)
      fail(errc::inconsistent_pair,
           "kappa_t_hz smaller than the sum of mirror and membrane losses");
  } else {
    p.cavity.kappa_excess = 0.0;
  }

  // direct-mode coupling coefficients, possibly from coupling targets
  if (p.dispersion == DispersionKind::direct) {
    const double kappa_t_ref =
        p.cavity.kappa0 + p.cavity.kappa2 + p.cavity.kappa_excess + p.direct.kappa1;
    const double alpha_ref =
        p.drive.e_amp / std::sqrt(kappa_t_ref * kappa_t_ref +
                                  p.drive.detuning * p.drive.detuning);
    const double zpf_scale = p.mech.x_zpf * p.mech.overlap;
    if (r.has("target_g_over_omega_m")) {
      if (r.has("domega_dz"))
        fail(errc::inconsistent_pair, "set either target_g_over_omega_m or domega_dz, not both");
      const double g_target = r.number("target_g_over_omega_m") * p.mech.omega_m;
      if (g_target == 0.0) {
        p.direct.domega_dz = 0.0;
      } else {
        if (alpha_ref <= 0.0)
          fail(errc::inconsistent_pair, "target_g_over_omega_m needs pump_power_w > 0");
        p.direct.domega_dz = -g_target / (std::sqrt(2.0) * zpf_scale * alpha_ref);
      }
    } else {
      p.direct.domega_dz = r.number_or("domega_dz", 0.0);
    }
    if (r.has("target_h_over_omega_m")) {
      if (r.has("d2omega_dz2"))
        fail(errc::inconsistent_pair, "set either target_h_over_omega_m or d2omega_dz2, not both");
      const double h_target = r.number("target_h_over_omega_m") * p.mech.omega_m;
      if (h_target == 0.0) {
        p.direct.d2omega_dz2 = 0.0;
      } else {
        if (alpha_ref <= 0.0)
          fail(errc::inconsistent_pair, "target_h_over_omega_m needs pump_power_w > 0");
        p.direct.d2omega_dz2 = h_target / (zpf_scale * zpf_scale * alpha_ref * alpha_ref);
      }
    } else {
      p.direct.d2omega_dz2 = r.number_or("d2omega_dz2", 0.0);
    }
  }

  return p;
}

std::string serialize_config(const SystemParams& p) {
  std::ostringstream os;
  auto emit = [&os](const std::string& key, const std::string& value) {
    os << key << " = " << value << "\n";
  };
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "# resolved configuration\n";
  emit("omega_m_hz", num(p.mech.omega_m / two_pi));
  emit("q_factor", num(p.mech.q_factor));
  emit("gamma_m_hz", num(p.mech.gamma_m / two_pi));
  emit("mass_kg", num(p.mech.mass));
  emit("overlap", num(p.mech.overlap));
  emit("temperature_k", num(p.bath.temperature));
  emit("quantum_occupation", p.bath.quantum_occupation ? "1" : "0");
  emit("cavity_length_m", num(p.cavity.length));
  emit("finesse", num(p.cavity.finesse));
  emit("kappa0_hz", num(p.cavity.kappa0 / two_pi));
  emit("kappa2_hz", num(p.cavity.kappa2 / two_pi));
  const double kappa1_ref = p.dispersion == DispersionKind::direct
                                ? p.direct.kappa1
                                : solve_mode(p.cavity, p.membrane, p.membrane.z0).kappa1;
  emit("kappa_t_hz", num((p.cavity.kappa0 + p.cavity.kappa2 + p.cavity.kappa_excess +
                          kappa1_ref) / two_pi));
  if (p.dispersion == DispersionKind::slab || p.membrane.thickness > 0.0) {
    emit("membrane_thickness_m", num(p.membrane.thickness));
    emit("membrane_n_real", num(p.membrane.n_real));
    emit("membrane_n_imag", num(p.membrane.n_imag));
  }
  emit("membrane_z0_m", num(p.membrane.z0));
  emit("pump_power_w", num(p.drive.power));
  emit("wavelength_m", num(p.drive.wavelength));
  emit("detuning_hz", num(p.drive.detuning / two_pi));
  emit("probe_power_w", num(p.drive.probe_power));
  emit("probe_kappa_hz", num(p.drive.probe_kappa / two_pi));
  emit("probe_overlap", num(p.drive.probe_overlap));
  emit("dispersion_mode", p.dispersion == DispersionKind::slab ? "slab" : "direct");
  if (p.dispersion == DispersionKind::direct) {
    emit("delta0_hz", num(p.direct.delta0 / two_pi));
    emit("domega_dz", num(p.direct.domega_dz));
    emit("d2omega_dz2", num(p.direct.d2omega_dz2));
    emit("kappa1_hz", num(p.direct.kappa1 / two_pi));
    emit("dkappa1_dz", num(p.direct.dkappa1_dz));
  }
  emit("solve_mode", p.solve_mode == SolveMode::laser ? "laser" : "detuning");
  emit("shot_floor_m_sqrt_hz", num(p.shot_floor));
  return os.str();
}

ConfigMap default_config() {
  ConfigMap cfg;
  cfg["omega_m_hz"] = "356.6e3";
  cfg["q_factor"] = "24000";
  cfg["mass_kg"] = "45e-12";
  cfg["overlap"] = "1";
  cfg["temperature_k"] = "295";
  cfg["cavity_length_m"] = "93e-3";
  cfg["finesse"] = "60000";
  cfg["kappa_t_hz"] = "77e3";
  cfg["pump_power_w"] = "670e-6";
  cfg["wavelength_m"] = "1064e-9";
  cfg["detuning_hz"] = "356.6e3";
  cfg["probe_power_w"] = "100e-6";
  cfg["dispersion_mode"] = "direct";
  cfg["target_g_over_omega_m"] = "-0.01";
  cfg["target_h_over_omega_m"] = "1e-5";
  cfg["shot_floor_m_sqrt_hz"] = "2.4e-15";
  return cfg;
}

SystemParams default_params() { return build_params(default_config()); }

}  // namespace optomech
