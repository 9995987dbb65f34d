#include "onedim/params.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "onedim/errors.hpp"

namespace onedim {

namespace {

constexpr double hbar = 1.054571817e-34;  // J s

}  // namespace

std::string to_string(DriveMode m) {
  return m == DriveMode::Transmission ? "transmission" : "reflection";
}

DriveMode drive_mode_from_string(const std::string& s) {
  if (s == "transmission") return DriveMode::Transmission;
  if (s == "reflection") return DriveMode::Reflection;
  throw InvalidParameter("drive_mode must be 'transmission' or 'reflection', got '" + s + "'");
}

double PhysicalParams::epsilon_H() const {
  return drive_mode == DriveMode::Transmission ? epsilon / std::sqrt(2.0) : epsilon;
}

double PhysicalParams::epsilon_V() const {
  return drive_mode == DriveMode::Transmission ? epsilon / std::sqrt(2.0) : 0.0;
}

void PhysicalParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  for (double x : {g, kappa, gamma, gamma_D, theta, delta_cav, delta_QD, delta_omega_a,
                   delta_omega_H, epsilon, omega_laser})
    if (!finite(x)) throw InvalidParameter("non-finite parameter");
  if (!(kappa > 0)) throw InvalidParameter("kappa must be > 0");
  if (!(gamma > 0)) throw InvalidParameter("gamma must be > 0");
  if (g < 0) throw InvalidParameter("g must be >= 0");
  if (gamma_D < 0) throw InvalidParameter("gamma_D must be >= 0");
  if (epsilon < 0) throw InvalidParameter("epsilon must be >= 0");
}

DerivedRates derived_rates(const PhysicalParams& p) {
  if (!(p.kappa > 0)) throw InvalidParameter("kappa must be > 0");
  if (!(p.gamma > 0)) throw InvalidParameter("gamma must be > 0");
  const double Gamma = 2.0 * p.g * p.g / p.kappa;
  const double F_P = 2.0 * Gamma / p.gamma;
  return {Gamma, F_P, F_P / (1.0 + F_P)};
}

cd bare_cavity_amplitude(double delta_omega, double kappa) {
  if (!(kappa > 0)) throw InvalidParameter("kappa must be > 0");
  return 1.0 / (1.0 - 2.0 * I * delta_omega / kappa);
}

double input_power_nW(const PhysicalParams& p) {
  if (!(p.omega_laser > 0)) throw InvalidParameter("omega_laser must be > 0");
  // rad/ns -> rad/s and ns^-1 -> s^-1, then W -> nW
  return hbar * (p.omega_laser * 1e9) * (p.epsilon * p.epsilon * 1e9) * 1e9;
}

double epsilon_sq_for_power(double power_nW, double omega_laser) {
  if (!(omega_laser > 0)) throw InvalidParameter("omega_laser must be > 0");
  if (power_nW < 0) throw InvalidParameter("power must be >= 0");
  return power_nW * 1e-9 / (hbar * omega_laser * 1e9) * 1e-9;
}

PhysicalParams jc_limit(const PhysicalParams& p, double multiple) {
  PhysicalParams q = p;
  q.theta = 0.0;
  q.delta_cav = multiple * p.kappa;
  q.jc_preset = true;
  return q;
}

void set_epsilon_sq_over_2pi_GHz(PhysicalParams& p, double x) {
  if (x < 0) throw InvalidParameter("epsilon^2 must be >= 0");
  p.epsilon = std::sqrt(from_GHz(x));
}

double epsilon_sq_over_2pi_GHz(const PhysicalParams& p) { return to_GHz(p.epsilon * p.epsilon); }

namespace {

struct Row {
  double g;
  double dwa;
  DriveMode mode;
};

const std::map<std::string, Row>& table() {
  // fig1d and fig3a sweep delta_omega_a; the stored value is the default cut.
  static const std::map<std::string, Row> t = {
      {"fig1d", {4.8, -0.31, DriveMode::Transmission}},
      {"fig1d_inset", {4.8, -0.31, DriveMode::Transmission}},
      {"fig2a", {4.8, -0.31, DriveMode::Transmission}},
      {"fig2b_g48", {4.8, -0.14, DriveMode::Transmission}},
      {"fig2b_g24", {2.4, -0.14, DriveMode::Transmission}},
      {"fig2b_g14", {1.4, -0.14, DriveMode::Transmission}},
      {"fig2b_g065", {0.65, -0.14, DriveMode::Transmission}},
      {"fig3a", {4.8, -0.14, DriveMode::Reflection}},
      {"fig3b", {4.8, -0.14, DriveMode::Reflection}},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids = {"fig1d",     "fig1d_inset", "fig2a",
                                               "fig2b_g48", "fig2b_g24",   "fig2b_g14",
                                               "fig2b_g065", "fig3a",      "fig3b"};
  return ids;
}

PhysicalParams table_s1_preset(const std::string& id) {
  auto it = table().find(id);
  if (it == table().end()) throw LookupError("unknown preset '" + id + "'");
  PhysicalParams p;
  p.g = from_GHz(it->second.g);
  p.kappa = from_GHz(28.0);
  p.gamma = from_GHz(0.3);
  p.gamma_D = 0.0;
  p.theta = deg(25.1);
  p.delta_cav = from_GHz(50.0);
  p.delta_QD = from_GHz(2.3);
  p.delta_omega_a = from_GHz(it->second.dwa);
  p.delta_omega_H = 0.0;
  p.drive_mode = it->second.mode;
  set_epsilon_sq_over_2pi_GHz(p, default_epsilon_sq_over_2pi_GHz);
  return p;
}

nlohmann::json to_json(const PhysicalParams& p) {
  return {
      {"g_over_2pi_GHz", to_GHz(p.g)},
      {"kappa_over_2pi_GHz", to_GHz(p.kappa)},
      {"gamma_over_2pi_GHz", to_GHz(p.gamma)},
      {"gamma_D_over_2pi_GHz", to_GHz(p.gamma_D)},
      {"theta_deg", p.theta * 180.0 / std::numbers::pi},
      {"delta_cav_over_2pi_GHz", to_GHz(p.delta_cav)},
      {"delta_QD_over_2pi_GHz", to_GHz(p.delta_QD)},
      {"delta_omega_a_over_2pi_GHz", to_GHz(p.delta_omega_a)},
      {"delta_omega_H_over_2pi_GHz", to_GHz(p.delta_omega_H)},
      {"epsilon_sq_over_2pi_GHz", epsilon_sq_over_2pi_GHz(p)},
      {"drive_mode", to_string(p.drive_mode)},
      {"omega_laser_over_2pi_THz", to_GHz(p.omega_laser) * 1e-3},
  };
}

PhysicalParams params_from_json(const nlohmann::json& j, const PhysicalParams& base) {
  if (!j.is_object()) throw InvalidParameter("parameter document must be a JSON object");
  static const std::vector<std::string> known = {
      "g_over_2pi_GHz",          "kappa_over_2pi_GHz",         "gamma_over_2pi_GHz",
      "gamma_D_over_2pi_GHz",    "theta_deg",                  "delta_cav_over_2pi_GHz",
      "delta_QD_over_2pi_GHz",   "delta_omega_a_over_2pi_GHz", "delta_omega_H_over_2pi_GHz",
      "epsilon_sq_over_2pi_GHz", "drive_mode",                 "omega_laser_over_2pi_THz"};
  for (auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw InvalidParameter("unknown parameter key '" + k + "'");
    if (k != "drive_mode" && !v.is_number())
      throw InvalidParameter("parameter '" + k + "' must be a number");
  }
  PhysicalParams p = base;
  auto num = [&](const char* k, double& dst, double scale) {
    if (j.contains(k)) dst = j.at(k).get<double>() * scale;
  };
  num("g_over_2pi_GHz", p.g, two_pi);
  num("kappa_over_2pi_GHz", p.kappa, two_pi);
  num("gamma_over_2pi_GHz", p.gamma, two_pi);
  num("gamma_D_over_2pi_GHz", p.gamma_D, two_pi);
  num("theta_deg", p.theta, std::numbers::pi / 180.0);
  num("delta_cav_over_2pi_GHz", p.delta_cav, two_pi);
  num("delta_QD_over_2pi_GHz", p.delta_QD, two_pi);
  num("delta_omega_a_over_2pi_GHz", p.delta_omega_a, two_pi);
  num("delta_omega_H_over_2pi_GHz", p.delta_omega_H, two_pi);
  num("omega_laser_over_2pi_THz", p.omega_laser, two_pi * 1e3);
  if (j.contains("epsilon_sq_over_2pi_GHz"))
    set_epsilon_sq_over_2pi_GHz(p, j.at("epsilon_sq_over_2pi_GHz").get<double>());
  if (j.contains("drive_mode")) {
    if (!j.at("drive_mode").is_string()) throw InvalidParameter("drive_mode must be a string");
    p.drive_mode = drive_mode_from_string(j.at("drive_mode").get<std::string>());
  }
  p.validate();
  return p;
}

}  // namespace onedim
