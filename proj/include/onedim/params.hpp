#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

namespace onedim {

using cd = std::complex<double>;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cd I{0.0, 1.0};

// Frequencies are angular, in rad/ns. The outside world speaks x/(2pi) in GHz.
inline constexpr double from_GHz(double f) { return two_pi * f; }
inline constexpr double to_GHz(double w) { return w / two_pi; }
inline constexpr double deg(double d) { return d * std::numbers::pi / 180.0; }

enum class DriveMode { Transmission, Reflection };

std::string to_string(DriveMode m);
DriveMode drive_mode_from_string(const std::string& s);

struct PhysicalParams {
  double g = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double gamma_D = 0.0;
  double theta = 0.0;            // rad
  double delta_cav = 0.0;        // omega_H - omega_V
  double delta_QD = 0.0;         // omega_a - omega_b
  double delta_omega_a = 0.0;    // omega_laser - omega_a
  double delta_omega_H = 0.0;    // omega_laser - omega_H
  double epsilon = 0.0;          // ns^-1/2
  DriveMode drive_mode = DriveMode::Transmission;
  double omega_laser = from_GHz(325e3);
  bool jc_preset = false;

  double delta_omega_b() const { return delta_omega_a + delta_QD; }
  double delta_omega_V() const { return delta_omega_H + delta_cav; }
  double epsilon_H() const;
  double epsilon_V() const;

  // throws InvalidParameter
  void validate() const;
};

struct DerivedRates {
  double Gamma;
  double F_P;
  double beta;
};

DerivedRates derived_rates(const PhysicalParams& p);

// t_mu = 1 / (1 - 2i dw / kappa)
cd bare_cavity_amplitude(double delta_omega, double kappa);

// P_in = hbar omega_laser eps^2, in nW.
double input_power_nW(const PhysicalParams& p);
double epsilon_sq_for_power(double power_nW, double omega_laser);

inline constexpr double jc_default_multiple = 1e6;
PhysicalParams jc_limit(const PhysicalParams& p, double multiple = jc_default_multiple);

inline constexpr double default_epsilon_sq_over_2pi_GHz = 1e-4;
PhysicalParams table_s1_preset(const std::string& id);
const std::vector<std::string>& preset_ids();

void set_epsilon_sq_over_2pi_GHz(PhysicalParams& p, double x);
double epsilon_sq_over_2pi_GHz(const PhysicalParams& p);

nlohmann::json to_json(const PhysicalParams& p);
// Missing keys keep the values of `base`.
PhysicalParams params_from_json(const nlohmann::json& j, const PhysicalParams& base = {});

}  // namespace onedim
