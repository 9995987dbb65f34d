#pragma once

#include <optional>

#include "onedim/params.hpp"

namespace onedim {

struct AmplitudeResult {
  cd amplitude;
  double magnitude_sq = 0.0;
  double phase = 0.0;  // arg in (-pi, pi]
  // what went in
  cd t_H, t_V;
  double beta = 0.0;
  double delta_omega_a = 0.0;
  double delta_omega_b = 0.0;
};

// Weak-drive rational form num/den with
//   num = beta N1 + beta^2/2 N2,  den = X Y + beta D1 + beta^2/2 D2,
//   X = gamma - 2i dw_a, Y = gamma - 2i dw_b.
struct Coefficients {
  cd N1, N2, D1, D2;
};
Coefficients transmission_coefficients(const PhysicalParams& p);
Coefficients reflection_coefficients(const PhysicalParams& p);

AmplitudeResult transmission_amplitude(const PhysicalParams& p);
AmplitudeResult reflection_amplitude(const PhysicalParams& p);

// theta = 0, V mode gone
AmplitudeResult jc_transmission(const PhysicalParams& p);
AmplitudeResult jc_reflection(const PhysicalParams& p);

// dw_H = 0 and theta = 0 required; keeps t_V.
AmplitudeResult partial_resonance_transmission(const PhysicalParams& p);

// r<- at dw_H = 0 to second order in theta.
AmplitudeResult reflection_theta_expansion(const PhysicalParams& p);

struct PhaseDecomposition {
  cd r_H, r_V;
  double phi_H, phi_V;
  double T;          // |r_H|^2/2 + |r_V|^2/2 - |r_H r_V| cos(phi_H - phi_V)
  cd t;              // (r_H - r_V)/sqrt2
  cd r;              // (r_H + r_V)/sqrt2
};
// Transmission drive; r_mu = 1/sqrt2 + i sqrt(kappa) <a_mu>/eps in linear response.
PhaseDecomposition phase_decomposition(const PhysicalParams& p);

// |1 - (F t_H)^2 e^{-gamma tau (1 + F t_H)/2}|^2, F = beta/(1-beta). beta = 1 gives +inf at tau = 0.
double jc_g2_transmission(double beta, cd t_H, double gamma, double tau);
// [1 - (2beta/(1-2beta))^2 e^{-gamma tau/(2(1-beta))}]^2; PoleError at beta = 1/2.
double jc_g2_reflection(double beta, double gamma, double tau);
// Off cavity resonance. PoleError when the conditioned amplitude has no finite normalization.
double jc_g2_reflection_detuned(double F_P, cd t_H, double delta_omega_a, double gamma, double tau);

enum class Channel { Transmission, Reflection };
// Delay where the resonant JC g2 vanishes; nullopt outside the range where it exists.
std::optional<double> tau0(Channel mode, double beta, double gamma);

}  // namespace onedim
