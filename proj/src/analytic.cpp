#include "onedim/analytic.hpp"

#include <cmath>
#include <limits>

#include "onedim/effective.hpp"
#include "onedim/errors.hpp"

namespace onedim {

namespace {

struct Ingredients {
  cd tH, tV;
  double beta, gamma, c, s, da, db;
  cd X, Y, Pa, Pb, Cc;
};

Ingredients ingredients(const PhysicalParams& p) {
  p.validate();
  Ingredients in;
  in.tH = bare_cavity_amplitude(p.delta_omega_H, p.kappa);
  in.tV = bare_cavity_amplitude(p.delta_omega_V(), p.kappa);
  in.beta = derived_rates(p).beta;
  in.gamma = p.gamma;
  in.c = std::cos(p.theta);
  in.s = std::sin(p.theta);
  in.da = p.delta_omega_a;
  in.db = p.delta_omega_b();
  in.X = p.gamma - 2.0 * I * in.da;
  in.Y = p.gamma - 2.0 * I * in.db;
  in.Pa = in.tH * in.c * in.c + in.tV * in.s * in.s;
  in.Pb = in.tV * in.c * in.c + in.tH * in.s * in.s;
  in.Cc = in.c * in.s * (in.tH + in.tV);
  return in;
}

// The two modes differ only in the projection weights (Ka, Kb) and the
// drive seen by each dipole (fa, fb).
Coefficients coefficients(const Ingredients& in, cd Ka, cd Kb, cd fa, cd fb) {
  const double g = in.gamma;
  const double cos2 = std::cos(2.0 * std::atan2(in.s, in.c));
  Coefficients k;
  k.D1 = -2.0 * in.X * in.Y + g * (in.Pa * in.Y + in.Pb * in.X);
  k.D2 = 2.0 * (in.X * in.Y - g * (in.Pa * in.Y + in.Pb * in.X) + g * g * in.tH * in.tV * cos2 * cos2);
  k.N1 = g * (Ka * in.Y * fa - Kb * in.X * fb);
  const cd R = Ka * (in.Pb * fa + in.Cc * fb) - Kb * (in.Cc * fa + in.Pa * fb);
  k.N2 = 2.0 * g * g * R - 2.0 * k.N1;
  return k;
}

cd rational(const Ingredients& in, const Coefficients& k) {
  const double b = in.beta;
  const cd num = b * k.N1 + 0.5 * b * b * k.N2;
  const cd den = in.X * in.Y + b * k.D1 + 0.5 * b * b * k.D2;
  if (std::abs(den) == 0.0) throw PoleError("weak-drive denominator vanishes");
  return num / den;
}

AmplitudeResult finish(cd amp, const Ingredients& in) {
  AmplitudeResult r;
  r.amplitude = amp;
  r.magnitude_sq = std::norm(amp);
  r.phase = std::arg(amp);
  if (r.phase == -std::numbers::pi) r.phase = std::numbers::pi;
  r.t_H = in.tH;
  r.t_V = in.tV;
  r.beta = in.beta;
  r.delta_omega_a = in.da;
  r.delta_omega_b = in.db;
  return r;
}

}  // namespace

Coefficients transmission_coefficients(const PhysicalParams& p) {
  const auto in = ingredients(p);
  const double c = in.c, s = in.s;
  return coefficients(in, in.tH * c + in.tV * s, in.tV * c + in.tH * s, c * in.tH - s * in.tV,
                      c * in.tV - s * in.tH);
}

Coefficients reflection_coefficients(const PhysicalParams& p) {
  const auto in = ingredients(p);
  const double c = in.c, s = in.s;
  return coefficients(in, in.tH * c, in.tH * s, c * in.tH, -s * in.tH);
}

AmplitudeResult transmission_amplitude(const PhysicalParams& p) {
  const auto in = ingredients(p);
  return finish(-(in.tH - in.tV) + rational(in, transmission_coefficients(p)), in);
}

AmplitudeResult reflection_amplitude(const PhysicalParams& p) {
  const auto in = ingredients(p);
  return finish(1.0 - 2.0 * in.tH + 2.0 * rational(in, reflection_coefficients(p)), in);
}

namespace {
cd jc_denominator(const Ingredients& in) {
  const double b = in.beta;
  return 1.0 - (1.0 - in.tH) * b - 2.0 * I * (1.0 - b) * in.da / in.gamma;
}
}  // namespace

AmplitudeResult jc_transmission(const PhysicalParams& p) {
  auto in = ingredients(p);
  in.tV = 0.0;
  return finish(-in.tH + in.beta * in.tH * in.tH / jc_denominator(in), in);
}

AmplitudeResult jc_reflection(const PhysicalParams& p) {
  auto in = ingredients(p);
  in.tV = 0.0;
  return finish(1.0 - 2.0 * in.tH * (1.0 - in.tH * in.beta / jc_denominator(in)), in);
}

AmplitudeResult partial_resonance_transmission(const PhysicalParams& p) {
  if (p.theta != 0.0 || p.delta_omega_H != 0.0)
    throw InvalidParameter("partial resonance form needs theta = 0 and delta_omega_H = 0");
  const auto in = ingredients(p);
  const double b = in.beta, g = in.gamma;
  const cd a_term = 1.0 / (1.0 - 2.0 * I * (1.0 - b) * in.da / g);
  const cd b_term = in.tV * in.tV / (1.0 - 2.0 * I * (1.0 - b) * in.db / g + (in.tV - 1.0) * b);
  return finish(-1.0 + in.tV + b * (a_term - b_term), in);
}

AmplitudeResult reflection_theta_expansion(const PhysicalParams& p) {
  if (p.delta_omega_H != 0.0) throw InvalidParameter("theta expansion needs delta_omega_H = 0");
  const auto in = ingredients(p);
  const double b = in.beta, g = in.gamma, th = p.theta;
  const cd P = g - 2.0 * I * (1.0 - b) * in.da;
  const cd Qb = g + (in.tV - 1.0) * b * g - 2.0 * I * in.db * (1.0 - b);
  const cd den = P * P * Qb;
  const cd line2 = -4.0 * I * g * b * (1.0 - b) * (in.da - in.db) * ((1.0 - b) * in.X + g * b * in.tV) / den;
  const cd line3 = -8.0 * g * g * b * b * (1.0 - b) * in.tV * in.X / den;
  return finish(-1.0 + 2.0 * b * g / P + th * th * (line2 + line3), in);
}

PhaseDecomposition phase_decomposition(const PhysicalParams& p) {
  if (p.drive_mode != DriveMode::Transmission) throw InvalidParameter("phase decomposition needs the transmission drive");
  PhysicalParams q = p;
  if (!(q.epsilon > 0)) q.epsilon = 1.0;  // linear response, scale drops out
  const auto gen = build_effective_generator(q);
  const auto ce = eliminate_cavity(q);
  Eigen::FullPivLU<Mat8> lu(gen.G0);
  const Vec8 s = -lu.solve(gen.f);
  PhaseDecomposition d;
  const double sk = std::sqrt(q.kappa);
  d.r_H = 1.0 / std::sqrt(2.0) + I * sk * field_average(ce, 0, s) / q.epsilon;
  d.r_V = 1.0 / std::sqrt(2.0) + I * sk * field_average(ce, 1, s) / q.epsilon;
  d.phi_H = std::arg(d.r_H);
  d.phi_V = std::arg(d.r_V);
  d.T = 0.5 * std::norm(d.r_H) + 0.5 * std::norm(d.r_V) - std::abs(d.r_H * d.r_V) * std::cos(d.phi_H - d.phi_V);
  d.t = (d.r_H - d.r_V) / std::sqrt(2.0);
  d.r = (d.r_H + d.r_V) / std::sqrt(2.0);
  return d;
}

double jc_g2_transmission(double beta, cd t_H, double gamma, double tau) {
  if (!(tau >= 0)) throw InvalidParameter("tau must be >= 0");
  if (!(beta >= 0 && beta <= 1)) throw InvalidParameter("beta must lie in [0, 1]");
  if (beta == 1.0) return tau == 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  const double F = beta / (1.0 - beta);
  const cd Ft = F * t_H;
  return std::norm(1.0 - Ft * Ft * std::exp(-gamma * tau * (1.0 + Ft) / 2.0));
}

double jc_g2_reflection(double beta, double gamma, double tau) {
  if (!(tau >= 0)) throw InvalidParameter("tau must be >= 0");
  if (!(beta >= 0 && beta <= 1)) throw InvalidParameter("beta must lie in [0, 1]");
  if (beta == 0.5) throw PoleError("reflection g2 has a pole at beta = 1/2");
  const double k = 2.0 * beta / (1.0 - 2.0 * beta);
  if (beta == 1.0) return tau == 0.0 ? (1.0 - k * k) * (1.0 - k * k) : 1.0;
  const double v = 1.0 - k * k * std::exp(-gamma * tau / (2.0 * (1.0 - beta)));
  return v * v;
}

double jc_g2_reflection_detuned(double F_P, cd t_H, double delta_omega_a, double gamma, double tau) {
  if (!(tau >= 0)) throw InvalidParameter("tau must be >= 0");
  const double x = delta_omega_a / gamma;
  const cd den = 1.0 - 2.0 * I * x - t_H * (2.0 - F_P - 4.0 * I * x);
  if (std::abs(den) < 1e-300) throw PoleError("detuned reflection g2 has a pole here");
  const cd lambda = 0.5 * gamma * (1.0 + F_P * t_H - 2.0 * I * x);
  const cd t2 = t_H * t_H;
  return std::norm(1.0 - 4.0 * F_P * F_P * t2 * t2 * std::exp(-lambda * tau) / (den * den));
}

std::optional<double> tau0(Channel mode, double beta, double gamma) {
  if (!(gamma > 0)) throw InvalidParameter("gamma must be > 0");
  if (mode == Channel::Transmission) {
    if (beta < 0.5 || beta >= 1.0) return std::nullopt;
    const double r = beta / (1.0 - beta);
    return (2.0 / gamma) * (1.0 - beta) * std::log(r * r);
  }
  if (beta < 0.25 || beta == 0.5 || beta >= 1.0) return std::nullopt;
  const double r = 2.0 * beta / (1.0 - 2.0 * beta);
  return (2.0 / gamma) * (1.0 - beta) * std::log(r * r);
}

}  // namespace onedim
