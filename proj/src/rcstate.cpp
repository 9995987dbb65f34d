#include "onedim/rcstate.hpp"

#include <cmath>
#include <cstdio>

#include <unsupported/Eigen/MatrixFunctions>

#include "onedim/errors.hpp"

namespace onedim {

DetectionMode default_detection(const PhysicalParams& p) {
  return p.drive_mode == DriveMode::Transmission ? DetectionMode::M : DetectionMode::H;
}

namespace {

// The pure-state construction needs <S^dag S> = |<S>|^2 at leading order;
// dephasing adds incoherent emission at the same order and breaks it.
void require_no_dephasing(const PhysicalParams& p) {
  if (p.gamma_D != 0.0) throw InvalidParameter("conditional-state construction needs gamma_D = 0; use the exact method");
}

RCState from_dipole(const ConditionedDipole& d, double tau, cd C) {
  RCState s;
  s.mode = d.mode;
  s.tau = tau;
  s.alpha = d.alpha;
  s.C_tau = C;
  s.C_inf = d.C_inf;
  s.displacement = d.displacement;
  return s;
}

}  // namespace

std::vector<RCState> rc_states(const PhysicalParams& p, DetectionMode mode, const std::vector<double>& tau) {
  require_no_dephasing(p);
  std::vector<double> finite;
  for (double t : tau)
    if (std::isfinite(t)) finite.push_back(t);
  const auto d = conditioned_dipole(p, mode, finite);
  std::vector<RCState> out;
  out.reserve(tau.size());
  std::size_t k = 0;
  for (double t : tau) out.push_back(from_dipole(d, t, std::isfinite(t) ? d.C_values[k++] : d.C_inf));
  return out;
}

RCState rc_state(const PhysicalParams& p, DetectionMode mode, double tau) {
  if (!(tau >= 0)) throw InvalidParameter("tau must be >= 0");
  return rc_states(p, mode, {tau}).front();
}

cd fock_amplitude(cd alpha, cd C, int n) {
  if (n < 0) throw InvalidParameter("photon number must be >= 0");
  return std::pow(alpha, n) * (1.0 - double(n) * C) / std::sqrt(std::tgamma(n + 1.0));
}

cd fock_amplitude(const RCState& s, int n) {
  if (n > s.fock_cutoff) throw InvalidParameter("photon number above the Fock cutoff");
  return fock_amplitude(s.alpha, s.C_tau, n);
}

cd fock_amplitude(const PhysicalParams& p, DetectionMode mode, int n, double tau) {
  return fock_amplitude(rc_state(p, mode, tau), n);
}

double rc_norm(const RCState& s) {
  const double a2 = std::norm(s.alpha);
  return 1.0 - 2.0 * s.C_tau.real() * a2 + std::norm(s.C_tau) * (a2 * a2 + a2);
}

CVec rc_fock_vector(const RCState& s) {
  CVec v(s.fock_cutoff + 1);
  const double pre = std::exp(-0.5 * std::norm(s.alpha));
  for (int n = 0; n <= s.fock_cutoff; ++n) v(n) = pre * fock_amplitude(s.alpha, s.C_tau, n);
  return v;
}

namespace {

// D(alpha) on 0..cutoff, built in a padded space so the crop is clean.
CMat displacement(cd alpha, int cutoff) {
  const int n = cutoff + 30;
  CMat a = CMat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  const CMat gen = alpha * a.adjoint() - std::conj(alpha) * a;
  const CMat D = gen.exp();
  return D.topLeftCorner(cutoff + 1, cutoff + 1);
}

}  // namespace

RCDensity rc_density_matrix(const PhysicalParams& p, DetectionMode mode, int cutoff) {
  if (cutoff < 1) throw InvalidParameter("Fock cutoff must be >= 1");
  const auto gen = build_effective_generator(p);
  const auto ce = eliminate_cavity(p);
  const Vec8 s = steady_state_exact_inverse(gen);
  Mat3 field;
  if (mode == DetectionMode::M) field = (ce.qd_operator(0) - ce.qd_operator(1)) / std::sqrt(2.0);
  else field = ce.qd_operator(0);
  const cd alpha = field(0, 0);
  Mat3 S = field;
  S.diagonal().setZero();

  RCDensity r;
  r.mode = mode;
  r.alpha = alpha;
  r.S = qd_expect(S, s);
  r.SdS = qd_expect(S.adjoint() * S, s).real();
  CMat core = CMat::Zero(cutoff + 1, cutoff + 1);
  core(0, 0) = 1.0 - r.SdS;
  core(1, 0) = r.S;
  core(0, 1) = std::conj(r.S);
  core(1, 1) = r.SdS;
  const CMat D = displacement(alpha, cutoff);
  r.rho = D * core * D.adjoint();
  return r;
}

CorrelationTrace g2_from_rc(const PhysicalParams& p, DetectionMode mode, const std::vector<double>& tau) {
  require_no_dephasing(p);
  for (double t : tau)
    if (!(t >= 0)) throw InvalidParameter("tau must be >= 0");
  const auto d = conditioned_dipole(p, mode, tau);
  const cd den = d.alpha * (1.0 - d.C_inf) + d.displacement;
  if (std::abs(den) <= 1e-12 * std::abs(d.alpha)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "steady field vanishes (C_inf = %.6g%+.6gi)", d.C_inf.real(), d.C_inf.imag());
    throw DegenerateSignal(buf);
  }
  CorrelationTrace tr;
  tr.tau = tau;
  tr.normalization = "rc";
  tr.norm = std::norm(den);
  tr.values.reserve(tau.size());
  for (const cd& C : d.C_values) tr.values.emplace_back(std::norm((d.alpha * (1.0 - C) + d.displacement) / den), 0.0);
  return tr;
}

}  // namespace onedim
