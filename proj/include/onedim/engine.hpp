#pragma once

#include <optional>
#include <string>
#include <vector>

#include "onedim/hilbert.hpp"
#include "onedim/kernels.hpp"

namespace onedim {

struct SteadyState {
  CMat rho;
  double residual = 0.0;       // ||L vec(rho)||_2
  double sigma_constrained = 0.0;  // smallest singular value of the trace-constrained system
  Truncation trunc;
};

struct SteadyStateCheck {
  double trace_error;
  double hermiticity_error;
  double min_eigenvalue;
  bool ok(double tol = 1e-10, double pos_tol = 1e-9) const {
    return trace_error <= tol && hermiticity_error <= tol && min_eigenvalue >= -pos_tol;
  }
};

SteadyState steady_state(const Liouvillian& L);
SteadyStateCheck check_steady_state(const SteadyState& ss);

struct CorrelationTrace {
  std::vector<double> tau;  // ns
  std::vector<cd> values;
  std::string normalization;
  double norm = 1.0;

  std::vector<double> real() const;
};

// 600 points log-spaced on [1e-3, 20] x 2(1-beta)/gamma, plus tau = 0.
std::vector<double> default_tau_grid(const PhysicalParams& p, int n = 600);

struct PropagationOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  // Step budget per output interval before giving up.
  std::size_t max_steps = 200000;
  // Dense spectral propagation is allowed up to this Liouville dimension.
  int spectral_max_dim = 1600;
};

// tr(B X(tau)) with X(0) = X0 and dX/dt = L X.
std::vector<cd> propagate_expectation(const Liouvillian& L, const CMat& X0, const SpMat& B,
                                      const std::vector<double>& tau,
                                      const PropagationOptions& opt = {});

// <A(0) B(tau) C(0)> = tr(B e^{L tau}(C rho A)).
CorrelationTrace two_time_correlator(const Liouvillian& L, const SpMat& A, const SpMat& B,
                                     const SpMat& C, const CMat& rho_ss,
                                     const std::vector<double>& tau,
                                     const PropagationOptions& opt = {});

cd expect(const SpMat& A, const CMat& rho);

struct Amplitude {
  cd amplitude;
  double probability;
};

Amplitude transmission(const PhysicalParams& p, const Truncation& t);
// Transmission-mode reflection r = 1 + i sqrt(kappa)/eps <a_H + a_V>/sqrt2.
Amplitude transmission_mode_reflection(const PhysicalParams& p, const Truncation& t);
Amplitude reflection(const PhysicalParams& p, const Truncation& t);

// Same observables from an already solved steady state.
Amplitude transmission_from(const PhysicalParams& p, const Operators& o, const CMat& rho);
Amplitude transmission_mode_reflection_from(const PhysicalParams& p, const Operators& o, const CMat& rho);
Amplitude reflection_from(const PhysicalParams& p, const Operators& o, const CMat& rho);

// a_M = (a_H - a_V)/sqrt2 and b_H = a_H - i eps/sqrt(kappa)
SpMat mode_M(const Operators& o);
SpMat displaced_H(const PhysicalParams& p, const Operators& o);

CorrelationTrace g2_transmission_exact(const PhysicalParams& p, const Truncation& t,
                                       const std::vector<double>& tau,
                                       const PropagationOptions& opt = {});
CorrelationTrace g2_reflection_exact(const PhysicalParams& p, const Truncation& t,
                                     const std::vector<double>& tau,
                                     const PropagationOptions& opt = {});

// Normalized g2 of detection operator A for a given steady state.
CorrelationTrace g2_of(const Liouvillian& L, const SpMat& A, const CMat& rho,
                       const std::vector<double>& tau, const PropagationOptions& opt = {});

// <a^dag a^dag a a> / <a^dag a>^2 from the steady state alone.
double g2_zero_direct(const SpMat& A, const CMat& rho);

struct SaturationPoint {
  double power_nW;
  double T;
  double top_fock_population;  // H-mode population at n_H
};

struct SaturationResult {
  std::vector<SaturationPoint> points;
  double plateau_T = 0.0;                 // T at the highest power
  std::optional<double> half_power_nW;    // first crossing of plateau_T/2
  std::optional<double> crossing_nW(double level) const;
};

struct SaturationOptions {
  // The top-power point must keep the n_H population below this. At 1e-2 the
  // fig1d_inset transmission is already off by ~20%.
  double max_top_population = 1e-3;
  bool check_truncation = true;
};

SaturationResult saturation_sweep(const PhysicalParams& p, const Truncation& t,
                                  const std::vector<double>& power_grid_nW,
                                  const SaturationOptions& opt = {});

}  // namespace onedim
