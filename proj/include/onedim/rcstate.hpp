#pragma once

#include <limits>
#include <vector>

#include "onedim/effective.hpp"
#include "onedim/engine.hpp"

namespace onedim {

// (1 - C N)|alpha>, kept as the pair (alpha, C); Fock amplitudes on demand.
struct RCState {
  DetectionMode mode;
  double tau;  // +inf for the unconditioned steady state
  cd alpha;
  cd C_tau;
  cd C_inf;
  cd displacement;  // added to the field by the detected operator (H mode only)
  int fock_cutoff = 12;
};

inline constexpr double steady_tau = std::numeric_limits<double>::infinity();

// tau = steady_tau gives C_inf in C_tau.
RCState rc_state(const PhysicalParams& p, DetectionMode mode, double tau);
std::vector<RCState> rc_states(const PhysicalParams& p, DetectionMode mode, const std::vector<double>& tau);

// alpha^n (1 - n C)/sqrt(n!), without the e^{-|alpha|^2/2} factor.
cd fock_amplitude(cd alpha, cd C, int n);
cd fock_amplitude(const RCState& s, int n);
cd fock_amplitude(const PhysicalParams& p, DetectionMode mode, int n, double tau);

// <psi|psi> including e^{-|alpha|^2}, summed in closed form.
double rc_norm(const RCState& s);
// Normalized e^{-|alpha|^2/2} alpha^n (1 - nC)/sqrt(n!) for n = 0..cutoff.
CVec rc_fock_vector(const RCState& s);

// Cavity density matrix from the affine field a = alpha + S (S a QD operator):
// D(alpha)[(1 - <S^dag S>)|0><0| + <S>|1><0| + <S^dag>|0><1| + <S^dag S>|1><1|]D(alpha)^dag,
// with the QD averages from the exact 8x8 inverse. Pure when <S^dag S> = |<S>|^2.
struct RCDensity {
  DetectionMode mode;
  cd alpha;
  cd S;       // <S>
  double SdS;  // <S^dag S>
  CMat rho;   // Fock basis 0..cutoff
};
RCDensity rc_density_matrix(const PhysicalParams& p, DetectionMode mode, int cutoff = 12);

// |(alpha(1 - C_tau) + d)/(alpha(1 - C_inf) + d)|^2
CorrelationTrace g2_from_rc(const PhysicalParams& p, DetectionMode mode, const std::vector<double>& tau);

// Transmission drive detects M, reflection drive detects the displaced H field.
DetectionMode default_detection(const PhysicalParams& p);

}  // namespace onedim
