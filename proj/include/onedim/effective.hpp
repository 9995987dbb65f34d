#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "onedim/params.hpp"

namespace onedim {

using Mat3 = Eigen::Matrix3cd;
using Vec8 = Eigen::Matrix<cd, 8, 1>;
using Mat8 = Eigen::Matrix<cd, 8, 8>;

// Order: |a><a|, |b><b|, |g><a|, |g><b|, |a><b|, |a><g|, |b><g|, |b><a|
enum SigmaIndex : int { s_aa = 0, s_bb, s_ga, s_gb, s_ab, s_ag, s_bg, s_ba };
Mat3 sigma_basis(int k);

// <X> for a QD operator X, given the 8 averages (uses |g><g| = I - |a><a| - |b><b|).
cd qd_expect(const Mat3& X, const Vec8& s);

// a_mu = c0[mu] + c[mu][0] |g><a| + c[mu][1] |g><b|, mu = H, V.
struct CavityElimination {
  std::array<cd, 2> t;
  std::array<cd, 2> c0;
  std::array<std::array<cd, 2>, 2> c;
  // Field operator restricted to the QD: c0 I + c_a |g><a| + c_b |g><b|.
  Mat3 qd_operator(int mu) const;
};

CavityElimination eliminate_cavity(const PhysicalParams& p);

struct EffectiveGenerator {
  Mat8 G0;
  Mat8 W;
  Vec8 f;
  Mat8 G() const { return G0 + W; }
};

// Adjoint master equation on QD operators with the cavity eliminated.
EffectiveGenerator build_effective_generator(const PhysicalParams& p);

// -(G0^-1 - G0^-1 W G0^-1) f
Vec8 steady_state_neumann(const EffectiveGenerator& gen);
// -(G0 + W)^-1 f, the reference the Neumann series approximates
Vec8 steady_state_exact_inverse(const EffectiveGenerator& gen);

// Field averages from QD averages.
cd field_average(const CavityElimination& ce, int mu, const Vec8& s);
cd transmission_from_qd(const PhysicalParams& p, const Vec8& s);
cd reflection_from_qd(const PhysicalParams& p, const Vec8& s);

// e^{tau (G0 + W)} to second order in W.
Mat8 propagator_dyson(const EffectiveGenerator& gen, double tau);

enum class DetectionMode { M, H };

struct ConditionedDipole {
  DetectionMode mode;
  std::vector<double> tau;
  // <a_mode>_tau = alpha (1 - C_tau); the detected field adds `displacement`.
  std::vector<cd> C_values;
  cd C_inf;
  cd alpha;
  cd displacement;
  Vec8 sigma_inf;
  std::vector<Vec8> sigma_tau;
};

ConditionedDipole conditioned_dipole(const PhysicalParams& p, DetectionMode mode,
                                     const std::vector<double>& tau);

// The detected operator restricted to the QD: a_M or b_H = a_H - i eps/sqrt(kappa).
Mat3 detection_operator(const PhysicalParams& p, DetectionMode mode);

}  // namespace onedim
