#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>
#include <vector>

#include "onedim/params.hpp"

namespace onedim {

using SpMat = Eigen::SparseMatrix<cd>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct Truncation {
  int n_H = 3;
  int n_V = 3;
  int dim() const { return 3 * (n_H + 1) * (n_V + 1); }
  void validate() const;
};

enum Qd : int { qd_g = 0, qd_a = 1, qd_b = 2 };

// Basis |q> (x) |n_H> (x) |n_V>, QD index slowest.
int basis_index(const Truncation& t, int q, int nh, int nv);

struct Operators {
  Truncation trunc;
  int dim = 0;
  SpMat a_H, a_V;
  SpMat sigma_ga, sigma_gb;  // |g><a|, |g><b|
  SpMat num_H, num_V;
  SpMat proj_g, proj_a, proj_b;
  SpMat identity;
};

Operators build_operators(const Truncation& t);

// Interaction matrix g_{mu j}: rows H,V; columns a,b.
Eigen::Matrix2d coupling_matrix(const PhysicalParams& p);

SpMat build_hamiltonian(const PhysicalParams& p, const Truncation& t);

struct Liouvillian {
  Truncation trunc;
  int D = 0;
  SpMat L;  // D^2 x D^2, column-stacked vec
  double eps_H = 0.0;
  double eps_V = 0.0;
};

Liouvillian build_liouvillian(const PhysicalParams& p, const Truncation& t);

// Superoperator pieces, exposed for tests.
SpMat commutator_superop(const SpMat& H);  // -i(I(x)H - H^T(x)I)
SpMat dissipator_superop(const SpMat& L);

CVec vectorize(const CMat& X);
CMat unvectorize(const CVec& v, int D);

enum class SweepAxis { QdDetuning, CavityDetuning, Laser };

// Zero crossings of the ground-to-single-excitation gaps of H0 + H_int along
// one detuning axis, the other detunings held at their values in p. The
// returned value is the swept detuning itself (delta_omega_a for QdDetuning,
// delta_omega_H for CavityDetuning, delta_omega_a for Laser).
std::vector<double> resonance_frequencies(const PhysicalParams& p, SweepAxis axis, int k = 4);

// Single-excitation block in the order |a00>, |b00>, |g10>, |g01>.
Eigen::Matrix4d single_excitation_block(const PhysicalParams& p);

nlohmann::json dump_operator_json(const SpMat& A, double drop_below = 0.0);
nlohmann::json dump_operator_json(const CMat& A, double drop_below = 0.0);
SpMat load_operator_json(const nlohmann::json& j);

}  // namespace onedim
