#include "onedim/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

#include "onedim/errors.hpp"

namespace onedim {

namespace {

SpMat sparse_identity(int n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

SpMat annihilation(int nmax) {
  SpMat a(nmax + 1, nmax + 1);
  std::vector<Eigen::Triplet<cd>> tr;
  for (int n = 1; n <= nmax; ++n) tr.emplace_back(n - 1, n, std::sqrt(double(n)));
  a.setFromTriplets(tr.begin(), tr.end());
  return a;
}

SpMat qd_op(int row, int col) {
  SpMat s(3, 3);
  s.insert(row, col) = 1.0;
  s.makeCompressed();
  return s;
}

SpMat kron3(const SpMat& q, const SpMat& h, const SpMat& v) {
  SpMat qh = Eigen::kroneckerProduct(q, h);
  SpMat out = Eigen::kroneckerProduct(qh, v);
  out.makeCompressed();
  return out;
}

SpMat adjoint(const SpMat& A) { return SpMat(A.adjoint()); }

}  // namespace

void Truncation::validate() const {
  if (n_H < 1 || n_V < 1) throw InvalidParameter("truncation needs n_H, n_V >= 1");
}

int basis_index(const Truncation& t, int q, int nh, int nv) {
  return (q * (t.n_H + 1) + nh) * (t.n_V + 1) + nv;
}

Operators build_operators(const Truncation& t) {
  t.validate();
  Operators ops;
  ops.trunc = t;
  ops.dim = t.dim();
  const SpMat I3 = sparse_identity(3), IH = sparse_identity(t.n_H + 1), IV = sparse_identity(t.n_V + 1);
  const SpMat aH = annihilation(t.n_H), aV = annihilation(t.n_V);
  ops.a_H = kron3(I3, aH, IV);
  ops.a_V = kron3(I3, IH, aV);
  ops.sigma_ga = kron3(qd_op(qd_g, qd_a), IH, IV);
  ops.sigma_gb = kron3(qd_op(qd_g, qd_b), IH, IV);
  ops.proj_g = kron3(qd_op(qd_g, qd_g), IH, IV);
  ops.proj_a = kron3(qd_op(qd_a, qd_a), IH, IV);
  ops.proj_b = kron3(qd_op(qd_b, qd_b), IH, IV);
  ops.num_H = adjoint(ops.a_H) * ops.a_H;
  ops.num_V = adjoint(ops.a_V) * ops.a_V;
  ops.identity = sparse_identity(ops.dim);
  return ops;
}

Eigen::Matrix2d coupling_matrix(const PhysicalParams& p) {
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  Eigen::Matrix2d G;
  G << p.g * c, -p.g * s,
      -p.g * s, p.g * c;
  return G;
}

namespace {

SpMat hamiltonian_from(const PhysicalParams& p, const Operators& o) {
  const Eigen::Matrix2d G = coupling_matrix(p);
  const SpMat* a[2] = {&o.a_H, &o.a_V};
  const SpMat* s[2] = {&o.sigma_ga, &o.sigma_gb};
  SpMat H = -p.delta_omega_a * o.proj_a - p.delta_omega_b() * o.proj_b -
            p.delta_omega_H * o.num_H - p.delta_omega_V() * o.num_V;
  for (int mu = 0; mu < 2; ++mu)
    for (int j = 0; j < 2; ++j) {
      if (G(mu, j) == 0.0) continue;
      SpMat hop = adjoint(*a[mu]) * (*s[j]);
      H += G(mu, j) * (hop + adjoint(hop));
    }
  const double eps[2] = {p.epsilon_H(), p.epsilon_V()};
  for (int mu = 0; mu < 2; ++mu)
    if (eps[mu] != 0.0) H -= std::sqrt(p.kappa) * eps[mu] * (adjoint(*a[mu]) + *a[mu]);
  H.prune(cd(0.0));
  H.makeCompressed();
  return H;
}

}  // namespace

SpMat build_hamiltonian(const PhysicalParams& p, const Truncation& t) {
  return hamiltonian_from(p, build_operators(t));
}

SpMat commutator_superop(const SpMat& H) {
  const SpMat I = sparse_identity(int(H.rows()));
  SpMat left = Eigen::kroneckerProduct(I, H);
  SpMat right = Eigen::kroneckerProduct(SpMat(H.transpose()), I);
  SpMat out = cd(0, -1) * (left - right);
  out.makeCompressed();
  return out;
}

SpMat dissipator_superop(const SpMat& L) {
  const SpMat I = sparse_identity(int(L.rows()));
  const SpMat LdL = adjoint(L) * L;
  SpMat jump = Eigen::kroneckerProduct(SpMat(L.conjugate()), L);
  SpMat left = Eigen::kroneckerProduct(I, LdL);
  SpMat right = Eigen::kroneckerProduct(SpMat(LdL.transpose()), I);
  SpMat out = jump - 0.5 * (left + right);
  out.makeCompressed();
  return out;
}

Liouvillian build_liouvillian(const PhysicalParams& p, const Truncation& t) {
  if (p.kappa < 0 || p.gamma < 0 || p.gamma_D < 0)
    throw InvalidParameter("rates must be non-negative");
  const Operators o = build_operators(t);
  Liouvillian out;
  out.trunc = t;
  out.D = o.dim;
  out.eps_H = p.epsilon_H();
  out.eps_V = p.epsilon_V();
  SpMat L = commutator_superop(hamiltonian_from(p, o));
  if (p.kappa > 0) L += p.kappa * (dissipator_superop(o.a_H) + dissipator_superop(o.a_V));
  if (p.gamma > 0) L += p.gamma * (dissipator_superop(o.sigma_ga) + dissipator_superop(o.sigma_gb));
  if (p.gamma_D > 0) L += p.gamma_D * (dissipator_superop(o.proj_a) + dissipator_superop(o.proj_b));
  L.prune(cd(0.0));
  L.makeCompressed();
  out.L = std::move(L);
  return out;
}

CVec vectorize(const CMat& X) { return Eigen::Map<const CVec>(X.data(), X.size()); }

CMat unvectorize(const CVec& v, int D) { return Eigen::Map<const CMat>(v.data(), D, D); }

Eigen::Matrix4d single_excitation_block(const PhysicalParams& p) {
  const Eigen::Matrix2d G = coupling_matrix(p);
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(0, 0) = -p.delta_omega_a;
  M(1, 1) = -p.delta_omega_b();
  M(2, 2) = -p.delta_omega_H;
  M(3, 3) = -p.delta_omega_V();
  // <g, 1_mu| H_int |j, 0, 0> = g_{mu j}
  for (int mu = 0; mu < 2; ++mu)
    for (int j = 0; j < 2; ++j) M(2 + mu, j) = M(j, 2 + mu) = G(mu, j);
  return M;
}

std::vector<double> resonance_frequencies(const PhysicalParams& p, SweepAxis axis, int k) {
  PhysicalParams q = p;
  q.epsilon = 0.0;
  Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
  double offset = 0.0;
  switch (axis) {
    case SweepAxis::QdDetuning:
      q.delta_omega_a = 0.0;
      P(0, 0) = P(1, 1) = 1.0;
      break;
    case SweepAxis::CavityDetuning:
      q.delta_omega_H = 0.0;
      P(2, 2) = P(3, 3) = 1.0;
      break;
    case SweepAxis::Laser:
      P.setIdentity();
      offset = p.delta_omega_a;
      break;
  }
  // A gap closes where det(M0 - x P) = 0.
  const Eigen::Matrix4d M0 = single_excitation_block(q);
  Eigen::GeneralizedEigenSolver<Eigen::Matrix4d> ges(M0, P, false);
  std::vector<double> out;
  const double scale = std::max({1.0, M0.cwiseAbs().maxCoeff()});
  for (int i = 0; i < 4; ++i) {
    const auto al = ges.alphas()(i);
    const double be = ges.betas()(i);
    if (std::abs(be) < 1e-12) continue;
    const cd x = al / be;
    if (std::abs(x.imag()) > 1e-9 * scale) continue;
    out.push_back(x.real() + offset);
  }
  std::sort(out.begin(), out.end());
  if (k >= 0 && int(out.size()) > k) out.resize(k);
  return out;
}

nlohmann::json dump_operator_json(const SpMat& A, double drop_below) {
  nlohmann::json entries = nlohmann::json::array();
  // Row-major order keeps the dump independent of Eigen's storage order.
  std::vector<std::tuple<int, int, cd>> t;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      if (std::abs(it.value()) > drop_below) t.emplace_back(int(it.row()), int(it.col()), it.value());
  std::sort(t.begin(), t.end(), [](auto& x, auto& y) {
    return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
  });
  for (auto& [r, c, v] : t) entries.push_back({r, c, v.real(), v.imag()});
  return {{"format", "triplets"}, {"rows", A.rows()}, {"cols", A.cols()}, {"entries", entries}};
}

nlohmann::json dump_operator_json(const CMat& A, double drop_below) {
  SpMat s = A.sparseView();
  return dump_operator_json(s, drop_below);
}

SpMat load_operator_json(const nlohmann::json& j) {
  if (j.value("format", "") != "triplets") throw InvalidParameter("expected a triplet matrix document");
  SpMat A(j.at("rows").get<int>(), j.at("cols").get<int>());
  std::vector<Eigen::Triplet<cd>> tr;
  for (auto& e : j.at("entries"))
    tr.emplace_back(e[0].get<int>(), e[1].get<int>(), cd(e[2].get<double>(), e[3].get<double>()));
  A.setFromTriplets(tr.begin(), tr.end());
  return A;
}

}  // namespace onedim
