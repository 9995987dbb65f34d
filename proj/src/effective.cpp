#include "onedim/effective.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "onedim/errors.hpp"
#include "onedim/hilbert.hpp"

namespace onedim {

namespace {

Mat3 unit(int r, int c) {
  Mat3 m = Mat3::Zero();
  m(r, c) = 1.0;
  return m;
}

struct Decomposed {
  cd identity;
  Vec8 v;
};

Decomposed decompose(const Mat3& M) {
  Decomposed d;
  d.identity = M(0, 0);
  d.v(s_aa) = M(1, 1) - M(0, 0);
  d.v(s_bb) = M(2, 2) - M(0, 0);
  d.v(s_ga) = M(0, 1);
  d.v(s_gb) = M(0, 2);
  d.v(s_ab) = M(1, 2);
  d.v(s_ag) = M(1, 0);
  d.v(s_bg) = M(2, 0);
  d.v(s_ba) = M(2, 1);
  return d;
}

Mat3 dissipator_adjoint(const Mat3& L, const Mat3& O) {
  const Mat3 Ld = L.adjoint();
  const Mat3 LdL = Ld * L;
  return Ld * O * L - 0.5 * (LdL * O + O * LdL);
}

struct Generator {
  Mat8 G;
  Vec8 f;
};

Generator generator_at(const PhysicalParams& p) {
  const CavityElimination ce = eliminate_cavity(p);
  const Eigen::Matrix2d g = coupling_matrix(p);
  Mat3 H0 = Mat3::Zero();
  H0(1, 1) = -p.delta_omega_a;
  H0(2, 2) = -p.delta_omega_b();
  const Mat3 s[2] = {unit(0, 1), unit(0, 2)};
  const Mat3 A[2] = {ce.qd_operator(0), ce.qd_operator(1)};
  const Mat3 P[2] = {unit(1, 1), unit(2, 2)};

  Generator out;
  for (int k = 0; k < 8; ++k) {
    const Mat3 O = sigma_basis(k);
    Mat3 M = I * (H0 * O - O * H0);
    for (int mu = 0; mu < 2; ++mu)
      for (int j = 0; j < 2; ++j) {
        if (g(mu, j) == 0.0) continue;
        const Mat3 sd = s[j].adjoint();
        // cavity operators normal ordered: a^dag left, a right
        M += I * g(mu, j) * (A[mu].adjoint() * (s[j] * O - O * s[j]) + (sd * O - O * sd) * A[mu]);
      }
    for (int j = 0; j < 2; ++j) {
      M += p.gamma * dissipator_adjoint(s[j], O);
      if (p.gamma_D > 0) M += p.gamma_D * dissipator_adjoint(P[j], O);
    }
    const Decomposed d = decompose(M);
    out.G.row(k) = d.v.transpose();
    out.f(k) = d.identity;
  }
  return out;
}

}  // namespace

Mat3 sigma_basis(int k) {
  switch (k) {
    case s_aa: return unit(1, 1);
    case s_bb: return unit(2, 2);
    case s_ga: return unit(0, 1);
    case s_gb: return unit(0, 2);
    case s_ab: return unit(1, 2);
    case s_ag: return unit(1, 0);
    case s_bg: return unit(2, 0);
    case s_ba: return unit(2, 1);
  }
  throw InvalidParameter("sigma index out of range");
}

cd qd_expect(const Mat3& X, const Vec8& s) {
  const Decomposed d = decompose(X);
  return d.identity + d.v.cwiseProduct(s).sum();
}

Mat3 CavityElimination::qd_operator(int mu) const {
  Mat3 A = c0[mu] * Mat3::Identity();
  A(0, 1) += c[mu][0];
  A(0, 2) += c[mu][1];
  return A;
}

CavityElimination eliminate_cavity(const PhysicalParams& p) {
  const Eigen::Matrix2d g = coupling_matrix(p);
  const double eps[2] = {p.epsilon_H(), p.epsilon_V()};
  const double dw[2] = {p.delta_omega_H, p.delta_omega_V()};
  const double sk = std::sqrt(p.kappa);
  CavityElimination ce;
  for (int mu = 0; mu < 2; ++mu) {
    ce.t[mu] = bare_cavity_amplitude(dw[mu], p.kappa);
    // a = (2 t / kappa)(i sqrt(kappa) eps - i sum_j g_j |g><j|)
    ce.c0[mu] = 2.0 * I * ce.t[mu] * eps[mu] / sk;
    for (int j = 0; j < 2; ++j) ce.c[mu][j] = -2.0 * I * ce.t[mu] * g(mu, j) / p.kappa;
  }
  return ce;
}

EffectiveGenerator build_effective_generator(const PhysicalParams& p) {
  p.validate();
  PhysicalParams p0 = p;
  p0.epsilon = 0.0;
  const Generator full = generator_at(p);
  const Generator bare = generator_at(p0);
  EffectiveGenerator gen;
  gen.G0 = bare.G;
  gen.W = full.G - bare.G;
  gen.f = full.f - bare.f;
  return gen;
}

namespace {

Eigen::FullPivLU<Mat8> checked_lu(const Mat8& G, const char* what) {
  Eigen::FullPivLU<Mat8> lu(G);
  Eigen::JacobiSVD<Mat8> svd(G);
  const auto& sv = svd.singularValues();
  if (!(sv(7) > 1e-13 * sv(0)))
    throw SingularGenerator(std::string(what) + " is singular");
  return lu;
}

}  // namespace

Vec8 steady_state_neumann(const EffectiveGenerator& gen) {
  const auto lu = checked_lu(gen.G0, "G0");
  const Vec8 x = lu.solve(gen.f);
  return -(x - lu.solve(Vec8(gen.W * x)));
}

Vec8 steady_state_exact_inverse(const EffectiveGenerator& gen) {
  const auto lu = checked_lu(gen.G(), "G0 + W");
  return -lu.solve(gen.f);
}

cd field_average(const CavityElimination& ce, int mu, const Vec8& s) {
  return ce.c0[mu] + ce.c[mu][0] * s(s_ga) + ce.c[mu][1] * s(s_gb);
}

cd transmission_from_qd(const PhysicalParams& p, const Vec8& s) {
  if (!(p.epsilon > 0)) throw UndefinedAmplitude("amplitude undefined at epsilon = 0");
  const auto ce = eliminate_cavity(p);
  const cd aM = (field_average(ce, 0, s) - field_average(ce, 1, s)) / std::sqrt(2.0);
  return I * std::sqrt(p.kappa) / p.epsilon * aM;
}

cd reflection_from_qd(const PhysicalParams& p, const Vec8& s) {
  if (!(p.epsilon > 0)) throw UndefinedAmplitude("amplitude undefined at epsilon = 0");
  const auto ce = eliminate_cavity(p);
  return 1.0 + I * std::sqrt(p.kappa) / p.epsilon * field_average(ce, 0, s);
}

namespace {

namespace quad = boost::math::quadrature;

bool close(cd a, cd b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

// sinh(z)/z
cd sinhc(cd z) {
  if (std::abs(z) > 1e-3) return std::sinh(z) / z;
  const cd z2 = z * z;
  return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0));
}

// int_0^tau e^{a(tau-s)} e^{b s} ds
cd phi1(cd a, cd b, double tau) {
  if (tau == 0.0) return 0.0;
  return tau * std::exp(0.5 * (a + b) * tau) * sinhc(0.5 * (a - b) * tau);
}

// int_0^tau ds1 int_0^s1 ds2 e^{a(tau-s1)} e^{b(s1-s2)} e^{c s2}; symmetric in a, b, c
cd phi2(cd a, cd b, cd c, double tau) {
  if (tau == 0.0) return 0.0;
  // put the most distant pair at the ends of the divided difference
  if (std::abs(a - b) > std::abs(a - c) && std::abs(a - b) >= std::abs(b - c)) std::swap(b, c);
  else if (std::abs(b - c) > std::abs(a - c)) std::swap(a, b);
  if (!close(a, c)) return (phi1(a, b, tau) - phi1(b, c, tau)) / (a - c);
  auto f = [&](double s1) { return std::exp(a * (tau - s1)) * phi1(b, c, s1); };
  return quad::gauss_kronrod<double, 31>::integrate(f, 0.0, tau, 8, 1e-10);
}

struct Eigen8 {
  Mat8 V, Vinv;
  Vec8 lam;
};

Eigen8 diagonalize(const Mat8& G0) {
  Eigen::ComplexEigenSolver<Mat8> es(G0, true);
  if (es.info() != Eigen::Success) throw SingularGenerator("eigendecomposition of G0 failed");
  Eigen8 e;
  e.V = es.eigenvectors();
  e.lam = es.eigenvalues();
  Eigen::JacobiSVD<Mat8> svd(e.V);
  const auto& sv = svd.singularValues();
  if (!(sv(7) > 1e-10 * sv(0))) throw SingularGenerator("G0 is defective; no eigenbasis for the Dyson terms");
  e.Vinv = e.V.inverse();
  return e;
}

}  // namespace

Mat8 propagator_dyson(const EffectiveGenerator& gen, double tau) {
  if (!(tau >= 0)) throw InvalidParameter("tau must be >= 0");
  if (tau == 0.0) return Mat8::Identity();
  const Eigen8 e = diagonalize(gen.G0);
  const Mat8 Wt = e.Vinv * gen.W * e.V;
  Mat8 E = Mat8::Zero();
  for (int i = 0; i < 8; ++i) E(i, i) = std::exp(e.lam(i) * tau);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      if (Wt(i, j) != 0.0) E(i, j) += Wt(i, j) * phi1(e.lam(i), e.lam(j), tau);
      cd acc = 0.0;
      for (int k = 0; k < 8; ++k) {
        const cd w = Wt(i, k) * Wt(k, j);
        if (w != 0.0) acc += w * phi2(e.lam(i), e.lam(k), e.lam(j), tau);
      }
      E(i, j) += acc;
    }
  return e.V * E * e.Vinv;
}

Mat3 detection_operator(const PhysicalParams& p, DetectionMode mode) {
  const auto ce = eliminate_cavity(p);
  if (mode == DetectionMode::M) return (ce.qd_operator(0) - ce.qd_operator(1)) / std::sqrt(2.0);
  return ce.qd_operator(0) - (I * p.epsilon / std::sqrt(p.kappa)) * Mat3::Identity();
}

ConditionedDipole conditioned_dipole(const PhysicalParams& p, DetectionMode mode,
                                     const std::vector<double>& tau) {
  if (!(p.epsilon > 0)) throw DegenerateSignal("no detections at epsilon = 0");
  const auto gen = build_effective_generator(p);
  const auto ce = eliminate_cavity(p);
  const Vec8 sinf = steady_state_neumann(gen);

  ConditionedDipole cdp;
  cdp.mode = mode;
  cdp.tau = tau;
  cdp.sigma_inf = sinf;
  Mat3 field;
  if (mode == DetectionMode::M) {
    field = (ce.qd_operator(0) - ce.qd_operator(1)) / std::sqrt(2.0);
    cdp.alpha = (ce.c0[0] - ce.c0[1]) / std::sqrt(2.0);
    cdp.displacement = 0.0;
  } else {
    field = ce.qd_operator(0);
    cdp.alpha = ce.c0[0];
    cdp.displacement = -I * p.epsilon / std::sqrt(p.kappa);
  }
  if (std::abs(cdp.alpha) < 1e-300) throw DegenerateSignal("coherent amplitude of the detected mode vanishes");

  const Mat3 A = detection_operator(p, mode);
  const Mat3 Ad = A.adjoint();
  const cd n = qd_expect(Ad * A, sinf);
  if (!(std::abs(n) > 1e-300)) throw DegenerateSignal("vanishing detection rate");
  Vec8 c0;
  for (int k = 0; k < 8; ++k) c0(k) = qd_expect(Ad * sigma_basis(k) * A, sinf) / n;

  cdp.C_inf = 1.0 - qd_expect(field, sinf) / cdp.alpha;
  cdp.C_values.reserve(tau.size());
  cdp.sigma_tau.reserve(tau.size());
  const Vec8 dc = c0 - sinf;
  for (double t : tau) {
    const Vec8 ct = sinf + propagator_dyson(gen, t) * dc;
    cdp.sigma_tau.push_back(ct);
    const cd C = 1.0 - qd_expect(field, ct) / cdp.alpha;
    if (!std::isfinite(C.real()) || !std::isfinite(C.imag())) throw DegenerateSignal("conditioned dipole diverged");
    cdp.C_values.push_back(C);
  }
  return cdp;
}

}  // namespace onedim
