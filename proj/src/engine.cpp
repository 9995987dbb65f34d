#include "onedim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include "onedim/errors.hpp"
#include "onedim/parallel.hpp"
#include "umf_lu.hpp"

namespace onedim {

namespace odeint = boost::numeric::odeint;

namespace {

SpMat adj(const SpMat& A) { return SpMat(A.adjoint()); }

SpMat constrained_system(const Liouvillian& Lv) {
  const int D = Lv.D, N = D * D;
  std::vector<Eigen::Triplet<cd>> tr;
  tr.reserve(Lv.L.nonZeros() + D);
  for (int k = 0; k < Lv.L.outerSize(); ++k)
    for (SpMat::InnerIterator it(Lv.L, k); it; ++it)
      if (it.row() != 0) tr.emplace_back(int(it.row()), int(it.col()), it.value());
  for (int i = 0; i < D; ++i) tr.emplace_back(0, i + i * D, 1.0);
  SpMat A(N, N);
  A.setFromTriplets(tr.begin(), tr.end());
  A.makeCompressed();
  return A;
}

double relative_floor(const SpMat& L) {
  double m = 0.0;
  for (int k = 0; k < L.outerSize(); ++k)
    for (SpMat::InnerIterator it(L, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return std::numeric_limits<double>::epsilon() * std::max(1.0, m);
}

cd trace_product(const SpMat& B, const cd* x, int D) {
  // tr(B X) = sum_ij B_ij X_ji, X_ji stored at j + i D
  cd acc = 0.0;
  for (int k = 0; k < B.outerSize(); ++k)
    for (SpMat::InnerIterator it(B, k); it; ++it)
      acc += it.value() * x[it.col() + it.row() * D];
  return acc;
}

}  // namespace

SteadyState steady_state(const Liouvillian& Lv) {
  const int D = Lv.D, N = D * D;
  const SpMat A = constrained_system(Lv);
  CVec b = CVec::Zero(N);
  b(0) = 1.0;

  const detail::UmfLU lu(A);
  if (!lu.ok()) throw AmbiguousSteadyState("trace-constrained Liouvillian is singular (" + lu.message() + ")");
  CVec x = lu.solve(b);
  if (!x.allFinite()) throw AmbiguousSteadyState("steady-state solve produced non-finite values");

  // Smallest singular value of A by inverse iteration on (A^H A)^-1.
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  CVec v(N);
  for (int i = 0; i < N; ++i) v(i) = cd(nd(rng), nd(rng));
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 5; ++it) {
    CVec w = lu.solve(v);
    CVec z = lu.solve_adjoint(w);
    lam = z.norm();
    if (!(lam > 0) || !std::isfinite(lam)) break;
    v = z / lam;
  }
  const double sigma_c = (lam > 0 && std::isfinite(lam)) ? 1.0 / std::sqrt(lam) : 0.0;

  SteadyState ss;
  ss.trunc = Lv.trunc;
  ss.rho = unvectorize(x, D);
  ss.residual = (Lv.L * x).norm();
  ss.sigma_constrained = sigma_c;

  const double sigma_null = std::max(ss.residual / x.norm(), relative_floor(Lv.L));
  if (!(sigma_c > 1e3 * sigma_null))
    throw AmbiguousSteadyState("null space of L is not one-dimensional (sigma ratio " +
                               std::to_string(sigma_c / sigma_null) + ")");
  // 1e-10, unless rounding in L x alone already exceeds it
  Eigen::VectorXd absx = x.cwiseAbs();
  Eigen::SparseMatrix<double> absL = Lv.L.cwiseAbs();
  const double floor = 100 * std::numeric_limits<double>::epsilon() * (absL * absx).norm();
  const double tol = std::max(1e-10, floor);
  if (ss.residual > tol)
    throw ConvergenceError("steady-state residual " + std::to_string(ss.residual) + " above tolerance");
  return ss;
}

SteadyStateCheck check_steady_state(const SteadyState& ss) {
  SteadyStateCheck c;
  c.trace_error = std::abs(ss.rho.trace() - 1.0);
  c.hermiticity_error = (ss.rho - ss.rho.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (ss.rho + ss.rho.adjoint()), Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  return c;
}

std::vector<double> CorrelationTrace::real() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
  return out;
}

std::vector<double> default_tau_grid(const PhysicalParams& p, int n) {
  const double beta = derived_rates(p).beta;
  const double tc = 2.0 * (1.0 - beta) / p.gamma;
  std::vector<double> tau;
  tau.reserve(n + 1);
  tau.push_back(0.0);
  const double lo = std::log(1e-3 * tc), hi = std::log(20.0 * tc);
  for (int i = 0; i < n; ++i) tau.push_back(std::exp(lo + (hi - lo) * i / (n - 1)));
  return tau;
}

cd expect(const SpMat& A, const CMat& rho) {
  return trace_product(A, rho.data(), int(rho.rows()));
}

namespace {

using State = std::vector<cd>;

void check_grid(const std::vector<double>& tau) {
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] >= 0) || !std::isfinite(tau[i])) throw InvalidParameter("tau grid must be finite and >= 0");
    if (i > 0 && tau[i] < tau[i - 1]) throw InvalidParameter("tau grid must be ascending");
  }
}

double stiffness(const SpMat& L) {
  double m = 0.0;
  for (int k = 0; k < L.outerSize(); ++k)
    for (SpMat::InnerIterator it(L, k); it; ++it)
      if (it.row() == it.col()) m = std::max(m, std::abs(it.value()));
  return m;
}

std::vector<cd> propagate_spectral(const Liouvillian& Lv, const CVec& x0, const SpMat& B,
                                   const std::vector<double>& tau) {
  const CMat Ld = CMat(Lv.L);
  Eigen::ComplexEigenSolver<CMat> es(Ld, true);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigendecomposition of L failed");
  const CMat& V = es.eigenvectors();
  const CVec& lam = es.eigenvalues();
  Eigen::PartialPivLU<CMat> lu(V);
  const CVec c = lu.solve(x0);
  if ((V * c - x0).norm() > 1e-8 * std::max(1.0, x0.norm()))
    throw ConvergenceError("L is too close to defective for spectral propagation");
  std::vector<cd> out;
  out.reserve(tau.size());
  for (double t : tau) {
    CVec x = V * (lam.array() * t).exp().matrix().cwiseProduct(c);
    out.push_back(trace_product(B, x.data(), Lv.D));
  }
  return out;
}

}  // namespace

std::vector<cd> propagate_expectation(const Liouvillian& Lv, const CMat& X0, const SpMat& B,
                                      const std::vector<double>& tau, const PropagationOptions& opt) {
  check_grid(tau);
  if (tau.empty()) return {};
  const int D = Lv.D, N = D * D;
  const CVec x0 = vectorize(X0);

  const double rate = stiffness(Lv.L);
  const double est_steps = rate * tau.back() / 3.0;
  if (est_steps > 5e6) {
    if (N <= opt.spectral_max_dim) return propagate_spectral(Lv, x0, B, tau);
    throw ConvergenceError("propagation too stiff for explicit integration (rate " + std::to_string(rate) +
                           " rad/ns); reduce the truncation or the cavity splitting");
  }

  const CsrMatrix csr = CsrMatrix::from(Lv.L);
  auto rhs = [&csr](const State& x, State& dxdt, double) { matvec(csr, x.data(), dxdt.data()); };

  std::vector<double> times;
  times.reserve(tau.size() + 1);
  const bool prepend = tau.front() > 0.0;
  if (prepend) times.push_back(0.0);
  times.insert(times.end(), tau.begin(), tau.end());

  std::vector<cd> out;
  out.reserve(tau.size());
  std::size_t idx = 0;
  auto observer = [&](const State& x, double) {
    if (!(prepend && idx == 0)) out.push_back(trace_product(B, x.data(), D));
    ++idx;
  };

  State x(x0.data(), x0.data() + N);
  auto stepper = odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
  const double dt0 = std::min(1e-3, 0.1 / std::max(rate, 1.0));
  try {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observer,
                            odeint::max_step_checker(int(opt.max_steps)));
  } catch (const std::exception& e) {
    throw ConvergenceError(std::string("time propagation failed: ") + e.what());
  }
  for (auto& v : out)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ConvergenceError("propagation diverged");
  return out;
}

CorrelationTrace two_time_correlator(const Liouvillian& L, const SpMat& A, const SpMat& B, const SpMat& C,
                                     const CMat& rho_ss, const std::vector<double>& tau,
                                     const PropagationOptions& opt) {
  const CMat X0 = C * rho_ss * A;
  CorrelationTrace tr;
  tr.tau = tau;
  tr.values = propagate_expectation(L, X0, B, tau, opt);
  tr.normalization = "none";
  return tr;
}

SpMat mode_M(const Operators& o) { return SpMat((o.a_H - o.a_V) / std::sqrt(2.0)); }

SpMat displaced_H(const PhysicalParams& p, const Operators& o) {
  return SpMat(o.a_H - (I * p.epsilon / std::sqrt(p.kappa)) * o.identity);
}

double g2_zero_direct(const SpMat& A, const CMat& rho) {
  const SpMat Ad = adj(A);
  const double n = expect(Ad * A, rho).real();
  const double n2 = expect(Ad * Ad * A * A, rho).real();
  if (!(n > 0)) throw DegenerateSignal("vanishing detection rate");
  return n2 / (n * n);
}

CorrelationTrace g2_of(const Liouvillian& L, const SpMat& A, const CMat& rho, const std::vector<double>& tau,
                       const PropagationOptions& opt) {
  const SpMat Ad = adj(A);
  const SpMat n_op = Ad * A;
  const double n = expect(n_op, rho).real();
  if (!(n > 1e-300) || !std::isfinite(n)) throw DegenerateSignal("vanishing detection rate <A^dag A>");
  const CMat X0 = (A * rho * Ad) / n;
  CorrelationTrace tr;
  tr.tau = tau;
  tr.values = propagate_expectation(L, X0, n_op, tau, opt);
  for (auto& v : tr.values) v /= n;
  tr.norm = n;
  tr.normalization = "<A^dag A>_ss^2";
  return tr;
}

namespace {

void require_drive(const PhysicalParams& p, DriveMode m) {
  if (p.drive_mode != m)
    throw InvalidParameter("operation requires drive_mode=" + to_string(m));
  if (!(p.epsilon > 0)) throw UndefinedAmplitude("amplitude undefined at epsilon = 0");
}

}  // namespace

Amplitude transmission_from(const PhysicalParams& p, const Operators& o, const CMat& rho) {
  const cd aM = expect(mode_M(o), rho);
  const cd t = I * std::sqrt(p.kappa) / p.epsilon * aM;
  return {t, std::norm(t)};
}

Amplitude transmission_mode_reflection_from(const PhysicalParams& p, const Operators& o, const CMat& rho) {
  const cd aP = expect(SpMat((o.a_H + o.a_V) / std::sqrt(2.0)), rho);
  const cd r = 1.0 + I * std::sqrt(p.kappa) / p.epsilon * aP;
  return {r, std::norm(r)};
}

Amplitude reflection_from(const PhysicalParams& p, const Operators& o, const CMat& rho) {
  const cd r = 1.0 + I * std::sqrt(p.kappa) / p.epsilon * expect(o.a_H, rho);
  return {r, std::norm(r)};
}

Amplitude transmission(const PhysicalParams& p, const Truncation& t) {
  require_drive(p, DriveMode::Transmission);
  const auto ss = steady_state(build_liouvillian(p, t));
  return transmission_from(p, build_operators(t), ss.rho);
}

Amplitude transmission_mode_reflection(const PhysicalParams& p, const Truncation& t) {
  require_drive(p, DriveMode::Transmission);
  const auto ss = steady_state(build_liouvillian(p, t));
  return transmission_mode_reflection_from(p, build_operators(t), ss.rho);
}

Amplitude reflection(const PhysicalParams& p, const Truncation& t) {
  require_drive(p, DriveMode::Reflection);
  const auto ss = steady_state(build_liouvillian(p, t));
  return reflection_from(p, build_operators(t), ss.rho);
}

CorrelationTrace g2_transmission_exact(const PhysicalParams& p, const Truncation& t,
                                       const std::vector<double>& tau, const PropagationOptions& opt) {
  require_drive(p, DriveMode::Transmission);
  const auto L = build_liouvillian(p, t);
  const auto ss = steady_state(L);
  const auto o = build_operators(t);
  return g2_of(L, mode_M(o), ss.rho, tau, opt);
}

CorrelationTrace g2_reflection_exact(const PhysicalParams& p, const Truncation& t,
                                     const std::vector<double>& tau, const PropagationOptions& opt) {
  require_drive(p, DriveMode::Reflection);
  const auto L = build_liouvillian(p, t);
  const auto ss = steady_state(L);
  const auto o = build_operators(t);
  return g2_of(L, displaced_H(p, o), ss.rho, tau, opt);
}

std::optional<double> SaturationResult::crossing_nW(double level) const {
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    if ((a.T - level) * (b.T - level) <= 0 && a.T != b.T) {
      // interpolate in log power
      const double la = std::log(std::max(a.power_nW, 1e-300)), lb = std::log(b.power_nW);
      const double f = (level - a.T) / (b.T - a.T);
      return std::exp(la + f * (lb - la));
    }
  }
  return std::nullopt;
}

SaturationResult saturation_sweep(const PhysicalParams& p, const Truncation& t,
                                  const std::vector<double>& power_grid_nW, const SaturationOptions& opt) {
  if (p.drive_mode != DriveMode::Transmission) throw InvalidParameter("saturation sweep needs transmission drive");
  for (std::size_t i = 0; i < power_grid_nW.size(); ++i)
    if (!(power_grid_nW[i] > 0) || (i > 0 && power_grid_nW[i] <= power_grid_nW[i - 1]))
      throw InvalidParameter("power grid must be positive and strictly increasing");
  const auto o = build_operators(t);
  // projector onto n_H = t.n_H
  SpMat top(o.dim, o.dim);
  for (int q = 0; q < 3; ++q)
    for (int nv = 0; nv <= t.n_V; ++nv) {
      const int k = basis_index(t, q, t.n_H, nv);
      top.insert(k, k) = 1.0;
    }

  SaturationResult res;
  res.points.resize(power_grid_nW.size());
  parallel_for(int(power_grid_nW.size()), [&](int i) {
    PhysicalParams q = p;
    q.epsilon = std::sqrt(epsilon_sq_for_power(power_grid_nW[i], p.omega_laser));
    const auto ss = steady_state(build_liouvillian(q, t));
    const auto amp = transmission_from(q, o, ss.rho);
    res.points[i] = {power_grid_nW[i], amp.probability, expect(top, ss.rho).real()};
  });
  if (!res.points.empty()) {
    const auto& last = res.points.back();
    if (opt.check_truncation && last.top_fock_population > opt.max_top_population)
      throw TruncationError("H-mode population at the cutoff is " + std::to_string(last.top_fock_population) +
                            " at " + std::to_string(last.power_nW) + " nW; increase n_H");
    res.plateau_T = last.T;
    res.half_power_nW = res.crossing_nW(0.5 * res.plateau_T);
  }
  return res;
}

}  // namespace onedim
