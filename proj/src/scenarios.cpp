#include "onedim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "onedim/analytic.hpp"
#include "onedim/effective.hpp"
#include "onedim/errors.hpp"
#include "onedim/parallel.hpp"

namespace onedim {

std::string to_string(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Exact: return "exact";
    case Method::Effective: return "effective";
    case Method::Analytic: return "analytic";
    case Method::RC: return "rc";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "auto") return Method::Auto;
  if (s == "exact") return Method::Exact;
  if (s == "effective") return Method::Effective;
  if (s == "analytic") return Method::Analytic;
  if (s == "rc") return Method::RC;
  throw InvalidParameter("unknown method '" + s + "' (auto, exact, effective, analytic, rc)");
}

// ---- SweepResult

std::size_t SweepResult::rows() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.grid.size();
  return n;
}

void SweepResult::add_real(const std::string& name, Method m, const std::vector<double>& v) {
  Column c{name, to_string(m), false, {}};
  c.values.assign(v.begin(), v.end());
  columns.push_back(std::move(c));
}

void SweepResult::add_complex(const std::string& name, Method m, const std::vector<cd>& v) {
  columns.push_back({name, to_string(m), true, v});
}

const Column& SweepResult::column(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return c;
  throw LookupError("no column '" + name + "'");
}

std::vector<double> SweepResult::real(const std::string& name) const {
  const auto& c = column(name);
  std::vector<double> v;
  v.reserve(c.values.size());
  for (const auto& x : c.values) v.push_back(x.real());
  return v;
}

void SweepResult::validate() const {
  const std::size_t n = rows();
  for (const auto& c : columns) {
    if (c.values.size() != n)
      throw InvalidParameter("column '" + c.name + "' has " + std::to_string(c.values.size()) + " rows, grid has " +
                             std::to_string(n));
    if (c.method != "exact" && c.method != "effective" && c.method != "analytic" && c.method != "rc")
      throw InvalidParameter("column '" + c.name + "' has method tag '" + c.method + "'");
  }
}

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

void SweepResult::write_csv(std::ostream& os) const {
  validate();
  std::string line;
  for (const auto& a : axes) line += (line.empty() ? "" : ",") + a.name;
  for (const auto& c : columns) {
    if (c.is_complex) line += "," + c.name + "_re," + c.name + "_im";
    else line += "," + c.name;
  }
  os << line << '\n';
  const std::size_t n = rows();
  std::vector<std::size_t> stride(axes.size(), 1);
  for (int k = int(axes.size()) - 2; k >= 0; --k) stride[k] = stride[k + 1] * axes[k + 1].grid.size();
  for (std::size_t r = 0; r < n; ++r) {
    line.clear();
    for (std::size_t k = 0; k < axes.size(); ++k) {
      if (k) line += ',';
      line += num(axes[k].grid[(r / stride[k]) % axes[k].grid.size()]);
    }
    for (const auto& c : columns) {
      line += ',' + num(c.values[r].real());
      if (c.is_complex) line += ',' + num(c.values[r].imag());
    }
    os << line << '\n';
  }
}

nlohmann::json SweepResult::to_json() const {
  validate();
  nlohmann::json j;
  j["axes"] = nlohmann::json::array();
  for (const auto& a : axes) j["axes"].push_back({{"name", a.name}, {"grid", a.grid}});
  j["columns"] = nlohmann::json::array();
  for (const auto& c : columns) {
    nlohmann::json col = {{"name", c.name}, {"method", c.method}};
    std::vector<double> re, im;
    for (const auto& x : c.values) {
      re.push_back(x.real());
      im.push_back(x.imag());
    }
    if (c.is_complex) {
      col["re"] = re;
      col["im"] = im;
    } else {
      col["values"] = re;
    }
    j["columns"].push_back(col);
  }
  j["params"] = params;
  j["extras"] = extras;
  return j;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw InvalidParameter("grid needs at least one point");
  if (n == 1) return {a};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  if (!(a > 0 && b > 0)) throw InvalidParameter("log grid needs positive endpoints");
  auto e = linspace(std::log10(a), std::log10(b), n);
  for (auto& x : e) x = std::pow(10.0, x);
  return e;
}

std::vector<double> ghz_grid(double a_GHz, double b_GHz, int n) {
  auto v = linspace(a_GHz, b_GHz, n);
  for (auto& x : v) x = from_GHz(x);
  return v;
}

// ---- method dispatch

Method resolve_amplitude_method(Method m) {
  if (m == Method::Auto) return Method::Analytic;
  if (m == Method::RC) throw InvalidParameter("method rc gives correlations, not amplitudes");
  return m;
}

Method resolve_g2_method(Method m) {
  if (m == Method::Auto) return Method::Exact;
  if (m == Method::Effective) return Method::RC;
  if (m == Method::Analytic) throw InvalidParameter("no closed-form g2 for the full model; use exact or rc");
  return m;
}

Amplitude drive_amplitude(const PhysicalParams& p, Method m, const Truncation& t) {
  const bool tr = p.drive_mode == DriveMode::Transmission;
  switch (resolve_amplitude_method(m)) {
    case Method::Analytic: {
      const auto a = tr ? transmission_amplitude(p) : reflection_amplitude(p);
      return {a.amplitude, a.magnitude_sq};
    }
    case Method::Effective: {
      const Vec8 s = steady_state_neumann(build_effective_generator(p));
      const cd a = tr ? transmission_from_qd(p, s) : reflection_from_qd(p, s);
      return {a, std::norm(a)};
    }
    case Method::Exact: return tr ? transmission(p, t) : reflection(p, t);
    default: break;
  }
  throw InvalidParameter("unsupported method");
}

CorrelationTrace drive_g2(const PhysicalParams& p, Method m, const std::vector<double>& tau, const Truncation& t) {
  if (resolve_g2_method(m) == Method::RC) return g2_from_rc(p, default_detection(p), tau);
  return p.drive_mode == DriveMode::Transmission ? g2_transmission_exact(p, t, tau) : g2_reflection_exact(p, t, tau);
}

namespace {

const char* dwa_col = "delta_omega_a_over_2pi_GHz";
const char* dwH_col = "delta_omega_H_over_2pi_GHz";
const char* tau_col = "tau_ns";

std::vector<double> to_ghz(const std::vector<double>& v) {
  std::vector<double> o(v.size());
  std::transform(v.begin(), v.end(), o.begin(), to_GHz);
  return o;
}

PhysicalParams with_drive(PhysicalParams p, DriveMode d) {
  p.drive_mode = d;
  return p;
}

SweepResult amplitude_1d(const PhysicalParams& p0, const std::vector<double>& dwa, Method m, const Truncation& t,
                         const char* label) {
  const Method rm = resolve_amplitude_method(m);
  const int n = int(dwa.size());
  std::vector<double> full(n), jc(n);
  const PhysicalParams pj = jc_limit(p0);
  parallel_for(n, [&](int i) {
    PhysicalParams p = p0, q = pj;
    p.delta_omega_a = q.delta_omega_a = dwa[i];
    full[i] = drive_amplitude(p, rm, t).probability;
    jc[i] = drive_amplitude(q, rm, t).probability;
  });
  SweepResult r;
  r.axes.push_back({dwa_col, to_ghz(dwa)});
  r.add_real(std::string(label) + "_full", rm, full);
  r.add_real(std::string(label) + "_jc", rm, jc);
  r.params = to_json(p0);
  const auto it = std::min_element(full.begin(), full.end());
  if (it != full.end()) {
    r.extras[std::string(label) + "_min"] = *it;
    r.extras["argmin_" + std::string(dwa_col)] = to_GHz(dwa[it - full.begin()]);
  }
  return r;
}

SweepResult amplitude_2d(const PhysicalParams& p0, const std::vector<double>& dwa, const std::vector<double>& dwH,
                         Method m, const Truncation& t, const char* label) {
  const Method rm = resolve_amplitude_method(m);
  const int na = int(dwa.size()), nh = int(dwH.size());
  std::vector<double> full(std::size_t(na) * nh), jc(full.size());
  const PhysicalParams pj = jc_limit(p0);
  parallel_for(na * nh, [&](int k) {
    PhysicalParams p = p0, q = pj;
    p.delta_omega_a = q.delta_omega_a = dwa[k / nh];
    p.delta_omega_H = q.delta_omega_H = dwH[k % nh];
    full[k] = drive_amplitude(p, rm, t).probability;
    jc[k] = drive_amplitude(q, rm, t).probability;
  });
  SweepResult r;
  r.axes.push_back({dwa_col, to_ghz(dwa)});
  r.axes.push_back({dwH_col, to_ghz(dwH)});
  r.add_real(std::string(label) + "_full", rm, full);
  r.add_real(std::string(label) + "_jc", rm, jc);
  r.params = to_json(p0);
  // where the single-excitation gaps close, as dashed overlay lines
  nlohmann::json loci = nlohmann::json::array();
  for (double h : dwH) {
    PhysicalParams p = p0;
    p.delta_omega_H = h;
    loci.push_back({{dwH_col, to_GHz(h)}, {dwa_col, to_ghz(resonance_frequencies(p, SweepAxis::QdDetuning))}});
  }
  r.extras["resonance_loci"] = loci;
  return r;
}

}  // namespace

SweepResult sweep_transmission_1d(const PhysicalParams& p, const std::vector<double>& dwa, Method m,
                                  const Truncation& t) {
  return amplitude_1d(with_drive(p, DriveMode::Transmission), dwa, m, t, "T");
}

SweepResult sweep_reflection_1d(const PhysicalParams& p, const std::vector<double>& dwa, Method m,
                                const Truncation& t) {
  return amplitude_1d(with_drive(p, DriveMode::Reflection), dwa, m, t, "R");
}

SweepResult sweep_transmission_2d(const PhysicalParams& p, const std::vector<double>& dwa,
                                  const std::vector<double>& dwH, Method m, const Truncation& t) {
  return amplitude_2d(with_drive(p, DriveMode::Transmission), dwa, dwH, m, t, "T");
}

SweepResult sweep_reflection_2d(const PhysicalParams& p, const std::vector<double>& dwa,
                                const std::vector<double>& dwH, Method m, const Truncation& t) {
  return amplitude_2d(with_drive(p, DriveMode::Reflection), dwa, dwH, m, t, "R");
}

namespace {

std::vector<double> jc_g2_curve(const PhysicalParams& p, const std::vector<double>& tau) {
  const double beta = derived_rates(p).beta;
  std::vector<double> v(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i)
    v[i] = p.drive_mode == DriveMode::Transmission ? jc_g2_transmission(beta, 1.0, p.gamma, tau[i])
                                                   : jc_g2_reflection(beta, p.gamma, tau[i]);
  return v;
}

}  // namespace

SweepResult g2_trace(const PhysicalParams& p, const std::vector<double>& tau, Method m, const Truncation& t) {
  const Method rm = resolve_g2_method(m);
  const auto tr = drive_g2(p, rm, tau, t);
  SweepResult r;
  r.axes.push_back({tau_col, tau});
  r.add_real("g2_full", rm, tr.real());
  r.add_real("g2_jc", Method::Analytic, jc_g2_curve(p, tau));
  r.params = to_json(p);
  const auto g = tr.real();
  if (!g.empty()) {
    r.extras["g2_zero"] = g.front();
    auto it = std::min_element(g.begin() + 1, g.end());
    if (it != g.end()) {
      r.extras["g2_min"] = *it;
      r.extras["tau_min_ns"] = tau[it - g.begin()];
    }
  }
  return r;
}

SweepResult sweep_g2_vs_detuning(const PhysicalParams& p0, SweepAxis axis, const std::vector<double>& grid,
                                 const std::vector<double>& tau, Method m, const Truncation& t) {
  if (axis == SweepAxis::Laser) throw InvalidParameter("g2 maps sweep the QD or the cavity detuning");
  const Method rm = resolve_g2_method(m);
  const int nx = int(grid.size()), nt = int(tau.size());
  std::vector<double> g(std::size_t(nx) * nt);
  parallel_for(nx, [&](int i) {
    PhysicalParams p = p0;
    (axis == SweepAxis::QdDetuning ? p.delta_omega_a : p.delta_omega_H) = grid[i];
    const auto tr = drive_g2(p, rm, tau, t);
    for (int k = 0; k < nt; ++k) g[std::size_t(i) * nt + k] = tr.values[k].real();
  });
  SweepResult r;
  r.axes.push_back({axis == SweepAxis::QdDetuning ? dwa_col : dwH_col, to_ghz(grid)});
  r.axes.push_back({tau_col, tau});
  r.add_real("g2", rm, g);
  r.params = to_json(p0);
  // cuts drawn on the map: H resonance, V resonance, and delta_omega_H = delta_cav
  if (axis == SweepAxis::CavityDetuning)
    r.extras["cuts_" + std::string(dwH_col)] = {0.0, -to_GHz(p0.delta_cav), to_GHz(p0.delta_cav)};
  return r;
}

SweepResult beta_sweep_g2(const std::vector<std::string>& presets, const std::vector<double>& tau, Method m,
                          const Truncation& t, double eps_sq) {
  const Method rm = resolve_g2_method(m);
  const int n = int(presets.size());
  std::vector<std::vector<double>> full(n), jc(n);
  std::vector<double> betas(n);
  parallel_for(n, [&](int i) {
    PhysicalParams p = table_s1_preset(presets[i]);
    set_epsilon_sq_over_2pi_GHz(p, eps_sq);
    full[i] = drive_g2(p, rm, tau, t).real();
    jc[i] = jc_g2_curve(p, tau);
    betas[i] = derived_rates(p).beta;
  });
  SweepResult r;
  r.axes.push_back({tau_col, tau});
  for (int i = 0; i < n; ++i) r.add_real("g2_" + presets[i], rm, full[i]);
  for (int i = 0; i < n; ++i) r.add_real("g2_jc_" + presets[i], Method::Analytic, jc[i]);
  r.params = nlohmann::json::object();
  for (int i = 0; i < n; ++i) {
    PhysicalParams p = table_s1_preset(presets[i]);
    set_epsilon_sq_over_2pi_GHz(p, eps_sq);
    r.params[presets[i]] = to_json(p);
    r.extras["beta"][presets[i]] = betas[i];
    r.extras["g2_zero"][presets[i]] = full[i].empty() ? 0.0 : full[i].front();
  }
  return r;
}

SweepResult dephasing_sweep(const PhysicalParams& p0, const std::vector<double>& ratios,
                            const std::vector<double>& tau, Method m, const Truncation& t) {
  if (tau.size() < 2 || tau.front() != 0.0) throw InvalidParameter("dephasing sweep needs a tau grid starting at 0");
  const Method rm = resolve_g2_method(m);
  const int n = int(ratios.size());
  std::vector<std::vector<double>> g(n);
  parallel_for(n, [&](int i) {
    if (!(ratios[i] >= 0)) throw InvalidParameter("gamma_D/gamma must be >= 0");
    PhysicalParams p = p0;
    p.gamma_D = ratios[i] * p0.gamma;
    g[i] = drive_g2(p, rm, tau, t).real();
  });
  SweepResult r;
  r.axes.push_back({tau_col, tau});
  r.extras["dephasing"] = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    r.add_real("g2_gD_over_gamma_" + num(ratios[i]), rm, g[i]);
    auto it = std::min_element(g[i].begin() + 1, g[i].end());
    r.extras["dephasing"].push_back({{"ratio", ratios[i]},
                                     {"g2_zero", g[i].front()},
                                     {"min_value", *it},
                                     {"min_tau_ns", tau[it - g[i].begin()]}});
  }
  r.params = to_json(p0);
  return r;
}

std::vector<DephasingPoint> dephasing_summary(const SweepResult& r) {
  if (!r.extras.contains("dephasing")) throw LookupError("not a dephasing sweep");
  std::vector<DephasingPoint> out;
  for (const auto& e : r.extras["dephasing"])
    out.push_back({e["ratio"].get<double>(), e["g2_zero"].get<double>(), e["min_value"].get<double>(),
                   e["min_tau_ns"].get<double>()});
  return out;
}

SweepResult saturation_curve(const PhysicalParams& p, const std::vector<double>& power_nW, const Truncation& t,
                             const SaturationOptions& opt) {
  const auto s = saturation_sweep(with_drive(p, DriveMode::Transmission), t, power_nW, opt);
  std::vector<double> P, T, top;
  for (const auto& pt : s.points) {
    P.push_back(pt.power_nW);
    T.push_back(pt.T);
    top.push_back(pt.top_fock_population);
  }
  SweepResult r;
  r.axes.push_back({"P_in_nW", P});
  r.add_real("T", Method::Exact, T);
  r.add_real("top_fock_population", Method::Exact, top);
  r.params = to_json(p);
  r.params["n_H"] = t.n_H;
  r.params["n_V"] = t.n_V;
  r.extras["plateau_T"] = s.plateau_T;
  if (s.half_power_nW) r.extras["half_plateau_power_nW"] = *s.half_power_nW;
  if (auto c = s.crossing_nW(0.4)) r.extras["crossing_T_0.4_nW"] = *c;
  return r;
}

SweepResult phase_sweep(const PhysicalParams& p0, SweepAxis axis, const std::vector<double>& grid) {
  if (axis == SweepAxis::Laser) throw InvalidParameter("phase sweep runs along the QD or the cavity detuning");
  const PhysicalParams pf = with_drive(p0, DriveMode::Transmission);
  const PhysicalParams pj = jc_limit(pf);
  const int n = int(grid.size());
  std::vector<PhaseDecomposition> f(n), j(n);
  parallel_for(n, [&](int i) {
    PhysicalParams a = pf, b = pj;
    double& xa = axis == SweepAxis::QdDetuning ? a.delta_omega_a : a.delta_omega_H;
    double& xb = axis == SweepAxis::QdDetuning ? b.delta_omega_a : b.delta_omega_H;
    xa = xb = grid[i];
    f[i] = phase_decomposition(a);
    j[i] = phase_decomposition(b);
  });
  SweepResult r;
  r.axes.push_back({axis == SweepAxis::QdDetuning ? dwa_col : dwH_col, to_ghz(grid)});
  auto emit = [&](const std::vector<PhaseDecomposition>& d, const std::string& sfx) {
    std::vector<double> T, RH, RV, pH, pV, rel;
    for (const auto& x : d) {
      T.push_back(x.T);
      RH.push_back(std::norm(x.r_H));
      RV.push_back(std::norm(x.r_V));
      pH.push_back(x.phi_H);
      pV.push_back(x.phi_V);
      rel.push_back(std::remainder(x.phi_H - x.phi_V, two_pi));
    }
    r.add_real("T" + sfx, Method::Effective, T);
    r.add_real("R_H" + sfx, Method::Effective, RH);
    r.add_real("R_V" + sfx, Method::Effective, RV);
    r.add_real("phi_H" + sfx, Method::Effective, pH);
    r.add_real("phi_V" + sfx, Method::Effective, pV);
    r.add_real("phi_rel" + sfx, Method::Effective, rel);
  };
  emit(f, "_full");
  emit(j, "_jc");
  r.params = to_json(pf);
  return r;
}

namespace {

const std::map<std::string, std::string>& parameter_keys() {
  static const std::map<std::string, std::string> k = {
      {"g", "g_over_2pi_GHz"},
      {"kappa", "kappa_over_2pi_GHz"},
      {"gamma", "gamma_over_2pi_GHz"},
      {"gamma_D", "gamma_D_over_2pi_GHz"},
      {"theta", "theta_deg"},
      {"delta_cav", "delta_cav_over_2pi_GHz"},
      {"delta_QD", "delta_QD_over_2pi_GHz"},
      {"delta_omega_a", "delta_omega_a_over_2pi_GHz"},
      {"delta_omega_H", "delta_omega_H_over_2pi_GHz"},
      {"epsilon_sq", "epsilon_sq_over_2pi_GHz"},
      {"omega_laser", "omega_laser_over_2pi_THz"},
  };
  return k;
}

}  // namespace

std::string parameter_column(const std::string& name) {
  const auto& k = parameter_keys();
  if (auto it = k.find(name); it != k.end()) return it->second;
  for (const auto& [_, v] : k)
    if (v == name) return v;
  throw InvalidParameter("unknown sweep parameter '" + name + "'");
}

void set_parameter(PhysicalParams& p, const std::string& name, double value) {
  p = params_from_json({{parameter_column(name), value}}, p);
}

}  // namespace onedim
