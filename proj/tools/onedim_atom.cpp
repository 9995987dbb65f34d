// onedim_atom: figure pipelines and ad-hoc runs for the QD / two-mode cavity model.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "onedim/errors.hpp"
#include "onedim/kernels.hpp"
#include "onedim/scenarios.hpp"

using namespace onedim;

namespace {

struct Options {
  std::string method = "auto";
  std::string params_file;
  std::string preset;
  std::vector<std::string> sets;
  std::string sweep;
  std::string output;
  std::string error_json;
  bool error_json_flag = false;
  std::string grid, grid2, tau, powers;
  std::vector<double> ratios;
  std::string truncation;
  std::string panel = "qd";
  std::string observable = "amplitude";
  bool seedless = false;
};

struct ArgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Range {
  double a, b;
  int n;
};

Range parse_range(const std::string& s, const char* what) {
  Range r{};
  char tail;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &r.a, &r.b, &r.n, &tail) != 3 || r.n < 1)
    throw ArgError(std::string(what) + " must look like start:stop:count, got '" + s + "'");
  return r;
}

std::vector<double> ghz_or(const std::string& s, Range def, const char* what) {
  const Range r = s.empty() ? def : parse_range(s, what);
  return ghz_grid(r.a, r.b, r.n);
}

std::vector<double> tau_or(const std::string& s, Range def) {
  const Range r = s.empty() ? def : parse_range(s, "--tau");
  if (r.a != 0.0) throw ArgError("--tau must start at 0");
  return linspace(r.a, r.b, r.n);
}

Truncation truncation_or(const std::string& s, Truncation def) {
  if (s.empty()) return def;
  Truncation t;
  char tail;
  if (std::sscanf(s.c_str(), "%d,%d%c", &t.n_H, &t.n_V, &tail) != 2)
    throw ArgError("--truncation must look like nH,nV, got '" + s + "'");
  t.validate();
  return t;
}

PhysicalParams resolve_params(const Options& o, const std::string& default_preset) {
  PhysicalParams p;
  if (!o.params_file.empty()) {
    std::ifstream in(o.params_file);
    if (!in) throw ArgError("cannot read " + o.params_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ArgError(o.params_file + ": " + e.what());
    }
    // the file must be complete on its own, so start from zeros
    p = params_from_json(j, PhysicalParams{});
  } else {
    p = table_s1_preset(o.preset.empty() ? default_preset : o.preset);
  }
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ArgError("--set expects name=value, got '" + kv + "'");
    double v;
    try {
      std::size_t used;
      v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ArgError("--set value is not a number in '" + kv + "'");
    }
    set_parameter(p, kv.substr(0, eq), v);
  }
  return p;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void emit(const SweepResult& r, const Options& o, const std::string& summary) {
  const bool json = o.output.size() > 5 && o.output.substr(o.output.size() - 5) == ".json";
  if (o.output.empty()) {
    r.write_csv(std::cout);
    std::cerr << summary << '\n';
    return;
  }
  std::ofstream out(o.output);
  if (!out) throw ArgError("cannot write " + o.output);
  if (json) out << r.to_json().dump(2) << '\n';
  else r.write_csv(out);
  std::cout << summary << '\n';
}

std::string min_summary(const SweepResult& r, const std::string& col, const std::string& label) {
  const auto v = r.real(col);
  const auto& x = r.axes[0].grid;
  const auto it = std::min_element(v.begin(), v.end());
  return label + "_min=" + fmt("%.6g", *it) + ", at delta_omega_a/(2pi)=" + fmt("%.4g", x[it - v.begin()]) + " GHz";
}

std::string g2_summary(const SweepResult& r) {
  std::string s = "g2(0)=" + fmt("%.6g", r.extras.value("g2_zero", 0.0));
  if (r.extras.contains("g2_min"))
    s += ", g2_min=" + fmt("%.4g", r.extras["g2_min"].get<double>()) + " at tau=" +
         fmt("%.4g", r.extras["tau_min_ns"].get<double>()) + " ns";
  return s;
}

std::string saturation_summary(const SweepResult& r) {
  std::string s = "plateau_T=" + fmt("%.4g", r.extras["plateau_T"].get<double>());
  if (r.extras.contains("half_plateau_power_nW"))
    s += ", P_sat=" + fmt("%.4g", r.extras["half_plateau_power_nW"].get<double>()) + " nW";
  if (r.extras.contains("crossing_T_0.4_nW"))
    s += ", P(T=0.4)=" + fmt("%.4g", r.extras["crossing_T_0.4_nW"].get<double>()) + " nW";
  return s;
}

std::vector<double> powers_or(const std::string& s, Range def) {
  const Range r = s.empty() ? def : parse_range(s, "--powers");
  return logspace(r.a, r.b, r.n);
}

using Runner = std::function<void(const Options&)>;

std::map<std::string, std::pair<std::string, Runner>> commands() {
  std::map<std::string, std::pair<std::string, Runner>> c;
  c["fig1c"] = {"transmission map over QD and cavity detuning", [](const Options& o) {
                  const auto p = resolve_params(o, "fig1d");
                  const auto r = sweep_transmission_2d(p, ghz_or(o.grid, {-3, 3, 121}, "--grid"),
                                                       ghz_or(o.grid2, {-70, 70, 141}, "--grid2"),
                                                       method_from_string(o.method), truncation_or(o.truncation, {}));
                  const auto v = r.real("T_full");
                  emit(r, o, "T_max=" + fmt("%.4g", *std::max_element(v.begin(), v.end())) +
                                 ", T_min=" + fmt("%.4g", *std::min_element(v.begin(), v.end())));
                }};
  c["fig1d"] = {"transmission vs QD detuning on cavity resonance", [](const Options& o) {
                  const auto p = resolve_params(o, "fig1d");
                  const auto r = sweep_transmission_1d(p, ghz_or(o.grid, {-3, 3, 601}, "--grid"),
                                                       method_from_string(o.method), truncation_or(o.truncation, {}));
                  emit(r, o, min_summary(r, "T_full", "T"));
                }};
  auto saturation = [](const Options& o, int n) {
    const auto p = resolve_params(o, "fig1d_inset");
    if (o.method != "auto" && o.method != "exact") throw ArgError("saturation runs on the exact engine only");
    const auto r = saturation_curve(p, powers_or(o.powers, {1e-3, 50.0, n}), truncation_or(o.truncation, {10, 3}));
    emit(r, o, saturation_summary(r));
  };
  c["fig1d-inset"] = {"transmission vs input power at maximum extinction",
                      [saturation](const Options& o) { saturation(o, 26); }};
  c["si-saturation"] = {"saturation curve on a denser power grid",
                        [saturation](const Options& o) { saturation(o, 41); }};
  c["fig2a"] = {"transmission g2(tau) at maximum extinction", [](const Options& o) {
                  const auto p = resolve_params(o, "fig2a");
                  const auto r = g2_trace(p, tau_or(o.tau, {0, 2, 401}), method_from_string(o.method),
                                          truncation_or(o.truncation, {}));
                  emit(r, o, g2_summary(r));
                }};
  c["fig2b"] = {"transmission g2(tau) for the four coupling strengths", [](const Options& o) {
                  if (!o.params_file.empty() || !o.preset.empty() || !o.sets.empty())
                    throw ArgError("fig2b uses its four fixed presets");
                  const std::vector<std::string> ids = {"fig2b_g48", "fig2b_g24", "fig2b_g14", "fig2b_g065"};
                  const auto r = beta_sweep_g2(ids, tau_or(o.tau, {0, 2, 401}), method_from_string(o.method),
                                               truncation_or(o.truncation, {}));
                  std::string s = "g2(0):";
                  for (const auto& id : ids) s += " " + id + "=" + fmt("%.4g", r.extras["g2_zero"][id].get<double>());
                  emit(r, o, s);
                }};
  c["fig3a"] = {"reflection vs QD detuning on cavity resonance", [](const Options& o) {
                  const auto p = resolve_params(o, "fig3a");
                  const auto r = sweep_reflection_1d(p, ghz_or(o.grid, {-3, 3, 601}, "--grid"),
                                                     method_from_string(o.method), truncation_or(o.truncation, {}));
                  emit(r, o, min_summary(r, "R_full", "R"));
                }};
  c["fig3b"] = {"reflection g2(tau)", [](const Options& o) {
                  const auto p = resolve_params(o, "fig3b");
                  const auto r = g2_trace(p, tau_or(o.tau, {0, 1.5, 301}), method_from_string(o.method),
                                          truncation_or(o.truncation, {}));
                  emit(r, o, g2_summary(r));
                }};
  c["si-phase"] = {"phases of the reflected H and V light", [](const Options& o) {
                     auto p = resolve_params(o, "fig1d");
                     if (o.method != "auto" && o.method != "effective")
                       throw ArgError("si-phase uses the weak-drive linear response only");
                     SweepResult r;
                     if (o.panel == "qd") {
                       p.delta_omega_H = 0.0;
                       r = phase_sweep(p, SweepAxis::QdDetuning, ghz_or(o.grid, {-3, 3, 601}, "--grid"));
                     } else if (o.panel == "cavity") {
                       p.delta_omega_a = from_GHz(5.0);
                       r = phase_sweep(p, SweepAxis::CavityDetuning, ghz_or(o.grid, {-70, 70, 701}, "--grid"));
                     } else {
                       throw ArgError("--panel must be qd or cavity");
                     }
                     const auto v = r.real("T_full");
                     emit(r, o, "panel=" + o.panel + ", T_min=" + fmt("%.4g", *std::min_element(v.begin(), v.end())) +
                                    ", T_max=" + fmt("%.4g", *std::max_element(v.begin(), v.end())));
                   }};
  c["si-dephasing"] = {"transmission g2 for several dephasing rates", [](const Options& o) {
                         const auto p = resolve_params(o, "fig2a");
                         const auto ratios = o.ratios.empty() ? std::vector<double>{0, 0.5, 1, 2} : o.ratios;
                         const auto r = dephasing_sweep(p, ratios, tau_or(o.tau, {0, 4, 401}),
                                                        method_from_string(o.method), truncation_or(o.truncation, {}));
                         std::string s;
                         for (const auto& d : dephasing_summary(r))
                           s += (s.empty() ? "" : "; ") + std::string("gD/gamma=") + fmt("%g", d.ratio) +
                                ": g2(0)=" + fmt("%.4g", d.g2_zero) + ", min=" + fmt("%.3g", d.min_value);
                         emit(r, o, s);
                       }};
  auto g2map = [](const Options& o, const std::string& preset) {
    const auto p = resolve_params(o, preset);
    const auto r = sweep_g2_vs_detuning(p, SweepAxis::CavityDetuning, ghz_or(o.grid, {-70, 70, 57}, "--grid"),
                                        tau_or(o.tau, {0, 1.5, 151}), method_from_string(o.method),
                                        truncation_or(o.truncation, {}));
    const auto v = r.real("g2");
    const std::size_t nt = r.axes[1].grid.size();
    double best = -1, at = 0;
    for (std::size_t i = 0; i < r.axes[0].grid.size(); ++i)
      if (v[i * nt] > best) best = v[i * nt], at = r.axes[0].grid[i];
    emit(r, o, "max g2(0)=" + fmt("%.5g", best) + " at delta_omega_H/(2pi)=" + fmt("%.4g", at) + " GHz");
  };
  c["si-g2map-transmission"] = {"transmission g2 over cavity detuning and delay",
                                [g2map](const Options& o) { g2map(o, "fig2b_g48"); }};
  c["si-g2map-reflection"] = {"reflection g2 over cavity detuning and delay",
                              [g2map](const Options& o) { g2map(o, "fig3b"); }};
  c["custom"] = {"any parameter point or 1-D sweep", [](const Options& o) {
                   const auto p0 = resolve_params(o, "fig1d");
                   std::string name;
                   std::vector<double> xs;
                   if (!o.sweep.empty()) {
                     const auto eq = o.sweep.find('=');
                     if (eq == std::string::npos) throw ArgError("--sweep expects name=start:stop:count");
                     name = o.sweep.substr(0, eq);
                     const Range rg = parse_range(o.sweep.substr(eq + 1), "--sweep");
                     xs = linspace(rg.a, rg.b, rg.n);
                     parameter_column(name);
                   }
                   const Truncation t = truncation_or(o.truncation, {});
                   const Method m = method_from_string(o.method);
                   SweepResult r;
                   if (o.observable == "amplitude") {
                     const Method rm = resolve_amplitude_method(m);
                     const int n = xs.empty() ? 1 : int(xs.size());
                     std::vector<cd> amp(n);
                     std::vector<double> prob(n);
                     for (int i = 0; i < n; ++i) {
                       PhysicalParams p = p0;
                       if (!xs.empty()) set_parameter(p, name, xs[i]);
                       const auto a = drive_amplitude(p, rm, t);
                       amp[i] = a.amplitude;
                       prob[i] = a.probability;
                     }
                     r.axes.push_back({xs.empty() ? "point" : parameter_column(name), xs.empty() ? std::vector<double>{0.0} : xs});
                     const std::string lab = p0.drive_mode == DriveMode::Transmission ? "t" : "r";
                     r.add_complex(lab, rm, amp);
                     r.add_real(lab == "t" ? "T" : "R", rm, prob);
                     r.params = to_json(p0);
                     emit(r, o, "rows=" + std::to_string(n) + ", " + (lab == "t" ? "T" : "R") + " in [" +
                                    fmt("%.6g", *std::min_element(prob.begin(), prob.end())) + ", " +
                                    fmt("%.6g", *std::max_element(prob.begin(), prob.end())) + "]");
                   } else if (o.observable == "g2") {
                     if (!xs.empty()) throw ArgError("--observable g2 takes a single point; drop --sweep");
                     r = g2_trace(p0, tau_or(o.tau, {0, 2, 401}), m, t);
                     emit(r, o, g2_summary(r));
                   } else {
                     throw ArgError("--observable must be amplitude or g2");
                   }
                 }};
  return c;
}

int threads_from_env() {
  const char* s = std::getenv("ONEDIM_ATOM_THREADS");
  if (!s || !*s) return 0;
  char* end;
  const long n = std::strtol(s, &end, 10);
  if (*end || n < 1 || n > 4096) throw ArgError(std::string("ONEDIM_ATOM_THREADS must be a positive integer, got '") + s + "'");
  return int(n);
}

void report(const Options& o, const std::string& kind, const std::string& msg, int code) {
  std::cerr << "error (" << kind << "): " << msg << '\n';
  if (!o.error_json_flag && o.error_json.empty()) return;
  const nlohmann::json j = {{"error", kind}, {"message", msg}, {"exit_code", code}};
  if (o.error_json.empty() || o.error_json == "-") {
    std::cerr << j.dump() << '\n';
  } else {
    std::ofstream out(o.error_json);
    out << j.dump() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum dot in a two-mode cavity: transmission, reflection and photon statistics"};
  app.require_subcommand(1);
  Options o;
  const auto cmds = commands();
  std::map<CLI::App*, Runner> runners;
  for (const auto& [name, entry] : cmds) {
    auto* sc = app.add_subcommand(name, entry.first);
    sc->add_option("--method", o.method, "auto | exact | effective | analytic | rc")->capture_default_str();
    auto* pf = sc->add_option("--params", o.params_file, "JSON parameter file (complete)");
    auto* pr = sc->add_option("--preset", o.preset, "parameter preset id");
    pf->excludes(pr);
    sc->add_option("--set", o.sets, "override one parameter, name=value in /(2pi) GHz or degrees");
    sc->add_option("--output,-o", o.output, "CSV path, or .json for the JSON form");
    auto* ej = sc->add_option("--error-json", o.error_json, "write error JSON here ('-' for stderr)");
    ej->expected(0, 1);
    sc->add_option("--grid", o.grid, "first axis, start:stop:count in /(2pi) GHz");
    sc->add_option("--grid2", o.grid2, "second axis, start:stop:count in /(2pi) GHz");
    sc->add_option("--tau", o.tau, "delays, 0:stop:count in ns");
    sc->add_option("--powers", o.powers, "input powers, start:stop:count in nW (log spaced)");
    sc->add_option("--ratios", o.ratios, "gamma_D/gamma values")->delimiter(',');
    sc->add_option("--truncation", o.truncation, "Fock cutoffs nH,nV");
    sc->add_flag("--seedless", o.seedless, "accepted for scripts; every run is deterministic");
    if (name == "si-phase") sc->add_option("--panel", o.panel, "qd | cavity")->capture_default_str();
    if (name == "custom") {
      sc->add_option("--sweep", o.sweep, "name=start:stop:count");
      sc->add_option("--observable", o.observable, "amplitude | g2")->capture_default_str();
    }
    runners[sc] = entry.second;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error (argument): " << e.what() << '\n';
    return 2;
  }
  for (auto* sc : app.get_subcommands())
    for (auto* opt : sc->get_options())
      if (opt->get_name() == "--error-json" && opt->count() > 0) o.error_json_flag = true;

  try {
    if (const int n = threads_from_env()) set_threads(n);
    runners.at(app.get_subcommands().front())(o);
  } catch (const ArgError& e) {
    report(o, "argument", e.what(), 2);
    return 2;
  } catch (const Error& e) {
    const int code = e.numerical() ? 3 : 2;
    report(o, e.kind(), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report(o, "internal", e.what(), 3);
    return 3;
  }
  return 0;
}
