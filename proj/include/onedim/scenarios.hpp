#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "onedim/engine.hpp"
#include "onedim/rcstate.hpp"

namespace onedim {

enum class Method { Auto, Exact, Effective, Analytic, RC };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct Axis {
  std::string name;  // CSV column name, unit included
  std::vector<double> grid;
};

struct Column {
  std::string name;
  std::string method;  // exact | effective | analytic | rc
  bool is_complex = false;
  std::vector<cd> values;
};

// Tabular result; 2-D sweeps are long format with the first axis slowest.
struct SweepResult {
  std::vector<Axis> axes;
  std::vector<Column> columns;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json extras = nlohmann::json::object();

  std::size_t rows() const;
  void add_real(const std::string& name, Method m, const std::vector<double>& v);
  void add_complex(const std::string& name, Method m, const std::vector<cd>& v);
  const Column& column(const std::string& name) const;
  std::vector<double> real(const std::string& name) const;
  void validate() const;

  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
};

std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n);  // a, b are the endpoints, not exponents

// Grids in the units used on the command line, converted on entry.
std::vector<double> ghz_grid(double a_GHz, double b_GHz, int n);

// Amplitude of the drive mode's natural observable (t for transmission, r<- for reflection).
// Method::Auto resolves to analytic.
Amplitude drive_amplitude(const PhysicalParams& p, Method m, const Truncation& t = {});
// g2 trace of the drive mode's detected field. Method::Auto resolves to exact.
CorrelationTrace drive_g2(const PhysicalParams& p, Method m, const std::vector<double>& tau,
                          const Truncation& t = {});
Method resolve_amplitude_method(Method m);
Method resolve_g2_method(Method m);

SweepResult sweep_transmission_1d(const PhysicalParams& p, const std::vector<double>& dwa, Method m,
                                  const Truncation& t = {});
SweepResult sweep_reflection_1d(const PhysicalParams& p, const std::vector<double>& dwa, Method m,
                                const Truncation& t = {});
SweepResult sweep_transmission_2d(const PhysicalParams& p, const std::vector<double>& dwa,
                                  const std::vector<double>& dwH, Method m, const Truncation& t = {});
SweepResult sweep_reflection_2d(const PhysicalParams& p, const std::vector<double>& dwa,
                                const std::vector<double>& dwH, Method m, const Truncation& t = {});

// g2(tau) of a single parameter point, full model plus the resonant JC curve.
SweepResult g2_trace(const PhysicalParams& p, const std::vector<double>& tau, Method m, const Truncation& t = {});

// g2(tau) along a detuning cut; long format (detuning, tau).
SweepResult sweep_g2_vs_detuning(const PhysicalParams& p, SweepAxis axis, const std::vector<double>& grid,
                                 const std::vector<double>& tau, Method m, const Truncation& t = {});

// One g2 column per preset id.
SweepResult beta_sweep_g2(const std::vector<std::string>& presets, const std::vector<double>& tau, Method m,
                          const Truncation& t = {}, double epsilon_sq_over_2pi_GHz = default_epsilon_sq_over_2pi_GHz);

struct DephasingPoint {
  double ratio;       // gamma_D / gamma
  double g2_zero;
  double min_value;   // smallest g2 at tau > 0
  double min_tau;
};
SweepResult dephasing_sweep(const PhysicalParams& p, const std::vector<double>& ratios,
                            const std::vector<double>& tau, Method m, const Truncation& t = {});
std::vector<DephasingPoint> dephasing_summary(const SweepResult& r);

SweepResult saturation_curve(const PhysicalParams& p, const std::vector<double>& power_nW,
                             const Truncation& t = {10, 3}, const SaturationOptions& opt = {});

// Phases of the reflected H and V light; axis QdDetuning sweeps delta_omega_a,
// CavityDetuning sweeps delta_omega_H.
SweepResult phase_sweep(const PhysicalParams& p, SweepAxis axis, const std::vector<double>& grid);

// Sets a parameter by its user-facing name (delta_omega_a, g, theta, ...) in
// the units used on the command line.
void set_parameter(PhysicalParams& p, const std::string& name, double value);
std::string parameter_column(const std::string& name);

}  // namespace onedim
