#ifndef CCTUNNEL_CONFIG_HPP
#define CCTUNNEL_CONFIG_HPP

#include <map>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cctunnel/model.hpp"
#include "cctunnel/odeint.hpp"
#include "cctunnel/sweep.hpp"

// One run of the command-line front end: every flag, every config-file key,
// and the JSON round trip live here so the tool, the output writers, and the
// tests all agree on a single source of truth.

namespace cctunnel {

enum class OutputFormat { csv, json };

inline std::string to_string(Convention c) {
  return c == Convention::paper_code ? "paper-code" : "derived";
}
inline std::string to_string(Axis a) {
  switch (a) {
    case Axis::energy: return "E";
    case Axis::field_width: return "b";
    default: return "u";
  }
}
inline std::string to_string(Spin s) { return s == Spin::up ? "up" : "down"; }
inline std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::vra: return "vra";
    case SolverKind::transfer_matrix: return "tm";
    default: return "both";
  }
}
inline std::string to_string(OutputFormat f) {
  return f == OutputFormat::csv ? "csv" : "json";
}

namespace detail {

template <typename T>
T enum_from_string(const std::string& s, const std::map<std::string, T>& table,
                   const char* key) {
  const auto it = table.find(s);
  if (it == table.end())
    throw std::invalid_argument(std::string("invalid value for ") + key + ": " + s);
  return it->second;
}

inline const std::map<std::string, Convention>& convention_table() {
  static const std::map<std::string, Convention> t{
      {"paper-code", Convention::paper_code}, {"derived", Convention::derived}};
  return t;
}
inline const std::map<std::string, Axis>& axis_table() {
  static const std::map<std::string, Axis> t{
      {"E", Axis::energy}, {"b", Axis::field_width}, {"u", Axis::field_strength}};
  return t;
}
inline const std::map<std::string, Spin>& spin_table() {
  static const std::map<std::string, Spin> t{{"up", Spin::up}, {"down", Spin::down}};
  return t;
}
inline const std::map<std::string, SolverKind>& solver_table() {
  static const std::map<std::string, SolverKind> t{{"vra", SolverKind::vra},
                                                   {"tm", SolverKind::transfer_matrix},
                                                   {"both", SolverKind::both}};
  return t;
}
inline const std::map<std::string, OutputFormat>& format_table() {
  static const std::map<std::string, OutputFormat> t{{"csv", OutputFormat::csv},
                                                     {"json", OutputFormat::json}};
  return t;
}

}  // namespace detail

struct RunConfig {
  ModelParams params;
  IntegratorConfig integrator;
  Axis axis = Axis::energy;
  GridSpec grid;
  double energy_abscissa = 0.5;  // fixed (E - eps_1)/V0 for field sweeps
  int incident_channel = 1;
  Spin incident_spin = Spin::up;
  SolverKind solver = SolverKind::vra;
  int n_segments = 2000;
  bool convergence_check = false;
  std::string output_path;  // empty writes the table to stdout
  OutputFormat format = OutputFormat::csv;
  std::string plot_preset;

  // set during parsing; a bare sweep needs an explicit axis, a preset does not
  bool axis_given = false;

  SweepPlan to_plan() const {
    SweepPlan plan;
    plan.params = params;
    plan.axis = axis;
    plan.grid = grid;
    plan.energy_abscissa = energy_abscissa;
    plan.incident_channel = incident_channel;
    plan.incident_spin = incident_spin;
    plan.solver = solver;
    plan.n_segments = n_segments;
    return plan;
  }

  void validate() const {
    if (plot_preset.empty() && !axis_given)
      throw std::invalid_argument("missing required flag: --axis");
    to_plan().validate();
    if (!(integrator.rtol > 0.0)) throw std::invalid_argument("rtol must be > 0");
    if (!(integrator.atol > 0.0)) throw std::invalid_argument("atol must be > 0");
    if (!(integrator.max_step > 0.0))
      throw std::invalid_argument("max-step must be > 0");
    if (axis != Axis::energy && !(energy_abscissa > 0.0))
      throw std::invalid_argument("energy must be > 0 for field sweeps");
  }
};

inline bool operator==(const RunConfig& x, const RunConfig& y) {
  return x.params.a == y.params.a && x.params.b == y.params.b &&
         x.params.d == y.params.d && x.params.l == y.params.l &&
         x.params.u == y.params.u && x.params.V0 == y.params.V0 &&
         x.params.m == y.params.m && x.params.hbar == y.params.hbar &&
         x.params.n_max == y.params.n_max &&
         x.params.convention == y.params.convention &&
         x.integrator.rtol == y.integrator.rtol &&
         x.integrator.atol == y.integrator.atol &&
         x.integrator.max_step == y.integrator.max_step && x.axis == y.axis &&
         x.grid.start == y.grid.start && x.grid.span == y.grid.span &&
         x.grid.points == y.grid.points &&
         x.energy_abscissa == y.energy_abscissa &&
         x.incident_channel == y.incident_channel &&
         x.incident_spin == y.incident_spin && x.solver == y.solver &&
         x.n_segments == y.n_segments &&
         x.convergence_check == y.convergence_check &&
         x.output_path == y.output_path && x.format == y.format &&
         x.plot_preset == y.plot_preset;
}
inline bool operator!=(const RunConfig& x, const RunConfig& y) { return !(x == y); }

// Registers every flag on a CLI11 application. Values given on the command
// line override values from the config file; unknown config keys are errors.
inline void attach_cli(CLI::App& app, RunConfig& rc) {
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "configuration file (key = value lines, # comments)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--a", rc.params.a, "barrier width");
  app.add_option("--b", rc.params.b, "field-region half-width");
  app.add_option("--d", rc.params.d, "internal well width");
  app.add_option("--l", rc.params.l, "pair-center offset");
  app.add_option("--u", rc.params.u, "field coupling strength");
  app.add_option("--v0", rc.params.V0, "barrier height");
  app.add_option("--n-max", rc.params.n_max, "cap on retained internal modes");
  app.add_option("--convention", rc.params.convention,
                 "field-window and domain convention")
      ->transform(CLI::CheckedTransformer(detail::convention_table()));

  app.add_option("--axis", rc.axis, "sweep axis: E, b, or u")
      ->transform(CLI::CheckedTransformer(detail::axis_table()))
      ->each([&rc](const std::string&) { rc.axis_given = true; });
  app.add_option("--start", rc.grid.start, "abscissa offset; grid excludes it");
  app.add_option("--span", rc.grid.span, "abscissa span above start");
  app.add_option("--points", rc.grid.points, "grid points");
  app.add_option("--energy", rc.energy_abscissa,
                 "fixed (E - eps_1)/V0 for b and u sweeps");

  app.add_option("--incident-channel", rc.incident_channel, "incident channel (1-based)");
  app.add_option("--incident-spin", rc.incident_spin, "incident spin: up or down")
      ->transform(CLI::CheckedTransformer(detail::spin_table()));
  app.add_option("--solver", rc.solver, "solver: vra, tm, or both")
      ->transform(CLI::CheckedTransformer(detail::solver_table()));
  app.add_option("--segments", rc.n_segments, "transfer-matrix segments");

  app.add_option("--rtol", rc.integrator.rtol, "relative tolerance");
  app.add_option("--atol", rc.integrator.atol, "absolute tolerance");
  app.add_option("--max-step", rc.integrator.max_step, "integrator step cap");
  app.add_flag("--convergence-check", rc.convergence_check,
               "rerun sampled points with a finer discretization");

  app.add_option("--output", rc.output_path, "output path (stdout if omitted)");
  app.add_option("--format", rc.format, "output format: csv or json")
      ->transform(CLI::CheckedTransformer(detail::format_table()));
  app.add_option("--plot-preset", rc.plot_preset,
                 "named figure preset; runs its bundled sweeps and emits a plot script");
}

// The JSON image of a config embeds in every JSON result file; parsing it
// back reproduces the identical RunConfig.
inline nlohmann::json config_to_json(const RunConfig& rc) {
  return nlohmann::json{{"a", rc.params.a},
                        {"b", rc.params.b},
                        {"d", rc.params.d},
                        {"l", rc.params.l},
                        {"u", rc.params.u},
                        {"v0", rc.params.V0},
                        {"m", rc.params.m},
                        {"hbar", rc.params.hbar},
                        {"n_max", rc.params.n_max},
                        {"convention", to_string(rc.params.convention)},
                        {"axis", to_string(rc.axis)},
                        {"start", rc.grid.start},
                        {"span", rc.grid.span},
                        {"points", rc.grid.points},
                        {"energy", rc.energy_abscissa},
                        {"incident_channel", rc.incident_channel},
                        {"incident_spin", to_string(rc.incident_spin)},
                        {"solver", to_string(rc.solver)},
                        {"segments", rc.n_segments},
                        {"rtol", rc.integrator.rtol},
                        {"atol", rc.integrator.atol},
                        {"max_step", rc.integrator.max_step},
                        {"convergence_check", rc.convergence_check},
                        {"output", rc.output_path},
                        {"format", to_string(rc.format)},
                        {"plot_preset", rc.plot_preset}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig rc;
  rc.axis_given = true;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const nlohmann::json& v = it.value();
    if (k == "a") rc.params.a = v.get<double>();
    else if (k == "b") rc.params.b = v.get<double>();
    else if (k == "d") rc.params.d = v.get<double>();
    else if (k == "l") rc.params.l = v.get<double>();
    else if (k == "u") rc.params.u = v.get<double>();
    else if (k == "v0") rc.params.V0 = v.get<double>();
    else if (k == "m") rc.params.m = v.get<double>();
    else if (k == "hbar") rc.params.hbar = v.get<double>();
    else if (k == "n_max") rc.params.n_max = v.get<int>();
    else if (k == "convention")
      rc.params.convention = detail::enum_from_string(
          v.get<std::string>(), detail::convention_table(), "convention");
    else if (k == "axis")
      rc.axis = detail::enum_from_string(v.get<std::string>(), detail::axis_table(), "axis");
    else if (k == "start") rc.grid.start = v.get<double>();
    else if (k == "span") rc.grid.span = v.get<double>();
    else if (k == "points") rc.grid.points = v.get<int>();
    else if (k == "energy") rc.energy_abscissa = v.get<double>();
    else if (k == "incident_channel") rc.incident_channel = v.get<int>();
    else if (k == "incident_spin")
      rc.incident_spin = detail::enum_from_string(v.get<std::string>(),
                                                  detail::spin_table(), "incident_spin");
    else if (k == "solver")
      rc.solver = detail::enum_from_string(v.get<std::string>(), detail::solver_table(),
                                           "solver");
    else if (k == "segments") rc.n_segments = v.get<int>();
    else if (k == "rtol") rc.integrator.rtol = v.get<double>();
    else if (k == "atol") rc.integrator.atol = v.get<double>();
    else if (k == "max_step") rc.integrator.max_step = v.get<double>();
    else if (k == "convergence_check") rc.convergence_check = v.get<bool>();
    else if (k == "output") rc.output_path = v.get<std::string>();
    else if (k == "format")
      rc.format = detail::enum_from_string(v.get<std::string>(), detail::format_table(),
                                           "format");
    else if (k == "plot_preset") rc.plot_preset = v.get<std::string>();
    else throw std::invalid_argument("unknown config key: " + k);
  }
  return rc;
}

}  // namespace cctunnel

#endif  // CCTUNNEL_CONFIG_HPP
