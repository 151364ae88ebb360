#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cctunnel/config.hpp"
#include "cctunnel/output.hpp"
#include "cctunnel/plot.hpp"
#include "cctunnel/presets.hpp"

// Command-line front end: parses a run configuration from flags and an
// optional config file, executes the sweep (or a figure preset's bundle of
// sweeps), and writes CSV/JSON tables plus a gnuplot script for presets.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 output I/O
// error, 4 solver failure on every grid point.

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitAllFailed = 4;

int write_table(const cctunnel::SweepResult& result, const cctunnel::RunConfig& rc,
                const std::string& path, cctunnel::OutputFormat format) {
  if (path.empty()) {
    if (format == cctunnel::OutputFormat::csv)
      cctunnel::write_csv(std::cout, result);
    else
      cctunnel::write_json(std::cout, result, rc);
    return 0;
  }
  std::ofstream ofs(path);
  if (!ofs.is_open()) {
    std::cerr << "cannot open output file: " << path << "\n";
    return kExitIo;
  }
  if (format == cctunnel::OutputFormat::csv)
    cctunnel::write_csv(ofs, result);
  else
    cctunnel::write_json(ofs, result, rc);
  if (!ofs.good()) {
    std::cerr << "write failed: " << path << "\n";
    return kExitIo;
  }
  return 0;
}

cctunnel::SweepResult execute(const cctunnel::RunConfig& rc) {
  const cctunnel::SweepResult result = cctunnel::run_sweep(rc.to_plan(), rc.integrator);
  if (rc.convergence_check) {
    const double dev = cctunnel::convergence_check(result);
    std::cerr << "convergence check: max probability change "
              << cctunnel::detail::format_full(dev) << "\n";
  }
  return result;
}

int run_single(const cctunnel::RunConfig& rc) {
  const cctunnel::SweepResult result = execute(rc);
  if (result.ok_count() == 0) {
    std::string why = "no grid points";
    for (const auto& pt : result.points)
      if (!pt.ok && !pt.error.empty()) {
        why = pt.error;
        break;
      }
    std::cerr << "all points failed: " << why << "\n";
    return kExitAllFailed;
  }
  return write_table(result, rc, rc.output_path, rc.format);
}

int run_preset(const cctunnel::RunConfig& rc) {
  const std::vector<cctunnel::PresetPanel> panels =
      cctunnel::preset_panels(rc.plot_preset);
  if (panels.empty()) {
    std::cerr << "unknown preset: " << rc.plot_preset << "\navailable:";
    for (const auto& name : cctunnel::preset_names()) std::cerr << ' ' << name;
    std::cerr << "\n";
    return kExitUsage;
  }
  const std::string stem = rc.output_path.empty() ? rc.plot_preset : rc.output_path;

  std::vector<cctunnel::PlotPanel> plot_panels;
  int total_ok = 0;
  for (const auto& panel : panels) {
    cctunnel::RunConfig cfg = panel.config;
    cfg.integrator = rc.integrator;
    cfg.solver = rc.solver;
    cfg.n_segments = rc.n_segments;
    cfg.convergence_check = rc.convergence_check;
    cfg.validate();

    const cctunnel::SweepResult result = execute(cfg);
    total_ok += result.ok_count();

    const std::string suffix =
        panels.size() == 1 ? "" : "_" + panel.id.substr(rc.plot_preset.size());
    const std::string csv_path = stem + suffix + ".csv";
    if (const int code = write_table(result, cfg, csv_path, cctunnel::OutputFormat::csv))
      return code;
    if (rc.format == cctunnel::OutputFormat::json)
      if (const int code =
              write_table(result, cfg, stem + suffix + ".json", cctunnel::OutputFormat::json))
        return code;

    cctunnel::PlotPanel pp;
    pp.csv_path = csv_path;
    pp.title = panel.title;
    pp.incident_channel = cfg.incident_channel;
    pp.incident_spin = cfg.incident_spin;
    pp.max_open = result.max_open;
    pp.axis = cfg.axis;
    pp.has_data = result.ok_count() > 0;
    plot_panels.push_back(std::move(pp));

    std::cout << panel.id << ": " << result.points.size() << " points ("
              << result.points.size() - result.ok_count() << " failed) -> " << csv_path
              << "\n";
  }
  if (total_ok == 0) {
    std::cerr << "all points failed in every panel\n";
    return kExitAllFailed;
  }

  const std::string script_path = stem + ".gp";
  std::ofstream ofs(script_path);
  if (!ofs.is_open()) {
    std::cerr << "cannot open output file: " << script_path << "\n";
    return kExitIo;
  }
  cctunnel::write_plot_script(ofs, stem + ".png", plot_panels);
  if (!ofs.good()) {
    std::cerr << "write failed: " << script_path << "\n";
    return kExitIo;
  }
  std::cout << "plot script: " << script_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Spin-resolved transmission and reflection probabilities for a bound "
      "pair tunnelling through a rectangular barrier in a localized "
      "magnetic field."};
  cctunnel::RunConfig rc;
  cctunnel::attach_cli(app, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!rc.plot_preset.empty()) return run_preset(rc);
    rc.validate();
    return run_single(rc);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
