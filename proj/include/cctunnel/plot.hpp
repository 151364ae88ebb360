#ifndef CCTUNNEL_PLOT_HPP
#define CCTUNNEL_PLOT_HPP

#include <ostream>
#include <string>
#include <vector>

#include "cctunnel/config.hpp"
#include "cctunnel/output.hpp"

// Emission of standalone gnuplot scripts over the CSV tables: one curve per
// spin-resolved transmission column plus the total, the sweep abscissa on
// the horizontal axis.

namespace cctunnel {

struct PlotPanel {
  std::string csv_path;  // as referenced from the script's working directory
  std::string title;
  int incident_channel = 1;
  Spin incident_spin = Spin::up;
  int max_open = 1;
  Axis axis = Axis::energy;
  bool has_data = true;  // false renders an empty panel with a warning
};

namespace detail {

inline std::string axis_label(Axis axis) {
  switch (axis) {
    case Axis::energy: return "(E - {/Symbol e}_1)/V_0";
    case Axis::field_width: return "b";
    default: return "u";
  }
}

inline void plot_grid(std::size_t panels, int& rows, int& cols) {
  if (panels <= 1) { rows = 1; cols = 1; }
  else if (panels == 2) { rows = 1; cols = 2; }
  else if (panels <= 4) { rows = 2; cols = 2; }
  else { rows = (static_cast<int>(panels) + 2) / 3; cols = 3; }
}

}  // namespace detail

inline void write_plot_script(std::ostream& os, const std::string& image_path,
                              const std::vector<PlotPanel>& panels) {
  int rows = 1, cols = 1;
  detail::plot_grid(panels.size(), rows, cols);
  os << "# spin-resolved transmission curves; run with: gnuplot <this file>\n";
  for (const auto& p : panels)
    if (!p.has_data) os << "# warning: no data points in " << p.csv_path << "\n";
  os << "set terminal pngcairo enhanced size " << 640 * cols << ',' << 480 * rows
     << "\n";
  os << "set output '" << image_path << "'\n";
  os << "set datafile separator ','\n";
  os << "set datafile missing ''\n";
  os << "set style data lines\n";
  os << "set key top right\n";
  os << "set ylabel 'P_t'\n";
  if (panels.size() > 1)
    os << "set multiplot layout " << rows << ',' << cols << "\n";
  for (const auto& p : panels) {
    os << "set title '" << p.title << "'\n";
    os << "set xlabel '" << detail::axis_label(p.axis) << "'\n";
    if (!p.has_data) {
      os << "set yrange [0:1]\n";
      os << "plot -1 notitle\n";
      os << "set yrange [*:*]\n";
      continue;
    }
    const char inc = detail::spin_letter(p.incident_spin);
    const char oth = detail::spin_letter(flip(p.incident_spin));
    os << "plot";
    for (int n = 1; n <= p.max_open; ++n) {
      const std::string pair = std::to_string(p.incident_channel) + std::to_string(n);
      os << (n == 1 ? " " : ", ") << "'" << p.csv_path << "' skip 1 using 1:" << 2 * n
         << " title 'P_t_" << inc << inc << '_' << pair << "'";
      os << ", '' skip 1 using 1:" << 2 * n + 1 << " title 'P_t_" << inc << oth << '_'
         << pair << "'";
    }
    os << ", '' skip 1 using 1:" << 2 * p.max_open + 2 << " title 'P_t_total'\n";
  }
  if (panels.size() > 1) os << "unset multiplot\n";
}

}  // namespace cctunnel

#endif  // CCTUNNEL_PLOT_HPP
