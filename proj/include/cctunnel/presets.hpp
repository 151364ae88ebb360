#ifndef CCTUNNEL_PRESETS_HPP
#define CCTUNNEL_PRESETS_HPP

#include <string>
#include <vector>

#include "cctunnel/config.hpp"

// Bundled parameter sets for the survey figures. A panel preset (fig3a)
// names one sweep; a figure preset (fig3) names all panels of that figure,
// which the front end runs in sequence and renders into one multi-panel
// plot. All panels sweep energy with spin-up incidence and reproduce the
// published curves, so they use the compatibility window convention.

namespace cctunnel {

struct PresetPanel {
  std::string id;
  std::string title;
  RunConfig config;
};

namespace detail {

inline PresetPanel make_panel(const char* id, const char* title, double a, double b,
                              double d, double l, double u, GridSpec grid,
                              int incident_channel = 1) {
  PresetPanel panel;
  panel.id = id;
  panel.title = title;
  panel.config.params.a = a;
  panel.config.params.b = b;
  panel.config.params.d = d;
  panel.config.params.l = l;
  panel.config.params.u = u;
  panel.config.grid = grid;
  panel.config.incident_channel = incident_channel;
  panel.config.axis = Axis::energy;
  panel.config.axis_given = true;
  return panel;
}

inline const std::vector<PresetPanel>& all_panels() {
  static const std::vector<PresetPanel> panels = [] {
    std::vector<PresetPanel> v;
    const GridSpec full{0.0, 1.0, 800};
    // barrier and pair comparable in size; resonances split by the field
    v.push_back(make_panel("fig3a", "u = 0", 1, 1, 5, 5, 0.0, full));
    v.push_back(make_panel("fig3b", "u = 0.05", 1, 1, 5, 5, 0.05, full));
    v.push_back(make_panel("fig3c", "u = 0.15", 1, 1, 5, 5, 0.15, full));
    v.push_back(make_panel("fig3d", "u = 0.05, lowest peak", 1, 1, 5, 5, 0.05,
                           GridSpec{0.10, 0.05, 800}));
    // weak fields around the lowest resonance
    v.push_back(make_panel("fig4a", "u = 0.001, lowest peak", 1, 1, 5, 5, 0.001,
                           GridSpec{0.10, 0.04, 800}));
    v.push_back(make_panel("fig4b", "u = 0.005, lowest peak", 1, 1, 5, 5, 0.005,
                           GridSpec{0.10, 0.04, 800}));
    // widening field region at fixed coupling
    v.push_back(make_panel("fig5a", "b = 1", 1, 1, 5, 3, 0.05, full));
    v.push_back(make_panel("fig5b", "b = 3.5", 1, 3.5, 5, 3, 0.05, full));
    v.push_back(make_panel("fig5c", "b = 8", 1, 8, 5, 3, 0.05, full));
    v.push_back(make_panel("fig5d", "b = 15", 1, 15, 5, 3, 0.05, full));
    v.push_back(make_panel("fig5e", "b = 100", 1, 100, 5, 3, 0.05,
                           GridSpec{0.0, 1.0, 1500}));
    v.push_back(make_panel("fig5f", "b = 200", 1, 200, 5, 3, 0.05,
                           GridSpec{0.0, 1.0, 3000}));
    // wider well: a second channel opens inside the swept window
    v.push_back(make_panel("fig6a", "u = 0.05, channel 1", 1, 1, 7, 5, 0.05, full, 1));
    v.push_back(make_panel("fig6b", "u = 0.15, channel 1", 1, 1, 7, 5, 0.15, full, 1));
    v.push_back(make_panel("fig6c", "u = 0.05, channel 2", 1, 1, 7, 5, 0.05, full, 2));
    v.push_back(make_panel("fig6d", "u = 0.15, channel 2", 1, 1, 7, 5, 0.15, full, 2));
    // single-particle limit: spin precession over a wide field region
    v.push_back(make_panel("fig7a", "b = 100", 1, 100, 0.05, 0.05, 0.05,
                           GridSpec{0.0, 1.0, 1500}));
    v.push_back(make_panel("fig7b", "b = 200", 1, 200, 0.05, 0.05, 0.05,
                           GridSpec{0.0, 1.0, 3000}));
    // narrow barrier, wide field: clustered low-energy peaks
    v.push_back(make_panel("fig8a", "a = 0.3, b = 100", 0.3, 100, 0.05, 0.05, 0.05,
                           GridSpec{0.0, 1.0, 1500}));
    v.push_back(make_panel("fig8b", "a = 0.3, b = 100, low energy", 0.3, 100, 0.05,
                           0.05, 0.05, GridSpec{0.0, 0.1, 800}));
    return v;
  }();
  return panels;
}

inline const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"fig3", "fig4", "fig5",
                                              "fig6", "fig7", "fig8"};
  return names;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names = detail::figure_names();
  for (const auto& p : detail::all_panels()) names.push_back(p.id);
  return names;
}

// Panels bundled under a preset name; empty when the name is unknown.
inline std::vector<PresetPanel> preset_panels(const std::string& name) {
  std::vector<PresetPanel> out;
  for (const auto& fig : detail::figure_names()) {
    if (name == fig) {
      for (const auto& p : detail::all_panels())
        if (p.id.compare(0, fig.size(), fig) == 0) out.push_back(p);
      return out;
    }
  }
  for (const auto& p : detail::all_panels())
    if (p.id == name) out.push_back(p);
  return out;
}

}  // namespace cctunnel

#endif  // CCTUNNEL_PRESETS_HPP
