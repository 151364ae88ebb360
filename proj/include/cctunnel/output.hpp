#ifndef CCTUNNEL_OUTPUT_HPP
#define CCTUNNEL_OUTPUT_HPP

#include <cstdio>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "cctunnel/config.hpp"
#include "cctunnel/sweep.hpp"

// Tabular serialization of sweep results. The CSV carries the spin-resolved
// transmission columns for every channel open at the top of the grid; the
// JSON variant embeds the full run configuration so a result file is
// sufficient to reproduce itself.

namespace cctunnel {

namespace detail {

// 17 significant digits: enough to reproduce any double bit-for-bit.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline char spin_letter(Spin s) { return s == Spin::up ? 'p' : 'm'; }

}  // namespace detail

// Column layout: abscissa, then per outgoing channel the same-spin and
// flipped-spin transmission probabilities, then the total, the unitarity
// defect, and the suspect marker. The digit pair names incident and
// outgoing channel; the letter pair names incident and outgoing spin.
inline std::string csv_header(int incident_channel, Spin incident_spin, int max_open) {
  const char inc = detail::spin_letter(incident_spin);
  const char oth = detail::spin_letter(flip(incident_spin));
  std::string h = "abscissa";
  for (int n = 1; n <= max_open; ++n) {
    const std::string pair = std::to_string(incident_channel) + std::to_string(n);
    h += std::string(",P_t_") + inc + inc + '_' + pair;
    h += std::string(",P_t_") + inc + oth + '_' + pair;
  }
  h += ",P_t_total,unitarity_defect,suspect";
  return h;
}

// One row per grid point, strictly increasing in abscissa. Cells for
// outgoing channels that are closed at a point's energy stay blank, as do
// all cells of a failed point (for example an incident channel below its
// threshold).
inline void write_csv(std::ostream& os, const SweepResult& result) {
  const SweepPlan& plan = result.plan;
  os << csv_header(plan.incident_channel, plan.incident_spin, result.max_open) << '\n';
  for (const auto& pt : result.points) {
    os << detail::format_full(pt.abscissa);
    for (int n = 1; n <= result.max_open; ++n) {
      if (pt.ok && n <= pt.n_open) {
        os << ',' << detail::format_full(transmit_same(pt, plan, n));
        os << ',' << detail::format_full(transmit_flip(pt, plan, n));
      } else {
        os << ",,";
      }
    }
    if (pt.ok) {
      os << ',' << detail::format_full(pt.t_total);
      os << ',' << detail::format_full(pt.unitarity_defect);
      os << ',' << (pt.suspect ? '1' : '0');
    } else {
      os << ",,,";
    }
    os << '\n';
  }
}

namespace detail {

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace detail

inline nlohmann::json result_to_json(const SweepResult& result, const RunConfig& rc) {
  nlohmann::json j;
  j["config"] = config_to_json(rc);
  j["max_open"] = result.max_open;
  j["composite_order"] =
      "per point: spin-up channels 1..n_open, then spin-down channels 1..n_open";
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pt : result.points) {
    nlohmann::json p;
    p["abscissa"] = pt.abscissa;
    p["ok"] = pt.ok;
    if (!pt.ok) {
      p["error"] = pt.error;
      pts.push_back(std::move(p));
      continue;
    }
    p["energy"] = pt.energy;
    p["n_open"] = pt.n_open;
    p["p_transmit"] = detail::vector_to_json(pt.p_transmit);
    p["p_reflect"] = detail::vector_to_json(pt.p_reflect);
    p["t_total"] = pt.t_total;
    p["r_total"] = pt.r_total;
    p["unitarity_defect"] = pt.unitarity_defect;
    p["suspect"] = pt.suspect;
    if (pt.ref_p_transmit.size() > 0) {
      p["ref_p_transmit"] = detail::vector_to_json(pt.ref_p_transmit);
      p["ref_p_reflect"] = detail::vector_to_json(pt.ref_p_reflect);
      p["solver_deviation"] = pt.solver_deviation;
    }
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j;
}

inline void write_json(std::ostream& os, const SweepResult& result, const RunConfig& rc) {
  os << result_to_json(result, rc).dump(2) << '\n';
}

}  // namespace cctunnel

#endif  // CCTUNNEL_OUTPUT_HPP
