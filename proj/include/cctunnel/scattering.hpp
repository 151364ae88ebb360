#ifndef CCTUNNEL_SCATTERING_HPP
#define CCTUNNEL_SCATTERING_HPP

#include <Eigen/Dense>
#include <cmath>

#include "cctunnel/model.hpp"
#include "cctunnel/odeint.hpp"

// Common result types shared by the amplitude solver and the piecewise
// constant reference solver. Amplitude matrices are stored with the
// outgoing composite index as the row and the incident one as the column.

namespace cctunnel {

// Flux-normalized probability defect above which a record is flagged for
// inspection rather than trusted silently.
inline constexpr double kSuspectDefect = 1e-4;

struct ScatteringRecord {
  ModelParams params;
  double energy = 0.0;
  ChannelSet channels;
  Eigen::MatrixXcd reflection;   // dim x dim amplitudes
  Eigen::MatrixXcd transmission;
  Eigen::MatrixXd p_reflect;     // flux-normalized probabilities
  Eigen::MatrixXd p_transmit;
  double unitarity_defect = 0.0;
  bool suspect = false;
  IntegrationReport report;      // solver effort (segments count as steps)
};

// P[out, in] = (k_out / k_in) |amplitude|^2.
inline void scattering_probabilities(const ChannelSet& cs, const Eigen::MatrixXcd& refl,
                                     const Eigen::MatrixXcd& trans, Eigen::MatrixXd& p_r,
                                     Eigen::MatrixXd& p_t) {
  const int dim = cs.dim();
  p_r.resize(dim, dim);
  p_t.resize(dim, dim);
  for (int in = 0; in < dim; ++in) {
    for (int out = 0; out < dim; ++out) {
      const double ratio = cs.k_of(out) / cs.k_of(in);
      p_r(out, in) = ratio * std::norm(refl(out, in));
      p_t(out, in) = ratio * std::norm(trans(out, in));
    }
  }
}

// Worst flux-conservation violation over all incident states.
inline double unitarity_defect(const Eigen::MatrixXd& p_r, const Eigen::MatrixXd& p_t) {
  double defect = 0.0;
  for (int in = 0; in < p_r.cols(); ++in) {
    const double flux = p_r.col(in).sum() + p_t.col(in).sum();
    defect = std::max(defect, std::abs(1.0 - flux));
  }
  return defect;
}

inline void finalize_record(ScatteringRecord& rec) {
  scattering_probabilities(rec.channels, rec.reflection, rec.transmission, rec.p_reflect,
                           rec.p_transmit);
  rec.unitarity_defect = unitarity_defect(rec.p_reflect, rec.p_transmit);
  rec.suspect = rec.unitarity_defect > kSuspectDefect;
}

}  // namespace cctunnel

#endif
