#ifndef CCTUNNEL_VRA_HPP
#define CCTUNNEL_VRA_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "cctunnel/matelem.hpp"
#include "cctunnel/model.hpp"
#include "cctunnel/odeint.hpp"
#include "cctunnel/scattering.hpp"

// Variable-amplitude solver. The reflection and transmission matrices of
// the potential truncated at x evolve under first-order matrix equations;
// integrating them from the right edge of the coupling support to the left
// edge yields the scattering amplitudes of the full potential.
//
// With E+ = diag(exp(+i k_c x)), E- = diag(exp(-i k_c x)), K = diag(k_c),
// rows indexing the outgoing composite state and columns the incident one:
//   dR/dx = -(E+ + R E-) (2iK)^{-1} v(x) (E+ + E- R)
//   dT/dx = -T (2iK)^{-1} E- v(x) (E+ + E- R)
// with boundary values R = 0, T = identity at x_right. Because v is real
// symmetric and compactly supported, the exact flow preserves the outgoing
// flux of the truncated problem at every x.
//
// The coupling is only piecewise-smooth: its derivative jumps where a band
// endpoint crosses the well support. The integration is chained over the
// smooth pieces so no accepted step straddles a kink, which keeps the
// integrator's error estimate honest and makes the result insensitive to
// the max_step cap.

namespace cctunnel {

struct AmplitudeMatrices {
  Eigen::MatrixXcd reflection;
  Eigen::MatrixXcd transmission;
};

inline void amplitude_rhs(double x, const Eigen::MatrixXcd& refl,
                          const Eigen::MatrixXcd& trans, const ChannelSet& cs,
                          const ModelParams& p, Eigen::MatrixXcd& d_refl,
                          Eigen::MatrixXcd& d_trans) {
  using cplx = std::complex<double>;
  const int dim = cs.dim();
  Eigen::VectorXcd ep(dim), em(dim), inv2ik(dim);
  for (int c = 0; c < dim; ++c) {
    const double k = cs.k_of(c);
    const cplx phase(std::cos(k * x), std::sin(k * x));
    ep[c] = phase;
    em[c] = std::conj(phase);
    inv2ik[c] = 1.0 / (cplx(0.0, 2.0) * k);
  }

  const Eigen::MatrixXcd v =
      assemble_coupling(x, cs, p).cast<cplx>();

  // C = E+ + E- R, column j of the driving wave per incident state.
  Eigen::MatrixXcd c_mat = refl;
  c_mat.array().colwise() *= em.array();
  c_mat += Eigen::MatrixXcd(ep.asDiagonal());

  Eigen::MatrixXcd d_mat = v * c_mat;
  d_mat.array().colwise() *= inv2ik.array();  // (2iK)^{-1} v C

  Eigen::MatrixXcd g_mat = d_mat;
  g_mat.array().colwise() *= em.array();      // E- (2iK)^{-1} v C

  d_mat.array().colwise() *= ep.array();      // E+ (2iK)^{-1} v C
  d_refl = -(d_mat + refl * g_mat);
  d_trans = -(trans * g_mat);
}

namespace detail {

inline Eigen::Index flat_size(int dim) { return 2 * static_cast<Eigen::Index>(dim) * dim; }

inline void pack(const Eigen::MatrixXcd& refl, const Eigen::MatrixXcd& trans,
                 Eigen::VectorXcd& y) {
  const Eigen::Index nn = refl.size();
  y.segment(0, nn) = Eigen::Map<const Eigen::VectorXcd>(refl.data(), nn);
  y.segment(nn, nn) = Eigen::Map<const Eigen::VectorXcd>(trans.data(), nn);
}

inline void unpack(const Eigen::VectorXcd& y, Eigen::MatrixXcd& refl,
                   Eigen::MatrixXcd& trans) {
  const Eigen::Index nn = refl.size();
  const int dim = static_cast<int>(refl.rows());
  refl = Eigen::Map<const Eigen::MatrixXcd>(y.data(), dim, dim);
  trans = Eigen::Map<const Eigen::MatrixXcd>(y.data() + nn, dim, dim);
}

}  // namespace detail

// Solves the amplitude equations across the full coupling support and
// returns the assembled record at total energy E.
inline ScatteringRecord solve_amplitudes(double E, const ModelParams& p,
                                         const IntegratorConfig& cfg = {}) {
  p.validate();
  ScatteringRecord rec;
  rec.params = p;
  rec.energy = E;
  rec.channels = open_channels(p, E);
  const int dim = rec.channels.dim();
  const Domain dom = integration_domain(p);

  Eigen::MatrixXcd refl = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd trans = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::VectorXcd y(detail::flat_size(dim));
  detail::pack(refl, trans, y);

  Eigen::MatrixXcd r_buf(dim, dim), t_buf(dim, dim), dr_buf(dim, dim), dt_buf(dim, dim);
  auto rhs = [&](double x, const Eigen::VectorXcd& yy, Eigen::VectorXcd& dy) {
    detail::unpack(yy, r_buf, t_buf);
    amplitude_rhs(x, r_buf, t_buf, rec.channels, p, dr_buf, dt_buf);
    detail::pack(dr_buf, dt_buf, dy);
  };

  std::vector<double> stops{dom.x_right};
  for (double k : coupling_kinks(p))
    if (k > dom.x_left + 1e-12 && k < dom.x_right - 1e-12) stops.push_back(k);
  std::sort(stops.begin(), stops.end(), std::greater<>());
  stops.push_back(dom.x_left);

  for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
    if (!(stops[i] - stops[i + 1] > 1e-12)) continue;
    IntegrationReport piece;
    y = integrate(rhs, stops[i], stops[i + 1], std::move(y), cfg, &piece);
    rec.report.rhs_evals += piece.rhs_evals;
    rec.report.steps_accepted += piece.steps_accepted;
    rec.report.steps_rejected += piece.steps_rejected;
    rec.report.last_step = piece.last_step;
  }

  rec.reflection.resize(dim, dim);
  rec.transmission.resize(dim, dim);
  detail::unpack(y, rec.reflection, rec.transmission);
  finalize_record(rec);
  return rec;
}

}  // namespace cctunnel

#endif
