#ifndef CCTUNNEL_ORACLE_HPP
#define CCTUNNEL_ORACLE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cctunnel/matelem.hpp"
#include "cctunnel/model.hpp"
#include "cctunnel/scattering.hpp"

// Independent reference solver: the coupling matrix is frozen at the
// midpoint of each segment, every segment is solved exactly in its local
// eigenbasis, and the per-segment scattering matrices are composed with
// the Redheffer star product. All exponentials are referenced to the
// nearest segment edge, so nothing overflows no matter how deep a channel
// is closed. Also hosts the closed-form single-barrier and spin-precession
// expressions used as analytic anchors in the tests.

namespace cctunnel {

// Domain split into ~n_segments pieces, uniform between kinks so that no
// segment straddles a derivative discontinuity of the coupling.
struct Segmentation {
  std::vector<double> edges;  // ascending, edges.front() = x_left

  int segments() const { return static_cast<int>(edges.size()) - 1; }

  static Segmentation build(const ModelParams& p, int n_segments = 2000) {
    if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
    const Domain dom = integration_domain(p);
    std::vector<double> cuts{dom.x_left, dom.x_right};
    for (double x : coupling_kinks(p)) {
      if (x > dom.x_left + 1e-12 && x < dom.x_right - 1e-12) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());

    const double total = dom.x_right - dom.x_left;
    Segmentation seg;
    seg.edges.push_back(cuts.front());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double len = cuts[i + 1] - cuts[i];
      const int pieces = std::max(1, static_cast<int>(std::ceil(n_segments * len / total)));
      for (int j = 1; j <= pieces; ++j)
        seg.edges.push_back(cuts[i] + len * j / pieces);
      seg.edges.back() = cuts[i + 1];
    }
    return seg;
  }
};

namespace detail {

using Cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;

struct SBlocks {
  MatC t, r, rp, tp;  // b = r u + tp w, a = t u + rp w
  static SBlocks identity(int n) {
    return SBlocks{MatC::Identity(n, n), MatC::Zero(n, n), MatC::Zero(n, n),
                   MatC::Identity(n, n)};
  }
};

// Redheffer star product: A is the stack on the left, B the next slab.
inline SBlocks star(const SBlocks& A, const SBlocks& B) {
  const Eigen::Index n = A.t.rows();
  const MatC eye = MatC::Identity(n, n);
  Eigen::PartialPivLU<MatC> lu(eye - A.rp * B.r);
  const MatC xt = lu.solve(A.t);            // X t_A
  const MatC xrp = lu.solve(A.rp * B.tp);   // X r'_A t'_B
  SBlocks out;
  out.t = B.t * xt;
  out.r = A.r + A.tp * (B.r * xt);
  out.tp = A.tp * (B.tp + B.r * xrp);
  out.rp = B.rp + B.t * xrp;
  return out;
}

// Scattering blocks of one segment [xa, xb] with the coupling frozen at
// the midpoint. Outside media are free with diag(k) wavenumbers; basis
// functions inside are exp(+i q (x - xa)) and exp(-i q (x - xb)) per local
// eigenmode, or {1, (x - xa)/len} when the local q is numerically zero.
inline SBlocks segment_blocks(double xa, double xb, const ChannelSet& cs,
                              const ModelParams& p) {
  const int n = cs.dim();
  const double len = xb - xa;
  const double xm = 0.5 * (xa + xb);
  const Cplx iu(0.0, 1.0);

  Eigen::MatrixXd msym = -assemble_coupling(xm, cs, p);
  for (int c = 0; c < n; ++c) msym(c, c) += cs.k_of(c) * cs.k_of(c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(msym);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd q_modes = es.eigenvectors();

  Eigen::VectorXcd va_l(n), wa_l(n), vb_l(n), wb_l(n);
  Eigen::VectorXcd va_r(n), wa_r(n), vb_r(n), wb_r(n);
  for (int j = 0; j < n; ++j) {
    if (std::abs(lam[j]) < 1e-12) {
      va_l[j] = 1.0; wa_l[j] = 0.0;
      vb_l[j] = 0.0; wb_l[j] = 1.0 / len;
      va_r[j] = 1.0; wa_r[j] = 0.0;
      vb_r[j] = 1.0; wb_r[j] = 1.0 / len;
      continue;
    }
    const Cplx q = lam[j] > 0.0 ? Cplx(std::sqrt(lam[j]), 0.0)
                                : Cplx(0.0, std::sqrt(-lam[j]));
    const Cplx grow = std::exp(iu * q * len);  // |grow| <= 1
    va_l[j] = 1.0;        wa_l[j] = iu * q;
    vb_l[j] = grow;       wb_l[j] = -iu * q * grow;
    va_r[j] = grow;       wa_r[j] = iu * q * grow;
    vb_r[j] = 1.0;        wb_r[j] = -iu * q;
  }

  // Unknowns [b_left; alpha; beta; a_right], inputs [u; w].
  MatC sys = MatC::Zero(4 * n, 4 * n);
  MatC rhs = MatC::Zero(4 * n, 2 * n);
  const MatC qz = q_modes.cast<Cplx>();
  for (int c = 0; c < n; ++c) {
    const Cplx ik = iu * cs.k_of(c);
    sys(c, c) = 1.0;
    sys(n + c, c) = -ik;
    sys(2 * n + c, 3 * n + c) = -1.0;
    sys(3 * n + c, 3 * n + c) = -ik;
    rhs(c, c) = -1.0;
    rhs(n + c, c) = -ik;
    rhs(2 * n + c, n + c) = 1.0;
    rhs(3 * n + c, n + c) = -ik;
  }
  sys.block(0, n, n, n) = -qz * va_l.asDiagonal();
  sys.block(0, 2 * n, n, n) = -qz * vb_l.asDiagonal();
  sys.block(n, n, n, n) = -qz * wa_l.asDiagonal();
  sys.block(n, 2 * n, n, n) = -qz * wb_l.asDiagonal();
  sys.block(2 * n, n, n, n) = qz * va_r.asDiagonal();
  sys.block(2 * n, 2 * n, n, n) = qz * vb_r.asDiagonal();
  sys.block(3 * n, n, n, n) = qz * wa_r.asDiagonal();
  sys.block(3 * n, 2 * n, n, n) = qz * wb_r.asDiagonal();

  const MatC sol = sys.partialPivLu().solve(rhs);
  SBlocks blk;
  blk.r = sol.block(0, 0, n, n);
  blk.t = sol.block(3 * n, 0, n, n);
  blk.tp = sol.block(0, n, n, n);
  blk.rp = sol.block(3 * n, n, n, n);
  return blk;
}

}  // namespace detail

// Reference solution at total energy E. Amplitudes carry the same global
// plane-wave phase convention as the amplitude solver, so the two agree
// entrywise, not just in probability.
inline ScatteringRecord transfer_matrix_solve(double E, const ModelParams& p,
                                              const Segmentation& seg) {
  p.validate();
  ScatteringRecord rec;
  rec.params = p;
  rec.energy = E;
  rec.channels = open_channels(p, E);
  const int dim = rec.channels.dim();

  detail::SBlocks stack = detail::SBlocks::identity(dim);
  for (int i = 0; i < seg.segments(); ++i)
    stack = detail::star(stack, detail::segment_blocks(seg.edges[i], seg.edges[i + 1],
                                                       rec.channels, p));

  const double xl = seg.edges.front();
  const double xr = seg.edges.back();
  rec.reflection.resize(dim, dim);
  rec.transmission.resize(dim, dim);
  const std::complex<double> iu(0.0, 1.0);
  for (int in = 0; in < dim; ++in) {
    const double ki = rec.channels.k_of(in);
    for (int out = 0; out < dim; ++out) {
      const double ko = rec.channels.k_of(out);
      rec.reflection(out, in) = stack.r(out, in) * std::exp(iu * (ki + ko) * xl);
      rec.transmission(out, in) = stack.t(out, in) * std::exp(iu * (ki * xl - ko * xr));
    }
  }
  finalize_record(rec);
  rec.report.steps_accepted = seg.segments();
  return rec;
}

inline ScatteringRecord transfer_matrix_solve(double E, const ModelParams& p,
                                              int n_segments = 2000) {
  return transfer_matrix_solve(E, p, Segmentation::build(p, n_segments));
}

// Transmission probability of a structureless particle through one
// rectangular barrier, all regimes of E > 0.
inline double analytic_single_barrier(double E, double mass, double height, double width,
                                      double hbar = 1.0) {
  if (!(E > 0.0)) throw std::domain_error("kinetic energy must be > 0");
  const double scale = 2.0 * mass / (hbar * hbar);
  if (std::abs(E - height) < 1e-12 * height) {
    // limit of the sub-barrier form as E -> height
    const double arg = 0.25 * scale * height * width * width;
    return 1.0 / (1.0 + arg);
  }
  if (E < height) {
    const double kap = std::sqrt(scale * (height - E));
    const double sh = std::sinh(kap * width);
    return 1.0 / (1.0 + height * height * sh * sh / (4.0 * E * (height - E)));
  }
  const double kk = std::sqrt(scale * (E - height));
  const double sn = std::sin(kk * width);
  return 1.0 / (1.0 + height * height * sn * sn / (4.0 * E * (E - height)));
}

// Field length traversed by the center of mass under each convention: the
// paper_code domain cuts the field tail at b + l + d/2, the derived domain
// preserves the full 2b.
inline double larmor_effective_length(const ModelParams& p) {
  return p.convention == Convention::paper_code ? p.b + p.l + p.d / 2.0 : 2.0 * p.b;
}

// Spin-flip probability of a free spin carrier crossing a field region of
// length L: the two spin-x eigenmodes accumulate a relative phase
// (k+ - k-) L. Ignores edge reflections.
inline double larmor_flip_analytic(double E, const ModelParams& p, double L) {
  const double eps1 = channel_energy(p, 1);
  if (!(E > eps1)) throw std::domain_error("energy below first threshold");
  const double k2 = 4.0 * p.m * (E - eps1) / (p.hbar * p.hbar);
  const double du = 4.0 * p.m * p.u / (p.hbar * p.hbar);
  if (k2 <= du) throw std::domain_error("spin-minus branch closed in the field region");
  const double kp = std::sqrt(k2 + du);
  const double km = std::sqrt(k2 - du);
  const double s = std::sin(0.5 * (kp - km) * L);
  return s * s;
}

}  // namespace cctunnel

#endif
