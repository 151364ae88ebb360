#ifndef CCTUNNEL_MATELEM_HPP
#define CCTUNNEL_MATELEM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "cctunnel/model.hpp"

// Closed-form matrix elements of the barrier and of the field region
// between internal well modes phi_n(y) = sqrt(2/d) sin(n pi y / d), plus
// assembly of the full coupling matrix that enters the coupled-channel
// equation psi'' + k^2 psi - v(x) psi = 0.

namespace cctunnel {

// amplitude * Int_{g1}^{g2} phi_n1(y) phi_n2(y) dy, evaluated from the
// antiderivative. Limits are used as given; they may lie outside [0, d]
// (the paper_code field window depends on that). An empty or inverted
// window returns exactly 0.
inline double well_overlap_integral(double amplitude, double g1, double g2,
                                    int n1, int n2, double d) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("mode indices must be >= 1");
  if (!(d > 0.0)) throw std::invalid_argument("d must be > 0");
  if (!(g2 > g1)) return 0.0;
  if (n1 == n2) {
    const double w = n1 * kPi / d;
    auto prim = [&](double y) { return y / d - std::sin(w * y) * std::cos(w * y) / (n1 * kPi); };
    return amplitude * (prim(g2) - prim(g1));
  }
  const double wm = (n1 - n2) * kPi / d;
  const double wp = (n1 + n2) * kPi / d;
  auto prim = [&](double y) {
    return std::sin(wm * y) / ((n1 - n2) * kPi) - std::sin(wp * y) / ((n1 + n2) * kPi);
  };
  return amplitude * (prim(g2) - prim(g1));
}

namespace detail {

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(hi > lo); }
};

// y-bands where one constituent sits inside the barrier, before clamping
// to the well support. Band 1 covers the constituent left of the center of
// mass, band 2 the one right of it; they can overlap, and overlapping
// y-values see the barrier twice.
inline std::pair<Band, Band> barrier_bands(double x, const ModelParams& p) {
  const double s = p.l - p.d / 2.0;
  Band b1{2.0 * x - p.a - s, 2.0 * x + p.a - s};
  Band b2{-2.0 * x - p.a - s, -2.0 * x + p.a - s};
  return {b1, b2};
}

inline Band clamp_to_well(Band b, double d) {
  return Band{std::max(b.lo, 0.0), std::min(b.hi, d)};
}

}  // namespace detail

// Field window handed to the closed-form integral, before intersection
// with the well support. In the derived convention the window lives in the
// well coordinate y; in paper_code it stays in the raw separation
// coordinate, matching the reference implementation.
inline detail::Band field_window(double x, const ModelParams& p) {
  if (p.convention == Convention::derived) {
    const double s = p.l - p.d / 2.0;
    return detail::Band{2.0 * (x - p.b) - s, 2.0 * (x + p.b) - s};
  }
  return detail::Band{2.0 * (x - p.b), 2.0 * (x + p.b)};
}

// W_ij(x): barrier matrix element, sum of the two clamped band integrals
// (the overlap region is covered by both bands, giving amplitude 2 V0).
inline double barrier_matrix_element(int i, int j, double x, const ModelParams& p) {
  auto [b1, b2] = detail::barrier_bands(x, p);
  b1 = detail::clamp_to_well(b1, p.d);
  b2 = detail::clamp_to_well(b2, p.d);
  double w = 0.0;
  if (!b1.empty()) w += well_overlap_integral(p.V0, b1.lo, b1.hi, i, j, p.d);
  if (!b2.empty()) w += well_overlap_integral(p.V0, b2.lo, b2.hi, i, j, p.d);
  return w;
}

// F_ij(x): field matrix element over the convention-dependent window.
inline double field_matrix_element(int i, int j, double x, const ModelParams& p) {
  if (p.b == 0.0 || p.u == 0.0) return 0.0;
  detail::Band w = field_window(x, p);
  if (p.convention == Convention::derived) {
    w = detail::clamp_to_well(w, p.d);
  } else {
    const double s = p.l - p.d / 2.0;
    w = detail::Band{std::max(w.lo, s), std::min(w.hi, s + p.d)};
  }
  if (w.empty()) return 0.0;
  return well_overlap_integral(p.u, w.lo, w.hi, i, j, p.d);
}

// Abscissas where the coupling matrix is continuous but not differentiable:
// a barrier band endpoint or a field window edge crosses the well support
// there. Between consecutive kinks every matrix element is smooth, so an
// integrator that never steps across one keeps its full convergence order.
// Both field conventions clamp a window of the same speed against the same
// support, so their kink positions coincide.
inline std::vector<double> coupling_kinks(const ModelParams& p) {
  const double s = p.l - p.d / 2.0;
  std::vector<double> xs;
  auto both_signs = [&](double x) {
    xs.push_back(x);
    xs.push_back(-x);
  };
  // barrier band [2x - a - s, 2x + a - s] crossing y = 0 and y = d; the
  // mirrored band contributes the sign-flipped positions
  both_signs((p.a + s) / 2.0);
  both_signs((s - p.a) / 2.0);
  both_signs((p.a + s + p.d) / 2.0);
  both_signs((s + p.d - p.a) / 2.0);
  // field window edges crossing the support
  xs.push_back(p.b + s / 2.0);
  xs.push_back(p.b + (s + p.d) / 2.0);
  xs.push_back(-p.b + s / 2.0);
  xs.push_back(-p.b + (s + p.d) / 2.0);
  std::sort(xs.begin(), xs.end());
  return xs;
}

// Full 2n x 2n coupling matrix, spin-major composite index. Same-spin
// blocks carry the barrier, opposite-spin blocks the (sign-flipped) field:
// v = (4m/hbar^2) [[W, -F], [-F, W]]. Real symmetric by construction.
inline Eigen::MatrixXd assemble_coupling(double x, const ChannelSet& cs,
                                         const ModelParams& p) {
  const int n = cs.n_open;
  const double pref = 4.0 * p.m / (p.hbar * p.hbar);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      const double w = pref * barrier_matrix_element(i, j, x, p);
      const double f = -pref * field_matrix_element(i, j, x, p);
      v(i - 1, j - 1) = w;
      v(j - 1, i - 1) = w;
      v(n + i - 1, n + j - 1) = w;
      v(n + j - 1, n + i - 1) = w;
      v(i - 1, n + j - 1) = f;
      v(j - 1, n + i - 1) = f;
      v(n + i - 1, j - 1) = f;
      v(n + j - 1, i - 1) = f;
    }
  }
  return v;
}

}  // namespace cctunnel

#endif
