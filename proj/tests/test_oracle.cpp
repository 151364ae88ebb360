#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "cctunnel/oracle.hpp"
#include "cctunnel/vra.hpp"

using namespace cctunnel;
using Catch::Matchers::WithinAbs;

TEST_CASE("analytic single-barrier transmission in all regimes") {
  // frozen from an independent evaluation of the textbook formulas
  CHECK_THAT(analytic_single_barrier(0.5, 1.0, 1.0, 2.0),
             WithinAbs(0.07065082485316446, 1e-14));
  CHECK_THAT(analytic_single_barrier(2.0, 1.0, 1.0, 2.0),
             WithinAbs(0.988275568281199, 1e-14));
  CHECK_THAT(analytic_single_barrier(1.0, 1.0, 1.0, 2.0),
             WithinAbs(0.3333333333333333, 1e-14));
  // continuity across the top of the barrier
  const double below = analytic_single_barrier(1.0 - 1e-9, 1.0, 1.0, 2.0);
  const double above = analytic_single_barrier(1.0 + 1e-9, 1.0, 1.0, 2.0);
  CHECK_THAT(below, WithinAbs(above, 1e-7));
  CHECK_THROWS_AS(analytic_single_barrier(0.0, 1.0, 1.0, 2.0), std::domain_error);
}

TEST_CASE("spin precession closed form") {
  ModelParams p;
  p.u = 0.05;
  const double eps1 = channel_energy(p, 1);
  CHECK_THAT(larmor_flip_analytic(eps1 + 0.5, p, 10.0),
             WithinAbs(0.4229051874041493, 1e-13));
  CHECK(larmor_flip_analytic(eps1 + 0.5, p, 0.0) == 0.0);
  CHECK_THROWS_AS(larmor_flip_analytic(eps1 + 0.04, p, 10.0), std::domain_error);

  p.convention = Convention::paper_code;
  p.b = 100.0;
  p.l = 0.05;
  p.d = 0.05;
  CHECK_THAT(larmor_effective_length(p), WithinAbs(100.075, 1e-12));
  p.convention = Convention::derived;
  CHECK_THAT(larmor_effective_length(p), WithinAbs(200.0, 1e-12));
}

TEST_CASE("segmentation honors the domain and the coupling kinks") {
  ModelParams p;
  p.a = 1.0;
  p.b = 2.0;
  p.d = 5.0;
  p.l = 3.0;
  const Domain dom = integration_domain(p);
  const Segmentation seg = Segmentation::build(p, 500);

  REQUIRE(seg.segments() >= 500);
  CHECK(seg.edges.front() == dom.x_left);
  CHECK(seg.edges.back() == dom.x_right);
  for (std::size_t i = 1; i < seg.edges.size(); ++i)
    CHECK(seg.edges[i] > seg.edges[i - 1]);
  for (double kink : coupling_kinks(p)) {
    if (kink <= dom.x_left + 1e-9 || kink >= dom.x_right - 1e-9) continue;
    double best = 1e9;
    for (double e : seg.edges) best = std::min(best, std::abs(e - kink));
    CHECK(best < 1e-9);
  }
  CHECK_THROWS_AS(Segmentation::build(p, 0), std::invalid_argument);
}

TEST_CASE("reference solver is unitary even on a coarse segmentation") {
  ModelParams p;
  p.d = 7.0;
  p.l = 5.0;
  p.u = 0.15;
  const ScatteringRecord rec = transfer_matrix_solve(2.5, p, 60);
  CHECK(rec.channels.n_open >= 2);
  CHECK(rec.unitarity_defect < 1e-10);
}

TEST_CASE("reference solver converges to the analytic single barrier") {
  // nearly point-like internal structure: the pair tunnels like one
  // particle of mass 2m through a barrier of height 2 V0 and width a
  ModelParams p;
  p.l = 0.05;
  p.d = 0.05;
  p.u = 0.0;
  const double eps1 = channel_energy(p, 1);
  for (double frac : {0.2, 0.5, 0.8, 0.95}) {
    const double E = eps1 + frac * p.V0;
    const ScatteringRecord rec = transfer_matrix_solve(E, p, 2000);
    const double total = rec.p_transmit.col(0).sum();
    const double exact = analytic_single_barrier(frac * p.V0, 2.0 * p.m, 2.0 * p.V0, p.a);
    CHECK_THAT(total, WithinAbs(exact, 1e-2));
  }
}

TEST_CASE("segment refinement converges quadratically to the smooth problem") {
  ModelParams p;
  p.u = 0.15;
  const double E = channel_energy(p, 1) + 0.5;
  const double t_fine = transfer_matrix_solve(E, p, 8000).p_transmit(0, 0);
  const double e_coarse = std::abs(transfer_matrix_solve(E, p, 500).p_transmit(0, 0) - t_fine);
  const double e_mid = std::abs(transfer_matrix_solve(E, p, 1000).p_transmit(0, 0) - t_fine);
  REQUIRE(e_mid > 1e-15);
  CHECK(e_coarse / e_mid > 3.0);  // ~4 expected for a second-order scheme
}

TEST_CASE("reference solver handles a barrier-free field region") {
  // pure precession: compare against the closed form away from thresholds
  ModelParams p;
  p.l = 0.05;
  p.d = 0.05;
  p.b = 30.0;
  p.u = 0.05;
  p.convention = Convention::derived;
  const double eps1 = channel_energy(p, 1);
  const double E = eps1 + 0.6;
  ModelParams free_p = p;
  free_p.V0 = 1e-300;  // validation demands V0 > 0; this is numerically free
  free_p.a = 1e-6;
  const ScatteringRecord rec = transfer_matrix_solve(E, free_p, 3000);
  const ChannelSet cs = rec.channels;
  const int c_in = cs.composite(1, Spin::up);
  const int c_flip = cs.composite(1, Spin::down);
  const double flip = rec.p_transmit(c_flip, c_in);
  const double expect = larmor_flip_analytic(E, p, larmor_effective_length(p));
  CHECK_THAT(flip, WithinAbs(expect, 2e-3));
}
