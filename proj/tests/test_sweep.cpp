#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdlib>

#include "cctunnel/sweep.hpp"

using namespace cctunnel;

TEST_CASE("grid excludes the start value and includes the end") {
  GridSpec g;
  g.start = 0.25;
  g.span = 0.2;
  g.points = 8;
  CHECK_THAT(g.value(0), Catch::Matchers::WithinAbs(0.275, 1e-15));
  CHECK_THAT(g.value(7), Catch::Matchers::WithinAbs(0.45, 1e-15));
  CHECK_THROWS_AS((GridSpec{0.0, 1.0, 0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{0.0, -1.0, 10}.validate()), std::invalid_argument);
}

TEST_CASE("energy sweep fills every point and conserves flux") {
  SweepPlan plan;
  plan.grid.points = 40;
  const SweepResult res = run_sweep(plan);
  REQUIRE(res.points.size() == 40);
  CHECK(res.ok_count() == 40);
  CHECK(res.max_open == 1);
  double prev = 0.0;
  for (const auto& pt : res.points) {
    CHECK(pt.ok);
    CHECK(pt.abscissa > prev);
    prev = pt.abscissa;
    CHECK_THAT(pt.t_total + pt.r_total, Catch::Matchers::WithinAbs(1.0, 1e-6));
    CHECK_FALSE(pt.suspect);
  }
}

TEST_CASE("results are bitwise identical for any worker count") {
  SweepPlan plan;
  plan.grid.points = 12;
  plan.params.u = 0.15;
  const SweepResult serial = run_sweep(plan, {}, 1);
  const SweepResult parallel = run_sweep(plan, {}, 4);
  for (int i = 0; i < plan.grid.points; ++i) {
    REQUIRE(serial.points[i].ok);
    REQUIRE(parallel.points[i].ok);
    CHECK((serial.points[i].p_transmit - parallel.points[i].p_transmit)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(serial.points[i].unitarity_defect == parallel.points[i].unitarity_defect);
  }
}

TEST_CASE("environment variable caps the worker count") {
  setenv("CC_TUNNEL_THREADS", "2", 1);
  CHECK(detail::resolve_thread_count(0, 100) <= 2);
  CHECK(detail::resolve_thread_count(8, 100) == 2);
  setenv("CC_TUNNEL_THREADS", "not-a-number", 1);
  CHECK(detail::resolve_thread_count(3, 100) == 3);
  unsetenv("CC_TUNNEL_THREADS");
  CHECK(detail::resolve_thread_count(5, 2) == 2);
  CHECK(detail::resolve_thread_count(1, 100) == 1);
}

TEST_CASE("field-width sweep varies b at fixed energy") {
  SweepPlan plan;
  plan.axis = Axis::field_width;
  plan.energy_abscissa = 0.5;
  plan.grid = GridSpec{0.0, 2.0, 10};
  const SweepResult res = run_sweep(plan);
  CHECK(res.ok_count() == 10);
  const double eps1 = channel_energy(plan.params, 1);
  for (const auto& pt : res.points) {
    CHECK_THAT(pt.energy, Catch::Matchers::WithinAbs(eps1 + 0.5, 1e-12));
  }
  CHECK_THAT(res.points[4].abscissa, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("a closed incident channel becomes a recorded gap, not an abort") {
  SweepPlan plan;
  plan.params.d = 7.0;
  plan.incident_channel = 2;
  plan.grid.points = 20;
  const SweepResult res = run_sweep(plan);
  const double threshold =
      (channel_energy(plan.params, 2) - channel_energy(plan.params, 1)) /
      plan.params.V0;
  for (const auto& pt : res.points) {
    if (pt.abscissa <= threshold) {
      CHECK_FALSE(pt.ok);
      CHECK_FALSE(pt.error.empty());
    } else {
      CHECK(pt.ok);
    }
  }
  CHECK(res.ok_count() > 0);
  CHECK(res.ok_count() < 20);
}

TEST_CASE("running both solvers records their agreement") {
  SweepPlan plan;
  plan.solver = SolverKind::both;
  plan.grid.points = 5;
  plan.params.u = 0.15;
  plan.n_segments = 2000;
  const SweepResult res = run_sweep(plan);
  for (const auto& pt : res.points) {
    REQUIRE(pt.ok);
    REQUIRE(pt.ref_p_transmit.size() == pt.p_transmit.size());
    CHECK(pt.solver_deviation < 1e-4);
    CHECK(pt.solver_deviation > 0.0);
  }
}

TEST_CASE("halving the step cap five-fold moves probabilities very little") {
  SweepPlan plan;
  plan.grid.points = 30;
  const SweepResult res = run_sweep(plan);
  CHECK(convergence_check(res, 10) < 1e-6);
}

TEST_CASE("spin-resolved accessors address the right composite entries") {
  SweepPlan plan;
  plan.params.u = 0.15;
  plan.grid.points = 4;
  const SweepResult res = run_sweep(plan);
  for (const auto& pt : res.points) {
    REQUIRE(pt.ok);
    REQUIRE(pt.n_open == 1);
    CHECK(transmit_same(pt, plan, 1) == pt.p_transmit[0]);
    CHECK(transmit_flip(pt, plan, 1) == pt.p_transmit[1]);
    CHECK_THAT(transmit_channel(pt, 1),
               Catch::Matchers::WithinAbs(pt.t_total, 1e-15));
  }
  SweepPlan down = plan;
  down.incident_spin = Spin::down;
  const SweepResult res_down = run_sweep(down);
  for (int i = 0; i < 4; ++i) {
    // global spin flip: the down-incident same-spin entry mirrors up-incident
    CHECK_THAT(transmit_same(res_down.points[i], down, 1),
               Catch::Matchers::WithinAbs(transmit_same(res.points[i], plan, 1), 1e-12));
  }
}

TEST_CASE("peak finder: positions, prominence filter, widths, separations") {
  std::vector<double> xs, ys;
  const double s1 = 0.04, s2 = 0.03;
  for (int i = 0; i <= 2000; ++i) {
    const double x = i / 2000.0;
    xs.push_back(x);
    ys.push_back(std::exp(-0.5 * (x - 0.3) * (x - 0.3) / (s1 * s1)) +
                 0.4 * std::exp(-0.5 * (x - 0.7) * (x - 0.7) / (s2 * s2)));
  }
  const auto peaks = find_peaks(xs, ys, 0.01);
  REQUIRE(peaks.size() == 2);
  CHECK_THAT(peaks[0].position, Catch::Matchers::WithinAbs(0.3, 1e-3));
  CHECK_THAT(peaks[1].position, Catch::Matchers::WithinAbs(0.7, 1e-3));
  CHECK_THAT(peaks[0].height, Catch::Matchers::WithinAbs(1.0, 1e-3));
  // isolated gaussian: half-prominence width is the half-maximum width
  CHECK_THAT(peaks[0].width, Catch::Matchers::WithinAbs(2.3548 * s1, 0.05 * 2.3548 * s1));

  const auto strong = find_peaks(xs, ys, 0.5);
  REQUIRE(strong.size() == 1);
  CHECK_THAT(strong[0].position, Catch::Matchers::WithinAbs(0.3, 1e-3));

  const auto gaps = peak_separations(peaks);
  REQUIRE(gaps.size() == 1);
  CHECK_THAT(gaps[0], Catch::Matchers::WithinAbs(0.4, 1e-3));
}

TEST_CASE("peak finder rides out plateaus and ignores endpoints") {
  std::vector<double> xs{0, 1, 2, 3, 4, 5, 6};
  std::vector<double> ys{5, 0, 1, 1, 1, 0, 9};  // flat-topped interior peak
  const auto peaks = find_peaks(xs, ys, 0.5);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].position == 3.0);
  CHECK(peaks[0].height == 1.0);
}
