#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "cctunnel/matelem.hpp"
#include "cctunnel/model.hpp"
#include "quad_oracle.hpp"

using namespace cctunnel;

TEST_CASE("mode overlap closed form: orthonormality over the full well") {
  for (double d : {5.0, 7.0, 0.05}) {
    for (int i = 1; i <= 7; ++i) {
      for (int j = 1; j <= 7; ++j) {
        const double val = well_overlap_integral(1.0, 0.0, d, i, j, d);
        const double expect = i == j ? 1.0 : 0.0;
        CHECK_THAT(val, Catch::Matchers::WithinAbs(expect, 1e-14));
      }
    }
  }
}

TEST_CASE("mode overlap closed form matches quadrature on random windows") {
  std::mt19937 rng(20240811u);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 7);
  for (int trial = 0; trial < 500; ++trial) {
    const double d = 0.2 + 9.8 * ud(rng);
    // windows may extend past the well support, as the raw-frame field
    // window does
    double g1 = -0.5 * d + 2.0 * d * ud(rng);
    double g2 = -0.5 * d + 2.0 * d * ud(rng);
    if (g2 < g1) std::swap(g1, g2);
    const int n1 = mode(rng), n2 = mode(rng);
    const double closed = well_overlap_integral(1.0, g1, g2, n1, n2, d);
    const double numeric = quad_oracle::overlap(1.0, g1, g2, n1, n2, d);
    CHECK_THAT(closed, Catch::Matchers::WithinAbs(numeric, 1e-10));
  }
}

TEST_CASE("mode overlap edge behavior") {
  CHECK(well_overlap_integral(1.0, 2.0, 2.0, 1, 1, 5.0) == 0.0);
  CHECK(well_overlap_integral(1.0, 3.0, 2.0, 1, 1, 5.0) == 0.0);
  CHECK_THROWS_AS(well_overlap_integral(1.0, 0.0, 1.0, 0, 1, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(well_overlap_integral(1.0, 0.0, 1.0, 1, 1, -1.0), std::invalid_argument);
}

TEST_CASE("barrier element reference value: one band inside the well") {
  ModelParams p;  // a=1, d=5, l=5, V0=1
  // at x=2 only the band [0.5, 2.5] survives the clamp
  CHECK_THAT(barrier_matrix_element(1, 1, 2.0, p),
             Catch::Matchers::WithinAbs(0.4935489283788639, 1e-12));
  CHECK_THAT(barrier_matrix_element(1, 1, 2.0, p),
             Catch::Matchers::WithinAbs(quad_oracle::barrier_element(1, 1, 2.0, p), 1e-12));
}

TEST_CASE("barrier element is even in x and symmetric in the indices") {
  ModelParams p;
  p.a = 0.8;
  p.d = 6.0;
  p.l = 2.0;  // overlapping bands occur for small separations
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> ux(-4.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = ux(rng);
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        CHECK(barrier_matrix_element(i, j, x, p) == barrier_matrix_element(i, j, -x, p));
        CHECK(barrier_matrix_element(i, j, x, p) == barrier_matrix_element(j, i, x, p));
      }
    }
  }
}

TEST_CASE("barrier element matches quadrature, band overlap included") {
  std::mt19937 rng(20240812u);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    ModelParams p;
    p.a = 0.2 + 1.8 * ud(rng);
    p.d = 0.5 + 7.5 * ud(rng);
    p.l = 8.0 * ud(rng);
    p.V0 = 1.0;
    const Domain dom = integration_domain(p);
    const double x = dom.x_right * (2.0 * ud(rng) - 1.0) * 1.1;
    const int i = mode(rng), j = mode(rng);
    CHECK_THAT(barrier_matrix_element(i, j, x, p),
               Catch::Matchers::WithinAbs(quad_oracle::barrier_element(i, j, x, p), 1e-10));
  }
}

TEST_CASE("field element reference values for a wide field region") {
  ModelParams p;
  p.b = 10.0;
  p.u = 1.0;  // l=5, d=5

  SECTION("raw-frame window covers the full separation range") {
    p.convention = Convention::paper_code;
    CHECK_THAT(field_matrix_element(1, 1, 0.0, p),
               Catch::Matchers::WithinAbs(1.0, 1e-14));
  }
  SECTION("well-frame window covers the full well") {
    p.convention = Convention::derived;
    CHECK_THAT(field_matrix_element(1, 1, 0.0, p),
               Catch::Matchers::WithinAbs(1.0, 1e-14));
  }
  SECTION("the two conventions disagree at generic x") {
    p.b = 1.0;
    p.convention = Convention::paper_code;
    const double raw = field_matrix_element(1, 1, 1.0, p);
    p.convention = Convention::derived;
    const double shifted = field_matrix_element(1, 1, 1.0, p);
    CHECK(std::abs(raw - shifted) > 1e-3);
  }
}

TEST_CASE("field element matches quadrature under both conventions") {
  std::mt19937 rng(20240813u);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    ModelParams p;
    p.a = 0.2 + 1.8 * ud(rng);
    p.b = 3.0 * ud(rng);
    p.d = 0.5 + 7.5 * ud(rng);
    p.l = 8.0 * ud(rng);
    p.u = 1.0;
    p.convention = trial % 2 == 0 ? Convention::paper_code : Convention::derived;
    const Domain dom = integration_domain(p);
    const double x = dom.x_right * (2.0 * ud(rng) - 1.0) * 1.1;
    const int i = mode(rng), j = mode(rng);
    CHECK_THAT(field_matrix_element(i, j, x, p),
               Catch::Matchers::WithinAbs(quad_oracle::field_element(i, j, x, p), 1e-10));
  }
}

TEST_CASE("field window translates linearly with x before clamping") {
  ModelParams p;
  p.b = 1.3;
  for (Convention conv : {Convention::paper_code, Convention::derived}) {
    p.convention = conv;
    const auto w0 = field_window(0.7, p);
    const auto w1 = field_window(0.7 + 0.25, p);
    CHECK_THAT(w1.lo - w0.lo, Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(w1.hi - w0.hi, Catch::Matchers::WithinAbs(0.5, 1e-12));
  }
}

TEST_CASE("field element vanishes without a field region") {
  ModelParams p;
  p.b = 0.0;
  CHECK(field_matrix_element(1, 1, 0.0, p) == 0.0);
  p.b = 1.0;
  p.u = 0.0;
  CHECK(field_matrix_element(2, 1, 0.3, p) == 0.0);
}

TEST_CASE("coupling matrix: block structure, symmetry, spin-flip invariance") {
  ModelParams p;
  p.d = 5.0;
  p.l = 3.0;
  p.u = 0.15;
  const ChannelSet cs = open_channels(p, 2.2);
  REQUIRE(cs.n_open == 2);
  const int n = cs.n_open;
  const double pref = 4.0 * p.m / (p.hbar * p.hbar);
  const double x = 0.9;
  const Eigen::MatrixXd v = assemble_coupling(x, cs, p);

  REQUIRE(v.rows() == 2 * n);
  CHECK((v - v.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const double w = pref * barrier_matrix_element(i, j, x, p);
      const double f = -pref * field_matrix_element(i, j, x, p);
      CHECK(v(cs.composite(i, Spin::up), cs.composite(j, Spin::up)) == w);
      CHECK(v(cs.composite(i, Spin::down), cs.composite(j, Spin::down)) == w);
      CHECK(v(cs.composite(i, Spin::up), cs.composite(j, Spin::down)) == f);
      CHECK(v(cs.composite(i, Spin::down), cs.composite(j, Spin::up)) == f);
    }
  }
  // swapping both spin blocks leaves the coupling invariant
  Eigen::MatrixXd swapped(2 * n, 2 * n);
  swapped << v.block(n, n, n, n), v.block(n, 0, n, n), v.block(0, n, n, n),
      v.block(0, 0, n, n);
  CHECK((v - swapped).cwiseAbs().maxCoeff() == 0.0);
}
