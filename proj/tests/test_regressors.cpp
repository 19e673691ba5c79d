#include <doctest.h>

#include <cmath>

#include "lava/experiments.hpp"
#include "lava/regressors.hpp"
#include "oracles.hpp"

using lava::ArgumentError;
using lava::Dataset;
using lava::RegressorConfig;

namespace {

RegressorConfig scalar_cfg(int M, double ell) {
  RegressorConfig cfg;
  cfg.n_a = 1;
  cfg.n_b = 0;
  cfg.n_u = 1;
  cfg.n_y = 1;
  cfg.M = M;
  cfg.ell = Eigen::VectorXd::Constant(1, ell);
  return cfg;
}

}  // namespace

TEST_CASE("phi at t=1 is all zeros plus the constant") {
  RegressorConfig cfg;
  cfg.ell = Eigen::VectorXd::Ones(2);
  Eigen::MatrixXd u(1, 3), y(1, 3);
  u << 4, 5, 6;
  y << 1, 2, 3;
  Eigen::VectorXd phi = lava::build_phi(cfg, u, y, 1);
  REQUIRE(phi.size() == 3);
  CHECK(phi[0] == 0.0);
  CHECK(phi[1] == 0.0);
  CHECK(phi[2] == 1.0);

  phi = lava::build_phi(cfg, u, y, 2);
  CHECK(phi[0] == 1.0);
  CHECK(phi[1] == 4.0);
  CHECK(phi[2] == 1.0);
}

TEST_CASE("phi stacks output lags before input lags") {
  RegressorConfig cfg;
  cfg.n_y = 2;
  cfg.n_u = 1;
  cfg.ell = Eigen::VectorXd::Ones(3);
  Eigen::MatrixXd u(1, 2), y(2, 2);
  u << 4, 9;
  y << 2, 7, 3, 8;
  Eigen::VectorXd phi = lava::build_phi(cfg, u, y, 2);
  REQUIRE(phi.size() == 4);
  CHECK(phi[0] == 2.0);
  CHECK(phi[1] == 3.0);
  CHECK(phi[2] == 4.0);
  CHECK(phi[3] == 1.0);
}

TEST_CASE("phi covers several lags and zero-pads the pre-record region") {
  RegressorConfig cfg;
  cfg.n_a = 2;
  cfg.n_b = 2;
  cfg.ell = Eigen::VectorXd::Ones(4);
  Eigen::MatrixXd u(1, 3), y(1, 3);
  u << 10, 20, 30;
  y << 1, 2, 3;
  Eigen::VectorXd phi = lava::build_phi(cfg, u, y, 2);
  // [y(1), y(0)=0, u(1), u(0)=0, 1]
  CHECK(phi[0] == 1.0);
  CHECK(phi[1] == 0.0);
  CHECK(phi[2] == 10.0);
  CHECK(phi[3] == 0.0);
  CHECK(phi[4] == 1.0);

  phi = lava::build_phi(cfg, u, y, 3);
  CHECK(phi[0] == 2.0);
  CHECK(phi[1] == 1.0);
  CHECK(phi[2] == 20.0);
  CHECK(phi[3] == 10.0);

  // lags past the end of the record also read as zero
  phi = lava::build_phi(cfg, u, y, 5);
  CHECK(phi[0] == 0.0);
  CHECK(phi[1] == 3.0);
  CHECK(phi[2] == 0.0);
  CHECK(phi[3] == 30.0);
}

TEST_CASE("phi argument errors") {
  RegressorConfig cfg;
  cfg.ell = Eigen::VectorXd::Ones(2);
  Eigen::MatrixXd u(1, 3), y(1, 3);
  u.setZero();
  y.setZero();
  CHECK_THROWS_AS(lava::build_phi(cfg, u, y, 0), ArgumentError);
  Eigen::MatrixXd y2(2, 3);
  y2.setZero();
  CHECK_THROWS_AS(lava::build_phi(cfg, u, y2, 1), ArgumentError);
}

TEST_CASE("dimension bookkeeping") {
  RegressorConfig cfg;
  cfg.n_a = 1;
  cfg.n_b = 1;
  cfg.n_y = 2;
  cfg.n_u = 2;
  cfg.M = 4;
  CHECK(cfg.p() == 5);
  CHECK(cfg.q() == 256);

  RegressorConfig small;
  small.M = 4;
  CHECK(small.p() == 3);
  CHECK(small.q() == 16);

  RegressorConfig one;
  one.n_a = 0;
  one.n_b = 0;
  CHECK(one.p() == 1);
  CHECK(one.q() == 1);  // empty product

  RegressorConfig big;
  big.n_a = 9;
  big.n_b = 0;
  big.M = 16;
  CHECK_THROWS_AS(big.q(), ArgumentError);  // 16^9 overflows the size guard
}

TEST_CASE("validate rejects bad configurations") {
  RegressorConfig cfg;
  cfg.ell = Eigen::VectorXd::Ones(2);
  CHECK_NOTHROW(lava::validate(cfg));

  RegressorConfig bad = cfg;
  bad.n_a = -1;
  CHECK_THROWS_AS(lava::validate(bad), ArgumentError);
  bad = cfg;
  bad.n_y = 0;
  CHECK_THROWS_AS(lava::validate(bad), ArgumentError);
  bad = cfg;
  bad.M = 0;
  CHECK_THROWS_AS(lava::validate(bad), ArgumentError);
  bad = cfg;
  bad.ell = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(lava::validate(bad), ArgumentError);
  bad = cfg;
  bad.ell[1] = 0.0;
  CHECK_THROWS_AS(lava::validate(bad), ArgumentError);
}

TEST_CASE("gamma hand values in one dimension") {
  // phi_1 = 0 at ell = 1: sin(pi k / 2) = 1, 0, -1, 0, ...
  RegressorConfig cfg = scalar_cfg(1, 1.0);
  Eigen::VectorXd phi(2);
  phi << 0.0, 1.0;
  bool oob = true;
  Eigen::VectorXd g = lava::build_gamma(cfg, phi, &oob);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(!oob);

  cfg = scalar_cfg(4, 1.0);
  g = lava::build_gamma(cfg, phi);
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(g[1]) < 1e-15);
  CHECK(g[2] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(g[3]) < 1e-15);

  // the basis vanishes on the boundary of the box
  phi[0] = 1.0;
  cfg = scalar_cfg(2, 1.0);
  oob = true;
  g = lava::build_gamma(cfg, phi, &oob);
  CHECK(std::abs(g[0]) < 1e-14);
  CHECK(std::abs(g[1]) < 1e-14);
  CHECK(!oob);  // |phi| == ell is still inside

  // scale: entries carry 1/sqrt(ell)
  cfg = scalar_cfg(1, 4.0);
  phi[0] = 0.0;
  g = lava::build_gamma(cfg, phi);
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-15));  // sin(pi/2)/2
}

TEST_CASE("gamma out-of-bounds flag") {
  RegressorConfig cfg = scalar_cfg(3, 2.0);
  Eigen::VectorXd phi(2);
  phi << 2.5, 1.0;
  bool oob = false;
  lava::build_gamma(cfg, phi, &oob);
  CHECK(oob);
  phi[0] = -2.5;
  lava::build_gamma(cfg, phi, &oob);
  CHECK(oob);
  phi[0] = 1.9;
  lava::build_gamma(cfg, phi, &oob);
  CHECK(!oob);
  CHECK_THROWS_AS(lava::build_gamma(cfg, Eigen::VectorXd::Zero(5)), ArgumentError);
}

TEST_CASE("gamma matches a brute-force enumeration") {
  // one dimension, M = 5
  RegressorConfig cfg = scalar_cfg(5, 1.7);
  Eigen::VectorXd phi(2);
  phi << 0.93, 1.0;
  Eigen::VectorXd g = lava::build_gamma(cfg, phi);
  const double kPi = 3.14159265358979323846;
  for (int k = 1; k <= 5; ++k) {
    double want =
        std::sin(kPi * k * (phi[0] + 1.7) / (2 * 1.7)) / std::sqrt(1.7);
    CHECK(std::abs(g[k - 1] - want) < 1e-13);
  }

  // three dimensions, M = 3, q = 27: flat index (k1-1)*9 + (k2-1)*3 + (k3-1)
  RegressorConfig cube;
  cube.n_a = 1;
  cube.n_b = 2;
  cube.n_u = 1;
  cube.n_y = 1;
  cube.M = 3;
  cube.ell = Eigen::VectorXd(3);
  cube.ell << 0.8, 1.3, 2.2;
  REQUIRE(cube.p() == 4);
  REQUIRE(cube.q() == 27);
  Eigen::VectorXd phic(4);
  phic << 0.31, -0.95, 1.4, 1.0;
  Eigen::VectorXd gc = lava::build_gamma(cube, phic);
  for (int k1 = 1; k1 <= 3; ++k1)
    for (int k2 = 1; k2 <= 3; ++k2)
      for (int k3 = 1; k3 <= 3; ++k3) {
        double want = 1.0;
        const int idx[3] = {k1, k2, k3};
        for (int i = 0; i < 3; ++i) {
          const double ell = cube.ell[i];
          want *= std::sin(kPi * idx[i] * (phic[i] + ell) / (2 * ell)) /
                  std::sqrt(ell);
        }
        long j = (k1 - 1) * 9 + (k2 - 1) * 3 + (k3 - 1);
        CHECK(std::abs(gc[j] - want) < 1e-13);
      }

  // every entry obeys the product bound prod ell_i^{-1/2}
  double bound = 1.0;
  for (int i = 0; i < 3; ++i) bound /= std::sqrt(cube.ell[i]);
  CHECK(gc.cwiseAbs().maxCoeff() <= bound + 1e-12);
}

TEST_CASE("estimate_bounds takes the running max with margin and floor") {
  RegressorConfig cfg = scalar_cfg(2, 1.0);
  Dataset data;
  data.inputs.resize(1, 3);
  data.inputs.setZero();
  data.outputs.resize(1, 3);
  data.outputs << -3, 2, 1;
  // phi_1 over t=1..3 is 0, -3, 2
  Eigen::VectorXd ell = lava::estimate_bounds(cfg, data, 1.0);
  REQUIRE(ell.size() == 1);
  CHECK(ell[0] == doctest::Approx(3.0));
  ell = lava::estimate_bounds(cfg, data, 1.5);
  CHECK(ell[0] == doctest::Approx(4.5));

  data.outputs.setZero();
  ell = lava::estimate_bounds(cfg, data);
  CHECK(ell[0] == doctest::Approx(1e-6));  // floor keeps ell positive

  CHECK_THROWS_AS(lava::estimate_bounds(cfg, data, 0.99), ArgumentError);
  Dataset empty;
  empty.inputs.resize(1, 0);
  empty.outputs.resize(1, 0);
  CHECK_THROWS_AS(lava::estimate_bounds(cfg, empty), ArgumentError);
}

TEST_CASE("default margin keeps a whole record inside the box") {
  Eigen::MatrixXd u(2, 400);
  for (int k = 0; k < 2; ++k) {
    lava::RsSignalSpec rs;
    rs.amplitude = 5.0;
    rs.length = 400;
    rs.base_period = 20;
    rs.seed = 90 + k;
    u.row(k) = lava::generate_rs(rs).transpose();
  }
  lava::SaturationSystemSpec sim;
  sim.seed = 77;
  Dataset data = lava::simulate_saturation(sim, u);

  RegressorConfig cfg;
  cfg.n_a = 1;
  cfg.n_b = 1;
  cfg.n_u = 2;
  cfg.n_y = 2;
  cfg.M = 3;
  cfg.ell = lava::estimate_bounds(cfg, data);
  lava::validate(cfg);
  for (long t = 1; t <= data.samples(); ++t) {
    bool oob = false;
    lava::build_gamma(cfg, lava::build_phi(cfg, data, t), &oob);
    CHECK(!oob);
  }
}

TEST_CASE("stacked matrices agree with per-sample construction") {
  lava::Rng rng(5);
  RegressorConfig cfg;
  cfg.n_a = 2;
  cfg.n_b = 1;
  cfg.n_u = 1;
  cfg.n_y = 1;
  cfg.M = 3;
  Dataset data;
  data.inputs = oracles::random_matrix(rng, 1, 12);
  data.outputs = oracles::random_matrix(rng, 1, 12);
  cfg.ell = lava::estimate_bounds(cfg, data);

  Eigen::MatrixXd Phi = lava::build_phi_matrix(cfg, data);
  REQUIRE(Phi.rows() == cfg.p());
  REQUIRE(Phi.cols() == 12);
  Eigen::MatrixXd Gamma = lava::build_gamma_matrix(cfg, Phi);
  REQUIRE(Gamma.rows() == cfg.q());
  REQUIRE(Gamma.cols() == 12);
  for (long t = 1; t <= 12; ++t) {
    Eigen::VectorXd phi = lava::build_phi(cfg, data, t);
    CHECK((Phi.col(t - 1) - phi).cwiseAbs().maxCoeff() == 0.0);
    CHECK((Gamma.col(t - 1) - lava::build_gamma(cfg, phi))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}
