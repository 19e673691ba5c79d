#include <doctest.h>

#include <cmath>

#include "lava/predictor.hpp"
#include "oracles.hpp"

using lava::ArgumentError;
using lava::Dataset;
using lava::Model;
using lava::NumericError;
using lava::RegressorConfig;
using lava::SchemaError;

namespace {

RegressorConfig tiny_cfg(int M, double ell) {
  RegressorConfig cfg;
  cfg.M = M;
  cfg.ell = Eigen::VectorXd::Constant(2, ell);
  return cfg;
}

Dataset const_input_record(long n, double u_val, const Eigen::VectorXd& y) {
  Dataset d;
  d.inputs = Eigen::MatrixXd::Constant(1, n, u_val);
  d.outputs = y.transpose();
  return d;
}

}  // namespace

TEST_CASE("model round trip keeps exactly the nonzeros") {
  RegressorConfig cfg = tiny_cfg(2, 1.0);  // p = 3, q = 4
  Eigen::MatrixXd theta(1, 3);
  theta << 0.3, -0.2, 0.1;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(1, 4);
  Z(0, 1) = 0.5;
  Z(0, 3) = -2.0;
  Model m = lava::make_model(theta, Z, cfg);
  REQUIRE(m.z.size() == 2);
  CHECK(m.z[0].row == 0);
  CHECK(m.z[0].col == 1);
  CHECK(m.z[0].value == 0.5);
  CHECK(m.z[1].col == 3);
  CHECK(oracles::rel_err(lava::z_dense(m), Z) == 0.0);

  m.z[1].col = 7;
  CHECK_THROWS_AS(lava::z_dense(m), SchemaError);

  CHECK_THROWS_AS(lava::make_model(theta, Eigen::MatrixXd::Zero(1, 3), cfg),
                  ArgumentError);
  CHECK_THROWS_AS(
      lava::make_model(Eigen::MatrixXd::Zero(2, 3), Z, cfg), ArgumentError);
}

TEST_CASE("warmup covers the zero-padded lag window") {
  RegressorConfig cfg;
  cfg.n_a = 3;
  cfg.n_b = 1;
  CHECK(lava::warmup_samples(cfg) == 3);
  cfg.n_b = 5;
  CHECK(lava::warmup_samples(cfg) == 5);
}

TEST_CASE("one-step prediction against a hand-assembled value") {
  const double kPi = 3.14159265358979323846;
  RegressorConfig cfg = tiny_cfg(2, 2.0);
  Eigen::MatrixXd theta(1, 3);
  theta << 0.3, -0.2, 0.1;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(1, 4);
  Z(0, 0) = 0.5;  // multi-index (1,1)
  Model m = lava::make_model(theta, Z, cfg);

  Dataset d;
  d.inputs = Eigen::MatrixXd::Zero(1, 3);
  d.outputs = Eigen::MatrixXd::Zero(1, 3);
  d.outputs(0, 0) = 1.0;

  // t = 2: phi = [1, 0, 1]; gamma_0 = sin(pi*3/4)/sqrt(2) * sin(pi*2/4)/sqrt(2)
  const double g0 = std::sin(kPi * 3.0 / 4.0) / std::sqrt(2.0) *
                    std::sin(kPi * 2.0 / 4.0) / std::sqrt(2.0);
  Eigen::VectorXd yhat = lava::predict_one_step(m, d, 2);
  REQUIRE(yhat.size() == 1);
  CHECK(yhat[0] == doctest::Approx(0.3 * 1.0 + 0.1 + 0.5 * g0).epsilon(1e-14));

  CHECK_THROWS_AS(lava::predict_one_step(m, d, 0), ArgumentError);
  CHECK_THROWS_AS(lava::predict_one_step(m, d, 4), ArgumentError);
}

TEST_CASE("sparse-free prediction is the nominal linear part") {
  lava::Rng rng(21);
  RegressorConfig cfg = tiny_cfg(3, 5.0);
  Eigen::MatrixXd theta = oracles::random_matrix(rng, 1, 3);
  Model m = lava::make_model(theta, Eigen::MatrixXd::Zero(1, 9), cfg);
  Dataset d;
  d.inputs = oracles::random_matrix(rng, 1, 10);
  d.outputs = oracles::random_matrix(rng, 1, 10);
  for (long t = 1; t <= 10; ++t) {
    Eigen::VectorXd phi = lava::build_phi(cfg, d, t);
    CHECK(oracles::rel_err(lava::predict_one_step(m, d, t)[0],
                           theta.row(0).dot(phi)) < 1e-14);
  }
}

TEST_CASE("free run follows the deterministic recursion") {
  RegressorConfig cfg = tiny_cfg(1, 2.5);
  cfg.ell[1] = 1.0;
  const double b0 = 1.0;
  Eigen::MatrixXd theta(1, 3);
  theta << 0.5, 0.0, b0;
  Model m = lava::make_model(theta, Eigen::MatrixXd::Zero(1, 1), cfg);

  const long n = 40;
  Dataset d = const_input_record(n, 0.0, Eigen::VectorXd::Ones(n));
  lava::Simulation sim = lava::simulate_free_run(m, d);
  REQUIRE(!sim.diverged);
  CHECK(sim.out_of_bounds_count == 0);
  for (long t = 1; t <= n; ++t) {
    const double want = 2.0 * b0 * (1.0 - std::pow(0.5, double(t)));
    CHECK(sim.outputs(0, t - 1) == doctest::Approx(want).epsilon(1e-13));
  }
  // first free-run sample has no feedback yet
  CHECK(sim.outputs(0, 0) ==
        doctest::Approx(lava::predict_one_step(m, d, 1)[0]).epsilon(1e-15));

  // all-zero model stays at zero
  Model zero = lava::make_model(Eigen::MatrixXd::Zero(1, 3),
                                Eigen::MatrixXd::Zero(1, 1), cfg);
  sim = lava::simulate_free_run(zero, d);
  CHECK(sim.outputs.cwiseAbs().maxCoeff() == 0.0);

  Dataset two_in;
  two_in.inputs = Eigen::MatrixXd::Zero(2, 5);
  two_in.outputs = Eigen::MatrixXd::Zero(1, 5);
  CHECK_THROWS_AS(lava::simulate_free_run(m, two_in), ArgumentError);
}

TEST_CASE("unstable free run trips the divergence guard") {
  RegressorConfig cfg = tiny_cfg(1, 1.0);
  Eigen::MatrixXd theta(1, 3);
  theta << 2.0, 0.0, 1.0;  // y(t) = 2 y(t-1) + 1 = 2^t - 1
  Model m = lava::make_model(theta, Eigen::MatrixXd::Zero(1, 1), cfg);
  Dataset d = const_input_record(100, 0.0, Eigen::VectorXd::Zero(100));
  lava::Simulation sim = lava::simulate_free_run(m, d);
  REQUIRE(sim.diverged);
  CHECK(sim.divergence_sample == 20);  // 2^20 - 1 first exceeds 1e6
  CHECK(sim.outputs(0, 18) == doctest::Approx(524287.0));
  CHECK(sim.outputs(0, 19) == 0.0);  // zeros past the divergence point
  CHECK(sim.out_of_bounds_count > 0);
}

TEST_CASE("rmse pools squared errors over runs and skips the warmup") {
  Eigen::MatrixXd meas(2, 6), simd(2, 6);
  meas.setZero();
  simd.setZero();
  simd.row(0).setConstant(3.0);   // constant error 3 on channel 1
  simd(1, 0) = 7.0;               // warmup-only error on channel 2

  Eigen::VectorXd r = lava::rmse(simd, meas, 1, 1);
  CHECK(r[0] == doctest::Approx(3.0));
  CHECK(r[1] == 0.0);

  // two stacked runs of length 3: errors e1 = 3 (run 1), e2 = 0 (run 2)
  Eigen::VectorXd r2 = lava::rmse(simd, meas, 2, 0);
  CHECK(r2[0] == doctest::Approx(3.0));
  CHECK(r2[1] == doctest::Approx(std::sqrt(49.0 / 6.0)));

  CHECK_THROWS_AS(lava::rmse(simd, meas, 4, 0), ArgumentError);
  CHECK_THROWS_AS(lava::rmse(simd, meas, 1, 6), ArgumentError);
  CHECK_THROWS_AS(lava::rmse(simd, meas.leftCols(5), 1, 0), ArgumentError);
}

TEST_CASE("fit metric") {
  Eigen::VectorXd y(5), ys(5);
  y << 1, 2, 3, 4, 5;
  CHECK(lava::fit_metric(y, y, 0) == doctest::Approx(100.0));

  ys.setConstant(y.mean());
  CHECK(lava::fit_metric(ys, y, 0) == doctest::Approx(0.0));

  // corrupt warmup sample is ignored
  ys = y;
  ys[0] = 1e9;
  CHECK(lava::fit_metric(ys, y, 1) == doctest::Approx(100.0));

  Eigen::VectorXd flat = Eigen::VectorXd::Ones(5);
  CHECK_THROWS_AS(lava::fit_metric(flat, flat, 0), NumericError);
  CHECK_THROWS_AS(lava::fit_metric(ys, y.head(4), 0), ArgumentError);
  CHECK_THROWS_AS(lava::fit_metric(ys, y, 5), ArgumentError);

  // matrix form runs per channel
  Eigen::MatrixXd M(2, 5), Ms(2, 5);
  M.row(0) = y.transpose();
  M.row(1) = 2.0 * y.transpose();
  Ms = M;
  Ms(1, 2) += 0.5;
  Eigen::VectorXd f = lava::fit_metric(Ms, M, 0);
  CHECK(f[0] == doctest::Approx(100.0));
  CHECK(f[1] == doctest::Approx(lava::fit_metric(
      Eigen::VectorXd(Ms.row(1).transpose()),
      Eigen::VectorXd(M.row(1).transpose()), 0)));
}
