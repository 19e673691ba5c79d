#include "lava/predictor.hpp"

#include <cmath>

namespace lava {

Model make_model(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& Z,
                 const RegressorConfig& config) {
  validate(config);
  if (theta.rows() != config.n_y || theta.cols() != config.p())
    throw ArgumentError("make_model: theta dimension mismatch");
  if (Z.rows() != config.n_y || Z.cols() != config.q())
    throw ArgumentError("make_model: Z dimension mismatch");
  Model m;
  m.theta = theta;
  m.config = config;
  for (int i = 0; i < Z.rows(); ++i)
    for (long j = 0; j < Z.cols(); ++j)
      if (Z(i, j) != 0.0) m.z.push_back({i, j, Z(i, j)});
  return m;
}

Eigen::MatrixXd z_dense(const Model& model) {
  Eigen::MatrixXd Z =
      Eigen::MatrixXd::Zero(model.config.n_y, model.config.q());
  for (const auto& e : model.z) {
    if (e.row < 0 || e.row >= Z.rows() || e.col < 0 || e.col >= Z.cols())
      throw SchemaError("model: sparse entry out of bounds");
    Z(e.row, e.col) = e.value;
  }
  return Z;
}

int warmup_samples(const RegressorConfig& config) {
  return std::max(config.n_a, config.n_b);
}

namespace {

Eigen::VectorXd apply_model(const Model& model, const Eigen::VectorXd& phi,
                            const Eigen::VectorXd& gamma) {
  Eigen::VectorXd y = model.theta * phi;
  for (const auto& e : model.z) y[e.row] += e.value * gamma[e.col];
  return y;
}

}  // namespace

Eigen::VectorXd predict_one_step(const Model& model, const Dataset& data,
                                 long t) {
  if (t < 1 || t > data.samples())
    throw ArgumentError("predict_one_step: t outside the record");
  Eigen::VectorXd phi = build_phi(model.config, data, t);
  Eigen::VectorXd gamma = build_gamma(model.config, phi);
  return apply_model(model, phi, gamma);
}

Simulation simulate_free_run(const Model& model, const Dataset& data) {
  const long n = data.samples();
  const int n_y = model.config.n_y;
  if (data.n_u() != model.config.n_u || data.n_y() != n_y)
    throw ArgumentError("simulate_free_run: channel count mismatch");

  const double guard =
      1e6 * std::max(1.0, data.outputs.cwiseAbs().maxCoeff());

  Simulation sim;
  sim.outputs = Eigen::MatrixXd::Zero(n_y, n);
  for (long t = 1; t <= n; ++t) {
    Eigen::VectorXd phi =
        build_phi(model.config, data.inputs, sim.outputs, t);
    bool oob = false;
    Eigen::VectorXd gamma = build_gamma(model.config, phi, &oob);
    if (oob) ++sim.out_of_bounds_count;
    Eigen::VectorXd y = apply_model(model, phi, gamma);
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > guard) {
      sim.diverged = true;
      sim.divergence_sample = t;
      break;
    }
    sim.outputs.col(t - 1) = y;
  }
  return sim;
}

Eigen::VectorXd rmse(const Eigen::MatrixXd& simulated,
                     const Eigen::MatrixXd& measured, int runs, int warmup) {
  if (simulated.rows() != measured.rows() ||
      simulated.cols() != measured.cols())
    throw ArgumentError("rmse: dimension mismatch");
  if (runs < 1 || simulated.cols() % runs != 0)
    throw ArgumentError("rmse: column count not divisible into runs");
  const long per = simulated.cols() / runs;
  if (warmup < 0 || warmup >= per)
    throw ArgumentError("rmse: warmup must be in [0, record length)");

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(simulated.rows());
  long count = 0;
  for (int r = 0; r < runs; ++r) {
    for (long t = warmup; t < per; ++t) {
      const long c = r * per + t;
      acc += (simulated.col(c) - measured.col(c)).array().square().matrix();
      ++count;
    }
  }
  return (acc / static_cast<double>(count)).cwiseSqrt();
}

double fit_metric(const Eigen::VectorXd& simulated,
                  const Eigen::VectorXd& measured, int warmup) {
  if (simulated.size() != measured.size())
    throw ArgumentError("fit_metric: length mismatch");
  if (warmup < 0 || warmup >= measured.size())
    throw ArgumentError("fit_metric: warmup must be in [0, record length)");
  const long n = measured.size() - warmup;
  Eigen::VectorXd y = measured.tail(n);
  Eigen::VectorXd ys = simulated.tail(n);
  const double denom = (y.array() - y.mean()).matrix().norm();
  if (denom <= 0.0)
    throw NumericError("fit_metric: measured channel is constant");
  return 100.0 * (1.0 - (y - ys).norm() / denom);
}

Eigen::VectorXd fit_metric(const Eigen::MatrixXd& simulated,
                           const Eigen::MatrixXd& measured, int warmup) {
  Eigen::VectorXd out(measured.rows());
  for (long i = 0; i < measured.rows(); ++i) {
    const Eigen::VectorXd s = simulated.row(i).transpose();
    const Eigen::VectorXd m = measured.row(i).transpose();
    out[i] = fit_metric(s, m, warmup);
  }
  return out;
}

}  // namespace lava
