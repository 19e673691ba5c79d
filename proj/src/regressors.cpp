#include "lava/regressors.hpp"

#include <cmath>

namespace lava {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEllFloor = 1e-6;
}  // namespace

long RegressorConfig::q() const {
  long v = 1;
  for (int i = 0; i < p() - 1; ++i) {
    v *= M;
    if (v > (1L << 31)) throw ArgumentError("basis size M^(p-1) too large");
  }
  return v;
}

void validate(const RegressorConfig& config) {
  if (config.n_a < 0 || config.n_b < 0)
    throw ArgumentError("lag counts must be nonnegative");
  if (config.n_u < 1 || config.n_y < 1)
    throw ArgumentError("channel counts must be positive");
  if (config.M < 1) throw ArgumentError("M must be >= 1");
  if (config.ell.size() != config.p() - 1)
    throw ArgumentError("ell must have length p-1 = " +
                        std::to_string(config.p() - 1));
  if ((config.ell.array() <= 0).any())
    throw ArgumentError("all ell entries must be > 0");
  (void)config.q();  // size guard
}

Eigen::VectorXd build_phi(const RegressorConfig& config,
                          const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& outputs, long t) {
  if (outputs.rows() != config.n_y || inputs.rows() != config.n_u)
    throw ArgumentError("build_phi: channel count mismatch");
  if (t < 1) throw ArgumentError("build_phi: t must be >= 1");
  Eigen::VectorXd phi(config.p());
  long k = 0;
  for (int lag = 1; lag <= config.n_a; ++lag) {
    long s = t - lag;  // 1-based sample, zero before the record starts
    for (int i = 0; i < config.n_y; ++i)
      phi[k++] = (s >= 1 && s <= outputs.cols()) ? outputs(i, s - 1) : 0.0;
  }
  for (int lag = 1; lag <= config.n_b; ++lag) {
    long s = t - lag;
    for (int i = 0; i < config.n_u; ++i)
      phi[k++] = (s >= 1 && s <= inputs.cols()) ? inputs(i, s - 1) : 0.0;
  }
  phi[k] = 1.0;
  return phi;
}

Eigen::VectorXd build_phi(const RegressorConfig& config, const Dataset& data,
                          long t) {
  return build_phi(config, data.inputs, data.outputs, t);
}

Eigen::VectorXd build_gamma(const RegressorConfig& config,
                            const Eigen::VectorXd& phi, bool* out_of_bounds) {
  const int d = config.p() - 1;
  if (phi.size() != config.p())
    throw ArgumentError("build_gamma: phi has wrong length");
  const int M = config.M;
  const long q = config.q();
  if (out_of_bounds) *out_of_bounds = false;

  // per-dimension sine tables, then a blocked tensor expansion; the last
  // dimension's index ends up varying fastest
  Eigen::MatrixXd table(M, d);
  for (int i = 0; i < d; ++i) {
    const double ell = config.ell[i];
    if (out_of_bounds && std::abs(phi[i]) > ell) *out_of_bounds = true;
    const double base = kPi * (phi[i] + ell) / (2.0 * ell);
    const double scale = 1.0 / std::sqrt(ell);
    for (int k = 0; k < M; ++k) table(k, i) = scale * std::sin((k + 1) * base);
  }

  Eigen::VectorXd gamma(q);
  gamma[0] = 1.0;
  long block = 1;
  for (int i = 0; i < d; ++i) {
    for (long a = block - 1; a >= 0; --a) {
      const double prefix = gamma[a];
      for (int k = M - 1; k >= 0; --k) gamma[a * M + k] = prefix * table(k, i);
    }
    block *= M;
  }
  return gamma;
}

Eigen::VectorXd estimate_bounds(const RegressorConfig& config,
                                const Dataset& data, double margin) {
  if (data.samples() < 1) throw ArgumentError("estimate_bounds: empty record");
  if (margin < 1.0) throw ArgumentError("estimate_bounds: margin must be >= 1");
  const int d = config.p() - 1;
  Eigen::VectorXd bounds = Eigen::VectorXd::Zero(d);
  for (long t = 1; t <= data.samples(); ++t) {
    Eigen::VectorXd phi = build_phi(config, data, t);
    bounds = bounds.cwiseMax(phi.head(d).cwiseAbs());
  }
  return (margin * bounds).cwiseMax(kEllFloor);
}

Eigen::MatrixXd build_phi_matrix(const RegressorConfig& config,
                                 const Dataset& data) {
  Eigen::MatrixXd Phi(config.p(), data.samples());
  for (long t = 1; t <= data.samples(); ++t)
    Phi.col(t - 1) = build_phi(config, data, t);
  return Phi;
}

Eigen::MatrixXd build_gamma_matrix(const RegressorConfig& config,
                                   const Eigen::MatrixXd& Phi) {
  Eigen::MatrixXd Gamma(config.q(), Phi.cols());
  for (Eigen::Index t = 0; t < Phi.cols(); ++t)
    Gamma.col(t) = build_gamma(config, Phi.col(t));
  return Gamma;
}

}  // namespace lava
