#include "lava/rls.hpp"

namespace lava {

RlsState make_rls_state(int n_y, int p, long q, double gain_init) {
  if (n_y < 1 || p < 1 || q < 0) throw ArgumentError("make_rls_state: bad dims");
  if (gain_init <= 0) throw ArgumentError("make_rls_state: gain_init must be > 0");
  RlsState s;
  s.theta_bar = Eigen::MatrixXd::Zero(n_y, p);
  s.H = Eigen::MatrixXd::Zero(p, q);
  s.P = gain_init * Eigen::MatrixXd::Identity(p, p);
  s.t = 0;
  return s;
}

void rls_update(RlsState& state, const Eigen::VectorXd& y,
                const Eigen::VectorXd& phi, const Eigen::VectorXd& gamma) {
  if (y.size() != state.theta_bar.rows() || phi.size() != state.P.rows() ||
      gamma.size() != state.H.cols())
    throw ArgumentError("rls_update: dimension mismatch");
  if (!y.allFinite() || !phi.allFinite() || !gamma.allFinite())
    throw NumericError("rls_update: non-finite input at t=" +
                       std::to_string(state.t + 1));

  Eigen::VectorXd Pphi = state.P * phi;
  const double denom = 1.0 + phi.dot(Pphi);
  state.P.noalias() -= (Pphi * Pphi.transpose()) / denom;
  state.P = 0.5 * (state.P + state.P.transpose()).eval();

  Eigen::VectorXd k = state.P * phi;  // P(t) phi
  const Eigen::VectorXd e = y - state.theta_bar * phi;
  state.theta_bar.noalias() += e * k.transpose();
  const Eigen::RowVectorXd hcorr =
      gamma.transpose() - phi.transpose() * state.H;
  state.H.noalias() += k * hcorr;
  ++state.t;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> batch_ls(
    const Eigen::MatrixXd& Phi, const Eigen::MatrixXd& Y,
    const Eigen::MatrixXd& Gamma) {
  if (Y.cols() != Phi.cols() || Gamma.cols() != Phi.cols())
    throw ArgumentError("batch_ls: sample count mismatch");
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Phi.transpose());
  Eigen::MatrixXd theta_bar = cod.solve(Y.transpose()).transpose();
  Eigen::MatrixXd H = cod.solve(Gamma.transpose());
  return {std::move(theta_bar), std::move(H)};
}

}  // namespace lava
