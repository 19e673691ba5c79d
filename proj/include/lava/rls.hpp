#ifndef LAVA_RLS_HPP
#define LAVA_RLS_HPP

#include <Eigen/Dense>
#include <utility>

#include "lava/common.hpp"

namespace lava {

// Recursive least squares for the nominal parameters theta_bar (n_y x p)
// and the cross-projection H (p x q), sharing one gain matrix P.
struct RlsState {
  Eigen::MatrixXd theta_bar;  // n_y x p
  Eigen::MatrixXd H;          // p x q
  Eigen::MatrixXd P;          // p x p, symmetric positive definite
  long t = 0;
};

RlsState make_rls_state(int n_y, int p, long q, double gain_init = 1e4);

// P is updated first, then theta_bar and H use the new P(t). P is
// symmetrized after each update to stop floating-point drift.
void rls_update(RlsState& state, const Eigen::VectorXd& y,
                const Eigen::VectorXd& phi, const Eigen::VectorXd& gamma);

// Pseudoinverse (minimum-norm) batch solution: theta_bar = Y Phi^+,
// H = (Gamma Phi^+)^T; the limit of the recursion as gain_init grows.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> batch_ls(
    const Eigen::MatrixXd& Phi, const Eigen::MatrixXd& Y,
    const Eigen::MatrixXd& Gamma);

}  // namespace lava

#endif
