#ifndef LAVA_SOLVER_HPP
#define LAVA_SOLVER_HPP

#include <Eigen/Dense>

#include "lava/common.hpp"
#include "lava/regressors.hpp"
#include "lava/rls.hpp"

namespace lava {

// Running sums of outer products R^{a,b}(t) = sum_s a(s) b(s)^T for the six
// signal pairs the recursive solver needs.
struct CrossProducts {
  Eigen::MatrixXd phiphi;  // p x p
  Eigen::MatrixXd gamgam;  // q x q
  Eigen::MatrixXd yy;      // n_y x n_y
  Eigen::MatrixXd phigam;  // p x q
  Eigen::MatrixXd phiy;    // p x n_y
  Eigen::MatrixXd gamy;    // q x n_y
};

CrossProducts make_cross(int n_y, int p, long q);
void update_cross(CrossProducts& cross, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& phi, const Eigen::VectorXd& gamma);

// Per-row working variables of the coordinate loop. gram is the Gram matrix
// T of the projected basis; eta(i) tracks the squared residual norm of row i
// and zeta holds the per-row negative gradients, both maintained
// incrementally as coordinates move.
struct SolverWork {
  Eigen::MatrixXd gram;     // q x q
  Eigen::MatrixXd weights;  // n_y x q
  Eigen::VectorXd kappa;    // n_y
  Eigen::VectorXd eta;      // n_y
  Eigen::MatrixXd rho;      // q x n_y
  Eigen::MatrixXd zeta;     // q x n_y
  bool prepared = false;
};

struct SolverState {
  RlsState rls;
  CrossProducts cross;
  Eigen::MatrixXd z_check;  // n_y x q, current iterate
  int cycles = 5;           // L, full coordinate sweeps per sample
  long t = 0;
  SolverWork work;
};

SolverState make_solver_state(const RegressorConfig& config, int cycles = 5,
                              double gain_init = 1e4);

// One sample: RLS update, accumulator updates, rebuild of the working
// variables, then `cycles` full coordinate sweeps over every entry of Z.
void step(SolverState& state, const Eigen::VectorXd& y,
          const Eigen::VectorXd& phi, const Eigen::VectorXd& gamma);

// Exact scalar minimizer of r -> sqrt(alpha + beta r^2 - 2|g| r) + w r with
// sign(g) attached; 0 when alpha w^2 >= g^2 or the column is dead.
double coordinate_min(double alpha, double beta, double g, double w);

// w(i,j) = sqrt(R^{gamgam}_jj / t), identical across rows.
Eigen::MatrixXd weights_recursive(const CrossProducts& cross, long t);

// Pieces of step(), exposed so the accumulators can be cycled to
// convergence on a fixed record and so tests can interleave checks.
void prepare_rows(SolverState& state);
double run_cycle(SolverState& state);  // returns the total objective after
double objective(const SolverState& state);

// Extra sweeps at frozen accumulators/weights until the relative objective
// change drops below tol. Returns sweeps used; max_cycles exceeded -> the
// caller sees the count equal to max_cycles.
int refine(SolverState& state, double tol = 1e-10, int max_cycles = 10000);

// Theta_hat(t) = theta_bar(t) - Z(t) H(t)^T
Eigen::MatrixXd theta_hat(const SolverState& state);

}  // namespace lava

#endif
