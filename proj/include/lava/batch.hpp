#ifndef LAVA_BATCH_HPP
#define LAVA_BATCH_HPP

#include <Eigen/Dense>
#include <vector>

#include "lava/common.hpp"

namespace lava {

// Batch maximum-likelihood machinery over a stored record: the exact cost,
// the latent posterior, the convex majorizer with data-adaptive weights,
// closed-form nuisance updates, and the MM loop. Everything here decouples
// per output row because the covariances are diagonal; the row covariance is
// Omega_i = Gamma^T D_i Gamma + sigma_i I_N (N x N).
//
// Sizes are capped (N * n_y <= 2048) because dense N x N factorizations are
// involved: this is the verification and refinement lane, not the
// streaming path.

struct MlParams {
  Eigen::MatrixXd Theta;  // n_y x p
  Eigen::MatrixXd D;      // n_y x q, d_{i,j} >= 0 (diagonal prior variances)
  Eigen::VectorXd Sigma;  // n_y, sigma_i > 0 (noise variances)
};

MlParams make_initial_params(int n_y, int p, long q);  // {0, 0, I}

struct LatentStats {
  Eigen::VectorXd mean;  // n_y*q, vec(Z) ordering: entry (i,j) at j*n_y + i
  Eigen::MatrixXd cov;   // n_y*q x n_y*q, PSD (zero rows/cols where d=0)
};

// -2 log-likelihood up to the model's constant: quadratic form plus log-det
// of the full output covariance, evaluated via per-row factorizations.
double cost_V(const MlParams& params, const Eigen::MatrixXd& Phi,
              const Eigen::MatrixXd& Gamma, const Eigen::MatrixXd& Y);

// Gaussian posterior of vec(Z) given the record; d_{i,j} = 0 coordinates are
// deterministic zeros (information form, no D inverse).
LatentStats latent_stats(const MlParams& params, const Eigen::MatrixXd& Phi,
                         const Eigen::MatrixXd& Gamma,
                         const Eigen::MatrixXd& Y);

// w_{i,j} = sqrt(gbar_j^T Omega_i^-1 gbar_j / tr{Omega_i^-1}) at the
// majorization point; reduces to ||gbar_j||_2/sqrt(N) when D = 0.
Eigen::MatrixXd weights_full(const MlParams& majorization_point,
                             const Eigen::MatrixXd& Gamma);

// Closed-form covariance updates given the solved (Theta, Z).
MlParams nuisance_update(const Eigen::MatrixXd& Theta_hat,
                         const Eigen::MatrixXd& Z_hat,
                         const MlParams& majorization_point,
                         const Eigen::MatrixXd& Phi,
                         const Eigen::MatrixXd& Gamma,
                         const Eigen::MatrixXd& Y);

struct ConcentratedSolution {
  Eigen::MatrixXd Theta_hat;  // n_y x p
  Eigen::MatrixXd Z_hat;      // n_y x q
  bool converged = false;
  int cycles = 0;
};

// The convex program: per row, minimize ||y_i - Phi^T th_i - Gamma^T v_i||_2
// + ||w_i .* v_i||_1. Theta is concentrated out exactly (pseudoinverse),
// then cyclic coordinate minimization runs until the relative objective
// change drops below tol.
ConcentratedSolution solve_concentrated(const Eigen::MatrixXd& weights,
                                        const Eigen::MatrixXd& Phi,
                                        const Eigen::MatrixXd& Gamma,
                                        const Eigen::MatrixXd& Y,
                                        double tol = 1e-12,
                                        int max_cycles = 10000);

struct MmStep {
  MlParams params;
  Eigen::MatrixXd Z_hat;
  double cost = 0.0;
};

// Majorize-minimize loop: weights at the current point, concentrated solve,
// nuisance update, repeat. Stops at k_max or when the cost change is below
// tol relative.
std::vector<MmStep> mm_iterate(const Eigen::MatrixXd& Phi,
                               const Eigen::MatrixXd& Gamma,
                               const Eigen::MatrixXd& Y,
                               const MlParams& init, int k_max = 20,
                               double tol = 1e-8);
std::vector<MmStep> mm_iterate(const Eigen::MatrixXd& Phi,
                               const Eigen::MatrixXd& Gamma,
                               const Eigen::MatrixXd& Y, int k_max = 20,
                               double tol = 1e-8);

// The augmented majorizer evaluated at (params, Z) around the majorization
// point, constant term included; +inf when some z_{i,j} != 0 sits on a
// d_{i,j} = 0 coordinate.
double majorizer_value(const MlParams& params, const Eigen::MatrixXd& Z,
                       const MlParams& majorization_point,
                       const Eigen::MatrixXd& Phi,
                       const Eigen::MatrixXd& Gamma,
                       const Eigen::MatrixXd& Y);

// The Z-concentrated majorizer (quadratic form under the current
// covariance plus tangent-plane terms plus the constant).
double majorizer_concentrated(const MlParams& params,
                              const MlParams& majorization_point,
                              const Eigen::MatrixXd& Phi,
                              const Eigen::MatrixXd& Gamma,
                              const Eigen::MatrixXd& Y);

// log det of the full output covariance at params (sum of row log-dets).
double log_det_cov(const MlParams& params, const Eigen::MatrixXd& Gamma);

// Right-hand side of the tangent-plane bound on log det evaluated at
// (params, majorization_point); equals log_det_cov at params ==
// majorization_point and dominates it elsewhere.
double log_det_tangent_bound(const MlParams& params,
                             const MlParams& majorization_point,
                             const Eigen::MatrixXd& Gamma);

}  // namespace lava

#endif
