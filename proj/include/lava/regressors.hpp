#ifndef LAVA_REGRESSORS_HPP
#define LAVA_REGRESSORS_HPP

#include <Eigen/Dense>

#include "lava/common.hpp"
#include "lava/dataset.hpp"

namespace lava {

// Nominal regressor phi(t) = [y(t-1)..y(t-n_a); u(t-1)..u(t-n_b); 1] and
// the tensor-product sine basis gamma(t) living on the box prod [-l_i, l_i].
struct RegressorConfig {
  int n_a = 1;
  int n_b = 1;
  int n_u = 1;
  int n_y = 1;
  int M = 4;
  Eigen::VectorXd ell;  // length p-1, all > 0

  int p() const { return n_y * n_a + n_u * n_b + 1; }
  long q() const;
};

void validate(const RegressorConfig& config);

// t is 1-based; lags reaching before the first sample read as zero.
Eigen::VectorXd build_phi(const RegressorConfig& config,
                          const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& outputs, long t);
Eigen::VectorXd build_phi(const RegressorConfig& config, const Dataset& data,
                          long t);

// Entry for multi-index (k_1..k_{p-1}), k_i in {1..M}, at flat position
// sum (k_i - 1) M^{p-1-i}: prod_i sin(pi k_i (phi_i + l_i)/(2 l_i))/sqrt(l_i).
// The trailing constant entry of phi does not enter. If out_of_bounds is
// given it is set when some |phi_i| > l_i (value still computed).
Eigen::VectorXd build_gamma(const RegressorConfig& config,
                            const Eigen::VectorXd& phi,
                            bool* out_of_bounds = nullptr);

// l_i = margin * max_t |phi_i(t)| over the record, floored at 1e-6.
Eigen::VectorXd estimate_bounds(const RegressorConfig& config,
                                const Dataset& data, double margin = 1.2);

// Stacked trajectories: Phi is p x N, Gamma is q x N.
Eigen::MatrixXd build_phi_matrix(const RegressorConfig& config,
                                 const Dataset& data);
Eigen::MatrixXd build_gamma_matrix(const RegressorConfig& config,
                                   const Eigen::MatrixXd& Phi);

}  // namespace lava

#endif
