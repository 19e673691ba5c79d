#ifndef LAVA_PREDICTOR_HPP
#define LAVA_PREDICTOR_HPP

#include <Eigen/Dense>
#include <vector>

#include "lava/common.hpp"
#include "lava/dataset.hpp"
#include "lava/regressors.hpp"

namespace lava {

struct SparseEntry {
  int row = 0;     // output channel, 0-based
  long col = 0;    // basis index, 0-based
  double value = 0.0;
};

// Deployable predictor y_hat(t) = Theta phi(t) + Z gamma(t); Z kept sparse
// because the fitted coefficient matrix is typically mostly zeros.
struct Model {
  Eigen::MatrixXd theta;            // n_y x p
  std::vector<SparseEntry> z;       // exactly the nonzeros of Z
  RegressorConfig config;
};

Model make_model(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& Z,
                 const RegressorConfig& config);
Eigen::MatrixXd z_dense(const Model& model);  // n_y x q

// How many leading samples the metrics skip: the zero-padded lag window.
int warmup_samples(const RegressorConfig& config);

Eigen::VectorXd predict_one_step(const Model& model, const Dataset& data,
                                 long t);

struct Simulation {
  Eigen::MatrixXd outputs;  // n_y x N (zeros past a divergence point)
  bool diverged = false;
  long divergence_sample = 0;   // 1-based, set when diverged
  long out_of_bounds_count = 0; // samples whose phi left the basis box
};

// Free run: simulated outputs feed back into the regressor, measured inputs
// are used as-is. Aborts with the divergence flag when |y| exceeds
// 1e6 x max(1, max |measured output|).
Simulation simulate_free_run(const Model& model, const Dataset& data);

// Per-channel sqrt of the mean squared error. The matrices may stack
// `runs` records horizontally (equal lengths); the first `warmup` samples
// of each record are excluded.
Eigen::VectorXd rmse(const Eigen::MatrixXd& simulated,
                     const Eigen::MatrixXd& measured, int runs, int warmup);

// 100 (1 - ||y - y_sim|| / ||y - mean(y)||) over samples warmup+1..N.
double fit_metric(const Eigen::VectorXd& simulated,
                  const Eigen::VectorXd& measured, int warmup);
Eigen::VectorXd fit_metric(const Eigen::MatrixXd& simulated,
                           const Eigen::MatrixXd& measured, int warmup);

}  // namespace lava

#endif
