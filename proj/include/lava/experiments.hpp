#ifndef LAVA_EXPERIMENTS_HPP
#define LAVA_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "lava/dataset.hpp"
#include "lava/predictor.hpp"

namespace lava {

// Two-state benchmark: x1 integrates u1 through a hard saturation, x2 is a
// linear tank fed by x1 and u2; both states observed in white noise.
struct SaturationSystemSpec {
  double noise_variance = 2.5e-3;  // per-channel output noise variance
  double saturation_level = 2.0;   // may be +inf to disable the clamp
  std::uint64_t seed = 0;
};

Dataset simulate_saturation(const SaturationSystemSpec& spec,
                            const Eigen::MatrixXd& input);  // input is 2 x N

enum class Estimator { lava_r, arx };
const char* estimator_name(Estimator e);

struct SweepConfig {
  std::vector<double> amplitudes = {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0};
  int mc_runs = 20;
  std::uint64_t seed = 0;
  long samples = 1000;
  int cycles = 5;          // L
  double gain_init = 1e4;  // c
  int base_period = 20;
  double noise_variance = 2.5e-3;
  double saturation_level = 2.0;
  double margin = 1.2;
  int n_a = 1;
  int n_b = 1;
  int M = 4;
  std::vector<Estimator> estimators = {Estimator::lava_r, Estimator::arx};
};

struct SweepRow {
  Estimator estimator = Estimator::lava_r;
  double amplitude = 0.0;
  int channel = 0;  // 1-based in the emitted table
  double rmse = 0.0;
};

// For each amplitude: one fresh training record, one streaming fit per
// estimator, then mc_runs independent validation records; RMSE averages the
// squared free-run errors over runs before the square root.
std::vector<SweepRow> run_amplitude_sweep(const SweepConfig& config);

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows);

}  // namespace lava

#endif
