#ifndef LAVA_DATASET_HPP
#define LAVA_DATASET_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "lava/common.hpp"

namespace lava {

// Multi-channel record, one column per sample (sample index t is 1-based
// in the math, column t-1 in storage).
struct Dataset {
  Eigen::MatrixXd inputs;   // n_u x N
  Eigen::MatrixXd outputs;  // n_y x N
  double sample_period = 1.0;  // metadata only

  Eigen::Index n_u() const { return inputs.rows(); }
  Eigen::Index n_y() const { return outputs.rows(); }
  Eigen::Index samples() const { return outputs.cols(); }
};

// Piecewise-constant excitation: PRBS levels in {-1,+1} from a maximal
// length LFSR clocked once per base_period samples, each constant run
// scaled by an independent uniform draw on [0, amplitude].
struct RsSignalSpec {
  double amplitude = 1.0;
  int base_period = 20;
  long length = 0;
  std::uint64_t seed = 0;
  int lfsr_order = 9;
};

Dataset load_csv(const std::string& path, int n_u, int n_y);
// Variant that infers channel counts from the u*/y* header names.
Dataset load_csv(const std::string& path);
void write_csv(const std::string& path, const Dataset& data);

Eigen::VectorXd generate_rs(const RsSignalSpec& spec);

// boundary is 1-based; first part gets samples 1..boundary.
std::pair<Dataset, Dataset> split(const Dataset& data, long boundary);

}  // namespace lava

#endif
