#ifndef LAVA_MODEL_IO_HPP
#define LAVA_MODEL_IO_HPP

#include <string>

#include "lava/dataset.hpp"
#include "lava/predictor.hpp"

namespace lava {

struct ModelProvenance {
  std::string solver = "lava-r";  // or "mm-batch"
  int iterations = 0;             // sweeps L (lava-r) / MM steps k_max (mm-batch)
  double gain_init = 1e4;         // RLS init constant c
  std::uint64_t seed = 0;
  std::string data_fingerprint;
};

struct ModelFile {
  int schema_version = 1;
  Model model;
  ModelProvenance provenance;
};

// FNV-1a over the dimensions and the raw IEEE bits of every sample.
std::string dataset_fingerprint(const Dataset& data);

void save_model(const std::string& path, const Model& model,
                const ModelProvenance& provenance);
ModelFile load_model(const std::string& path);

}  // namespace lava

#endif
