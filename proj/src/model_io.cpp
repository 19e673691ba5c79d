#include "lava/model_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

#include "lava/regressors.hpp"

namespace lava {

using nlohmann::json;

namespace {

void fnv1a(std::uint64_t& h, const void* bytes, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
}

void fnv1a_matrix(std::uint64_t& h, const Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double v = m(r, c);
      fnv1a(h, &v, sizeof v);
    }
}

}  // namespace

std::string dataset_fingerprint(const Dataset& data) {
  std::uint64_t h = 1469598103934665603ull;
  const std::int64_t dims[3] = {data.n_u(), data.n_y(), data.samples()};
  fnv1a(h, dims, sizeof dims);
  fnv1a_matrix(h, data.inputs);
  fnv1a_matrix(h, data.outputs);
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void save_model(const std::string& path, const Model& model,
                const ModelProvenance& provenance) {
  const RegressorConfig& cfg = model.config;
  json j;
  j["schema_version"] = 1;
  j["dims"] = {{"n_u", cfg.n_u}, {"n_y", cfg.n_y}, {"n_a", cfg.n_a},
               {"n_b", cfg.n_b}, {"M", cfg.M},     {"p", cfg.p()},
               {"q", cfg.q()}};
  j["ell"] = std::vector<double>(cfg.ell.data(), cfg.ell.data() + cfg.ell.size());

  std::vector<double> theta;
  theta.reserve(static_cast<std::size_t>(model.theta.size()));
  for (Eigen::Index r = 0; r < model.theta.rows(); ++r)  // row-major
    for (Eigen::Index c = 0; c < model.theta.cols(); ++c)
      theta.push_back(model.theta(r, c));
  j["theta"] = theta;

  json zs = json::array();
  for (const SparseEntry& e : model.z) {
    zs.push_back({{"i", e.row}, {"j", e.col}, {"value", e.value}});
  }
  j["z_sparse"] = zs;

  j["provenance"] = {{"solver", provenance.solver},
                     {"iterations", provenance.iterations},
                     {"c", provenance.gain_init},
                     {"seed", provenance.seed},
                     {"data_fingerprint", provenance.data_fingerprint}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("save_model: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw ArgumentError("save_model: write failed on " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("load_model: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("load_model: " + std::string(e.what()));
  }

  ModelFile file;
  try {
    file.schema_version = j.at("schema_version").get<int>();
    if (file.schema_version != 1)
      throw SchemaError("load_model: unsupported schema_version");

    const json& d = j.at("dims");
    RegressorConfig cfg;
    cfg.n_u = d.at("n_u").get<int>();
    cfg.n_y = d.at("n_y").get<int>();
    cfg.n_a = d.at("n_a").get<int>();
    cfg.n_b = d.at("n_b").get<int>();
    cfg.M = d.at("M").get<int>();
    const auto ell = j.at("ell").get<std::vector<double>>();
    cfg.ell = Eigen::Map<const Eigen::VectorXd>(
        ell.data(), static_cast<Eigen::Index>(ell.size()));
    validate(cfg);
    if (d.at("p").get<long>() != cfg.p() || d.at("q").get<long>() != cfg.q())
      throw SchemaError("load_model: dims p/q inconsistent with n_a,n_b,M");

    const auto theta = j.at("theta").get<std::vector<double>>();
    if (static_cast<long>(theta.size()) != cfg.n_y * cfg.p())
      throw SchemaError("load_model: theta size mismatch");
    Eigen::MatrixXd Theta(cfg.n_y, cfg.p());
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < Theta.rows(); ++r)
      for (Eigen::Index c = 0; c < Theta.cols(); ++c) Theta(r, c) = theta[idx++];

    file.model.theta = Theta;
    file.model.config = cfg;
    for (const json& e : j.at("z_sparse")) {
      SparseEntry s;
      s.row = e.at("i").get<int>();
      s.col = e.at("j").get<long>();
      s.value = e.at("value").get<double>();
      if (s.row < 0 || s.row >= cfg.n_y || s.col < 0 || s.col >= cfg.q())
        throw SchemaError("load_model: z_sparse index out of bounds");
      if (s.value == 0.0)
        throw SchemaError("load_model: z_sparse zero value");
      file.model.z.push_back(s);
    }

    const json& pv = j.at("provenance");
    file.provenance.solver = pv.at("solver").get<std::string>();
    if (file.provenance.solver != "lava-r" &&
        file.provenance.solver != "mm-batch")
      throw SchemaError("load_model: unknown solver tag");
    file.provenance.iterations = pv.at("iterations").get<int>();
    file.provenance.gain_init = pv.at("c").get<double>();
    file.provenance.seed = pv.at("seed").get<std::uint64_t>();
    file.provenance.data_fingerprint =
        pv.at("data_fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError("load_model: " + std::string(e.what()));
  }
  return file;
}

}  // namespace lava
