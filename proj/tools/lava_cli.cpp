#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lava/batch.hpp"
#include "lava/dataset.hpp"
#include "lava/experiments.hpp"
#include "lava/model_io.hpp"
#include "lava/predictor.hpp"
#include "lava/regressors.hpp"
#include "lava/solver.hpp"

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct GenArgs {
  std::string system = "saturation";
  double amplitude = 1.0;
  long samples = 1000;
  std::uint64_t seed = 0;
  std::string out;
  double noise_var = 2.5e-3;
  double sat_level = 2.0;
  int base_period = 20;
};

int do_gen(const GenArgs& a) {
  if (a.system != "saturation")
    throw lava::ArgumentError("unknown system: " + a.system);
  Eigen::MatrixXd u(2, a.samples);
  for (int k = 0; k < 2; ++k) {
    lava::RsSignalSpec rs;
    rs.amplitude = a.amplitude;
    rs.base_period = a.base_period;
    rs.length = a.samples;
    rs.seed = lava::Rng::mix(a.seed, 101 + k);
    u.row(k) = lava::generate_rs(rs).transpose();
  }
  lava::SaturationSystemSpec sys;
  sys.noise_variance = a.noise_var;
  sys.saturation_level = a.sat_level;
  sys.seed = lava::Rng::mix(a.seed, 202);
  lava::Dataset data = lava::simulate_saturation(sys, u);
  lava::write_csv(a.out, data);
  std::cout << "wrote " << a.out << " (" << data.samples() << " samples, "
            << data.n_u() << " inputs, " << data.n_y() << " outputs)\n";
  return 0;
}

struct FitArgs {
  std::string data;
  int n_a = 1;
  int n_b = 1;
  int M = 4;
  int cycles = 5;
  double c = 1e4;
  int mm_iters = 0;
  double margin = 1.2;
  std::uint64_t seed = 0;
  std::string out;
};

int do_fit(const FitArgs& a) {
  lava::Dataset data = lava::load_csv(a.data);
  lava::RegressorConfig cfg;
  cfg.n_a = a.n_a;
  cfg.n_b = a.n_b;
  cfg.n_u = static_cast<int>(data.n_u());
  cfg.n_y = static_cast<int>(data.n_y());
  cfg.M = a.M;
  cfg.ell = lava::estimate_bounds(cfg, data, a.margin);

  lava::Model model;
  lava::ModelProvenance prov;
  prov.gain_init = a.c;
  prov.seed = a.seed;
  prov.data_fingerprint = lava::dataset_fingerprint(data);

  if (a.mm_iters == 0) {
    lava::SolverState state = lava::make_solver_state(cfg, a.cycles, a.c);
    for (long t = 1; t <= data.samples(); ++t) {
      Eigen::VectorXd phi = lava::build_phi(cfg, data, t);
      Eigen::VectorXd gamma = lava::build_gamma(cfg, phi);
      lava::step(state, data.outputs.col(t - 1), phi, gamma);
    }
    model = lava::make_model(lava::theta_hat(state), state.z_check, cfg);
    prov.solver = "lava-r";
    prov.iterations = a.cycles;
  } else {
    Eigen::MatrixXd Phi = lava::build_phi_matrix(cfg, data);
    Eigen::MatrixXd Gamma = lava::build_gamma_matrix(cfg, Phi);
    auto steps =
        lava::mm_iterate(Phi, Gamma, data.outputs, a.mm_iters);
    const lava::MmStep& last = steps.back();
    model = lava::make_model(last.params.Theta, last.Z_hat, cfg);
    prov.solver = "mm-batch";
    prov.iterations = a.mm_iters;
  }

  lava::save_model(a.out, model, prov);
  std::cout << "p=" << cfg.p() << " q=" << cfg.q()
            << " theta_size=" << cfg.n_y * cfg.p()
            << " z_capacity=" << cfg.n_y * cfg.q()
            << " z_nonzero=" << model.z.size() << "\n";
  return 0;
}

struct SimArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string metric = "fit";
};

int do_simulate(const SimArgs& a) {
  if (a.metric != "fit" && a.metric != "rmse")
    throw lava::ArgumentError("metric must be fit or rmse");
  lava::ModelFile mf = lava::load_model(a.model);
  lava::Dataset data = lava::load_csv(a.data);
  const lava::RegressorConfig& cfg = mf.model.config;
  if (data.n_u() != cfg.n_u || data.n_y() != cfg.n_y)
    throw lava::SchemaError("dataset channel counts do not match the model");

  lava::Simulation sim = lava::simulate_free_run(mf.model, data);

  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw lava::ArgumentError("cannot open " + a.out);
  for (int k = 1; k <= cfg.n_u; ++k) out << "u" << k << ",";
  for (int k = 1; k <= cfg.n_y; ++k) out << "y" << k << ",";
  for (int k = 1; k <= cfg.n_y; ++k)
    out << "yhat" << k << (k == cfg.n_y ? "" : ",");
  out << "\n";
  for (long t = 0; t < data.samples(); ++t) {
    for (int k = 0; k < cfg.n_u; ++k) out << fmt(data.inputs(k, t)) << ",";
    for (int k = 0; k < cfg.n_y; ++k) out << fmt(data.outputs(k, t)) << ",";
    for (int k = 0; k < cfg.n_y; ++k)
      out << fmt(sim.outputs(k, t)) << (k + 1 == cfg.n_y ? "" : ",");
    out << "\n";
  }
  if (!out) throw lava::ArgumentError("write failed on " + a.out);

  if (sim.diverged) {
    std::cout << "diverged," << sim.divergence_sample << "\n";
    return 3;
  }
  const int warmup = lava::warmup_samples(cfg);
  Eigen::VectorXd vals;
  if (a.metric == "fit")
    vals = lava::fit_metric(sim.outputs, data.outputs, warmup);
  else
    vals = lava::rmse(sim.outputs, data.outputs, 1, warmup);
  for (int k = 0; k < cfg.n_y; ++k)
    std::cout << (k + 1) << "," << fmt(vals[k]) << "\n";
  return 0;
}

struct SweepArgs {
  std::vector<double> amplitudes;
  int mc_runs = 20;
  std::uint64_t seed = 0;
  std::string out;
  long samples = 1000;
  int cycles = 5;
  double c = 1e4;
  int base_period = 20;
  double noise_var = 2.5e-3;
  double sat_level = 2.0;
  double margin = 1.2;
  int n_a = 1;
  int n_b = 1;
  int M = 4;
};

int do_sweep(const SweepArgs& a) {
  lava::SweepConfig cfg;
  if (!a.amplitudes.empty()) cfg.amplitudes = a.amplitudes;
  cfg.mc_runs = a.mc_runs;
  cfg.seed = a.seed;
  cfg.samples = a.samples;
  cfg.cycles = a.cycles;
  cfg.gain_init = a.c;
  cfg.base_period = a.base_period;
  cfg.noise_variance = a.noise_var;
  cfg.saturation_level = a.sat_level;
  cfg.margin = a.margin;
  cfg.n_a = a.n_a;
  cfg.n_b = a.n_b;
  cfg.M = a.M;
  std::vector<lava::SweepRow> rows = lava::run_amplitude_sweep(cfg);
  lava::write_sweep_csv(a.out, rows);
  std::cout << "wrote " << a.out << " (" << rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive nonlinear system identification toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* cgen = app.add_subcommand("gen", "generate benchmark data CSV");
  cgen->add_option("--system", gen.system, "system name (saturation)");
  cgen->add_option("--amplitude", gen.amplitude, "input amplitude A");
  cgen->add_option("--samples", gen.samples, "record length N");
  cgen->add_option("--seed", gen.seed, "RNG seed");
  cgen->add_option("--out", gen.out, "output CSV path")->required();
  cgen->add_option("--noise-var", gen.noise_var, "output noise variance");
  cgen->add_option("--sat-level", gen.sat_level, "saturation level (inf to disable)");
  cgen->add_option("--base-period", gen.base_period, "input switching period");

  FitArgs fit;
  CLI::App* cfit = app.add_subcommand("fit", "fit a model to a data CSV");
  cfit->add_option("--data", fit.data, "training CSV")->required();
  cfit->add_option("--na", fit.n_a, "output lag order");
  cfit->add_option("--nb", fit.n_b, "input lag order");
  cfit->add_option("--M", fit.M, "basis functions per dimension");
  cfit->add_option("--cycles", fit.cycles, "coordinate sweeps per sample (L)");
  cfit->add_option("--c", fit.c, "RLS gain init");
  cfit->add_option("--mm-iters", fit.mm_iters,
                   "0: streaming solver; k>0: batch MM with k steps");
  cfit->add_option("--margin", fit.margin, "basis box margin factor");
  cfit->add_option("--seed", fit.seed, "seed recorded in provenance");
  cfit->add_option("--out", fit.out, "model JSON path")->required();

  SimArgs sim;
  CLI::App* csim = app.add_subcommand("simulate", "free-run a model over a CSV");
  csim->add_option("--model", sim.model, "model JSON")->required();
  csim->add_option("--data", sim.data, "validation CSV")->required();
  csim->add_option("--out", sim.out, "predictions CSV path")->required();
  csim->add_option("--metric", sim.metric, "fit or rmse");

  SweepArgs sweep;
  CLI::App* cswp = app.add_subcommand("sweep", "amplitude sweep benchmark");
  cswp->add_option("--amplitudes", sweep.amplitudes, "comma-separated list")
      ->delimiter(',');
  cswp->add_option("--mc-runs", sweep.mc_runs, "Monte Carlo runs per amplitude");
  cswp->add_option("--seed", sweep.seed, "root seed");
  cswp->add_option("--out", sweep.out, "sweep CSV path")->required();
  cswp->add_option("--samples", sweep.samples, "record length N");
  cswp->add_option("--cycles", sweep.cycles, "coordinate sweeps per sample (L)");
  cswp->add_option("--c", sweep.c, "RLS gain init");
  cswp->add_option("--base-period", sweep.base_period, "input switching period");
  cswp->add_option("--noise-var", sweep.noise_var, "output noise variance");
  cswp->add_option("--sat-level", sweep.sat_level, "saturation level");
  cswp->add_option("--margin", sweep.margin, "basis box margin factor");
  cswp->add_option("--na", sweep.n_a, "output lag order");
  cswp->add_option("--nb", sweep.n_b, "input lag order");
  cswp->add_option("--M", sweep.M, "basis functions per dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cgen->parsed()) return do_gen(gen);
    if (cfit->parsed()) return do_fit(fit);
    if (csim->parsed()) return do_simulate(sim);
    return do_sweep(sweep);
  } catch (const lava::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
