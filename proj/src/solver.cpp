#include "lava/solver.hpp"

#include <cassert>
#include <cmath>

#include "lava/kernels.hpp"

namespace lava {

namespace {
constexpr double kBetaFloor = 1e-12;
}

CrossProducts make_cross(int n_y, int p, long q) {
  CrossProducts c;
  c.phiphi = Eigen::MatrixXd::Zero(p, p);
  c.gamgam = Eigen::MatrixXd::Zero(q, q);
  c.yy = Eigen::MatrixXd::Zero(n_y, n_y);
  c.phigam = Eigen::MatrixXd::Zero(p, q);
  c.phiy = Eigen::MatrixXd::Zero(p, n_y);
  c.gamy = Eigen::MatrixXd::Zero(q, n_y);
  return c;
}

void update_cross(CrossProducts& cross, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& phi, const Eigen::VectorXd& gamma) {
  const auto p = static_cast<std::size_t>(phi.size());
  const auto q = static_cast<std::size_t>(gamma.size());
  const auto m = static_cast<std::size_t>(y.size());
  using kernels::ger;
  ger(1.0, phi.data(), p, phi.data(), p, cross.phiphi.data(), p);
  ger(1.0, gamma.data(), q, gamma.data(), q, cross.gamgam.data(), q);
  ger(1.0, y.data(), m, y.data(), m, cross.yy.data(), m);
  ger(1.0, phi.data(), p, gamma.data(), q, cross.phigam.data(), p);
  ger(1.0, phi.data(), p, y.data(), m, cross.phiy.data(), p);
  ger(1.0, gamma.data(), q, y.data(), m, cross.gamy.data(), q);
}

SolverState make_solver_state(const RegressorConfig& config, int cycles,
                              double gain_init) {
  validate(config);
  if (cycles < 1) throw ArgumentError("make_solver_state: cycles must be >= 1");
  const int p = config.p();
  const long q = config.q();
  const int n_y = config.n_y;
  SolverState s;
  s.rls = make_rls_state(n_y, p, q, gain_init);
  s.cross = make_cross(n_y, p, q);
  s.z_check = Eigen::MatrixXd::Zero(n_y, q);
  s.cycles = cycles;
  s.work.gram = Eigen::MatrixXd::Zero(q, q);
  s.work.weights = Eigen::MatrixXd::Zero(n_y, q);
  s.work.kappa = Eigen::VectorXd::Zero(n_y);
  s.work.eta = Eigen::VectorXd::Zero(n_y);
  s.work.rho = Eigen::MatrixXd::Zero(q, n_y);
  s.work.zeta = Eigen::MatrixXd::Zero(q, n_y);
  return s;
}

double coordinate_min(double alpha, double beta, double g, double w) {
  if (beta <= kBetaFloor) return 0.0;  // column never excited
  if (alpha < 0.0) alpha = 0.0;        // rounding from incremental updates
  const double g2 = g * g;
  if (alpha * w * w >= g2) return 0.0;
  // a nonzero update fires: alpha w^2 < g^2 <= alpha beta gives beta > w^2
  // whenever alpha > 0
  assert(!(alpha > 0.0) || beta > w * w);
  const double bw = beta - w * w;
  if (bw <= 0.0) return 0.0;
  double rad = alpha * beta - g2;
  if (rad < 0.0) rad = 0.0;  // Cauchy-Schwarz holds up to rounding
  double r = std::abs(g) / beta - (w / (beta * std::sqrt(bw))) * std::sqrt(rad);
  if (r < 0.0) r = 0.0;
  return g >= 0.0 ? r : -r;
}

Eigen::MatrixXd weights_recursive(const CrossProducts& cross, long t) {
  if (t < 1) throw ArgumentError("weights_recursive: t must be >= 1");
  const long n_y = cross.yy.rows();
  Eigen::RowVectorXd w = (cross.gamgam.diagonal().array() /
                          static_cast<double>(t))
                             .cwiseMax(0.0)
                             .sqrt()
                             .matrix()
                             .transpose();
  return w.replicate(n_y, 1);
}

void prepare_rows(SolverState& state) {
  const auto& c = state.cross;
  const auto& H = state.rls.H;
  const long q = c.gamgam.rows();
  const int n_y = static_cast<int>(c.yy.rows());
  auto& w = state.work;

  // T = R_gg - R_gp H - H^T R_pg + H^T R_pp H, symmetric by construction
  Eigen::MatrixXd D = c.phigam.transpose() * H;  // R_gp H
  w.gram.noalias() = c.gamgam - D - D.transpose();
  Eigen::MatrixXd PH = c.phiphi * H;  // p x q
  w.gram.noalias() += H.transpose() * PH;
  w.gram = 0.5 * (w.gram + w.gram.transpose()).eval();

  w.weights = weights_recursive(c, state.t);

  for (int i = 0; i < n_y; ++i) {
    Eigen::VectorXd theta_i = state.rls.theta_bar.row(i).transpose();
    Eigen::VectorXd pp_theta = c.phiphi * theta_i;
    w.kappa[i] = c.yy(i, i) + theta_i.dot(pp_theta) -
                 2.0 * theta_i.dot(c.phiy.col(i));
    w.rho.col(i).noalias() = c.gamy.col(i) - c.phigam.transpose() * theta_i -
                             H.transpose() * (c.phiy.col(i) - pp_theta);
    Eigen::VectorXd z_i = state.z_check.row(i).transpose();
    Eigen::VectorXd tz = w.gram.selfadjointView<Eigen::Lower>() * z_i;
    w.eta[i] =
        w.kappa[i] -
        2.0 * kernels::dot(w.rho.col(i).data(), z_i.data(),
                           static_cast<std::size_t>(q)) +
        kernels::dot(z_i.data(), tz.data(), static_cast<std::size_t>(q));
    w.zeta.col(i) = w.rho.col(i) - tz;
  }
  w.prepared = true;
}

double run_cycle(SolverState& state) {
  auto& w = state.work;
  if (!w.prepared) throw NumericError("run_cycle: working vars not prepared");
  const long q = w.gram.rows();
  const int n_y = static_cast<int>(state.z_check.rows());
  const auto nq = static_cast<std::size_t>(q);

  for (int i = 0; i < n_y; ++i) {
    double* zeta_i = w.zeta.col(i).data();
    double eta_i = w.eta[i];
    for (long j = 0; j < q; ++j) {
      const double zj = state.z_check(i, j);
      const double beta = w.gram(j, j);
      const double zeta_j = zeta_i[j];
      const double g = zeta_j + beta * zj;
      const double alpha = eta_i + beta * zj * zj + 2.0 * zeta_j * zj;
      const double zhat = coordinate_min(alpha, beta, g, w.weights(i, j));
      const double delta = zj - zhat;
      if (delta != 0.0) {
        eta_i += beta * delta * delta + 2.0 * delta * zeta_j;
        kernels::axpy(delta, w.gram.col(j).data(), zeta_i, nq);
        state.z_check(i, j) = zhat;
      }
    }
    w.eta[i] = eta_i;
    if (!std::isfinite(eta_i))
      throw NumericError("run_cycle: non-finite residual norm");
  }
  return objective(state);
}

double objective(const SolverState& state) {
  const auto& w = state.work;
  double total = 0.0;
  for (int i = 0; i < state.z_check.rows(); ++i) {
    total += std::sqrt(std::max(w.eta[i], 0.0));
    total += (w.weights.row(i).array() * state.z_check.row(i).array().abs())
                 .sum();
  }
  return total;
}

void step(SolverState& state, const Eigen::VectorXd& y,
          const Eigen::VectorXd& phi, const Eigen::VectorXd& gamma) {
  rls_update(state.rls, y, phi, gamma);  // validates dims and finiteness
  update_cross(state.cross, y, phi, gamma);
  ++state.t;
  prepare_rows(state);
  for (int l = 0; l < state.cycles; ++l) run_cycle(state);
}

int refine(SolverState& state, double tol, int max_cycles) {
  if (state.t < 1) throw ArgumentError("refine: no samples seen yet");
  if (!state.work.prepared) prepare_rows(state);
  double prev = objective(state);
  for (int c = 1; c <= max_cycles; ++c) {
    double cur = run_cycle(state);
    if (std::abs(prev - cur) <= tol * std::max(1.0, std::abs(prev))) return c;
    prev = cur;
  }
  return max_cycles;
}

Eigen::MatrixXd theta_hat(const SolverState& state) {
  return state.rls.theta_bar - state.z_check * state.rls.H.transpose();
}

}  // namespace lava
