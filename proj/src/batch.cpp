#include "lava/batch.hpp"

#include <cmath>
#include <limits>

#include "lava/kernels.hpp"
#include "lava/rls.hpp"
#include "lava/solver.hpp"

namespace lava {

namespace {

constexpr double kSigmaFloor = 1e-12;
constexpr long kDenseCap = 2048;  // max N * n_y for the dense lane

void check_data(const MlParams& params, const Eigen::MatrixXd& Phi,
                const Eigen::MatrixXd& Gamma, const Eigen::MatrixXd& Y) {
  const long n_y = Y.rows();
  const long N = Y.cols();
  if (Phi.cols() != N || Gamma.cols() != N)
    throw ArgumentError("batch: sample count mismatch");
  if (params.Theta.rows() != n_y || params.Theta.cols() != Phi.rows())
    throw ArgumentError("batch: Theta dimension mismatch");
  if (params.D.rows() != n_y || params.D.cols() != Gamma.rows())
    throw ArgumentError("batch: D dimension mismatch");
  if (params.Sigma.size() != n_y)
    throw ArgumentError("batch: Sigma dimension mismatch");
  if ((params.Sigma.array() <= 0).any())
    throw ArgumentError("batch: noise variances must be > 0");
  if ((params.D.array() < 0).any())
    throw ArgumentError("batch: prior variances must be >= 0");
  if (N * n_y > kDenseCap)
    throw ArgumentError("batch: record too large for the dense lane (N*n_y > " +
                        std::to_string(kDenseCap) + ")");
}

// Omega_i = Gamma^T diag(d_i) Gamma + sigma_i I, Cholesky-factorized.
struct RowCov {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double logdet = 0.0;
};

RowCov row_cov(const Eigen::VectorXd& d, double sigma,
               const Eigen::MatrixXd& Gamma) {
  const long N = Gamma.cols();
  Eigen::MatrixXd Om =
      sigma * Eigen::MatrixXd::Identity(N, N);
  Om.noalias() += Gamma.transpose() * (d.asDiagonal() * Gamma);
  RowCov rc;
  rc.llt.compute(Om);
  if (rc.llt.info() != Eigen::Success)
    throw NumericError("batch: output covariance not positive definite");
  rc.logdet =
      2.0 * rc.llt.matrixLLT().diagonal().array().log().sum();
  return rc;
}

// Everything the majorizer needs from the majorization point:
// quad(i,j) = gbar_j^T Omega_i^-1 gbar_j, tr(i) = tr{Omega_i^-1}, and the
// total log det.
struct MajPieces {
  Eigen::MatrixXd quad;  // n_y x q
  Eigen::VectorXd tr;    // n_y
  double logdet = 0.0;
};

MajPieces maj_pieces(const MlParams& point, const Eigen::MatrixXd& Gamma) {
  const long n_y = point.D.rows();
  const long q = Gamma.rows();
  const long N = Gamma.cols();
  MajPieces out;
  out.quad.resize(n_y, q);
  out.tr.resize(n_y);
  for (long i = 0; i < n_y; ++i) {
    RowCov rc = row_cov(point.D.row(i).transpose(), point.Sigma[i], Gamma);
    auto L = rc.llt.matrixL();
    Eigen::MatrixXd X = L.solve(Gamma.transpose());  // L^-1 Gamma^T
    out.quad.row(i) = X.colwise().squaredNorm();
    Eigen::MatrixXd Linv = L.solve(Eigen::MatrixXd::Identity(N, N));
    out.tr[i] = Linv.squaredNorm();  // tr{Om^-1} = ||L^-1||_F^2
    out.logdet += rc.logdet;
  }
  return out;
}

double constant_term(const MlParams& point, const MajPieces& pieces) {
  double k = pieces.logdet;
  k -= (point.Sigma.array() * pieces.tr.array()).sum();
  k -= (point.D.array() * pieces.quad.array()).sum();
  return k;
}

}  // namespace

MlParams make_initial_params(int n_y, int p, long q) {
  MlParams s;
  s.Theta = Eigen::MatrixXd::Zero(n_y, p);
  s.D = Eigen::MatrixXd::Zero(n_y, q);
  s.Sigma = Eigen::VectorXd::Ones(n_y);
  return s;
}

double cost_V(const MlParams& params, const Eigen::MatrixXd& Phi,
              const Eigen::MatrixXd& Gamma, const Eigen::MatrixXd& Y) {
  check_data(params, Phi, Gamma, Y);
  Eigen::MatrixXd resid = Y - params.Theta * Phi;
  double v = 0.0;
  for (long i = 0; i < Y.rows(); ++i) {
    RowCov rc = row_cov(params.D.row(i).transpose(), params.Sigma[i], Gamma);
    Eigen::VectorXd x = rc.llt.matrixL().solve(resid.row(i).transpose());
    v += x.squaredNorm() + rc.logdet;
  }
  return v;
}

LatentStats latent_stats(const MlParams& params, const Eigen::MatrixXd& Phi,
                         const Eigen::MatrixXd& Gamma,
                         const Eigen::MatrixXd& Y) {
  check_data(params, Phi, Gamma, Y);
  const long n_y = Y.rows();
  const long q = Gamma.rows();
  Eigen::MatrixXd resid = Y - params.Theta * Phi;
  Eigen::MatrixXd GGt = Gamma * Gamma.transpose();

  LatentStats st;
  st.mean = Eigen::VectorXd::Zero(n_y * q);
  st.cov = Eigen::MatrixXd::Zero(n_y * q, n_y * q);

  for (long i = 0; i < n_y; ++i) {
    std::vector<Eigen::Index> active;
    for (long j = 0; j < q; ++j)
      if (params.D(i, j) > 0.0) active.push_back(j);
    if (active.empty()) continue;

    // information form: (diag(1/d) + GGt/sigma)^-1 on the active set
    Eigen::MatrixXd info = GGt(active, active) / params.Sigma[i];
    for (std::size_t a = 0; a < active.size(); ++a)
      info(a, a) += 1.0 / params.D(i, active[a]);
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success)
      throw NumericError("latent_stats: information matrix not PD");

    Eigen::VectorXd rhs =
        Gamma(active, Eigen::all) * resid.row(i).transpose() / params.Sigma[i];
    Eigen::VectorXd mean_a = llt.solve(rhs);
    Eigen::MatrixXd cov_a =
        llt.solve(Eigen::MatrixXd::Identity(active.size(), active.size()));

    for (std::size_t a = 0; a < active.size(); ++a) {
      const long ka = active[a] * n_y + i;
      st.mean[ka] = mean_a[a];
      for (std::size_t b = 0; b < active.size(); ++b)
        st.cov(ka, active[b] * n_y + i) = cov_a(a, b);
    }
  }
  return st;
}

Eigen::MatrixXd weights_full(const MlParams& majorization_point,
                             const Eigen::MatrixXd& Gamma) {
  MajPieces pieces = maj_pieces(majorization_point, Gamma);
  Eigen::MatrixXd w(pieces.quad.rows(), pieces.quad.cols());
  for (long i = 0; i < w.rows(); ++i) {
    const double tr = pieces.tr[i];
    if (tr <= 0.0) throw NumericError("weights_full: zero trace");
    w.row(i) =
        (pieces.quad.row(i).array().cwiseMax(0.0) / tr).sqrt().matrix();
  }
  return w;
}

MlParams nuisance_update(const Eigen::MatrixXd& Theta_hat,
                         const Eigen::MatrixXd& Z_hat,
                         const MlParams& majorization_point,
                         const Eigen::MatrixXd& Phi,
                         const Eigen::MatrixXd& Gamma,
                         const Eigen::MatrixXd& Y) {
  MajPieces pieces = maj_pieces(majorization_point, Gamma);
  const long n_y = Y.rows();
  const long q = Gamma.rows();
  Eigen::MatrixXd resid = Y - Theta_hat * Phi - Z_hat * Gamma;

  MlParams next;
  next.Theta = Theta_hat;
  next.D = Eigen::MatrixXd::Zero(n_y, q);
  next.Sigma = Eigen::VectorXd::Zero(n_y);
  for (long i = 0; i < n_y; ++i) {
    const double tr = pieces.tr[i];
    if (tr <= 0.0) throw NumericError("nuisance_update: zero trace");
    next.Sigma[i] =
        std::max(resid.row(i).norm() / std::sqrt(tr), kSigmaFloor);
    for (long j = 0; j < q; ++j) {
      const double z = Z_hat(i, j);
      if (z == 0.0) continue;  // sparsity propagates into the prior
      const double quad = pieces.quad(i, j);
      if (quad <= 0.0)
        throw NumericError("nuisance_update: nonzero coefficient on a dead column");
      next.D(i, j) = std::abs(z) / std::sqrt(quad);
    }
  }
  return next;
}

ConcentratedSolution solve_concentrated(const Eigen::MatrixXd& weights,
                                        const Eigen::MatrixXd& Phi,
                                        const Eigen::MatrixXd& Gamma,
                                        const Eigen::MatrixXd& Y, double tol,
                                        int max_cycles) {
  const long n_y = Y.rows();
  const long q = Gamma.rows();
  if (weights.rows() != n_y || weights.cols() != q)
    throw ArgumentError("solve_concentrated: weight dimension mismatch");
  if ((weights.array() < 0).any())
    throw ArgumentError("solve_concentrated: weights must be >= 0");

  auto [theta_bar, H] = batch_ls(Phi, Y, Gamma);
  Eigen::MatrixXd A = Gamma.transpose() - Phi.transpose() * H;  // N x q
  Eigen::MatrixXd T = A.transpose() * A;
  T = 0.5 * (T + T.transpose()).eval();

  Eigen::MatrixXd resid0 = Y - theta_bar * Phi;  // n_y x N
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n_y, q);
  Eigen::VectorXd eta(n_y);
  Eigen::MatrixXd zeta(q, n_y);
  for (long i = 0; i < n_y; ++i) {
    eta[i] = resid0.row(i).squaredNorm();
    zeta.col(i).noalias() = A.transpose() * resid0.row(i).transpose();
  }

  auto total_objective = [&] {
    double v = 0.0;
    for (long i = 0; i < n_y; ++i)
      v += std::sqrt(std::max(eta[i], 0.0)) +
           (weights.row(i).array() * Z.row(i).array().abs()).sum();
    return v;
  };

  ConcentratedSolution sol;
  double prev = total_objective();
  const auto nq = static_cast<std::size_t>(q);
  for (int c = 1; c <= max_cycles; ++c) {
    for (long i = 0; i < n_y; ++i) {
      double* zeta_i = zeta.col(i).data();
      double eta_i = eta[i];
      for (long j = 0; j < q; ++j) {
        const double zj = Z(i, j);
        const double beta = T(j, j);
        const double zeta_j = zeta_i[j];
        const double g = zeta_j + beta * zj;
        const double alpha = eta_i + beta * zj * zj + 2.0 * zeta_j * zj;
        const double zhat = coordinate_min(alpha, beta, g, weights(i, j));
        const double delta = zj - zhat;
        if (delta != 0.0) {
          eta_i += beta * delta * delta + 2.0 * delta * zeta_j;
          kernels::axpy(delta, T.col(j).data(), zeta_i, nq);
          Z(i, j) = zhat;
        }
      }
      eta[i] = eta_i;
      if (!std::isfinite(eta_i))
        throw NumericError("solve_concentrated: non-finite residual norm");
    }
    sol.cycles = c;
    const double cur = total_objective();
    if (std::abs(prev - cur) <= tol * std::max(1.0, std::abs(prev))) {
      sol.converged = true;
      break;
    }
    prev = cur;
  }

  sol.Z_hat = Z;
  sol.Theta_hat = theta_bar - Z * H.transpose();
  return sol;
}

std::vector<MmStep> mm_iterate(const Eigen::MatrixXd& Phi,
                               const Eigen::MatrixXd& Gamma,
                               const Eigen::MatrixXd& Y, const MlParams& init,
                               int k_max, double tol) {
  if (k_max < 1) throw ArgumentError("mm_iterate: k_max must be >= 1");
  std::vector<MmStep> steps;
  MlParams point = init;
  double prev_cost = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < k_max; ++k) {
    Eigen::MatrixXd w = weights_full(point, Gamma);
    ConcentratedSolution sol = solve_concentrated(w, Phi, Gamma, Y);
    MmStep step;
    step.params = nuisance_update(sol.Theta_hat, sol.Z_hat, point, Phi, Gamma, Y);
    step.Z_hat = sol.Z_hat;
    step.cost = cost_V(step.params, Phi, Gamma, Y);
    steps.push_back(step);
    if (k > 0 && std::abs(prev_cost - step.cost) <=
                     tol * std::max(1.0, std::abs(prev_cost)))
      break;
    prev_cost = step.cost;
    point = step.params;
  }
  return steps;
}

std::vector<MmStep> mm_iterate(const Eigen::MatrixXd& Phi,
                               const Eigen::MatrixXd& Gamma,
                               const Eigen::MatrixXd& Y, int k_max,
                               double tol) {
  return mm_iterate(Phi, Gamma, Y,
                    make_initial_params(static_cast<int>(Y.rows()),
                                        static_cast<int>(Phi.rows()),
                                        Gamma.rows()),
                    k_max, tol);
}

double majorizer_value(const MlParams& params, const Eigen::MatrixXd& Z,
                       const MlParams& majorization_point,
                       const Eigen::MatrixXd& Phi,
                       const Eigen::MatrixXd& Gamma,
                       const Eigen::MatrixXd& Y) {
  check_data(params, Phi, Gamma, Y);
  if (Z.rows() != Y.rows() || Z.cols() != Gamma.rows())
    throw ArgumentError("majorizer_value: Z dimension mismatch");
  MajPieces pieces = maj_pieces(majorization_point, Gamma);

  Eigen::MatrixXd resid = Y - params.Theta * Phi - Z * Gamma;
  double v = 0.0;
  for (long i = 0; i < Y.rows(); ++i) {
    v += resid.row(i).squaredNorm() / params.Sigma[i];
    for (long j = 0; j < Gamma.rows(); ++j) {
      const double z = Z(i, j);
      const double d = params.D(i, j);
      if (d > 0.0)
        v += z * z / d;
      else if (z != 0.0)
        return std::numeric_limits<double>::infinity();
    }
  }
  v += (params.Sigma.array() * pieces.tr.array()).sum();
  v += (params.D.array() * pieces.quad.array()).sum();
  v += constant_term(majorization_point, pieces);
  return v;
}

double majorizer_concentrated(const MlParams& params,
                              const MlParams& majorization_point,
                              const Eigen::MatrixXd& Phi,
                              const Eigen::MatrixXd& Gamma,
                              const Eigen::MatrixXd& Y) {
  check_data(params, Phi, Gamma, Y);
  MajPieces pieces = maj_pieces(majorization_point, Gamma);
  Eigen::MatrixXd resid = Y - params.Theta * Phi;
  double v = 0.0;
  for (long i = 0; i < Y.rows(); ++i) {
    RowCov rc = row_cov(params.D.row(i).transpose(), params.Sigma[i], Gamma);
    Eigen::VectorXd x = rc.llt.matrixL().solve(resid.row(i).transpose());
    v += x.squaredNorm();
  }
  v += (params.Sigma.array() * pieces.tr.array()).sum();
  v += (params.D.array() * pieces.quad.array()).sum();
  v += constant_term(majorization_point, pieces);
  return v;
}

double log_det_cov(const MlParams& params, const Eigen::MatrixXd& Gamma) {
  double v = 0.0;
  for (long i = 0; i < params.D.rows(); ++i)
    v += row_cov(params.D.row(i).transpose(), params.Sigma[i], Gamma).logdet;
  return v;
}

double log_det_tangent_bound(const MlParams& params,
                             const MlParams& majorization_point,
                             const Eigen::MatrixXd& Gamma) {
  MajPieces pieces = maj_pieces(majorization_point, Gamma);
  return constant_term(majorization_point, pieces) +
         (params.Sigma.array() * pieces.tr.array()).sum() +
         (params.D.array() * pieces.quad.array()).sum();
}

}  // namespace lava
