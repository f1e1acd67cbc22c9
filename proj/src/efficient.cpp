#include "see/efficient.hpp"

#include <cmath>

#include "see/smoothing.hpp"

namespace see {

MatrixXd q1_values(const MatrixXd& x, const VectorXd& target, const Basis& beta,
                   double h_s) {
  return q1_values_on(x, target, x * beta.entries(), h_s);
}

MatrixXd q1_values_on(const MatrixXd& x, const VectorXd& target,
                      const MatrixXd& z, double h_s) {
  const Eigen::Index n = x.rows(), p = x.cols(), s = z.cols();
  LocalFit fit = local_linear_fit(z, target, h_s, z);
  MatrixXd q1(n, p * s);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < s; ++k)
      q1.row(i).segment(k * p, p) = fit.slopes(i, k) * x.row(i);
  return q1;
}

std::pair<MatrixXd, MatrixXd> q3_q4_values(const MatrixXd& q1,
                                           const VectorXd& q2,
                                           const MatrixXd& x, const Basis& beta,
                                           double h_s) {
  return q3_q4_values_on(q1, q2, x * beta.entries(), h_s);
}

std::pair<MatrixXd, MatrixXd> q3_q4_values_on(const MatrixXd& q1,
                                              const VectorXd& q2,
                                              const MatrixXd& z, double h_s) {
  const Eigen::Index n = q1.rows(), ps = q1.cols();
  if (q2.size() != n) throw DimensionError("q3_q4_values: q2 size mismatch");
  if ((q2.array() <= 0.0).any())
    throw InvalidInputError("q3_q4_values: q2 must be strictly positive");

  VectorXd inv_q2 = q2.cwiseInverse();
  // smooth q1/q2 (componentwise) and 1/q2 together on beta'X
  MatrixXd targets(n, ps + 1);
  targets.leftCols(ps) = inv_q2.asDiagonal() * q1;
  targets.col(ps) = inv_q2;
  MatrixXd fit = local_linear_fit(z, targets, h_s, z).intercepts;

  VectorXd denom = fit.col(ps);
  const double clamp = 1e-10 * denom.cwiseAbs().maxCoeff();
  denom = denom.cwiseMax(clamp > 0 ? clamp : 1e-300);

  MatrixXd q3 = q1 - denom.cwiseInverse().asDiagonal() * fit.leftCols(ps);
  MatrixXd q4 = inv_q2.asDiagonal() * q3;
  return {std::move(q3), std::move(q4)};
}

ScoreParts efficient_score(VectorXd tau, MatrixXd q1, VectorXd q2, MatrixXd q3,
                           MatrixXd q4) {
  const Eigen::Index n = tau.size();
  if (q4.rows() != n) throw DimensionError("efficient_score: row mismatch");
  ScoreParts parts{std::move(tau), std::move(q1), std::move(q2), std::move(q3),
                   std::move(q4), MatrixXd(), VectorXd()};
  parts.score = parts.tau_c.asDiagonal() * parts.q4;
  parts.mean_score = parts.score.colwise().mean().transpose();
  return parts;
}

MatrixXd efficient_information(const MatrixXd& score) {
  const Eigen::Index n = score.rows();
  if (n < 1) throw InvalidInputError("efficient_information: empty score");
  return score.transpose() * score / static_cast<double>(n);
}

UpdateResult one_step_update(const Basis& beta_init, const VectorXd& mean_score,
                             const MatrixXd& info) {
  const Eigen::Index p = beta_init.ambient_dim(), s = beta_init.subspace_dim();
  if (mean_score.size() != p * s || info.rows() != p * s || info.cols() != p * s)
    throw DimensionError("one_step_update: shape mismatch");
  if (info.cwiseAbs().maxCoeff() == 0.0) return {beta_init, true};

  VectorXd step = moore_penrose(info) * mean_score;
  MatrixXd updated = beta_init.entries();
  for (Eigen::Index k = 0; k < s; ++k)
    updated.col(k) += step.segment(k * p, p);
  return {Basis(updated).orthonormalized(), false};
}

EstimateResult see_estimate(const MatrixXd& x_raw, const VectorXd& y,
                            const FunctionalSpec& spec, Eigen::Index s,
                            Eigen::Index d_hat, const SeeConfig& config) {
  const Eigen::Index n = x_raw.rows(), p_full = x_raw.cols();
  if (!(s >= 1 && s <= d_hat && d_hat <= p_full))
    throw InvalidInputError("see_estimate: need 1 <= s <= d_hat <= p");

  EstimateResult::Diagnostics diag;

  // step 1: central subspace, reduced predictor
  EnsembleOptions ens;
  ens.frequency_count = config.ensemble_frequencies;
  ens.bandwidth_constant = config.c_step1;
  ens.mave = config.step1_mave;
  Basis zeta = [&] {
    try {
      return ensemble_central_subspace(x_raw, y, d_hat, config.seed, ens);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("see_estimate[step1]: ") + e.what());
    }
  }();
  diag.h_step1 =
      bandwidth(KernelSpec(config.c_step1, static_cast<int>(p_full), n));
  MatrixXd x = x_raw * zeta.entries();
  const int d = static_cast<int>(d_hat);

  // step 2: proxy response on the reduced predictor
  const double h2 = bandwidth(KernelSpec(effective_c_step2(config, spec), d, n));
  const double h_y = bandwidth(KernelSpec(config.c_density, 1, n));
  diag.h_step2 = h2;
  ProxyContext ctx = [&] {
    try {
      return proxy_response(spec, x, y, h2, h_y);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("see_estimate[step2]: ") + e.what());
    }
  }();

  // step 3: MAVE initializer for beta
  const double h3 = bandwidth(KernelSpec(config.c_step3, d, n));
  diag.h_step3 = h3;
  MaveFit init = [&] {
    try {
      return mave_fit(x, ctx.proxy, s, h3, config.step3_mave);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("see_estimate[step3]: ") + e.what());
    }
  }();
  if (!init.converged)
    diag.warnings.push_back("step3: MAVE reached max_iters without converging");
  diag.step3_objective = init.objective_trace;
  diag.step3_iterations = init.iterations;
  const Basis beta_tilde = init.basis.orthonormalized();

  // step 4: efficient score and one-step Newton-Raphson in the
  // reduced space; the reported span stays inside span(zeta)
  const double h4x = bandwidth(KernelSpec(config.c_q2, d, n));
  const double h4s = bandwidth(KernelSpec(config.c_step4, static_cast<int>(s), n));
  diag.h_step4_x = h4x;
  diag.h_step4_s = h4s;

  Basis beta = beta_tilde;
  MatrixXd info;
  try {
    // smoothing target for q1: the per-observation functional value;
    // none of these depend on the current beta
    VectorXd target;
    switch (spec.kind()) {
      case FunctionalSpec::Kind::Mean:
      case FunctionalSpec::Kind::Moment:
        target = ctx.proxy;
        break;
      case FunctionalSpec::Kind::Variance:
        target = local_linear_fit(x, ctx.proxy, h4x, x).intercepts.col(0);
        break;
      case FunctionalSpec::Kind::Quantile:
        target = *ctx.auxiliary;
        break;
    }
    auto score_at = [&](const Basis& b) {
      MatrixXd z = x * b.entries();
      VectorXd tau = tau_c_on(spec, y, z, ctx, h4s);
      MatrixXd q1 = q1_values_on(x, target, z, h4s);
      VectorXd q2 = q2_values_on(spec, x, y, z, ctx, h4x, h4s);
      auto [q3, q4] = q3_q4_values_on(q1, q2, z, h4s);
      return efficient_score(std::move(tau), std::move(q1), std::move(q2),
                             std::move(q3), std::move(q4));
    };

    for (int step = 0; step < std::max(1, config.newton_steps); ++step) {
      ScoreParts parts = score_at(beta);
      info = efficient_information(parts.score);
      const double base_norm = parts.mean_score.norm();

      // damped Newton: halve the step until the sample score norm does
      // not increase, so the update can never move away from the root
      bool moved = false;
      for (double lambda : {1.0, 0.5, 0.25, 0.125}) {
        UpdateResult upd =
            one_step_update(beta, lambda * parts.mean_score, info);
        if (upd.degenerate_information) {
          diag.warnings.push_back("step4: zero efficient information");
          break;
        }
        if (score_at(upd.basis).mean_score.norm() <= base_norm) {
          beta = upd.basis;
          moved = true;
          break;
        }
      }
      if (!moved) {
        diag.warnings.push_back(
            "step4: damped step rejected; keeping the current basis");
        break;
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("see_estimate[step4]: ") + e.what());
  }

  // embed back into the original predictor space
  Basis beta_hat = Basis(zeta.entries() * beta.entries()).orthonormalized();
  Basis beta_init_full =
      Basis(zeta.entries() * beta_tilde.entries()).orthonormalized();

  EstimateResult result{std::move(beta_hat), std::move(beta_init_full),
                        std::move(zeta), std::move(info), std::move(diag)};
  return result;
}

}  // namespace see
