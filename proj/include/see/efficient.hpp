#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "see/functionals.hpp"
#include "see/mave.hpp"

namespace see {

// per-observation pieces of the efficient score
struct ScoreParts {
  VectorXd tau_c;   // n
  MatrixXd q1;      // n x (p*s)
  VectorXd q2;      // n
  MatrixXd q3;      // n x (p*s)
  MatrixXd q4;      // n x (p*s)
  MatrixXd score;   // n x (p*s), row i = tau_c_i * q4 row i
  VectorXd mean_score;  // E_n[S]
};

struct SeeConfig {
  double c_step1 = 2.0;
  double c_step2 = 0.0;  // 0 = per-functional default (2.0 variance, else 1.0)
  double c_step3 = 1.5;
  double c_step4 = 1.5;
  double c_q2 = 2.0;       // full-predictor bandwidth for the q2 smoother
  double c_density = 1.0;  // response-axis bandwidth for quantile density
  std::uint64_t seed = 0;
  int newton_steps = 1;
  int ensemble_frequencies = 10;
  MaveOptions step1_mave{MaveVariant::RMAVE, 25, 1e-4, 0.8, 0.5, 2.34};
  MaveOptions step3_mave{MaveVariant::RMAVE, 25, 1e-4, 0.8, 0.5, 2.34};
};

// resolves the step-2 bandwidth constant: an explicit positive value
// wins, otherwise 2.0 for the variance functional and 1.0 for the rest
inline double effective_c_step2(const SeeConfig& config,
                                const FunctionalSpec& spec) {
  if (config.c_step2 > 0.0) return config.c_step2;
  return spec.kind() == FunctionalSpec::Kind::Variance ? 2.0 : 1.0;
}

struct EstimateResult {
  Basis beta_hat;          // embedded in the original predictor space, p~ x s
  Basis beta_init;         // embedded step-3 initializer
  Basis central_subspace;  // zeta-hat, p~ x d-hat
  MatrixXd info;           // efficient information, (p~ s) x (p~ s)
  struct Diagnostics {
    std::vector<double> step1_objective;
    std::vector<double> step3_objective;
    int step1_iterations = 0;
    int step3_iterations = 0;
    double h_step1 = 0, h_step2 = 0, h_step3 = 0, h_step4_x = 0, h_step4_s = 0;
    std::vector<std::string> warnings;
  } diagnostics;
};

// chain-rule derivative rows: fits `target` on beta'X and returns
// vec(X_i b_i') per observation (column-stacked vec convention)
MatrixXd q1_values(const MatrixXd& x, const VectorXd& target, const Basis& beta,
                   double h_s);

// q3 = q1 - E[q1/q2 | beta'X] / E[1/q2 | beta'X], q4 = q3 / q2
std::pair<MatrixXd, MatrixXd> q3_q4_values(const MatrixXd& q1,
                                           const VectorXd& q2,
                                           const MatrixXd& x, const Basis& beta,
                                           double h_s);

// variants taking the projected predictor z = beta'X directly; the
// outer factor of q1 stays x, so beta may live in a larger space
MatrixXd q1_values_on(const MatrixXd& x, const VectorXd& target,
                      const MatrixXd& z, double h_s);
std::pair<MatrixXd, MatrixXd> q3_q4_values_on(const MatrixXd& q1,
                                              const VectorXd& q2,
                                              const MatrixXd& z, double h_s);

// assembles S = q4 * tau_c rowwise and the sample mean score
ScoreParts efficient_score(VectorXd tau, MatrixXd q1, VectorXd q2, MatrixXd q3,
                           MatrixXd q4);

// J = E_n[S_i S_i']
MatrixXd efficient_information(const MatrixXd& score);

struct UpdateResult {
  Basis basis;
  bool degenerate_information = false;
};

// one Newton-Raphson step vec(beta) += J^+ E_n[S], then span-preserving
// re-orthonormalization
UpdateResult one_step_update(const Basis& beta_init, const VectorXd& mean_score,
                             const MatrixXd& info);

// the full four-stage estimator: central subspace, proxy response,
// MAVE initializer, efficient-score Newton step
EstimateResult see_estimate(const MatrixXd& x_raw, const VectorXd& y,
                            const FunctionalSpec& spec, Eigen::Index s,
                            Eigen::Index d_hat, const SeeConfig& config = {});

}  // namespace see
