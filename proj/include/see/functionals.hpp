#pragma once

#include <functional>
#include <optional>

#include "see/core.hpp"

namespace see {

// target conditional functional: mean of f(Y), k-th moment, variance,
// or p-th quantile
class FunctionalSpec {
 public:
  enum class Kind { Mean, Moment, Variance, Quantile };

  static FunctionalSpec mean();  // f = identity
  static FunctionalSpec mean(std::function<double(double)> f);
  static FunctionalSpec moment(int k);
  static FunctionalSpec variance();
  static FunctionalSpec quantile(double p);

  Kind kind() const { return kind_; }
  int moment_order() const { return moment_k_; }
  double quantile_level() const { return quantile_p_; }
  // f(y) for Mean, y^k for Moment; identity otherwise
  double transform(double y) const;

 private:
  FunctionalSpec(Kind k) : kind_(k) {}
  Kind kind_;
  std::function<double(double)> f_;
  int moment_k_ = 1;
  double quantile_p_ = 0.5;
};

// per-observation proxy responses plus the auxiliary quantities some
// functionals need downstream
struct ProxyContext {
  VectorXd proxy;
  std::optional<VectorXd> auxiliary;  // E(Y|X) for Variance, xi(X_i) for Quantile
  std::optional<VectorXd> density_at_quantile;  // eta0(X_i, xi(X_i))
};

// Step-2 proxy. Mean/Moment use f(Y) directly. Variance uses the
// squared residual from a kernel fit of Y on X. Quantile uses the
// weighted sample p-quantile of Y with weights K_h(X_j - X_i), plus a
// kernel conditional density estimate at that quantile (bandwidth h1
// for the response axis; h1 <= 0 selects sd(Y) * n^(-1/5)).
ProxyContext proxy_response(const FunctionalSpec& spec, const MatrixXd& x,
                            const VectorXd& y, double h, double h1 = 0.0);

// weighted p-quantile of y under nonnegative weights w (smallest value
// whose cumulative normalized weight reaches p)
double weighted_quantile(const VectorXd& y, const VectorXd& w, double p);

// centered Riesz-representation values tau_c, one per observation;
// conditional expectations smoothed on beta'X with bandwidth h_s
VectorXd tau_c(const FunctionalSpec& spec, const MatrixXd& x, const VectorXd& y,
               const Basis& beta, const ProxyContext& ctx, double h_s);

// conditional-variance term q2, floored at
// max(1e-6 * var(proxy), 1e-12); h smooths on full X, h_s on beta'X
VectorXd q2_values(const FunctionalSpec& spec, const MatrixXd& x,
                   const VectorXd& y, const Basis& beta,
                   const ProxyContext& ctx, double h, double h_s);

// variants taking the projected predictor z = beta'X directly, for
// pipelines where beta lives in a larger space than x
VectorXd tau_c_on(const FunctionalSpec& spec, const VectorXd& y,
                  const MatrixXd& z, const ProxyContext& ctx, double h_s);
VectorXd q2_values_on(const FunctionalSpec& spec, const MatrixXd& x,
                      const VectorXd& y, const MatrixXd& z,
                      const ProxyContext& ctx, double h, double h_s);

}  // namespace see
