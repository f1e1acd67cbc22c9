#include "see/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "see/smoothing.hpp"

namespace see {

FunctionalSpec FunctionalSpec::mean() { return FunctionalSpec(Kind::Mean); }

FunctionalSpec FunctionalSpec::mean(std::function<double(double)> f) {
  FunctionalSpec s(Kind::Mean);
  s.f_ = std::move(f);
  return s;
}

FunctionalSpec FunctionalSpec::moment(int k) {
  if (k < 1) throw InvalidInputError("FunctionalSpec: moment order must be >= 1");
  FunctionalSpec s(Kind::Moment);
  s.moment_k_ = k;
  return s;
}

FunctionalSpec FunctionalSpec::variance() {
  return FunctionalSpec(Kind::Variance);
}

FunctionalSpec FunctionalSpec::quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw InvalidInputError("FunctionalSpec: quantile level must be in (0,1)");
  FunctionalSpec s(Kind::Quantile);
  s.quantile_p_ = p;
  return s;
}

double FunctionalSpec::transform(double y) const {
  switch (kind_) {
    case Kind::Mean:
      return f_ ? f_(y) : y;
    case Kind::Moment:
      return std::pow(y, moment_k_);
    default:
      return y;
  }
}

double weighted_quantile(const VectorXd& y, const VectorXd& w, double p) {
  const Eigen::Index n = y.size();
  if (w.size() != n) throw DimensionError("weighted_quantile: size mismatch");
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return y(a) < y(b); });
  const double total = w.sum();
  if (!(total > 0.0)) throw DegenerateNeighborhoodError(0);
  double cum = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    cum += w(order[r]) / total;
    if (cum >= p) return y(order[r]);
  }
  return y(order[n - 1]);
}

namespace {

double sample_sd(const VectorXd& v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() /
                   std::max<double>(1.0, static_cast<double>(v.size() - 1)));
}

VectorXd kernel_weights_row(const MatrixXd& x, Eigen::Index i, double h) {
  const Eigen::Index n = x.rows();
  VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j)
    w(j) = std::exp(-0.5 * (x.row(j) - x.row(i)).squaredNorm() / (h * h));
  return w;
}

// local-linear conditional mean of each column of u given z, evaluated
// at the sample points
MatrixXd smoothed_on(const MatrixXd& z, const MatrixXd& u, double h) {
  return local_linear_fit(z, u, h, z).intercepts;
}

// kernel-weighted average (Nadaraya-Watson); preserves positivity of
// the target, unlike the local-linear intercept
VectorXd nw_smoothed_on(const MatrixXd& z, const VectorXd& u, double h) {
  const Eigen::Index n = z.rows();
  VectorXd out(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w =
          std::exp(-0.5 * (z.row(j) - z.row(i)).squaredNorm() / (h * h));
      num += w * u(j);
      den += w;
    }
    out(i) = num / den;
  }
  return out;
}

}  // namespace

ProxyContext proxy_response(const FunctionalSpec& spec, const MatrixXd& x,
                            const VectorXd& y, double h, double h1) {
  if (!(h > 0.0)) throw InvalidInputError("proxy_response: h must be positive");
  const Eigen::Index n = x.rows();
  if (y.size() != n) throw DimensionError("proxy_response: X and Y sizes differ");

  ProxyContext ctx;
  switch (spec.kind()) {
    case FunctionalSpec::Kind::Mean:
    case FunctionalSpec::Kind::Moment: {
      ctx.proxy = y.unaryExpr([&](double v) { return spec.transform(v); });
      break;
    }
    case FunctionalSpec::Kind::Variance: {
      VectorXd cond_mean = smoothed_on(x, y, h).col(0);
      ctx.proxy = (y - cond_mean).array().square();
      ctx.auxiliary = cond_mean;
      break;
    }
    case FunctionalSpec::Kind::Quantile: {
      const double p = spec.quantile_level();
      if (h1 <= 0.0)
        h1 = std::max(sample_sd(y), 1e-8) *
             std::pow(static_cast<double>(n), -0.2);
      VectorXd xi(n), dens(n);
#pragma omp parallel for schedule(static)
      for (Eigen::Index i = 0; i < n; ++i) {
        VectorXd w = kernel_weights_row(x, i, h);
        xi(i) = weighted_quantile(y, w, p);
      }
#pragma omp parallel for schedule(static)
      for (Eigen::Index i = 0; i < n; ++i)
        dens(i) = conditional_density(x, y, x.row(i).transpose(), xi(i), h, h1);
      // density must stay strictly positive downstream
      const double floor = 1e-6 / (sample_sd(y) + 1e-12);
      dens = dens.cwiseMax(floor);
      ctx.proxy = xi;
      ctx.auxiliary = xi;
      ctx.density_at_quantile = dens;
      break;
    }
  }
  return ctx;
}

VectorXd tau_c(const FunctionalSpec& spec, const MatrixXd& x, const VectorXd& y,
               const Basis& beta, const ProxyContext& ctx, double h_s) {
  return tau_c_on(spec, y, x * beta.entries(), ctx, h_s);
}

VectorXd tau_c_on(const FunctionalSpec& spec, const VectorXd& y,
                  const MatrixXd& z, const ProxyContext& ctx, double h_s) {
  const Eigen::Index n = z.rows();
  switch (spec.kind()) {
    case FunctionalSpec::Kind::Mean:
    case FunctionalSpec::Kind::Moment: {
      VectorXd fy = ctx.proxy;
      VectorXd fit = smoothed_on(z, fy, h_s).col(0);
      return fy - fit;
    }
    case FunctionalSpec::Kind::Variance: {
      if (!ctx.auxiliary)
        throw InvalidInputError("tau_c: Variance needs auxiliary E(Y|X)");
      VectorXd fit = smoothed_on(z, ctx.proxy, h_s).col(0);
      return ctx.proxy - fit;
    }
    case FunctionalSpec::Kind::Quantile: {
      if (!ctx.auxiliary || !ctx.density_at_quantile)
        throw InvalidInputError(
            "tau_c: Quantile needs auxiliary quantile and density");
      const double p = spec.quantile_level();
      const VectorXd& xi = *ctx.auxiliary;
      const VectorXd& dens = *ctx.density_at_quantile;
      VectorXd out(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sgn = (y(i) - xi(i)) >= 0.0 ? 1.0 : -1.0;
        out(i) = (sgn + 2.0 * p - 1.0) / (2.0 * dens(i));
      }
      return out;
    }
  }
  throw InvalidInputError("tau_c: unknown functional");
}

VectorXd q2_values(const FunctionalSpec& spec, const MatrixXd& x,
                   const VectorXd& y, const Basis& beta,
                   const ProxyContext& ctx, double h, double h_s) {
  return q2_values_on(spec, x, y, x * beta.entries(), ctx, h, h_s);
}

VectorXd q2_values_on(const FunctionalSpec& spec, const MatrixXd& x,
                      const VectorXd& y, const MatrixXd& z,
                      const ProxyContext& ctx, double h, double h_s) {
  const Eigen::Index n = x.rows();
  const double var_proxy = sample_sd(ctx.proxy) * sample_sd(ctx.proxy);
  const double floor = std::max(1e-6 * var_proxy, 1e-12);

  VectorXd q2(n);
  switch (spec.kind()) {
    case FunctionalSpec::Kind::Mean:
    case FunctionalSpec::Kind::Moment: {
      // residual form of E[f^2|X] - E^2[f|beta'X]: numerically stable
      // where the difference of smoothed squares can go negative
      VectorXd fy = ctx.proxy;
      VectorXd resid = fy - smoothed_on(z, fy, h_s).col(0);
      VectorXd r2 = resid.array().square();
      q2 = nw_smoothed_on(x, r2, h);
      break;
    }
    case FunctionalSpec::Kind::Variance: {
      VectorXd resid = ctx.proxy - smoothed_on(x, ctx.proxy, h).col(0);
      VectorXd r2 = resid.array().square();
      q2 = nw_smoothed_on(x, r2, h);
      break;
    }
    case FunctionalSpec::Kind::Quantile: {
      if (!ctx.density_at_quantile)
        throw InvalidInputError("q2_values: Quantile needs density estimates");
      const double p = spec.quantile_level();
      q2 = ((1.0 - p) * p) /
           ctx.density_at_quantile->array().square();
      break;
    }
  }
  return q2.cwiseMax(floor);
}

}  // namespace see
