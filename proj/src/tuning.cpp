#include "see/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "see/rng.hpp"
#include "see/smoothing.hpp"

namespace see {

double distance_correlation(const MatrixXd& a, const MatrixXd& b,
                            double exponent) {
  const Eigen::Index n = a.rows();
  if (b.rows() != n) throw DimensionError("distance_correlation: row mismatch");
  if (n < 2) throw InvalidInputError("distance_correlation: need n >= 2");

  auto centered_distances = [&](const MatrixXd& m) {
    MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        double dist = (m.row(i) - m.row(j)).norm();
        if (exponent != 1.0) dist = std::pow(dist, exponent);
        d(i, j) = d(j, i) = dist;
      }
    }
    VectorXd row_means = d.rowwise().mean();
    const double grand = row_means.mean();
    d.colwise() -= row_means;
    d.rowwise() -= row_means.transpose();
    d.array() += grand;
    return d;
  };

  MatrixXd da = centered_distances(a);
  MatrixXd db = centered_distances(b);
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  const double dcov2 = (da.array() * db.array()).sum() / n2;
  const double dvar_a = (da.array() * da.array()).sum() / n2;
  const double dvar_b = (db.array() * db.array()).sum() / n2;
  if (dvar_a < 1e-300 || dvar_b < 1e-300) return 0.0;
  const double r2 = dcov2 / std::sqrt(dvar_a * dvar_b);
  return r2 > 0.0 ? std::sqrt(r2) : 0.0;
}

std::vector<int> fold_assignment(Eigen::Index n, std::uint64_t seed, int folds) {
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::derive(seed, 0xF01Dull);
  for (Eigen::Index i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.index(static_cast<std::size_t>(i + 1))]);
  std::vector<int> assign(n);
  for (Eigen::Index r = 0; r < n; ++r)
    assign[order[r]] = static_cast<int>(r % folds);
  return assign;
}

namespace {

struct Split {
  MatrixXd x_tr, x_te;
  VectorXd y_tr, y_te;
  std::vector<Eigen::Index> tr_idx, te_idx;
};

Split make_split(const MatrixXd& x, const VectorXd& y,
                 const std::vector<int>& assign, int fold) {
  Split s;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    (assign[i] == fold ? s.te_idx : s.tr_idx).push_back(i);
  s.x_tr.resize(s.tr_idx.size(), x.cols());
  s.y_tr.resize(s.tr_idx.size());
  s.x_te.resize(s.te_idx.size(), x.cols());
  s.y_te.resize(s.te_idx.size());
  for (std::size_t r = 0; r < s.tr_idx.size(); ++r) {
    s.x_tr.row(r) = x.row(s.tr_idx[r]);
    s.y_tr(r) = y(s.tr_idx[r]);
  }
  for (std::size_t r = 0; r < s.te_idx.size(); ++r) {
    s.x_te.row(r) = x.row(s.te_idx[r]);
    s.y_te(r) = y(s.te_idx[r]);
  }
  return s;
}

VectorXd predict_mean(const MatrixXd& z_tr, const VectorXd& u_tr, double h,
                      const MatrixXd& z_te) {
  return local_linear_fit(z_tr, u_tr, h, z_te).intercepts.col(0);
}

double step1_criterion(const Split& s, const TuneData& data, double c,
                       std::uint64_t seed) {
  EnsembleOptions ens;
  ens.bandwidth_constant = c;
  ens.mave = data.config.step1_mave;
  ens.frequency_count = data.config.ensemble_frequencies;
  Basis zeta =
      ensemble_central_subspace(s.x_tr, s.y_tr, data.d_hat, seed, ens);
  MatrixXd pred = s.x_te * zeta.entries();
  MatrixXd y_te_m = s.y_te;
  return -distance_correlation(y_te_m, pred);
}

double step2_criterion(const Split& s, const TuneData& data, double c) {
  const int q = static_cast<int>(s.x_tr.cols());
  const double h = bandwidth(KernelSpec(c, q, s.x_tr.rows()));
  if (data.spec.kind() == FunctionalSpec::Kind::Variance) {
    VectorXd pred = predict_mean(s.x_tr, s.y_tr, h, s.x_te);
    return (s.y_te - pred).array().square().mean();
  }
  // quantile / median: weighted sample quantile around each test point
  const double p = data.spec.kind() == FunctionalSpec::Kind::Quantile
                       ? data.spec.quantile_level()
                       : 0.5;
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.x_te.rows(); ++i) {
    VectorXd w(s.x_tr.rows());
    for (Eigen::Index j = 0; j < s.x_tr.rows(); ++j)
      w(j) = std::exp(-0.5 * (s.x_tr.row(j) - s.x_te.row(i)).squaredNorm() /
                      (h * h));
    total += std::abs(s.y_te(i) - weighted_quantile(s.y_tr, w, p));
  }
  return total / static_cast<double>(s.x_te.rows());
}

double step3_criterion(const Split& s, const VectorXd& proxy_tr,
                       const VectorXd& proxy_te, const TuneData& data,
                       double c) {
  const int q = static_cast<int>(s.x_tr.cols());
  const double h = bandwidth(KernelSpec(c, q, s.x_tr.rows()));
  Basis beta =
      mave_fit(s.x_tr, proxy_tr, data.s, h, data.config.step3_mave).basis;
  MatrixXd z_tr = s.x_tr * beta.entries();
  MatrixXd z_te = s.x_te * beta.entries();
  const double hs =
      bandwidth(KernelSpec(c, static_cast<int>(data.s), s.x_tr.rows()));
  VectorXd pred = predict_mean(z_tr, proxy_tr, hs, z_te);
  return (proxy_te - pred).array().square().mean();
}

double step4_criterion(const Split& s, const TuneData& data, double c) {
  const Eigen::Index n_tr = s.x_tr.rows();
  const int d = static_cast<int>(s.x_tr.cols());
  SeeConfig cfg = data.config;
  cfg.c_step4 = c;

  const double h2 =
      bandwidth(KernelSpec(effective_c_step2(cfg, data.spec), d, n_tr));
  const double h_y = bandwidth(KernelSpec(c, 1, n_tr));
  ProxyContext ctx = proxy_response(data.spec, s.x_tr, s.y_tr, h2, h_y);
  const double h3 = bandwidth(KernelSpec(cfg.c_step3, d, n_tr));
  Basis beta_tilde =
      mave_fit(s.x_tr, ctx.proxy, data.s, h3, cfg.step3_mave).basis;

  const double h4x = bandwidth(KernelSpec(c, d, n_tr));
  const double h4s = bandwidth(KernelSpec(c, static_cast<int>(data.s), n_tr));

  VectorXd target;
  switch (data.spec.kind()) {
    case FunctionalSpec::Kind::Mean:
    case FunctionalSpec::Kind::Moment:
      target = ctx.proxy;
      break;
    case FunctionalSpec::Kind::Variance:
      target = local_linear_fit(s.x_tr, ctx.proxy, h4x, s.x_tr).intercepts.col(0);
      break;
    case FunctionalSpec::Kind::Quantile:
      target = *ctx.auxiliary;
      break;
  }
  VectorXd tau = tau_c(data.spec, s.x_tr, s.y_tr, beta_tilde, ctx, h4s);
  MatrixXd q1 = q1_values(s.x_tr, target, beta_tilde, h4s);
  VectorXd q2 = q2_values(data.spec, s.x_tr, s.y_tr, beta_tilde, ctx, h4x, h4s);
  auto [q3, q4] = q3_q4_values(q1, q2, s.x_tr, beta_tilde, h4s);
  ScoreParts parts = efficient_score(std::move(tau), std::move(q1),
                                     std::move(q2), std::move(q3),
                                     std::move(q4));
  Basis beta_hat =
      one_step_update(beta_tilde, parts.mean_score,
                      efficient_information(parts.score))
          .basis;

  MatrixXd z_tr = s.x_tr * beta_hat.entries();
  MatrixXd z_te = s.x_te * beta_hat.entries();
  switch (data.spec.kind()) {
    case FunctionalSpec::Kind::Mean:
    case FunctionalSpec::Kind::Moment: {
      VectorXd pred = predict_mean(z_tr, s.y_tr, h4s, z_te);
      return (s.y_te - pred).array().square().mean();
    }
    case FunctionalSpec::Kind::Variance: {
      VectorXd mean_te = predict_mean(s.x_tr, s.y_tr, h4x, s.x_te);
      VectorXd resid2 = (s.y_te - mean_te).array().square();
      VectorXd var_te = predict_mean(z_tr, ctx.proxy, h4s, z_te);
      return (resid2 - var_te).array().square().mean();
    }
    case FunctionalSpec::Kind::Quantile: {
      VectorXd pred = predict_mean(z_tr, *ctx.auxiliary, h4s, z_te);
      return (s.y_te - pred).array().abs().mean();
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

double cross_validate_c(TuneStage stage, const std::vector<double>& grid,
                        const TuneData& data, std::uint64_t seed) {
  if (grid.empty()) throw InvalidInputError("cross_validate_c: empty grid");
  if (stage == TuneStage::Step2 &&
      (data.spec.kind() == FunctionalSpec::Kind::Mean ||
       data.spec.kind() == FunctionalSpec::Kind::Moment))
    return grid.front();  // L-functionals need no step-2 smoothing
  const Eigen::Index n = data.x.rows();
  if (n < 10) throw InvalidInputError("cross_validate_c: too few observations");

  const std::vector<int> assign = fold_assignment(n, seed);

  // step 3 compares against the proxy computed once on the full data
  VectorXd proxy_full;
  if (stage == TuneStage::Step3) {
    const double h2 =
        bandwidth(KernelSpec(effective_c_step2(data.config, data.spec),
                             static_cast<int>(data.x.cols()), n));
    proxy_full = proxy_response(data.spec, data.x, data.y, h2).proxy;
  }

  double best_c = grid.front();
  double best_score = std::numeric_limits<double>::infinity();
  std::ostringstream failures;
  bool any_ok = false;

  for (double c : grid) {
    double total = 0.0;
    bool failed = false;
    for (int fold = 0; fold < 5 && !failed; ++fold) {
      Split s = make_split(data.x, data.y, assign, fold);
      try {
        switch (stage) {
          case TuneStage::Step1:
            total += step1_criterion(s, data, c, seed);
            break;
          case TuneStage::Step2:
            total += step2_criterion(s, data, c);
            break;
          case TuneStage::Step3: {
            VectorXd ptr(s.tr_idx.size()), pte(s.te_idx.size());
            for (std::size_t r = 0; r < s.tr_idx.size(); ++r)
              ptr(r) = proxy_full(s.tr_idx[r]);
            for (std::size_t r = 0; r < s.te_idx.size(); ++r)
              pte(r) = proxy_full(s.te_idx[r]);
            total += step3_criterion(s, ptr, pte, data, c);
            break;
          }
          case TuneStage::Step4:
            total += step4_criterion(s, data, c);
            break;
        }
      } catch (const std::exception& e) {
        failures << "c=" << c << " fold=" << fold << ": " << e.what() << "; ";
        failed = true;
      }
    }
    if (failed) continue;
    any_ok = true;
    const double avg = total / 5.0;
    if (avg < best_score) {
      best_score = avg;
      best_c = c;
    }
  }
  if (!any_ok)
    throw std::runtime_error("cross_validate_c: all candidates failed: " +
                             failures.str());
  return best_c;
}

}  // namespace see
