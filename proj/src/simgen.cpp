#include "see/simgen.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "see/rng.hpp"

namespace see {

namespace {

constexpr Eigen::Index kAmbientDim = 10;
constexpr double kZ075 = 0.6744897501960817;  // Phi^-1(0.75)

MatrixXd covariance_cholesky(CovarianceKind kind) {
  if (kind == CovarianceKind::Identity)
    return MatrixXd::Identity(kAmbientDim, kAmbientDim);
  MatrixXd sigma(kAmbientDim, kAmbientDim);
  for (Eigen::Index i = 0; i < kAmbientDim; ++i)
    for (Eigen::Index j = 0; j < kAmbientDim; ++j)
      sigma(i, j) = std::pow(0.5, std::abs(static_cast<double>(i - j)));
  return sigma.llt().matrixL();
}

Basis span_of(std::initializer_list<VectorXd> cols) {
  MatrixXd m(kAmbientDim, static_cast<Eigen::Index>(cols.size()));
  Eigen::Index k = 0;
  for (const auto& c : cols) m.col(k++) = c;
  return Basis(m);
}

VectorXd unit(Eigen::Index i) {
  VectorXd e = VectorXd::Zero(kAmbientDim);
  e(i) = 1.0;
  return e;
}

double skewed_laplace_icdf(double u) {
  // lower piece carries mass 1/3
  if (u <= 1.0 / 3.0) return std::log(27.0 * u / 16.0) / 5.0;
  return -0.4 * std::log(2.0 * (1.0 - u));
}

}  // namespace

ModelId model_from_string(const std::string& s) {
  if (s == "I") return ModelId::I;
  if (s == "II") return ModelId::II;
  if (s == "III") return ModelId::III;
  if (s == "IV") return ModelId::IV;
  if (s == "V") return ModelId::V;
  if (s == "VI") return ModelId::VI;
  if (s == "VII") return ModelId::VII;
  throw InvalidInputError("unknown model id: " + s);
}

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::I: return "I";
    case ModelId::II: return "II";
    case ModelId::III: return "III";
    case ModelId::IV: return "IV";
    case ModelId::V: return "V";
    case ModelId::VI: return "VI";
    case ModelId::VII: return "VII";
  }
  return "?";
}

double skewed_laplace_density(double eps) {
  const double knot = -0.4 * std::log(4.0 / 3.0);
  if (eps >= knot) return 1.25 * std::exp(-2.5 * eps);
  return (80.0 / 27.0) * std::exp(5.0 * eps);
}

VectorXd sample_skewed_laplace(Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw InvalidInputError("sample_skewed_laplace: m must be >= 1");
  Rng rng = Rng::derive(seed, 0x51a9ull);
  VectorXd out(m);
  for (Eigen::Index i = 0; i < m; ++i) out(i) = skewed_laplace_icdf(rng.uniform());
  return out;
}

GeneratedModel generate_model(const ModelSpec& spec) {
  if (spec.n < 20) throw InvalidInputError("generate_model: n must be >= 20");
  Rng rng = Rng::derive(spec.seed, 0x6D0Dull + static_cast<int>(spec.id));
  const Eigen::Index n = spec.n;
  MatrixXd chol = covariance_cholesky(spec.covariance);

  MatrixXd z(n, kAmbientDim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < kAmbientDim; ++j) z(i, j) = rng.normal();
  MatrixXd x = z * chol.transpose();

  VectorXd y(n);
  ModelTruth truth;
  switch (spec.id) {
    case ModelId::I:
      for (Eigen::Index i = 0; i < n; ++i)
        y(i) = x(i, 0) + (1.0 + std::abs(x(i, 1))) * rng.normal();
      truth.mean = span_of({unit(0)});
      truth.variance = span_of({unit(1)});
      break;
    case ModelId::II:
      for (Eigen::Index i = 0; i < n; ++i)
        y(i) = x(i, 0) * (x(i, 0) + x(i, 1) + 1.0) + 0.5 * rng.normal();
      truth.mean = span_of({unit(0), unit(1)});
      break;
    case ModelId::III:
      for (Eigen::Index i = 0; i < n; ++i)
        y(i) = x(i, 0) + (1.0 + std::abs(x(i, 0))) * rng.normal();
      truth.mean = span_of({unit(0)});
      truth.variance = span_of({unit(0)});
      break;
    case ModelId::IV:
      for (Eigen::Index i = 0; i < n; ++i)
        y(i) = static_cast<double>(
            rng.poisson(std::abs(x(i, 0) + x(i, 1))));
      truth.mean = span_of({(unit(0) + unit(1)) / std::sqrt(2.0)});
      break;
    case ModelId::V:
      for (Eigen::Index i = 0; i < n; ++i)
        y(i) = x(i, 0) * x(i, 0) +
               x(i, 1) * skewed_laplace_icdf(rng.uniform());
      truth.mean = span_of({unit(0), unit(1)});
      truth.median = span_of({unit(0)});
      truth.upper_quartile = span_of({unit(0), unit(1)});
      break;
    case ModelId::VI:
      for (Eigen::Index i = 0; i < n; ++i)
        y(i) = 3.0 * x(i, 0) + x(i, 1) + rng.student_t(3);
      truth.median = span_of({(3.0 * unit(0) + unit(1)) / std::sqrt(10.0)});
      truth.mean = span_of({(3.0 * unit(0) + unit(1)) / std::sqrt(10.0)});
      truth.upper_quartile = truth.median;
      break;
    case ModelId::VII: {
      for (Eigen::Index i = 0; i < n; ++i)
        y(i) = 1.0 + x(i, 0) + (1.0 + 0.4 * x(i, 1)) * rng.normal();
      truth.mean = span_of({unit(0)});
      VectorXd dir = unit(0) + 0.4 * kZ075 * unit(1);
      truth.upper_quartile = span_of({dir / dir.norm()});
      break;
    }
  }
  return GeneratedModel{Sample{std::move(x), std::move(y)}, std::move(truth)};
}

Basis model_truth(ModelId id, const FunctionalSpec& spec) {
  // truth table only needs the spans, not a fresh sample
  ModelSpec ms{id, 20, CovarianceKind::Identity, 0};
  ModelTruth truth = generate_model(ms).truth;
  std::optional<Basis> b;
  switch (spec.kind()) {
    case FunctionalSpec::Kind::Mean:
    case FunctionalSpec::Kind::Moment:
      b = truth.mean;
      break;
    case FunctionalSpec::Kind::Variance:
      b = truth.variance;
      break;
    case FunctionalSpec::Kind::Quantile:
      if (std::abs(spec.quantile_level() - 0.5) < 1e-12)
        b = truth.median;
      else if (std::abs(spec.quantile_level() - 0.75) < 1e-12)
        b = truth.upper_quartile;
      break;
  }
  if (!b)
    throw InvalidInputError("model_truth: no recorded truth for model " +
                            to_string(id) + " under this functional");
  return *b;
}

namespace {

std::string functional_name(const FunctionalSpec& spec) {
  switch (spec.kind()) {
    case FunctionalSpec::Kind::Mean: return "E(Y|X)";
    case FunctionalSpec::Kind::Moment: {
      std::ostringstream os;
      os << "E(Y^" << spec.moment_order() << "|X)";
      return os.str();
    }
    case FunctionalSpec::Kind::Variance: return "Var(Y|X)";
    case FunctionalSpec::Kind::Quantile: {
      if (std::abs(spec.quantile_level() - 0.5) < 1e-12) return "M(Y|X)";
      std::ostringstream os;
      os << "Q" << spec.quantile_level() << "(Y|X)";
      return os.str();
    }
  }
  return "?";
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<ModelId>& models,
                              const std::vector<FunctionalSpec>& functionals,
                              const BenchmarkSettings& settings,
                              std::uint64_t seed) {
  if (settings.replicates < 2)
    throw InvalidInputError("run_benchmark: need at least 2 replicates");
  BenchmarkReport report;
  report.seed = seed;

  for (ModelId model : models) {
    for (const FunctionalSpec& spec : functionals) {
      Basis truth = model_truth(model, spec);
      const Eigen::Index s = truth.subspace_dim();
      std::vector<double> distances;
      int failures = 0;
      const auto t0 = std::chrono::steady_clock::now();

      for (int rep = 0; rep < settings.replicates; ++rep) {
        const std::uint64_t rep_seed =
            Rng::derive(seed, 1000u * static_cast<unsigned>(model) + rep)
                .next_u64();
        ModelSpec ms{model, settings.n, settings.covariance, rep_seed};
        GeneratedModel gen = generate_model(ms);
        try {
          Basis estimate = [&] {
            if (settings.estimator == EstimatorKind::RMAVE) {
              const double h = bandwidth(KernelSpec(
                  settings.config.c_step1,
                  static_cast<int>(gen.sample.x.cols()), settings.n));
              MaveOptions opts;
              opts.variant = MaveVariant::RMAVE;
              VectorXd target = gen.sample.y.unaryExpr(
                  [&](double v) { return spec.transform(v); });
              return mave_fit(gen.sample.x, target, s, h, opts)
                  .basis.orthonormalized();
            }
            SeeConfig cfg = settings.config;
            cfg.seed = rep_seed;
            return see_estimate(gen.sample.x, gen.sample.y, spec, s,
                                settings.d_hat, cfg)
                .beta_hat;
          }();
          distances.push_back(subspace_distance(estimate, truth));
        } catch (const std::exception&) {
          ++failures;
        }
      }
      if (failures * 10 > settings.replicates)
        throw std::runtime_error("run_benchmark: more than 10% failures for model " +
                                 to_string(model));

      const auto t1 = std::chrono::steady_clock::now();
      const int ok = static_cast<int>(distances.size());
      double mean = 0.0;
      for (double v : distances) mean += v;
      mean /= ok;
      double var = 0.0;
      for (double v : distances) var += (v - mean) * (v - mean);
      var /= std::max(1, ok - 1);

      BenchmarkRow row;
      row.model = to_string(model);
      row.functional = functional_name(spec);
      row.estimator =
          settings.estimator == EstimatorKind::SEE ? "SEE" : "RMAVE";
      row.n = settings.n;
      row.replicates = ok;
      row.failures = failures;
      row.mean_distance = mean;
      row.standard_error = std::sqrt(var / ok);
      row.wall_seconds =
          std::chrono::duration<double>(t1 - t0).count();
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void BenchmarkReport::write_csv(std::ostream& os) const {
  os << "# seed=" << seed << "\n";
  os << "model,functional,estimator,n,replicates,failures,mean_distance,"
        "standard_error,wall_seconds\n";
  for (const auto& r : rows)
    os << r.model << ',' << r.functional << ',' << r.estimator << ',' << r.n
       << ',' << r.replicates << ',' << r.failures << ',' << r.mean_distance
       << ',' << r.standard_error << ',' << r.wall_seconds << "\n";
}

void BenchmarkReport::write_table(std::ostream& os) const {
  os << "model  functional    estimator  n     result\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", r.mean_distance,
                  r.standard_error);
    os << r.model << "\t" << r.functional << "\t" << r.estimator << "\t" << r.n
       << "\t" << buf << "\n";
  }
}

BootstrapResult bootstrap_error(
    const std::function<Basis(const MatrixXd&, const VectorXd&)>& estimator,
    const MatrixXd& x, const VectorXd& y, int b_resamples, std::uint64_t seed) {
  if (b_resamples < 2)
    throw InvalidInputError("bootstrap_error: need at least 2 resamples");
  const Eigen::Index n = x.rows();

  Basis full = estimator(x, y);
  MatrixXd pred_full = x * full.entries();

  auto centered_orthonormal = [&](const MatrixXd& m) {
    MatrixXd c = m.rowwise() - m.colwise().mean();
    Eigen::HouseholderQR<MatrixXd> qr(c);
    return MatrixXd(qr.householderQ() *
                    MatrixXd::Identity(m.rows(), m.cols()));
  };

  BootstrapResult result;
  for (int b = 0; b < b_resamples; ++b) {
    Rng rng = Rng::derive(seed, 0xB007ull + b);
    MatrixXd xb(n, x.cols());
    VectorXd yb(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index j = static_cast<Eigen::Index>(rng.index(n));
      xb.row(i) = x.row(j);
      yb(i) = y(j);
    }
    try {
      Basis bb = estimator(xb, yb);
      MatrixXd pred_b = x * bb.entries();
      double rho;
      if (full.subspace_dim() == 1) {
        VectorXd u = pred_b.col(0).array() - pred_b.col(0).mean();
        VectorXd v = pred_full.col(0).array() - pred_full.col(0).mean();
        const double denom = u.norm() * v.norm();
        if (denom < 1e-300) {
          ++result.skipped;
          continue;
        }
        rho = std::abs(u.dot(v) / denom);
      } else {
        // mean absolute canonical correlation
        MatrixXd qa = centered_orthonormal(pred_b);
        MatrixXd qb = centered_orthonormal(pred_full);
        Eigen::JacobiSVD<MatrixXd> svd(qa.transpose() * qb);
        rho = svd.singularValues().cwiseAbs().cwiseMin(1.0).mean();
      }
      result.correlations.push_back(rho);
    } catch (const std::exception&) {
      ++result.skipped;
    }
  }
  if (result.correlations.empty())
    throw std::runtime_error("bootstrap_error: every resample failed");
  double sum = 0.0;
  for (double r : result.correlations) sum += std::abs(r);
  result.error = 1.0 - sum / static_cast<double>(result.correlations.size());
  return result;
}

}  // namespace see
