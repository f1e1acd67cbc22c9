#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "see/efficient.hpp"

namespace see {

enum class ModelId { I, II, III, IV, V, VI, VII };
enum class CovarianceKind { Identity, ArHalf };

ModelId model_from_string(const std::string& s);
std::string to_string(ModelId id);

struct ModelSpec {
  ModelId id;
  Eigen::Index n;
  CovarianceKind covariance = CovarianceKind::Identity;
  std::uint64_t seed = 0;
};

struct Sample {
  MatrixXd x;
  VectorXd y;
};

// true T-central subspaces, where defined for the model
struct ModelTruth {
  std::optional<Basis> mean;
  std::optional<Basis> variance;
  std::optional<Basis> median;
  std::optional<Basis> upper_quartile;  // p = 0.75
};

struct GeneratedModel {
  Sample sample;
  ModelTruth truth;
};

GeneratedModel generate_model(const ModelSpec& spec);

// the true basis matching a functional spec; throws when the model
// does not define one
Basis model_truth(ModelId id, const FunctionalSpec& spec);

// inverse-CDF draws from the two-piece skewed-Laplace density used by
// Model V
VectorXd sample_skewed_laplace(Eigen::Index m, std::uint64_t seed);
double skewed_laplace_density(double eps);

enum class EstimatorKind { SEE, RMAVE };

struct BenchmarkRow {
  std::string model;
  std::string functional;
  std::string estimator;
  Eigen::Index n = 0;
  int replicates = 0;
  int failures = 0;
  double mean_distance = 0.0;
  double standard_error = 0.0;
  double wall_seconds = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::uint64_t seed = 0;

  void write_csv(std::ostream& os) const;
  void write_table(std::ostream& os) const;
};

struct BenchmarkSettings {
  Eigen::Index n = 200;
  int replicates = 100;
  CovarianceKind covariance = CovarianceKind::Identity;
  EstimatorKind estimator = EstimatorKind::SEE;
  Eigen::Index d_hat = 3;
  SeeConfig config;
};

// repeated draw / estimate / distance-to-truth aggregation; more than
// 10% replicate failures aborts the run
BenchmarkReport run_benchmark(const std::vector<ModelId>& models,
                              const std::vector<FunctionalSpec>& functionals,
                              const BenchmarkSettings& settings,
                              std::uint64_t seed);

// 1 - mean |corr| between bootstrap and full-sample sufficient
// predictors; s > 1 uses mean absolute canonical correlations
struct BootstrapResult {
  double error = 0.0;
  std::vector<double> correlations;
  int skipped = 0;
};
BootstrapResult bootstrap_error(
    const std::function<Basis(const MatrixXd&, const VectorXd&)>& estimator,
    const MatrixXd& x, const VectorXd& y, int b_resamples, std::uint64_t seed);

}  // namespace see
