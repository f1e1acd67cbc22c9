#pragma once

#include <cstdint>
#include <vector>

#include "see/efficient.hpp"

namespace see {

// sample distance correlation from doubly-centered distance matrices;
// returns 0 when either variable is degenerate. `exponent` is the
// power applied to Euclidean distances (1 = standard dCor).
double distance_correlation(const MatrixXd& a, const MatrixXd& b,
                            double exponent = 1.0);

enum class TuneStage { Step1, Step2, Step3, Step4 };

struct TuneData {
  MatrixXd x;  // predictor used at this stage (reduced for steps 2-4)
  VectorXd y;
  FunctionalSpec spec = FunctionalSpec::mean();
  Eigen::Index s = 1;
  Eigen::Index d_hat = 3;
  SeeConfig config;  // constants already fixed for earlier stages
};

// five-fold cross validation over the grid of bandwidth constants;
// stage-specific prediction criteria. Returns the chosen grid member.
double cross_validate_c(TuneStage stage, const std::vector<double>& grid,
                        const TuneData& data, std::uint64_t seed);

// the fold assignment used by cross_validate_c (exact partition of
// 0..n-1 into 5 groups, seeded shuffle)
std::vector<int> fold_assignment(Eigen::Index n, std::uint64_t seed,
                                 int folds = 5);

}  // namespace see
