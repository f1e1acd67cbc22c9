#pragma once

#include <cstdint>
#include <vector>

#include "see/core.hpp"

namespace see {

enum class MaveVariant { OPG, MAVE, RMAVE };

struct MaveOptions {
  MaveVariant variant = MaveVariant::MAVE;
  int max_iters = 25;
  double tol = 1e-4;  // subspace-distance convergence threshold
  double bandwidth_decay = 0.8;       // RMAVE only
  double min_bandwidth_factor = 0.5;  // RMAVE floor, relative to h
  // RMAVE floor adapted to the reduced dimension:
  // refined_constant * n^(-1/(d+4)). 0 keeps the relative floor above.
  double refined_constant = 0.0;
  // drop this fraction of centers with the lowest local kernel mass
  // from the objective (guards the fit against sparse regions)
  double trim_fraction = 0.0;
};

struct MaveFit {
  Basis basis;
  bool converged = true;
  int iterations = 0;
  std::vector<double> objective_trace;  // value after each (a,b)-step
};

// Outer-product-of-gradients estimate: top-d eigenvectors of the
// averaged outer product of local-linear slopes of U on X.
Basis opg_fit(const MatrixXd& x, const MatrixXd& u, Eigen::Index d, double h);

// Alternating least squares on the MAVE objective
//   sum_{i,j,l} w_ij [U_jl - a_il - b_il' A'(X_j - X_i)]^2,
// kernel weights normalized per center. MAVE keeps weights on X
// fixed; RMAVE recomputes them on A'(X_j - X_i) with a decaying
// bandwidth. Initialized at opg_fit.
MaveFit mave_fit(const MatrixXd& x, const MatrixXd& u, Eigen::Index d, double h,
                 const MaveOptions& opts = {});

struct EnsembleOptions {
  int frequency_count = 10;        // sin/cos pairs
  double frequency_range = 4.0;    // t_i ~ unif(0, range)
  double bandwidth_constant = 1.0; // c in h = c n^(-1/(p+4))
  MaveOptions mave;
};

// MAVE-ensemble estimate of the central subspace: joint MAVE fit on
// {sin(t_i Y), cos(t_i Y)} with random frequencies, Y standardized.
Basis ensemble_central_subspace(const MatrixXd& x, const VectorXd& y,
                                Eigen::Index d, std::uint64_t seed,
                                const EnsembleOptions& opts = {});

}  // namespace see
