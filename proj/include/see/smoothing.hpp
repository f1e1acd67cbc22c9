#pragma once

#include "see/core.hpp"

namespace see {

// per-center output of a local-linear fit: fitted conditional means
// (intercepts, k x m) and local gradients (slopes, k x (q*m),
// column-stacked per target)
struct LocalFit {
  MatrixXd intercepts;
  MatrixXd slopes;

  // slope vector of target l at center i
  VectorXd slope(Eigen::Index i, Eigen::Index l, Eigen::Index q) const {
    return slopes.row(i).segment(l * q, q).transpose();
  }
};

// Weighted local-linear regression of each column of U on Z around
// every row of `centers`, kernel weights K_h(Z_j - z). Per-center
// solves run in an OpenMP loop; output is identical for any thread
// count. Throws DegenerateNeighborhoodError when a center has fewer
// than q+1 points of nonnegligible weight.
LocalFit local_linear_fit(const MatrixXd& z, const MatrixXd& u, double h,
                          const MatrixXd& centers);

// Straightforward single-thread implementation kept as the reference
// for the parallel kernel; used by the tests and the benchmark.
LocalFit local_linear_fit_serial(const MatrixXd& z, const MatrixXd& u, double h,
                                 const MatrixXd& centers);

// Same solve with caller-supplied kernel weights (row i of `weights`
// holds the n weights for center i). This is what the MAVE inner loop
// uses, where weights come from a different coordinate system than
// the local design.
LocalFit local_linear_fit_weighted(const MatrixXd& z, const MatrixXd& u,
                                   const MatrixXd& weights,
                                   const MatrixXd& centers);

// Kernel estimate of the conditional density of Y at y0 given X = x0:
// E_n[K_h1(Y - y0) K_h(X - x0)] / E_n[K_h(X - x0)].
double conditional_density(const MatrixXd& x, const VectorXd& y,
                           const VectorXd& x0, double y0, double h, double h1);

}  // namespace see
