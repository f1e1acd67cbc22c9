#include "see/smoothing.hpp"

#include <cmath>

namespace see {

namespace {

constexpr double kWeightFloor = 1e-12;

// one weighted least-squares system: minimize over (a, b)
// sum_j w_j [u_j - a - b'(z_j - center)]^2
void solve_center(const MatrixXd& z, const MatrixXd& u, const VectorXd& w_raw,
                  const Eigen::RowVectorXd& center, Eigen::Index center_idx,
                  LocalFit& fit) {
  const Eigen::Index n = z.rows(), q = z.cols(), m = u.cols();
  const double total = w_raw.sum();
  if (!(total > 0.0)) throw DegenerateNeighborhoodError(center_idx);
  VectorXd w = w_raw / total;
  if ((w.array() > kWeightFloor * w.maxCoeff()).count() < q + 1)
    throw DegenerateNeighborhoodError(center_idx);

  MatrixXd design(n, q + 1);
  design.col(0).setOnes();
  design.rightCols(q) = z.rowwise() - center;

  MatrixXd wd = w.asDiagonal() * design;
  MatrixXd gram = design.transpose() * wd;
  MatrixXd rhs = wd.transpose() * u;

  MatrixXd coef = gram.ldlt().solve(rhs);
  const double resid = (gram * coef - rhs).norm();
  if (!coef.allFinite() || resid > 1e-8 * (rhs.norm() + 1.0)) {
    // singular local design: ridge on the slope block
    MatrixXd reg = gram;
    const double ridge = 1e-8 * gram.trace();
    reg.bottomRightCorner(q, q).diagonal().array() += ridge;
    coef = reg.ldlt().solve(rhs);
  }

  fit.intercepts.row(center_idx) = coef.row(0);
  for (Eigen::Index l = 0; l < m; ++l)
    fit.slopes.row(center_idx).segment(l * q, q) =
        coef.col(l).segment(1, q).transpose();
}

void check_fit_inputs(const MatrixXd& z, const MatrixXd& u,
                      const MatrixXd& centers) {
  if (z.rows() != u.rows())
    throw DimensionError("local_linear_fit: Z and U row counts differ");
  if (centers.cols() != z.cols())
    throw DimensionError("local_linear_fit: center dimension mismatch");
  if (!z.allFinite() || !u.allFinite() || !centers.allFinite())
    throw InvalidInputError("local_linear_fit: non-finite input");
  if (z.rows() < z.cols() + 1)
    throw InvalidInputError("local_linear_fit: need at least q+1 observations");
}

VectorXd kernel_weights_at(const MatrixXd& z, const Eigen::RowVectorXd& center,
                           double h) {
  // product Gaussian, computed in log space row-wise
  const Eigen::Index n = z.rows(), q = z.cols();
  const double norm_const =
      std::pow(0.3989422804014326779 / h, static_cast<double>(q));
  VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s2 = (z.row(j) - center).squaredNorm() / (h * h);
    w(j) = norm_const * std::exp(-0.5 * s2);
  }
  return w;
}

}  // namespace

LocalFit local_linear_fit(const MatrixXd& z, const MatrixXd& u, double h,
                          const MatrixXd& centers) {
  check_fit_inputs(z, u, centers);
  if (!(h > 0.0)) throw InvalidInputError("local_linear_fit: h must be positive");
  const Eigen::Index k = centers.rows(), q = z.cols(), m = u.cols();
  LocalFit fit{MatrixXd(k, m), MatrixXd(k, q * m)};

  Eigen::Index failed_center = -1;
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < k; ++i) {
    try {
      VectorXd w = kernel_weights_at(z, centers.row(i), h);
      solve_center(z, u, w, centers.row(i), i, fit);
    } catch (const DegenerateNeighborhoodError&) {
#pragma omp critical
      if (failed_center < 0 || i < failed_center) failed_center = i;
    }
  }
  if (failed_center >= 0) throw DegenerateNeighborhoodError(failed_center);
  return fit;
}

LocalFit local_linear_fit_serial(const MatrixXd& z, const MatrixXd& u, double h,
                                 const MatrixXd& centers) {
  check_fit_inputs(z, u, centers);
  if (!(h > 0.0)) throw InvalidInputError("local_linear_fit: h must be positive");
  const Eigen::Index k = centers.rows(), q = z.cols(), m = u.cols();
  LocalFit fit{MatrixXd(k, m), MatrixXd(k, q * m)};
  for (Eigen::Index i = 0; i < k; ++i) {
    VectorXd w = kernel_weights_at(z, centers.row(i), h);
    solve_center(z, u, w, centers.row(i), i, fit);
  }
  return fit;
}

LocalFit local_linear_fit_weighted(const MatrixXd& z, const MatrixXd& u,
                                   const MatrixXd& weights,
                                   const MatrixXd& centers) {
  check_fit_inputs(z, u, centers);
  if (weights.rows() != centers.rows() || weights.cols() != z.rows())
    throw DimensionError("local_linear_fit_weighted: weight matrix shape");
  const Eigen::Index k = centers.rows(), q = z.cols(), m = u.cols();
  LocalFit fit{MatrixXd(k, m), MatrixXd(k, q * m)};

  Eigen::Index failed_center = -1;
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < k; ++i) {
    try {
      VectorXd w = weights.row(i).transpose();
      solve_center(z, u, w, centers.row(i), i, fit);
    } catch (const DegenerateNeighborhoodError&) {
#pragma omp critical
      if (failed_center < 0 || i < failed_center) failed_center = i;
    }
  }
  if (failed_center >= 0) throw DegenerateNeighborhoodError(failed_center);
  return fit;
}

double conditional_density(const MatrixXd& x, const VectorXd& y,
                           const VectorXd& x0, double y0, double h, double h1) {
  if (!(h > 0.0) || !(h1 > 0.0))
    throw InvalidInputError("conditional_density: bandwidths must be positive");
  if (x.rows() != y.size())
    throw DimensionError("conditional_density: X and Y sizes differ");
  VectorXd wx = kernel_weights_at(x, x0.transpose(), h);
  const double denom = wx.sum();
  if (denom < 1e-300) throw DegenerateNeighborhoodError(0);
  double num = 0.0;
  const double c1 = 0.3989422804014326779 / h1;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const double t = (y(j) - y0) / h1;
    num += wx(j) * c1 * std::exp(-0.5 * t * t);
  }
  return num / denom;
}

}  // namespace see
