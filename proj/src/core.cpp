#include "see/core.hpp"

#include <cmath>

namespace see {

namespace {
constexpr double kRankTol = 1e-8;  // relative smallest/largest singular value
}

Basis::Basis(MatrixXd entries) : entries_(std::move(entries)) {
  const Eigen::Index p = entries_.rows(), d = entries_.cols();
  if (d < 1 || d > p) throw DimensionError("Basis: need 1 <= d <= p");
  if (!entries_.allFinite()) throw InvalidInputError("Basis: non-finite entries");
  Eigen::JacobiSVD<MatrixXd> svd(entries_);
  const auto& sv = svd.singularValues();
  if (sv(d - 1) <= kRankTol * sv(0))
    throw DegenerateBasisError("Basis: numerically rank deficient");
}

Basis Basis::orthonormalized() const {
  Eigen::HouseholderQR<MatrixXd> qr(entries_);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(ambient_dim(), subspace_dim());
  return Basis(std::move(q));
}

KernelSpec::KernelSpec(double c, int q, Eigen::Index n)
    : tuning_constant(c), smoothing_dimension(q), sample_size(n) {
  if (!(c > 0.0)) throw InvalidInputError("KernelSpec: c must be positive");
  if (q < 1) throw InvalidInputError("KernelSpec: q must be positive");
  if (n < 1) throw InvalidInputError("KernelSpec: n must be positive");
}

double bandwidth(const KernelSpec& spec) {
  return spec.tuning_constant *
         std::pow(static_cast<double>(spec.sample_size),
                  -1.0 / (spec.smoothing_dimension + 4.0));
}

double gaussian_weight(const VectorXd& u, double h) {
  if (!(h > 0.0)) throw InvalidInputError("gaussian_weight: h must be positive");
  const double inv_sqrt_2pi = 0.3989422804014326779;
  double w = 1.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double t = u(j) / h;
    w *= inv_sqrt_2pi * std::exp(-0.5 * t * t) / h;
  }
  return w;
}

MatrixXd moore_penrose(const MatrixXd& m, double tol) {
  if (!m.allFinite()) throw InvalidInputError("moore_penrose: non-finite entries");
  if (tol < 0.0) throw InvalidInputError("moore_penrose: negative tolerance");
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  const double cutoff = tol > 0.0 ? tol : (sv.size() > 0 ? 1e-10 * sv(0) : 0.0);
  VectorXd inv = VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

MatrixXd projection_matrix(const Basis& b) {
  const MatrixXd& m = b.entries();
  Eigen::LDLT<MatrixXd> gram((m.transpose() * m).eval());
  return m * gram.solve(m.transpose());
}

double subspace_distance(const Basis& b1, const Basis& b2) {
  if (b1.ambient_dim() != b2.ambient_dim())
    throw DimensionError("subspace_distance: mismatched ambient dimensions");
  return (projection_matrix(b1) - projection_matrix(b2)).norm();
}

}  // namespace see
