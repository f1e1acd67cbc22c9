#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace see {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateBasisError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// thrown when a kernel neighborhood has too few effective points;
// carries the offending center index
struct DegenerateNeighborhoodError : std::runtime_error {
  explicit DegenerateNeighborhoodError(Eigen::Index center)
      : std::runtime_error("degenerate kernel neighborhood at center " +
                           std::to_string(center)),
        center_index(center) {}
  Eigen::Index center_index;
};

// p x d matrix of full column rank whose span is a candidate subspace
class Basis {
 public:
  Basis(MatrixXd entries);

  const MatrixXd& entries() const { return entries_; }
  Eigen::Index ambient_dim() const { return entries_.rows(); }
  Eigen::Index subspace_dim() const { return entries_.cols(); }

  // same span, orthonormal columns (thin QR)
  Basis orthonormalized() const;

 private:
  MatrixXd entries_;
};

// bandwidth rule h = c * n^(-1/(q+4))
struct KernelSpec {
  double tuning_constant;    // c > 0
  int smoothing_dimension;   // q >= 1
  Eigen::Index sample_size;  // n >= 1

  KernelSpec(double c, int q, Eigen::Index n);
};

double bandwidth(const KernelSpec& spec);

// product Gaussian kernel: prod_j phi(u_j/h)/h
double gaussian_weight(const VectorXd& u, double h);

// Moore-Penrose inverse by SVD. tol = 0 selects 1e-10 * largest
// singular value as the cutoff.
MatrixXd moore_penrose(const MatrixXd& m, double tol = 0.0);

// orthogonal projection onto span(B)
MatrixXd projection_matrix(const Basis& b);

// Frobenius norm of the difference of the two projections
double subspace_distance(const Basis& b1, const Basis& b2);

}  // namespace see
