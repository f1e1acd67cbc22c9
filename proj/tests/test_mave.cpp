#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "see/mave.hpp"
#include "see/rng.hpp"

using namespace see;

namespace {

MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

MatrixXd random_orthogonal(Rng& rng, Eigen::Index p) {
  Eigen::HouseholderQR<MatrixXd> qr(random_matrix(rng, p, p));
  return qr.householderQ() * MatrixXd::Identity(p, p);
}

// distance from span(target) to the closest subspace of span(container)
double containment_gap(const Basis& target, const Basis& container) {
  const MatrixXd pi = projection_matrix(container);
  const MatrixXd t = target.orthonormalized().entries();
  return (t - pi * t).norm();
}

}  // namespace

TEST_CASE("opg recovers a single-index cubic without noise") {
  Rng rng(21);
  const Eigen::Index n = 400, p = 5;
  MatrixXd x = random_matrix(rng, n, p);
  VectorXd beta = VectorXd::Zero(p);
  beta(0) = 0.6;
  beta(1) = 0.8;
  MatrixXd u(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = x.row(i) * beta;
    u(i, 0) = t * t * t + t;
  }
  Basis fit = opg_fit(x, u, 1, bandwidth(KernelSpec(1.5, p, n)));
  CHECK(subspace_distance(fit, Basis(beta)) < 0.1);
}

TEST_CASE("opg with d = p spans everything") {
  Rng rng(22);
  MatrixXd x = random_matrix(rng, 100, 3);
  MatrixXd u = random_matrix(rng, 100, 1);
  Basis fit = opg_fit(x, u, 3, 0.8);
  CHECK(subspace_distance(fit, Basis(MatrixXd::Identity(3, 3))) < 1e-8);
}

TEST_CASE("opg orthogonal equivariance") {
  Rng rng(23);
  const Eigen::Index n = 300, p = 4;
  MatrixXd x = random_matrix(rng, n, p);
  MatrixXd u(n, 1);
  for (Eigen::Index i = 0; i < n; ++i)
    u(i, 0) = std::sin(x(i, 0)) + 0.3 * x(i, 1) * x(i, 1);
  MatrixXd q = random_orthogonal(rng, p);
  Basis f1 = opg_fit(x, u, 2, 0.7);
  Basis f2 = opg_fit(x * q, u, 2, 0.7);
  // rotating the predictors maps the estimated span through Q'
  CHECK(subspace_distance(f2, Basis(q.transpose() * f1.entries())) < 1e-6);
}

TEST_CASE("mave recovers a noiseless two-index surface") {
  Rng rng(24);
  const Eigen::Index n = 400, p = 10;
  MatrixXd x = random_matrix(rng, n, p);
  MatrixXd u(n, 1);
  for (Eigen::Index i = 0; i < n; ++i)
    u(i, 0) = x(i, 0) * (x(i, 0) + x(i, 1) + 1.0);
  // noiseless data supports an aggressively refined bandwidth
  MaveOptions opts;
  opts.variant = MaveVariant::RMAVE;
  opts.refined_constant = 1.0;
  opts.max_iters = 50;
  MaveFit fit = mave_fit(x, u, 2, bandwidth(KernelSpec(2.0, p, n)), opts);
  MatrixXd truth(p, 2);
  truth.setZero();
  truth(0, 0) = 1.0;
  truth(1, 1) = 1.0;
  CHECK(subspace_distance(fit.basis, Basis(truth)) < 0.05);
  CHECK(fit.basis.entries().cols() == 2);
}

TEST_CASE("mave objective trace is non-increasing") {
  Rng rng(25);
  const Eigen::Index n = 250, p = 5;
  MatrixXd x = random_matrix(rng, n, p);
  MatrixXd u(n, 1);
  for (Eigen::Index i = 0; i < n; ++i)
    u(i, 0) = std::tanh(x(i, 0) + 0.5 * x(i, 2)) + 0.2 * rng.normal();
  MaveFit fit = mave_fit(x, u, 1, 0.6);
  REQUIRE(fit.objective_trace.size() >= 2);
  for (std::size_t t = 1; t < fit.objective_trace.size(); ++t)
    CHECK(fit.objective_trace[t] <= fit.objective_trace[t - 1] + 1e-10);
}

TEST_CASE("mave output has orthonormal columns") {
  Rng rng(26);
  MatrixXd x = random_matrix(rng, 200, 4);
  MatrixXd u(200, 1);
  for (Eigen::Index i = 0; i < 200; ++i)
    u(i, 0) = x(i, 0) + 0.3 * rng.normal();
  MaveFit fit = mave_fit(x, u, 1, 0.6);
  const MatrixXd b = fit.basis.entries();
  CHECK((b.transpose() * b - MatrixXd::Identity(1, 1)).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("mave invariant under observation relabeling") {
  Rng rng(27);
  const Eigen::Index n = 150, p = 4;
  MatrixXd x = random_matrix(rng, n, p);
  MatrixXd u(n, 1);
  for (Eigen::Index i = 0; i < n; ++i)
    u(i, 0) = x(i, 1) * x(i, 1) + 0.2 * rng.normal();

  std::vector<Eigen::Index> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
  for (Eigen::Index i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.index(static_cast<std::size_t>(i) + 1)]);
  MatrixXd xp(n, p);
  MatrixXd up(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    xp.row(i) = x.row(perm[i]);
    up.row(i) = u.row(perm[i]);
  }
  MaveFit f1 = mave_fit(x, u, 1, 0.6);
  MaveFit f2 = mave_fit(xp, up, 1, 0.6);
  CHECK(subspace_distance(f1.basis, f2.basis) < 1e-6);
}

TEST_CASE("rmave converges on a noisy single index model") {
  Rng rng(28);
  const Eigen::Index n = 300, p = 6;
  MatrixXd x = random_matrix(rng, n, p);
  MatrixXd u(n, 1);
  for (Eigen::Index i = 0; i < n; ++i)
    u(i, 0) = std::exp(0.5 * x(i, 0)) + 0.2 * rng.normal();
  MaveOptions opts;
  opts.variant = MaveVariant::RMAVE;
  MaveFit fit = mave_fit(x, u, 1, bandwidth(KernelSpec(1.5, p, n)), opts);
  VectorXd e1 = VectorXd::Zero(p);
  e1(0) = 1.0;
  CHECK(subspace_distance(fit.basis, Basis(e1)) < 0.35);
}

TEST_CASE("invalid mave inputs rejected") {
  MatrixXd x = MatrixXd::Random(30, 3);
  MatrixXd u = MatrixXd::Random(30, 1);
  CHECK_THROWS_AS(mave_fit(x, u, 0, 0.5), InvalidInputError);
  CHECK_THROWS_AS(mave_fit(x, u, 4, 0.5), InvalidInputError);
  CHECK_THROWS_AS(mave_fit(x, MatrixXd::Random(29, 1), 1, 0.5), DimensionError);
}

TEST_CASE("ensemble central subspace is deterministic in the seed") {
  Rng rng(29);
  const Eigen::Index n = 150, p = 5;
  MatrixXd x = random_matrix(rng, n, p);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y(i) = x(i, 0) + 0.5 * rng.normal();
  Basis b1 = ensemble_central_subspace(x, y, 2, 77);
  Basis b2 = ensemble_central_subspace(x, y, 2, 77);
  CHECK((b1.entries() - b2.entries()).cwiseAbs().maxCoeff() == 0.0);
  Basis b3 = ensemble_central_subspace(x, y, 2, 78);
  CHECK((b1.entries() - b3.entries()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("ensemble invariant under affine response rescaling") {
  Rng rng(30);
  const Eigen::Index n = 150, p = 5;
  MatrixXd x = random_matrix(rng, n, p);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y(i) = std::sin(x(i, 0)) + 0.3 * rng.normal();
  Basis b1 = ensemble_central_subspace(x, y, 2, 5);
  Basis b2 = ensemble_central_subspace(x, 5.0 * y.array() + 2.0, 2, 5);
  CHECK(subspace_distance(b1, b2) < 1e-6);
}

TEST_CASE("ensemble captures mean and variance directions") {
  Rng rng(31);
  const Eigen::Index n = 500, p = 10;
  MatrixXd x = random_matrix(rng, n, p);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y(i) = x(i, 0) + (1.0 + std::abs(x(i, 1))) * rng.normal();
  EnsembleOptions opts;
  opts.bandwidth_constant = 2.0;
  opts.mave.variant = MaveVariant::RMAVE;
  opts.mave.refined_constant = 2.34;
  Basis fit = ensemble_central_subspace(x, y, 3, 13, opts);
  MatrixXd truth(p, 2);
  truth.setZero();
  truth(0, 0) = 1.0;
  truth(1, 1) = 1.0;
  CHECK(containment_gap(Basis(truth), fit) < 0.5);
}
