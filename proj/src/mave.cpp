#include "see/mave.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "see/rng.hpp"
#include "see/smoothing.hpp"

namespace see {

namespace {

// pairwise product-Gaussian weights K_h(Z_j - Z_i), normalized so each
// row sums to 1; raw kernel mass per center reported through `mass`
MatrixXd pairwise_weights(const MatrixXd& z, double h, VectorXd& mass) {
  const Eigen::Index n = z.rows();
  MatrixXd w(n, n);
  mass.resize(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      w(i, j) = std::exp(-0.5 * (z.row(j) - z.row(i)).squaredNorm() / (h * h));
    mass(i) = w.row(i).sum();
    w.row(i) /= mass(i);
  }
  return w;
}

// copy of w with the rows of the lowest-mass trim_fraction of centers
// zeroed, removing sparse-region centers from the objective
MatrixXd trimmed_weights(const MatrixXd& w, const VectorXd& mass,
                         double trim_fraction) {
  const Eigen::Index n = w.rows();
  const Eigen::Index k = static_cast<Eigen::Index>(
      std::floor(trim_fraction * static_cast<double>(n)));
  if (k < 1 || k >= n) return w;
  std::vector<double> sorted(mass.data(), mass.data() + n);
  std::nth_element(sorted.begin(), sorted.begin() + k, sorted.end());
  const double cut = sorted[k];
  MatrixXd out = w;
  for (Eigen::Index i = 0; i < n; ++i)
    if (mass(i) < cut) out.row(i).setZero();
  return out;
}

// objective with per-center normalized weights, evaluated at the
// current (a, b, A)
double objective_value(const MatrixXd& x, const MatrixXd& u, const MatrixXd& w,
                       const MatrixXd& a, const MatrixXd& b,
                       const MatrixXd& amat) {
  const Eigen::Index n = x.rows(), m = u.cols(), d = amat.cols();
  MatrixXd z = x * amat;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij < 1e-14) continue;
      double term = 0.0;
      for (Eigen::Index l = 0; l < m; ++l) {
        double pred = a(i, l);
        for (Eigen::Index k = 0; k < d; ++k)
          pred += b(i, l * d + k) * (z(j, k) - z(i, k));
        const double r = u(j, l) - pred;
        term += r * r;
      }
      total += wij * term;
    }
  }
  return total;
}

// least-squares update of A with (a, b) fixed; linear in vec(A)
MatrixXd update_a_matrix(const MatrixXd& x, const MatrixXd& u, const MatrixXd& w,
                         const MatrixXd& a, const MatrixXd& b, Eigen::Index d) {
  const Eigen::Index n = x.rows(), p = x.cols(), m = u.cols();
  const Eigen::Index pd = p * d;
  MatrixXd gram = MatrixXd::Zero(pd, pd);
  VectorXd rhs = VectorXd::Zero(pd);

  // gram = sum_i B_i (x) D_i with B_i = sum_l b_il b_il',
  // D_i = sum_j w_ij d_ij d_ij' (Kronecker structure of the normal
  // equations); rhs accumulated pairwise
  for (Eigen::Index i = 0; i < n; ++i) {
    MatrixXd bi = MatrixXd::Zero(d, d);
    for (Eigen::Index l = 0; l < m; ++l) {
      VectorXd bl = b.row(i).segment(l * d, d).transpose();
      bi.noalias() += bl * bl.transpose();
    }
    MatrixXd di = MatrixXd::Zero(p, p);
    VectorXd s = VectorXd::Zero(d);  // reused per j
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij < 1e-14) continue;
      VectorXd diff = (x.row(j) - x.row(i)).transpose();
      di.noalias() += wij * diff * diff.transpose();
      s.setZero();
      for (Eigen::Index l = 0; l < m; ++l) {
        const double r = u(j, l) - a(i, l);
        s += r * b.row(i).segment(l * d, d).transpose();
      }
      for (Eigen::Index k = 0; k < d; ++k)
        rhs.segment(k * p, p) += (wij * s(k)) * diff;
    }
    for (Eigen::Index k1 = 0; k1 < d; ++k1)
      for (Eigen::Index k2 = 0; k2 < d; ++k2)
        gram.block(k1 * p, k2 * p, p, p) += bi(k1, k2) * di;
  }

  VectorXd veca = gram.ldlt().solve(rhs);
  if (!veca.allFinite() ||
      (gram * veca - rhs).norm() > 1e-8 * (rhs.norm() + 1.0))
    veca = moore_penrose(gram) * rhs;

  MatrixXd amat(p, d);
  for (Eigen::Index k = 0; k < d; ++k) amat.col(k) = veca.segment(k * p, p);
  return amat;
}

}  // namespace

Basis opg_fit(const MatrixXd& x, const MatrixXd& u, Eigen::Index d, double h) {
  const Eigen::Index n = x.rows(), p = x.cols(), m = u.cols();
  if (d < 1 || d > p) throw InvalidInputError("opg_fit: need 1 <= d <= p");
  LocalFit fit = local_linear_fit(x, u, h, x);
  MatrixXd outer = MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index l = 0; l < m; ++l) {
      VectorXd bl = fit.slopes.row(i).segment(l * p, p).transpose();
      outer.noalias() += bl * bl.transpose();
    }
  outer /= static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(outer);
  MatrixXd basis(p, d);
  for (Eigen::Index k = 0; k < d; ++k) basis.col(k) = eig.eigenvectors().col(p - 1 - k);
  return Basis(basis);
}

MaveFit mave_fit(const MatrixXd& x, const MatrixXd& u, Eigen::Index d, double h,
                 const MaveOptions& opts) {
  const Eigen::Index p = x.cols();
  if (d < 1 || d > p) throw InvalidInputError("mave_fit: need 1 <= d <= p");
  if (opts.variant == MaveVariant::OPG)
    return MaveFit{opg_fit(x, u, d, h), true, 0, {}};

  MatrixXd amat = opg_fit(x, u, d, h).entries();
  const bool refine = opts.variant == MaveVariant::RMAVE;
  VectorXd mass;
  MatrixXd w = refine ? MatrixXd() : pairwise_weights(x, h, mass);
  const double h_floor =
      opts.refined_constant > 0.0
          ? opts.refined_constant *
                std::pow(static_cast<double>(x.rows()),
                         -1.0 / (static_cast<double>(d) + 4.0))
          : opts.min_bandwidth_factor * h;
  double ht = h;

  MaveFit result{Basis(amat), false, 0, {}};
  for (int t = 0; t < opts.max_iters; ++t) {
    MatrixXd z = x * amat;
    try {
      if (refine) {
        w = pairwise_weights(z, ht, mass);
        ht = std::max(opts.bandwidth_decay * ht, h_floor);
      }
      LocalFit fit = local_linear_fit_weighted(z, u, w, z);
      const MatrixXd wt = opts.trim_fraction > 0.0
                              ? trimmed_weights(w, mass, opts.trim_fraction)
                              : w;
      result.objective_trace.push_back(
          objective_value(x, u, wt, fit.intercepts, fit.slopes, amat));

      MatrixXd next = update_a_matrix(x, u, wt, fit.intercepts, fit.slopes, d);
      Basis next_basis = Basis(next).orthonormalized();
      const double step = subspace_distance(Basis(amat), next_basis);
      amat = next_basis.entries();
      result.iterations = t + 1;
      if (step < opts.tol) {
        result.converged = true;
        break;
      }
    } catch (const DegenerateNeighborhoodError&) {
      // a refined bandwidth got too small for some neighborhood; keep
      // the last usable iterate
      if (t == 0) throw;
      break;
    }
  }
  result.basis = Basis(amat);
  return result;
}

Basis ensemble_central_subspace(const MatrixXd& x, const VectorXd& y,
                                Eigen::Index d, std::uint64_t seed,
                                const EnsembleOptions& opts) {
  const Eigen::Index n = x.rows();
  if (y.size() != n)
    throw DimensionError("ensemble_central_subspace: X and Y sizes differ");
  const double mean = y.mean();
  double sd = std::sqrt((y.array() - mean).square().sum() /
                        static_cast<double>(n > 1 ? n - 1 : 1));
  if (sd < 1e-300) sd = 1.0;
  VectorXd ys = (y.array() - mean) / sd;

  Rng rng = Rng::derive(seed, 0x45534Eull);  // ensemble stream
  const int nf = opts.frequency_count;
  MatrixXd u(n, 2 * nf);
  for (int i = 0; i < nf; ++i) {
    const double t = rng.uniform(0.0, opts.frequency_range);
    u.col(2 * i) = (t * ys.array()).sin();
    u.col(2 * i + 1) = (t * ys.array()).cos();
  }

  const double h =
      bandwidth(KernelSpec(opts.bandwidth_constant, static_cast<int>(x.cols()), n));
  return mave_fit(x, u, d, h, opts.mave).basis.orthonormalized();
}

}  // namespace see
