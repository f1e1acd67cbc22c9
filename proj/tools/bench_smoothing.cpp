// Timing comparison of the OpenMP local-linear kernel against the
// serial reference on a synthetic regression surface.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "see/rng.hpp"
#include "see/smoothing.hpp"

using namespace see;

int main(int argc, char** argv) {
  const Eigen::Index n = argc > 1 ? std::atol(argv[1]) : 2000;
  const int q = argc > 2 ? std::atoi(argv[2]) : 3;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 3;

  Rng rng(42);
  MatrixXd z(n, q);
  VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) z(i, j) = rng.normal();
    u(i) = std::sin(z(i, 0)) + 0.1 * rng.normal();
  }
  const double h = bandwidth(KernelSpec(1.0, q, n));

  auto time_it = [&](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
  };

  LocalFit serial, parallel;
  const double t_serial =
      time_it([&] { serial = local_linear_fit_serial(z, u, h, z); });
  const double t_parallel =
      time_it([&] { parallel = local_linear_fit(z, u, h, z); });

  const double diff = (serial.intercepts - parallel.intercepts)
                          .cwiseAbs()
                          .maxCoeff();
  std::printf("n=%ld q=%d h=%.4f\n", static_cast<long>(n), q, h);
  std::printf("serial   %.4f s/run\n", t_serial);
  std::printf("openmp   %.4f s/run  (speedup %.2fx)\n", t_parallel,
              t_serial / t_parallel);
  std::printf("max |serial - openmp| = %.3g\n", diff);
  return diff < 1e-12 ? 0 : 1;
}
