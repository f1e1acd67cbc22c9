#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "see/functionals.hpp"
#include "see/rng.hpp"

using namespace see;

namespace {

MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("functional transforms") {
  CHECK(FunctionalSpec::mean().transform(3.0) == doctest::Approx(3.0));
  CHECK(FunctionalSpec::moment(2).transform(3.0) == doctest::Approx(9.0));
  CHECK(FunctionalSpec::moment(3).transform(-2.0) == doctest::Approx(-8.0));
  auto f = FunctionalSpec::mean([](double y) { return std::exp(y); });
  CHECK(f.transform(1.0) == doctest::Approx(std::exp(1.0)));
  CHECK_THROWS_AS(FunctionalSpec::quantile(0.0), InvalidInputError);
  CHECK_THROWS_AS(FunctionalSpec::quantile(1.0), InvalidInputError);
  CHECK_THROWS_AS(FunctionalSpec::moment(0), InvalidInputError);
}

TEST_CASE("weighted quantile") {
  VectorXd y(4), w(4);
  y << 1, 2, 3, 4;
  w << 1, 1, 1, 1;
  CHECK(weighted_quantile(y, w, 0.5) == doctest::Approx(2.0));
  CHECK(weighted_quantile(y, w, 0.75) == doctest::Approx(3.0));
  CHECK(weighted_quantile(y, w, 0.9) == doctest::Approx(4.0));
  VectorXd w2(4);
  w2 << 10, 1, 1, 1;
  CHECK(weighted_quantile(y, w2, 0.5) == doctest::Approx(1.0));
  // order of observations must not matter
  VectorXd y3(4), w3(4);
  y3 << 4, 1, 3, 2;
  w3 << 1, 1, 1, 1;
  CHECK(weighted_quantile(y3, w3, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("mean and moment proxies are the transformed response") {
  Rng rng(41);
  MatrixXd x = random_matrix(rng, 50, 2);
  VectorXd y = random_matrix(rng, 50, 1);
  ProxyContext ctx = proxy_response(FunctionalSpec::mean(), x, y, 0.5);
  CHECK((ctx.proxy - y).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(ctx.auxiliary.has_value());

  ProxyContext ctx2 = proxy_response(FunctionalSpec::moment(2), x, y, 0.5);
  CHECK((ctx2.proxy.array() - y.array().square()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("variance proxy recovers a constant conditional variance") {
  Rng rng(42);
  const Eigen::Index n = 5000;
  MatrixXd x = random_matrix(rng, n, 1);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = 2.0 + rng.normal();
  ProxyContext ctx = proxy_response(FunctionalSpec::variance(), x, y, 0.4);
  CHECK(ctx.proxy.mean() == doctest::Approx(1.0).epsilon(0.1));
  REQUIRE(ctx.auxiliary.has_value());
  CHECK(ctx.auxiliary->mean() == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("quantile proxy on a degenerate response") {
  Rng rng(43);
  MatrixXd x = random_matrix(rng, 100, 1);
  VectorXd y = VectorXd::Constant(100, 5.0);
  ProxyContext ctx = proxy_response(FunctionalSpec::quantile(0.5), x, y, 0.5);
  CHECK((ctx.proxy.array() - 5.0).abs().maxCoeff() < 1e-12);
  REQUIRE(ctx.density_at_quantile.has_value());
  CHECK(ctx.density_at_quantile->minCoeff() > 0.0);
}

TEST_CASE("quantile proxy tracks a shifting conditional median") {
  Rng rng(44);
  const Eigen::Index n = 3000;
  MatrixXd x = random_matrix(rng, n, 1);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = x(i, 0) + 0.3 * rng.normal();
  ProxyContext ctx = proxy_response(FunctionalSpec::quantile(0.5), x, y, 0.3);
  double err = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(x(i, 0)) > 1.5) continue;  // skip thin tails
    err += std::abs(ctx.proxy(i) - x(i, 0));
    ++count;
  }
  CHECK(err / count < 0.1);
}

TEST_CASE("tau_c vanishes for a mean functional with a linear response") {
  Rng rng(45);
  const Eigen::Index n = 400;
  MatrixXd x = random_matrix(rng, n, 3);
  VectorXd beta = VectorXd::Zero(3);
  beta(0) = 1.0;
  VectorXd y = x * beta;
  ProxyContext ctx = proxy_response(FunctionalSpec::mean(), x, y, 0.5);
  VectorXd tau = tau_c(FunctionalSpec::mean(), x, y, Basis(beta), ctx, 0.3);
  CHECK(tau.cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("tau_c for a mean functional centers the proxy") {
  Rng rng(46);
  const Eigen::Index n = 500;
  MatrixXd x = random_matrix(rng, n, 2);
  VectorXd beta(2);
  beta << 1.0, 0.0;
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = x(i, 0) + rng.normal();
  ProxyContext ctx = proxy_response(FunctionalSpec::mean(), x, y, 0.5);
  VectorXd tau = tau_c(FunctionalSpec::mean(), x, y, Basis(beta), ctx, 0.3);
  // sample mean of the centered representation is near zero
  CHECK(std::abs(tau.mean()) < 0.05);
}

TEST_CASE("tau_c for a quantile takes the two-point form") {
  Rng rng(47);
  const Eigen::Index n = 300;
  const double p = 0.75;
  MatrixXd x = random_matrix(rng, n, 2);
  VectorXd beta(2);
  beta << 1.0, 0.0;
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.normal();
  ProxyContext ctx = proxy_response(FunctionalSpec::quantile(p), x, y, 0.6);
  VectorXd tau = tau_c(FunctionalSpec::quantile(p), x, y, Basis(beta), ctx, 0.4);
  // sign(Y - xi) + 2p - 1 is either 2p or 2p - 2, scaled by 1/(2 eta0)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = (*ctx.density_at_quantile)(i);
    const double scaled = tau(i) * 2.0 * eta;
    const bool upper = std::abs(scaled - 2.0 * p) < 1e-9;
    const bool lower = std::abs(scaled - (2.0 * p - 2.0)) < 1e-9;
    CHECK((upper || lower));
  }
}

TEST_CASE("q2 for a homoskedastic mean model") {
  Rng rng(48);
  const Eigen::Index n = 5000;
  MatrixXd x = random_matrix(rng, n, 2);
  VectorXd beta(2);
  beta << 1.0, 0.0;
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = x(i, 0) + 0.5 * rng.normal();
  ProxyContext ctx = proxy_response(FunctionalSpec::mean(), x, y, 0.4);
  VectorXd q2 =
      q2_values(FunctionalSpec::mean(), x, y, Basis(beta), ctx, 0.4, 0.3);
  double med_err = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x.row(i).cwiseAbs().maxCoeff() > 1.5) continue;
    med_err += q2(i);
    ++count;
  }
  CHECK(med_err / count == doctest::Approx(0.25).epsilon(0.2));
  CHECK(q2.minCoeff() > 0.0);
}

TEST_CASE("q2 for a quantile matches its density identity exactly") {
  Rng rng(49);
  const Eigen::Index n = 200;
  const double p = 0.3;
  MatrixXd x = random_matrix(rng, n, 2);
  VectorXd beta(2);
  beta << 0.0, 1.0;
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.normal();
  ProxyContext ctx = proxy_response(FunctionalSpec::quantile(p), x, y, 0.6);
  VectorXd q2 =
      q2_values(FunctionalSpec::quantile(p), x, y, Basis(beta), ctx, 0.6, 0.4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = (*ctx.density_at_quantile)(i);
    CHECK(q2(i) * eta * eta == doctest::Approx((1.0 - p) * p).epsilon(1e-9));
  }
}

TEST_CASE("q2 is floored away from zero on degenerate data") {
  Rng rng(50);
  MatrixXd x = random_matrix(rng, 80, 2);
  VectorXd y = VectorXd::Constant(80, 1.0);
  ProxyContext ctx = proxy_response(FunctionalSpec::mean(), x, y, 0.5);
  VectorXd q2 = q2_values(FunctionalSpec::mean(), x, y,
                          Basis(MatrixXd::Identity(2, 1)), ctx, 0.5, 0.4);
  CHECK(q2.minCoeff() > 0.0);
}
