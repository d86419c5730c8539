#include "fbvar/error.hpp"
#include "fbvar/synthetic.hpp"
#include "fbvar/var_core.hpp"

#include <doctest.h>

#include <random>

using namespace fbvar;

namespace {

VarCoefficients scalar_ar(std::vector<double> lags) {
  VarCoefficients c;
  c.intercept = Eigen::VectorXd::Zero(1);
  for (double v : lags) c.lags.push_back(Eigen::MatrixXd::Constant(1, 1, v));
  return c;
}

/// Random system with companion spectral radius below 0.9.
VarCoefficients random_stable(int n, int p, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  VarCoefficients c;
  c.intercept = Eigen::VectorXd::NullaryExpr(n, [&] { return g(rng); });
  for (int j = 0; j < p; ++j) c.lags.push_back(Eigen::MatrixXd::NullaryExpr(n, n, [&] { return 0.5 * g(rng); }));
  const double rho = spectral_radius(companion(c));
  if (rho >= 0.9) {
    const double s = 0.85 / rho;
    for (int j = 0; j < p; ++j) c.lags[j] *= std::pow(s, j + 1);
  }
  return c;
}

}  // namespace

TEST_CASE("regressor construction") {
  SUBCASE("dimensions") {
    const Eigen::MatrixXd y = Eigen::MatrixXd::Random(5, 2);
    const auto r = build_regressors(y, 1);
    CHECK(r.Y.rows() == 4);
    CHECK(r.Y.cols() == 2);
    CHECK(r.X.rows() == 4);
    CHECK(r.X.cols() == 3);
    CHECK((r.X.col(0).array() == 1.0).all());
    CHECK(r.Y == y.bottomRows(4));
    CHECK(r.X.rightCols(2) == y.topRows(4));
  }
  SUBCASE("univariate with two lags") {
    Eigen::MatrixXd y(4, 1);
    y << 1, 2, 3, 4;
    const auto r = build_regressors(y, 2);
    Eigen::MatrixXd expect(2, 3);
    expect << 1, 2, 1, 1, 3, 2;
    CHECK(r.X == expect);
    CHECK(r.Y(0, 0) == 3.0);
    CHECK(r.Y(1, 0) == 4.0);
  }
  SUBCASE("lag order checks") {
    const Eigen::MatrixXd y = Eigen::MatrixXd::Random(5, 2);
    CHECK_THROWS_AS(build_regressors(y, 5), ValidationError);
    CHECK_THROWS_AS(build_regressors(y, 0), ValidationError);
    CHECK_THROWS_AS(build_regressors(y, -1), ValidationError);
  }
}

TEST_CASE("stacked layout round trip") {
  std::mt19937_64 rng(1);
  const auto c = random_stable(3, 2, rng);
  const auto stacked = c.stacked();
  CHECK(stacked.rows() == 3);
  CHECK(stacked.cols() == 7);
  CHECK(stacked.col(0) == c.intercept);
  CHECK(stacked.block(0, 4, 3, 3) == c.lags[1]);
  const auto back = VarCoefficients::from_stacked(stacked, 2);
  CHECK(back.intercept == c.intercept);
  CHECK(back.lags[0] == c.lags[0]);
  CHECK(back.lags[1] == c.lags[1]);
  CHECK_THROWS_AS(VarCoefficients::from_stacked(stacked, 3), ValidationError);
}

TEST_CASE("companion form") {
  CHECK(companion(scalar_ar({0.5})) == Eigen::MatrixXd::Constant(1, 1, 0.5));
  Eigen::MatrixXd ar2(2, 2);
  ar2 << 0.5, 0.2, 1, 0;
  CHECK(companion(scalar_ar({0.5, 0.2})) == ar2);

  std::mt19937_64 rng(2);
  const auto c = random_stable(2, 2, rng);
  const auto F = companion(c);
  REQUIRE(F.rows() == 4);
  CHECK(F.block(0, 0, 2, 2) == c.lags[0]);
  CHECK(F.block(0, 2, 2, 2) == c.lags[1]);
  CHECK(F.block(2, 0, 2, 2) == Eigen::MatrixXd::Identity(2, 2));
  CHECK(F.block(2, 2, 2, 2) == Eigen::MatrixXd::Zero(2, 2));
}

TEST_CASE("vma recursion") {
  SUBCASE("impact is the identity") {
    std::mt19937_64 rng(3);
    const auto c = random_stable(4, 3, rng);
    CHECK(vma(c, 5).psi[0] == Eigen::MatrixXd::Identity(4, 4));
    CHECK(vma(c, 0).horizon() == 0);
  }
  SUBCASE("scalar geometric decay") {
    const auto v = vma(scalar_ar({0.5}), 4);
    const double expect[] = {1, 0.5, 0.25, 0.125, 0.0625};
    for (int h = 0; h <= 4; ++h) CHECK(v.psi[h](0, 0) == expect[h]);
  }
  SUBCASE("zero lags vanish after impact") {
    VarCoefficients c;
    c.intercept = Eigen::VectorXd::Ones(3);
    c.lags.assign(2, Eigen::MatrixXd::Zero(3, 3));
    const auto v = vma(c, 6);
    for (int h = 1; h <= 6; ++h) CHECK(v.psi[h].isZero(0.0));
  }
  SUBCASE("linearity at horizon one") {
    std::mt19937_64 rng(4);
    auto c = random_stable(3, 2, rng);
    const auto base = vma(c, 1).psi[1];
    for (auto& L : c.lags) L *= 0.37;
    CHECK((vma(c, 1).psi[1] - 0.37 * base).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("negative horizon rejected") { CHECK_THROWS_AS(vma(scalar_ar({0.5}), -1), ValidationError); }
}

TEST_CASE("vma against brute-force impulse propagation") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 4), lag(1, 3);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = dim(rng), p = lag(rng);
    const auto c = random_stable(n, p, rng);
    const auto psi = vma(c, 24);
    for (int j = 0; j < n; ++j) {
      const auto brute = propagate_impulse(c.stacked(), p, Eigen::VectorXd::Unit(n, j), 24);
      for (int h = 0; h <= 24; ++h)
        worst = std::max(worst, (psi.psi[h].col(j).transpose() - brute.row(h)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("spectral radius") {
  CHECK(spectral_radius(Eigen::MatrixXd::Constant(1, 1, 0.5)) == doctest::Approx(0.5));
  Eigen::MatrixXd ar2(2, 2);
  ar2 << 0.5, 0.2, 1, 0;
  // Roots of z^2 - 0.5 z - 0.2.
  const double root = (0.5 + std::sqrt(0.25 + 0.8)) / 2.0;
  CHECK(spectral_radius(ar2) == doctest::Approx(root).epsilon(1e-12));
  CHECK(spectral_radius(ar2) == doctest::Approx(0.7623).epsilon(1e-4));
  CHECK(spectral_radius(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
  Eigen::MatrixXd rot(2, 2);
  rot << 0, -1.2, 1.2, 0;
  CHECK(spectral_radius(rot) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK_THROWS_AS(spectral_radius(Eigen::MatrixXd::Zero(2, 3)), ValidationError);
}
