#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "platoon/errors.hpp"
#include "platoon/numerics.hpp"
#include "platoon/plant.hpp"

using namespace platoon;
using numerics::Matrix;

TEST_CASE("expm of zero and diagonal matrices") {
  CHECK(oracle::max_abs_diff(numerics::expm(Matrix::Zero(5, 5)), Matrix::Identity(5, 5)) <= 1e-15);

  Eigen::VectorXd d(4);
  d << -3.0, 0.25, 1.5, -0.01;
  const Matrix e = numerics::expm(d.asDiagonal().toDenseMatrix());
  for (int i = 0; i < 4; ++i) {
    CHECK(e(i, i) == doctest::Approx(std::exp(d(i))).epsilon(1e-14));
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(e(i, j) == 0.0);
    }
  }
}

TEST_CASE("expm rejects bad input") {
  CHECK_THROWS_AS(numerics::expm(Matrix::Zero(2, 3)), DimensionError);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = std::nan("");
  CHECK_THROWS_AS(numerics::expm(m), DomainError);
}

TEST_CASE("expm of the two-follower string matches the Taylor oracle") {
  plant::StringConfig cfg;
  cfg.n = 2;
  const Matrix a = plant::build_string(cfg).a * cfg.sample_interval;
  const Matrix ours = numerics::expm(a);
  const Matrix ref = oracle::taylor_expm(a);
  const double scale = ref.cwiseAbs().maxCoeff();
  CHECK(oracle::max_abs_diff(ours, ref) <= 1e-12 * scale);
}

TEST_CASE("expm of large-norm matrices uses scaling correctly") {
  Matrix m(2, 2);
  m << 0.0, 6.0, -6.0, 0.0;  // rotation by 6 rad
  const Matrix e = numerics::expm(m);
  CHECK(e(0, 0) == doctest::Approx(std::cos(6.0)).epsilon(1e-12));
  CHECK(e(0, 1) == doctest::Approx(std::sin(6.0)).epsilon(1e-12));
}

TEST_CASE("property: expm(M) expm(-M) = I for random matrices") {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = gen.integer(1, 12);
    Matrix m = gen.matrix(dim, dim, 1.0);
    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    m *= gen.uniform(0.0, 10.0) / norm1;
    const Matrix prod = numerics::expm(m) * numerics::expm(-m);
    INFO("trial " << trial << " dim " << dim);
    CHECK(oracle::max_abs_diff(prod, Matrix::Identity(dim, dim)) <= 1e-8);
  }
}

TEST_CASE("zoh_integral closed forms") {
  CHECK(numerics::zoh_integral(Matrix::Zero(3, 3), 0.1).isApprox(0.1 * Matrix::Identity(3, 3), 1e-15));

  Eigen::VectorXd d(3);
  d << -2.0, 0.5, 7.0;
  const double h = 0.3;
  const Matrix z = numerics::zoh_integral(d.asDiagonal().toDenseMatrix(), h);
  for (int i = 0; i < 3; ++i) {
    CHECK(z(i, i) == doctest::Approx(std::expm1(d(i) * h) / d(i)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(numerics::zoh_integral(Matrix::Zero(2, 2), 0.0), DomainError);
  CHECK_THROWS_AS(numerics::zoh_integral(Matrix::Zero(2, 2), -1.0), DomainError);
}

TEST_CASE("zoh_integral of the string matrix matches Simpson quadrature") {
  plant::StringConfig cfg;
  cfg.n = 2;
  const Matrix a = plant::build_string(cfg).a;
  const Matrix ours = numerics::zoh_integral(a, 0.1);
  const Matrix ref = oracle::simpson_zoh(a, 0.1);
  CHECK(oracle::max_abs_diff(ours, ref) <= 1e-8);
}

TEST_CASE("ramp_integral matches Simpson quadrature of (h - v) e^{Mv}") {
  Matrix m(2, 2);
  m << -1.0, 0.5, 0.0, -3.0;
  const double h = 0.4;
  const int panels = 2000;
  Matrix acc = Matrix::Zero(2, 2);
  const double dx = h / (2 * panels);
  for (int j = 0; j <= 2 * panels; ++j) {
    const double v = j * dx;
    const double w = (j == 0 || j == 2 * panels) ? 1 : (j % 2 ? 4 : 2);
    acc += w * (h - v) * oracle::taylor_expm(m * v);
  }
  acc *= dx / 3;
  CHECK(oracle::max_abs_diff(numerics::ramp_integral(m, h), acc) <= 1e-12);
}

TEST_CASE("property: zoh fundamental theorem for random invertible matrices") {
  oracle::Gen gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = gen.integer(1, 10);
    Matrix m = gen.matrix(dim, dim, 2.0) + gen.uniform(-3, 3) * Matrix::Identity(dim, dim);
    if (std::fabs(m.determinant()) < 1e-3) continue;
    const double h = gen.uniform(0.01, 1.0);
    const Matrix lhs = numerics::zoh_integral(m, h) * m + Matrix::Identity(dim, dim);
    const Matrix rhs = numerics::expm(m * h);
    INFO("trial " << trial);
    CHECK(oracle::max_abs_diff(lhs, rhs) <= 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("bessel_i0 against series and quadrature oracles") {
  CHECK(numerics::bessel_i0(0.0) == 1.0);
  CHECK(numerics::bessel_i0(1.0) == doctest::Approx(oracle::bessel_i0_series(1.0)).epsilon(1e-14));
  for (double x : {0.3, 2.0, 5.0, 9.5, 15.0}) {
    CHECK(numerics::bessel_i0(x) == doctest::Approx(oracle::bessel_i0_series(x, 80)).epsilon(1e-13));
  }
  for (double x : {1.0, 20.0, 100.0, 700.0}) {
    CHECK(numerics::bessel_i0e(x) == doctest::Approx(oracle::bessel_i0e_quadrature(x)).epsilon(1e-12));
  }
  CHECK(numerics::bessel_i0(-2.5) == numerics::bessel_i0(2.5));
  CHECK_THROWS_AS(numerics::bessel_i0(std::nan("")), DomainError);
}

TEST_CASE("property: bessel_i0 is at least one and strictly increasing") {
  double prev = numerics::bessel_i0(0.0);
  CHECK(prev >= 1.0);
  for (int j = 1; j <= 2000; ++j) {
    const double x = 0.35 * j;  // up to 700
    const double v = numerics::bessel_i0(x);
    REQUIRE(v >= 1.0);
    REQUIRE(v > prev);
    prev = v;
  }
}

TEST_CASE("marcum_q1 reductions") {
  for (double a : {0.0, 0.5, 3.0, 12.0}) CHECK(numerics::marcum_q1(a, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (double b : {0.1, 1.0, 2.5, 6.0}) {
    CHECK(numerics::marcum_q1(0.0, b) == doctest::Approx(std::exp(-b * b / 2)).epsilon(1e-13));
  }
  CHECK(numerics::marcum_q1(2.0, 1.0) == doctest::Approx(oracle::marcum_q1_quadrature(2.0, 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(numerics::marcum_q1(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(numerics::marcum_q1(1.0, -1.0), DomainError);
}

TEST_CASE("marcum_q1 series and fallback agree with quadrature across the switch") {
  // a·b straddles 30, where the series hands over to quadrature.
  for (double a : {4.0, 5.0, 6.0, 8.0}) {
    for (double b : {3.0, 5.5, 6.0, 7.5, 9.0}) {
      INFO("a=" << a << " b=" << b);
      CHECK(std::fabs(numerics::marcum_q1(a, b) - oracle::marcum_q1_quadrature(a, b)) <= 1e-10);
    }
  }
}

// Monotone up to a few ulps where Q₁ saturates at 1.
TEST_CASE("property: marcum_q1 monotone on a 50x50 grid") {
  constexpr double kUlp = 1e-14;
  constexpr int kN = 50;
  double q[kN][kN];
  for (int i = 0; i < kN; ++i)
    for (int j = 0; j < kN; ++j) q[i][j] = numerics::marcum_q1(0.2 * i, 0.2 * j);
  for (int i = 0; i < kN; ++i) {
    for (int j = 0; j < kN; ++j) {
      if (j + 1 < kN) REQUIRE(q[i][j + 1] <= q[i][j] + kUlp);
      if (i + 1 < kN) REQUIRE(q[i + 1][j] >= q[i][j] - kUlp);
      REQUIRE(q[i][j] >= 0.0);
      REQUIRE(q[i][j] <= 1.0);
    }
  }
}
