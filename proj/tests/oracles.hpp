#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics; these are deliberately slow, simple formulas.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Taylor series in long double with power-of-two scaling so the series
// argument has 1-norm below 1/2; 30 terms is then far below double eps.
inline Eigen::MatrixXd taylor_expm(const Eigen::MatrixXd& m, int terms = 30) {
  LMatrix a = m.cast<long double>();
  long double norm = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) norm = std::max(norm, a.col(j).cwiseAbs().sum());
  int s = 0;
  while (norm > 0.5L) {
    norm /= 2;
    ++s;
  }
  a /= std::ldexp(1.0L, s);
  LMatrix sum = LMatrix::Identity(a.rows(), a.cols());
  LMatrix term = sum;
  for (int k = 1; k <= terms; ++k) {
    term = term * a / static_cast<long double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum.cast<double>();
}

// Composite Simpson rule for ∫₀ʰ e^{Mν} dν, walking e^{Mν} forward by
// repeated multiplication with the Taylor oracle of one panel half-step.
inline Eigen::MatrixXd simpson_zoh(const Eigen::MatrixXd& m, double h, int panels = 10000) {
  const long double dx = static_cast<long double>(h) / (2 * panels);
  const LMatrix e = taylor_expm(m * static_cast<double>(dx)).cast<long double>();
  LMatrix cur = LMatrix::Identity(m.rows(), m.cols());
  LMatrix acc = cur;
  for (int j = 1; j <= 2 * panels; ++j) {
    cur = cur * e;
    const long double w = j == 2 * panels ? 1 : (j % 2 ? 4 : 2);
    acc += w * cur;
  }
  return (acc * dx / 3).cast<double>();
}

inline double bessel_i0_series(double x, int terms = 50) {
  long double sum = 0, term = 1, q = static_cast<long double>(x) * x / 4;
  for (int k = 0; k < terms; ++k) {
    sum += term;
    term *= q / ((k + 1.0L) * (k + 1.0L));
  }
  return static_cast<double>(sum);
}

// e^{-x} I₀(x) = (1/π) ∫₀^π e^{x(cos θ − 1)} dθ; trapezoid on a periodic
// integrand converges geometrically.
inline double bessel_i0e_quadrature(double x, int nodes = 20000) {
  long double acc = 0;
  const long double pi = 3.141592653589793238462643383279502884L;
  for (int j = 0; j <= nodes; ++j) {
    const long double th = pi * j / nodes;
    const long double w = (j == 0 || j == nodes) ? 0.5L : 1.0L;
    acc += w * std::exp(static_cast<long double>(x) * (std::cos(th) - 1));
  }
  return static_cast<double>(acc / nodes);
}

// Adaptive Simpson on [lo, hi].
inline double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                               double tol, int depth = 40) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double a, double b, double fa, double fm, double fb, double whole, double eps,
          int d) -> double {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (d <= 0 || std::fabs(left + right - whole) <= 15 * eps) {
      return left + right + (left + right - whole) / 15;
    }
    return rec(a, m, fa, flm, fm, left, eps / 2, d - 1) + rec(m, b, fm, frm, fb, right, eps / 2, d - 1);
  };
  const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
  return rec(lo, hi, fa, fm, fb, (hi - lo) / 6 * (fa + 4 * fm + fb), tol, depth);
}

// Q₁(a, b) = ∫_b^∞ x e^{−(x²+a²)/2} I₀(ax) dx, split at unit panels so the
// Rician bump is always resolved.
inline double marcum_q1_quadrature(double a, double b) {
  auto f = [a](double x) {
    return x * std::exp(-(x * x + a * a) / 2) * std::cyl_bessel_i(0.0, a * x);
  };
  const double hi = std::max(a, b) + 40.0;
  double acc = 0;
  for (double lo = b; lo < hi; lo += 1.0) acc += adaptive_simpson(f, lo, std::min(lo + 1.0, hi), 1e-15);
  return acc;
}

// P(γ ≥ γ_th) for the Rician SINR pdf
// (1+K)e^{−K}/γ̄ · e^{−(1+K)γ/γ̄} · I₀(2√(K(1+K)γ/γ̄)).
inline double rician_tail(double gamma_bar, double k, double gamma_th) {
  auto pdf = [=](double g) {
    const double z = 2 * std::sqrt(k * (1 + k) * g / gamma_bar);
    return (1 + k) * std::exp(-k) / gamma_bar * std::exp(-(1 + k) * g / gamma_bar) *
           std::cyl_bessel_i(0.0, z);
  };
  const double hi = gamma_th + 80 * gamma_bar;
  const double panel = gamma_bar / 4;
  double acc = 0;
  for (double lo = gamma_th; lo < hi; lo += panel) acc += adaptive_simpson(pdf, lo, std::min(lo + panel, hi), 1e-16);
  return acc;
}

// Hold-last closed form: ũ[k] = Σ_{m=0}^{k} u[m] β^m Π_{l=m+1}^{k} (1 − β^l),
// evaluated with β^0 = 1.
inline std::vector<double> hold_closed_form(const std::vector<int>& beta, const std::vector<double>& u) {
  std::vector<double> out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    double acc = 0;
    for (std::size_t m = 0; m <= k; ++m) {
      double w = m == 0 ? 1.0 : beta[m];
      for (std::size_t l = m + 1; l <= k; ++l) w *= 1.0 - beta[l];
      acc += u[m] * w;
    }
    out[k] = acc;
  }
  return out;
}

// Largest-norm check helper.
inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Hand-rolled generator for property tests.
struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(eng);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  bool coin(double p = 0.5) { return uniform(0, 1) < p; }
  Eigen::MatrixXd matrix(int rows, int cols, double scale) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = uniform(-scale, scale);
    return m;
  }
};

}  // namespace oracle
