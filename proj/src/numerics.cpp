#include "platoon/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "platoon/errors.hpp"

namespace platoon::numerics {

namespace {

void require_square_finite(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(who) + ": matrix must be square");
  }
  if (!m.allFinite()) {
    throw DomainError(std::string(who) + ": matrix has non-finite entries");
  }
}

// Higham (2005) degree-13 coefficients and the matching 1-norm threshold.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Matrix expm(const Matrix& m) {
  require_square_finite(m, "expm");
  const Eigen::Index n = m.rows();
  if (n == 0) return Matrix(0, 0);

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  }
  const Matrix a = m / std::ldexp(1.0, squarings);

  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const auto& b = kPade13;

  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                         b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
  const Matrix u = a * u_inner;
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * ident;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Matrix zoh_integral(const Matrix& m, double h) {
  require_square_finite(m, "zoh_integral");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError("zoh_integral: h must be positive and finite");
  }
  const Eigen::Index n = m.rows();
  Matrix aug = Matrix::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = m * h;
  aug.topRightCorner(n, n) = Matrix::Identity(n, n) * h;
  return expm(aug).topRightCorner(n, n);
}

Matrix ramp_integral(const Matrix& m, double h) {
  require_square_finite(m, "ramp_integral");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError("ramp_integral: h must be positive and finite");
  }
  const Eigen::Index n = m.rows();
  Matrix aug = Matrix::Zero(3 * n, 3 * n);
  aug.block(0, 0, n, n) = m * h;
  aug.block(0, n, n, n) = Matrix::Identity(n, n) * h;
  aug.block(n, 2 * n, n, n) = Matrix::Identity(n, n) * h;
  return expm(aug).block(0, 2 * n, n, n);
}

double bessel_i0e(double x) {
  if (std::isnan(x)) throw DomainError("bessel_i0e: NaN argument");
  x = std::fabs(x);
  if (std::isinf(x)) return 0.0;

  if (x <= 25.0) {
    // Power series Σ (x²/4)^k / (k!)²; all terms positive.
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return sum * std::exp(-x);
  }

  // Hankel asymptotic expansion, truncated at the smallest term.
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (8.0 * k * x);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double bessel_i0(double x) {
  if (std::isnan(x)) throw DomainError("bessel_i0: NaN argument");
  const double ax = std::fabs(x);
  if (ax <= 25.0) return bessel_i0e(ax) * std::exp(ax);
  // Split the exponential so that e^{x} alone does not decide overflow.
  const double half = std::exp(0.5 * ax);
  return (bessel_i0e(ax) * half) * half;
}

namespace {

// Q₁(a,b) = Σ_k Pois(k; a²/2) · P[Pois(b²/2) ≤ k]. This is the canonical
// double series e^{-(a²+b²)/2} Σ_k (a²/2)^k/k! Σ_{m≤k} (b²/2)^m/m! with the
// exponentials folded into each factor, evaluated in log space when the
// Poisson means are too large for direct recurrences.
double marcum_series(double a, double b) {
  const double x = 0.5 * a * a;
  const double y = 0.5 * b * b;
  constexpr double kRel = 1e-14;
  constexpr double kAbs = 1e-18;

  if (x < 600.0 && y < 600.0) {
    double weight = std::exp(-x);  // Pois(k; x)
    double pmf_y = std::exp(-y);   // Pois(k; y)
    double cdf_y = pmf_y;
    double sum = weight * cdf_y;
    for (int k = 1; k < 100000; ++k) {
      const double kd = static_cast<double>(k);
      weight *= x / kd;
      pmf_y *= y / kd;
      cdf_y = std::min(1.0, cdf_y + pmf_y);
      const double term = weight * cdf_y;
      sum += term;
      if (kd > x) {
        const double tail = weight * (kd + 1.0) / (kd + 1.0 - x);
        if (tail < kRel * sum || tail < kAbs) break;
      }
    }
    return std::clamp(sum, 0.0, 1.0);
  }

  // Log-domain version of the same recurrences.
  const double log_x = x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
  const double log_y = y > 0.0 ? std::log(y) : -std::numeric_limits<double>::infinity();
  double log_w = -x;
  double log_p = -y;
  double cdf_y = std::exp(log_p);
  double sum = std::exp(log_w) * cdf_y;
  for (int k = 1; k < 1000000; ++k) {
    const double kd = static_cast<double>(k);
    const double log_k = std::log(kd);
    log_w += log_x - log_k;
    log_p += log_y - log_k;
    cdf_y = std::min(1.0, cdf_y + std::exp(log_p));
    const double weight = std::exp(log_w);
    sum += weight * cdf_y;
    if (kd > x) {
      const double tail = weight * (kd + 1.0) / (kd + 1.0 - x);
      if (tail < kRel * sum || tail < kAbs) break;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

// Composite 10-point Gauss-Legendre over [lo, hi].
template <class F>
double gauss_legendre(F&& f, double lo, double hi, int panels) {
  static constexpr std::array<double, 5> kNodes = {
      0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
      0.8650633666889845, 0.9739065285171717};
  static constexpr std::array<double, 5> kWeights = {
      0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
      0.1494513491505806, 0.0666713443086881};
  const double width = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    const double half = 0.5 * width;
    double acc = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i) {
      acc += kWeights[i] * (f(mid - half * kNodes[i]) + f(mid + half * kNodes[i]));
    }
    total += acc * half;
  }
  return total;
}

// Direct quadrature of ∫_b^∞ t·exp(−(t²+a²)/2)·I₀(at) dt. The integrand is
// written as t·exp(−(t−a)²/2)·i0e(at), which stays bounded for large a·b.
constexpr double kFlushGap = 10.0;

double marcum_quadrature(double a, double b) {
  auto integrand = [a](double t) {
    return t * std::exp(-0.5 * (t - a) * (t - a)) * bessel_i0e(a * t);
  };
  // The integrand is a unit-width bump around t = a; beyond kReach of its
  // centre (or of b, on the far side) it is below e^{-72} of its peak.
  constexpr double kReach = 12.0;
  constexpr int kPanelsPerUnit = 2;
  if (b >= a) {
    const double hi = b + kReach;
    const int panels = static_cast<int>((hi - b) * kPanelsPerUnit);
    return std::clamp(gauss_legendre(integrand, b, hi, panels), 0.0, 1.0);
  }
  const double lo = std::max(0.0, a - kReach - 1.0);
  if (b <= lo) return 1.0;
  const int panels = std::max(4, static_cast<int>(std::ceil((b - lo) * kPanelsPerUnit)));
  return std::clamp(1.0 - gauss_legendre(integrand, lo, b, panels), 0.0, 1.0);
}

}  // namespace

double marcum_q1(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) throw DomainError("marcum_q1: NaN argument");
  if (a < 0.0 || b < 0.0) throw DomainError("marcum_q1: arguments must be non-negative");
  if (b == 0.0) return 1.0;
  if (std::isinf(b)) return 0.0;
  if (std::isinf(a)) return 1.0;
  // Q1(a, b) <= exp(-(b - a)^2 / 2) for b > a: flush tails below e^{-50}.
  if (b - a > kFlushGap) return 0.0;
  if (a * b > 30.0) return marcum_quadrature(a, b);
  return marcum_series(a, b);
}

}  // namespace platoon::numerics
