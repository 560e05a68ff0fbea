#pragma once

// Small dense kernels used to discretize the string model and to evaluate
// Rician link reliability. All functions are pure and re-entrant.

#include <Eigen/Dense>

namespace platoon::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix exponential e^M by scaling-and-squaring around a degree-13 Padé
/// approximant. Throws DimensionError for non-square input and DomainError
/// for non-finite entries.
Matrix expm(const Matrix& m);

/// ∫₀ʰ e^{Mν} dν, read off the top-right block of expm([[M, I], [0, 0]]·h).
Matrix zoh_integral(const Matrix& m, double h);

/// ∫₀ʰ e^{Mν} (h − ν) dν, from the three-block augmentation
/// expm([[M, I, 0], [0, 0, I], [0, 0, 0]]·h). Used to drive the plant with a
/// piecewise-linear input between samples.
Matrix ramp_integral(const Matrix& m, double h);

/// Exponentially scaled modified Bessel function e^{-|x|} I₀(x).
double bessel_i0e(double x);

/// Modified Bessel function of the first kind, order zero. Symmetric in x.
double bessel_i0(double x);

/// First-order Marcum Q function Q₁(a, b) for a, b ≥ 0. Tails with
/// b − a > 10 (value below e^{-50}) are returned as exactly zero.
double marcum_q1(double a, double b);

}  // namespace platoon::numerics
