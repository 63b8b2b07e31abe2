#pragma once
//
// Cylinder functions of real order and complex argument, and the
// Helmholtz fundamental solution in two and three dimensions.
//
// Supported arguments lie in the closed right half plane (Re z >= 0),
// z != 0, |z| <= 1e4 and |Im z| <= kMaxImagArgument. Orders are real,
// 0 <= order <= 1e4.
//

#include <complex>
#include <span>
#include <vector>

namespace hbie {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr cplx kI{0.0, 1.0};

inline constexpr double kMaxArgument = 1e4;
inline constexpr double kMaxOrder = 1e4;
inline constexpr double kMaxImagArgument = 40.0;

struct BesselEval {
    double order = 0.0;
    cplx argument;
    cplx J, Y, Jprime, Yprime;
};

struct HankelEval {
    cplx H, Hprime;
};

/// J, Y and their derivatives of the given order at z.
///
/// Throws DomainError for z = 0 or arguments outside the supported region
/// and OverflowError when Y (or 1/J) leaves the double range.
BesselEval bessel(double order, cplx z);

/// First-kind Hankel function H = J + iY and its derivative.
HankelEval hankel1(double order, cplx z);

/// J_0, J_1, H^(1)_0, H^(1)_1 at z in one pass; the kernel evaluator.
struct CylinderPair {
    cplx J0, J1, H0, H1;
};
CylinderPair cylinder01(cplx z);

/// J_n'(z)/J_n(z) for n = 0..n_max, via backward ratio recurrence.
std::vector<cplx> bessel_log_derivatives(cplx z, int n_max);

/// H_n'(z)/H_n(z) for n = 0..n_max, via forward ratio recurrence.
std::vector<cplx> hankel_log_derivatives(cplx z, int n_max);

/// Phi_k(x, y): (i/4) H_0(k|x-y|) for dim 2, e^{ik|x-y|}/(4 pi |x-y|) for
/// dim 3. Throws CoincidenceError when |x-y| < 1e-14.
cplx fundamental_solution(double k, std::span<const double> x,
                          std::span<const double> y, int dim);

} // namespace hbie
