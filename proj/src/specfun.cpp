#include "hbie/specfun.hpp"

#include "hbie/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hbie {
namespace {

// |z| at or below which J comes from the ascending series.
constexpr double kSeriesRadius = 12.0;
constexpr double kIntegerSeriesRadius = 8.0;
// |z| below which H is formed as J + iY from series; above it, from the
// continued fraction for H'/H and the Wronskian.
constexpr double kSmallRadius = 2.0;
constexpr double kNearInteger = 1e-6;
// Real-argument fast paths of cylinder01.
constexpr double kRealSeriesLimit = 8.0;
constexpr double kRealAsymptoticLimit = 25.0;
constexpr double kRescale = 1e250;
constexpr double kOverflow = 1e300;
constexpr double kTiny = 1e-300;

void check_argument(double order, cplx z)
{
    if (!std::isfinite(order) || order < 0.0 || order > kMaxOrder)
        throw DomainError("bessel: order must lie in [0, 1e4], got " + std::to_string(order));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("bessel: non-finite argument");
    if (z == cplx(0.0, 0.0))
        throw DomainError("bessel: argument must be nonzero");
    if (std::abs(z) > kMaxArgument)
        throw DomainError("bessel: |z| exceeds 1e4");
    if (z.real() < 0.0)
        throw DomainError("bessel: argument must satisfy Re z >= 0");
    if (std::abs(z.imag()) > kMaxImagArgument)
        throw DomainError("bessel: |Im z| exceeds supported strip");
}

int miller_top(double order_span, cplx z)
{
    const double az = std::abs(z);
    return static_cast<int>(std::ceil(std::max(order_span, az) + 20.0 + 15.0 * std::cbrt(az)));
}

// Ascending series for J_nu(z); nu is any real that is not a negative integer.
cplx j_series(double nu, cplx z)
{
    const cplx half = 0.5 * z;
    const cplx q = -half * half;
    cplx lead;
    if (nu + 1.0 > 0.0)
        lead = std::exp(nu * std::log(half) - std::lgamma(nu + 1.0));
    else
        lead = std::pow(half, nu) / std::tgamma(nu + 1.0);
    if (lead == cplx(0.0, 0.0))
        return lead;

    cplx term = 1.0;
    cplx sum = 1.0;
    const double m_min = std::abs(half);
    for (int m = 1; m < 1000; ++m) {
        term *= q / (static_cast<double>(m) * (nu + m));
        sum += term;
        if (m > m_min && std::abs(term) <= 1e-17 * std::abs(sum))
            break;
    }
    return lead * sum;
}

// Y_0 and Y_1 from the logarithmic series; used only for small |z|.
std::pair<cplx, cplx> y01_series(cplx z, cplx j0, cplx j1)
{
    const cplx half = 0.5 * z;
    const cplx q = -half * half;
    const cplx log_half = std::log(half);

    cplx s0 = 0.0, s1 = 0.0;
    cplx t0 = 1.0, t1 = 1.0;
    double harmonic = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double harmonic_next = harmonic + 1.0 / (k + 1);
        const cplx add0 = (harmonic - kEulerGamma) * t0;
        const cplx add1 = (harmonic + harmonic_next - 2.0 * kEulerGamma) * t1;
        s0 += add0;
        s1 += add1;
        if (k > 2 && std::abs(add0) <= 1e-17 * std::abs(s0) && std::abs(add1) <= 1e-17 * std::abs(s1))
            break;
        t0 *= q / static_cast<double>((k + 1) * (k + 1));
        t1 *= q / static_cast<double>((k + 1) * (k + 2));
        harmonic = harmonic_next;
    }
    const cplx y0 = (2.0 / kPi) * (log_half * j0 - s0);
    const cplx y1 = -2.0 / (kPi * z) + (2.0 / kPi) * log_half * j1 - (z / (2.0 * kPi)) * s1;
    return {y0, y1};
}

// Steed's continued fraction for H^(1)'_mu(z) / H^(1)_mu(z), modified Lentz.
cplx hankel_ratio_cf(double mu, cplx z)
{
    cplx f = kTiny, c = f, d = 0.0;
    for (int j = 1; j <= 200000; ++j) {
        const double a = (j - 0.5) * (j - 0.5) - mu * mu;
        const cplx b = 2.0 * (z + cplx(0.0, j));
        d = b + a * d;
        if (d == cplx(0.0, 0.0))
            d = kTiny;
        c = b + a / c;
        if (c == cplx(0.0, 0.0))
            c = kTiny;
        d = 1.0 / d;
        const cplx delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            return -0.5 / z + kI + (kI / z) * f;
    }
    throw ConvergenceError("hankel continued fraction did not converge");
}

// Hankel's expansions of H^(1) and H^(2), combined into J_nu; |z| > 12 and
// small nu only, where the optimally truncated series is below 1e-10.
cplx j_large_argument(double nu, cplx z)
{
    const double four_nu2 = 4.0 * nu * nu;
    const cplx omega = z - 0.5 * nu * kPi - 0.25 * kPi;
    cplx sum1 = 1.0, sum2 = 1.0;
    cplx term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (four_nu2 - odd * odd) / (k * 8.0) / z;
        const double size = std::abs(term);
        if (size > last || size < 1e-17)
            break;
        last = size;
        const cplx ik = std::pow(kI, k);
        sum1 += ik * term;
        sum2 += std::conj(ik) * term;
    }
    const cplx amp = std::sqrt(2.0 / (kPi * z));
    return 0.5 * amp * (std::exp(kI * omega) * sum1 + std::exp(-kI * omega) * sum2);
}

// H^(1)_nu(x) for real x >= 25 from the same expansion; terms fall below
// 1e-17 before they start to grow.
cplx h1_large_real(double nu, double x)
{
    const double four_nu2 = 4.0 * nu * nu;
    const double omega = x - 0.5 * nu * kPi - 0.25 * kPi;
    cplx sum = 1.0;
    cplx ik = 1.0;
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * (four_nu2 - odd * odd) / (k * 8.0) / x;
        if (std::abs(next) > std::abs(term) || std::abs(next) < 1e-17)
            break;
        term = next;
        ik *= kI;
        sum += ik * term;
    }
    return std::sqrt(2.0 / (kPi * x)) * cplx(std::cos(omega), std::sin(omega)) * sum;
}

struct JPair {
    cplx base, base1;    // J_mu, J_{mu+1}
    cplx order, order1;  // J_nu, J_{nu+1}
};

// Miller backward recurrence over orders mu + m, normalized by the
// generating-function sum (integer orders) or by the Wronskian with the
// Hankel continued fractions (fractional orders).
JPair j_miller(double mu, int shift, cplx z)
{
    const int top = miller_top(shift + 1.0, z);
    const bool integer = (mu == 0.0);
    const double s = (z.imag() >= 0.0) ? 1.0 : -1.0;
    const cplx phase_step(0.0, -s);  // (-i s)^m weights

    cplx f_next = 0.0;   // f_{m+1}
    cplx f = 1e-280;     // f_m, starting at m = top
    cplx stored_order = (top == shift) ? f : cplx(0.0);
    cplx stored_order1 = (top == shift + 1) ? f : cplx(0.0);
    cplx norm_sum = 0.0;
    cplx phase = std::pow(phase_step, top);

    auto accumulate = [&](int m, cplx value) {
        if (integer)
            norm_sum += (m == 0 ? 1.0 : 2.0) * phase * value;
    };
    accumulate(top, f);

    for (int m = top; m >= 1; --m) {
        const cplx f_prev = (2.0 * (mu + m) / z) * f - f_next;
        f_next = f;
        f = f_prev;
        phase /= phase_step;
        if (m - 1 == shift)
            stored_order = f;
        if (m - 1 == shift + 1)
            stored_order1 = f;
        accumulate(m - 1, f);
        if (std::abs(f) > kRescale) {
            const double scale = 1.0 / kRescale;
            f *= scale;
            f_next *= scale;
            stored_order *= scale;
            stored_order1 *= scale;
            norm_sum *= scale;
        }
    }
    // f = f_0 (order mu), f_next = f_1 (order mu + 1)
    cplx factor;
    if (integer) {
        factor = std::exp(cplx(0.0, -s) * z) / norm_sum;
    } else if (z.imag() == 0.0) {
        // Real argument: J_mu^2 from the Wronskians with H^(1) and H^(2),
        // sign fixed against the leading asymptotic term.
        const cplx ratio = mu / z - f_next / f;  // J'_mu / J_mu
        const cplx h1 = hankel_ratio_cf(mu, z);
        const cplx h2 = std::conj(h1);
        const cplx j_squared = (kI / (kPi * z)) * (1.0 / (h1 - ratio) - 1.0 / (h2 - ratio));
        factor = std::sqrt(j_squared) / f;
        const cplx omega = z - 0.5 * mu * kPi - 0.25 * kPi;
        const cplx amp = std::sqrt(2.0 / (kPi * z));
        const cplx j_val = factor * f;
        const cplx jp_val = factor * f * ratio;
        const double score =
            (std::conj(j_val) * amp * std::cos(omega) - std::conj(jp_val) * amp * std::sin(omega)).real();
        if (score < 0.0)
            factor = -factor;
    } else {
        // Complex argument: least-squares fit of (f_0, f_1) to the
        // large-argument expansions of J_mu, J_{mu+1}.
        const cplx a0 = j_large_argument(mu, z);
        const cplx a1 = j_large_argument(mu + 1.0, z);
        const double w = std::max(std::abs(f), std::abs(f_next));
        const cplx u0 = f / w, u1 = f_next / w;
        factor = (std::conj(u0) * a0 + std::conj(u1) * a1) / (std::norm(u0) + std::norm(u1)) / w;
    }
    JPair out;
    out.base = factor * f;
    out.base1 = factor * f_next;
    out.order = factor * stored_order;
    out.order1 = factor * stored_order1;
    return out;
}

struct Cylinder {
    cplx j, j1;  // J_nu, J_{nu+1}
    cplx h, h1;  // H_nu, H_{nu+1}
};

Cylinder cylinder(double nu, cplx z)
{
    const double floor_nu = std::floor(nu);
    const double mu = nu - floor_nu;
    const int shift = static_cast<int>(floor_nu);
    const double az = std::abs(z);

    JPair jp;
    // Non-integer complex arguments keep the series up to |z| = 12: the
    // Miller normalization there needs the large-argument expansion.
    const bool series = az <= kIntegerSeriesRadius ||
                        (mu != 0.0 && z.imag() != 0.0 && az <= kSeriesRadius);
    if (series) {
        jp.base = j_series(mu, z);
        jp.base1 = j_series(mu + 1.0, z);
        jp.order = shift == 0 ? jp.base : j_series(nu, z);
        jp.order1 = shift == 0 ? jp.base1 : j_series(nu + 1.0, z);
    } else {
        jp = j_miller(mu, shift, z);
    }

    cplx h_prev, h_cur;  // H_mu, H_{mu+1}
    bool second_kind = false;  // h_prev, h_cur hold H^(2)
    if (az >= kSmallRadius) {
        const cplx jprime = (mu / z) * jp.base - jp.base1;
        if (z.imag() >= 0.0) {
            const cplx ratio = hankel_ratio_cf(mu, z);
            h_prev = 2.0 * kI / (kPi * z * (jp.base * ratio - jprime));
            h_cur = (mu / z - ratio) * h_prev;
        } else {
            // H^(1) and J grow together below the real axis; go through the
            // recessive H^(2) instead.
            const cplx ratio = std::conj(hankel_ratio_cf(mu, std::conj(z)));
            const cplx h2 = -2.0 * kI / (kPi * z * (jp.base * ratio - jprime));
            const cplx h2_next = (mu / z - ratio) * h2;
            h_prev = h2;
            h_cur = h2_next;
            second_kind = true;
        }
    } else if (mu == 0.0) {
        const auto [y0, y1] = y01_series(z, jp.base, jp.base1);
        h_prev = jp.base + kI * y0;
        h_cur = jp.base1 + kI * y1;
    } else {
        const double c0 = std::cos(mu * kPi), s0 = std::sin(mu * kPi);
        const cplx y0 = (jp.base * c0 - j_series(-mu, z)) / s0;
        const cplx y1 = (jp.base1 * (-c0) - j_series(-mu - 1.0, z)) / (-s0);
        h_prev = jp.base + kI * y0;
        h_cur = jp.base1 + kI * y1;
    }

    for (int m = 1; m <= shift; ++m) {
        const cplx h_next = (2.0 * (mu + m) / z) * h_cur - h_prev;
        h_prev = h_cur;
        h_cur = h_next;
        if (!(std::abs(h_cur) < kOverflow))
            throw OverflowError("bessel: Y overflows at order " + std::to_string(nu));
    }
    if (second_kind)
        return {jp.order, jp.order1, 2.0 * jp.order - h_prev, 2.0 * jp.order1 - h_cur};
    return {jp.order, jp.order1, h_prev, h_cur};
}

double effective_order(double order)
{
    const double nearest = std::round(order);
    return std::abs(order - nearest) < kNearInteger ? nearest : order;
}

} // namespace

BesselEval bessel(double order, cplx z)
{
    check_argument(order, z);
    const double nu = effective_order(order);
    const Cylinder c = cylinder(nu, z);
    const cplx y = -kI * (c.h - c.j);
    const cplx y1 = -kI * (c.h1 - c.j1);
    BesselEval out;
    out.order = order;
    out.argument = z;
    out.J = c.j;
    out.Y = y;
    out.Jprime = (nu / z) * c.j - c.j1;
    out.Yprime = (nu / z) * y - y1;
    if (!std::isfinite(std::abs(out.Y)) || !std::isfinite(std::abs(out.Yprime)))
        throw OverflowError("bessel: Y overflows");
    return out;
}

HankelEval hankel1(double order, cplx z)
{
    check_argument(order, z);
    if (z.imag() < -10.0)
        throw DomainError("hankel1: Im z must be >= -10");
    const double nu = effective_order(order);
    const Cylinder c = cylinder(nu, z);
    return {c.h, (nu / z) * c.h - c.h1};
}

CylinderPair cylinder01(cplx z)
{
    check_argument(0.0, z);
    if (z.imag() == 0.0) {
        const double x = z.real();
        if (x < kRealSeriesLimit) {
            const cplx j0 = j_series(0.0, z), j1 = j_series(1.0, z);
            const auto [y0, y1] = y01_series(z, j0, j1);
            return {j0, j1, j0 + kI * y0, j1 + kI * y1};
        }
        if (x >= kRealAsymptoticLimit) {
            const cplx h0 = h1_large_real(0.0, x), h1 = h1_large_real(1.0, x);
            return {h0.real(), h1.real(), h0, h1};
        }
    }
    const Cylinder c = cylinder(0.0, z);
    return {c.j, c.j1, c.h, c.h1};
}

std::vector<cplx> bessel_log_derivatives(cplx z, int n_max)
{
    check_argument(0.0, z);
    if (n_max < 0)
        throw InvalidParameter("bessel_log_derivatives: n_max must be >= 0");
    const int top = miller_top(n_max + 1.0, z);
    // ratio[n] = J_n / J_{n-1} for n = 1..n_max+1
    std::vector<cplx> ratio(static_cast<size_t>(n_max) + 2, cplx(0.0));
    cplx r = 0.0;
    for (int n = top; n >= 1; --n) {
        cplx denom = 2.0 * n / z - r;
        if (denom == cplx(0.0, 0.0))
            denom = kTiny;
        r = 1.0 / denom;
        if (n <= n_max + 1)
            ratio[static_cast<size_t>(n)] = r;
    }
    std::vector<cplx> out(static_cast<size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n)
        out[static_cast<size_t>(n)] = static_cast<double>(n) / z - ratio[static_cast<size_t>(n) + 1];
    return out;
}

std::vector<cplx> hankel_log_derivatives(cplx z, int n_max)
{
    check_argument(0.0, z);
    if (n_max < 0)
        throw InvalidParameter("hankel_log_derivatives: n_max must be >= 0");
    const Cylinder c = cylinder(0.0, z);
    std::vector<cplx> out(static_cast<size_t>(n_max) + 1);
    cplx t = c.h1 / c.h;  // H_1 / H_0
    out[0] = -t;
    for (int n = 1; n <= n_max; ++n) {
        t = 2.0 * n / z - 1.0 / t;  // H_{n+1} / H_n
        out[static_cast<size_t>(n)] = static_cast<double>(n) / z - t;
    }
    return out;
}

cplx fundamental_solution(double k, std::span<const double> x, std::span<const double> y, int dim)
{
    if (dim != 2 && dim != 3)
        throw InvalidParameter("fundamental_solution: dim must be 2 or 3");
    if (x.size() != static_cast<size_t>(dim) || y.size() != static_cast<size_t>(dim))
        throw InvalidParameter("fundamental_solution: point dimension mismatch");
    if (!(k > 0.0))
        throw InvalidParameter("fundamental_solution: k must be positive");
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i)
        r2 += (x[i] - y[i]) * (x[i] - y[i]);
    const double r = std::sqrt(r2);
    if (r < 1e-14)
        throw CoincidenceError("fundamental_solution: x and y coincide");
    if (dim == 2)
        return 0.25 * kI * hankel1(0.0, cplx(k * r, 0.0)).H;
    return std::exp(kI * (k * r)) / (4.0 * kPi * r);
}

} // namespace hbie
