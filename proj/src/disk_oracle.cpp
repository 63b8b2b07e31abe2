#include "hbie/disk_oracle.hpp"

#include "hbie/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hbie {

namespace {

void check_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidParameter(std::string(what) + " must be positive and finite");
}

void check_n_max(int n_max)
{
    if (n_max < 0 || n_max > kMaxOrder)
        throw InvalidParameter("n_max must lie in [0, 1e4]");
}

struct Ratios {
    std::vector<cplx> rho, sigma;
};

Ratios ratios(cplx z, int n_max)
{
    return {bessel_log_derivatives(z, n_max), hankel_log_derivatives(z, n_max)};
}

cplx ipow(int n)
{
    static const cplx table[4] = {1.0, kI, -1.0, -kI};
    return table[((n % 4) + 4) % 4];
}

} // namespace

ModeTable mode_table(double k, double radius, cplx eta, int n_max)
{
    check_positive(k, "k");
    check_positive(radius, "radius");
    check_n_max(n_max);
    const cplx z = k * radius;
    const Ratios r = ratios(z, n_max);

    ModeTable t;
    t.k = k;
    t.radius = radius;
    t.eta = eta;
    t.n_max = n_max;
    const auto size = static_cast<std::size_t>(n_max) + 1;
    for (auto* v : {&t.s, &t.d, &t.dadj, &t.h, &t.aprime, &t.b, &t.p, &t.q})
        v->resize(size);
    for (std::size_t n = 0; n < size; ++n) {
        const cplx rho = r.rho[n], sigma = r.sigma[n];
        const cplx w = sigma - rho;
        t.s[n] = -1.0 / (k * w);
        t.d[n] = -0.5 * (sigma + rho) / w;
        t.dadj[n] = t.d[n];
        t.h[n] = -k * sigma * rho / w;
        t.aprime[n] = 0.5 + t.dadj[n] - kI * eta * t.s[n];
        t.b[n] = t.h[n] + kI * eta * (0.5 - t.d[n]);
        t.p[n] = k * sigma;
        t.q[n] = 1.0 / (k * rho - kI * eta);
    }
    return t;
}

std::vector<double> laplace_single_layer_symbols(double radius, int n_max)
{
    check_positive(radius, "radius");
    check_n_max(n_max);
    std::vector<double> s(static_cast<std::size_t>(n_max) + 1);
    s[0] = -radius * std::log(radius);
    for (int n = 1; n <= n_max; ++n)
        s[n] = radius / (2.0 * n);
    return s;
}

std::vector<cplx> single_layer_symbols(cplx kappa, double radius, int n_max)
{
    check_positive(radius, "radius");
    check_n_max(n_max);
    if (kappa == 0.0)
        throw InvalidParameter("single_layer_symbols: kappa must be nonzero");
    const Ratios r = ratios(kappa * radius, n_max);
    std::vector<cplx> s(static_cast<std::size_t>(n_max) + 1);
    for (std::size_t n = 0; n < s.size(); ++n)
        s[n] = -1.0 / (kappa * (r.sigma[n] - r.rho[n]));
    return s;
}

int mode_truncation(double k)
{
    return static_cast<int>(std::ceil(4.0 * k)) + 100;
}

SharpnessSweep sharpness_sweep(const std::vector<double>& k_grid, double radius, double truncation_factor)
{
    check_positive(radius, "radius");
    if (!(truncation_factor >= 1.0))
        throw InvalidParameter("sharpness_sweep: truncation_factor must be >= 1");
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        check_positive(k_grid[i], "k");
        if (i > 0 && !(k_grid[i] > k_grid[i - 1]))
            throw InvalidParameter("sharpness_sweep: k grid must be ascending");
    }
    SharpnessSweep out;
    out.k = k_grid;
    for (double k : k_grid) {
        const int n_max = static_cast<int>(std::ceil(truncation_factor * mode_truncation(k * radius)));
        const std::vector<cplx> sigma = hankel_log_derivatives(k * radius, n_max);
        const double scale = std::pow(k, -1.0 / 3.0);
        double dtn = 0, ntd = 0, dtn_h = 0, ntd_h = 0;
        for (int n = 0; n <= n_max; ++n) {
            const double p = std::abs(k * sigma[n]);
            const double w = std::hypot(n / radius, k);
            const double w0 = std::sqrt(1.0 + double(n) * n);
            dtn = std::max(dtn, p / w);
            ntd = std::max(ntd, w / p * scale);
            dtn_h = std::max(dtn_h, p / (k * w0));
            ntd_h = std::max(ntd_h, w0 / p * scale);
        }
        out.dtn_ratio.push_back(dtn);
        out.ntd_ratio.push_back(ntd);
        out.dtn_half.push_back(dtn_h);
        out.ntd_half.push_back(ntd_h);
    }
    return out;
}

ModeNorms mode_norms(double k, cplx eta, double radius, double truncation_factor)
{
    if (!(truncation_factor >= 1.0))
        throw InvalidParameter("mode_norms: truncation_factor must be >= 1");
    const int n_max = static_cast<int>(std::ceil(truncation_factor * mode_truncation(k * radius)));
    const ModeTable t = mode_table(k, radius, eta, n_max);
    ModeNorms m;
    double amin = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= n_max; ++n) {
        const double a = std::abs(t.aprime[n]);
        const double w = std::hypot(n / radius, k);
        m.norm_A = std::max(m.norm_A, a);
        amin = std::min(amin, a);
        m.norm_S = std::max(m.norm_S, std::abs(t.s[n]));
        m.norm_D = std::max(m.norm_D, std::abs(t.d[n]));
        m.dtn_h1_l2 = std::max(m.dtn_h1_l2, std::abs(t.p[n]) / w);
        m.ntd_l2_h1 = std::max(m.ntd_l2_h1, w / std::abs(t.p[n]));
        m.itd_l2_h1 = std::max(m.itd_l2_h1, w * std::abs(t.q[n]));
    }
    m.norm_Ainv = 1.0 / amin;
    m.cond = m.norm_A * m.norm_Ainv;
    m.alpha = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < 720; ++j) {
        const cplx rot = std::exp(kI * (2.0 * kPi * j / 720));
        double lo = std::numeric_limits<double>::infinity();
        for (const cplx& a : t.aprime)
            lo = std::min(lo, (rot * a).real());
        m.alpha = std::max(m.alpha, lo);
    }
    return m;
}

MieSolution::MieSolution(double k, double radius, double alpha) : k_(k), radius_(radius), alpha_(alpha)
{
    check_positive(k, "k");
    check_positive(radius, "radius");
    if (!std::isfinite(alpha))
        throw InvalidParameter("mie: incident angle must be finite");
    const double z = k * radius;
    n_max_ = static_cast<int>(std::ceil(z + 8.0 * std::cbrt(z) + 40.0));
    for (int n = 0; n <= n_max_; ++n) {
        BesselEval be;
        try {
            be = bessel(n, z);
        } catch (const OverflowError&) {
            // Y_n overflows: J_n / H_n and 1 / H_n are below 1e-300.
            n_max_ = n - 1;
            break;
        }
        const cplx H = be.J + kI * be.Y;
        ratio_.push_back(be.J / H);
        neumann_.push_back(ipow(n) * (-2.0 * kI) / (kPi * radius * H));
    }
    tail_ = std::abs(ratio_.back());
}

cplx MieSolution::incident(const Vec2& x) const
{
    return std::exp(kI * k_ * (x[0] * std::cos(alpha_) + x[1] * std::sin(alpha_)));
}

cplx MieSolution::scattered(const Vec2& x) const
{
    const double r = std::hypot(x[0], x[1]);
    if (r < radius_ * (1.0 - 1e-12))
        throw DomainError("mie: evaluation point inside the scatterer");
    const double phi = std::atan2(x[1], x[0]) - alpha_;
    cplx sum = 0.0;
    for (int n = 0; n <= n_max_; ++n) {
        if (ratio_[n] == 0.0)
            break;
        const cplx Hr = hankel1(n, k_ * r).H;
        const cplx term = ipow(n) * ratio_[n] * Hr * std::cos(n * phi);
        sum += n == 0 ? term : 2.0 * term;
    }
    return -sum;
}

cplx MieSolution::total(const Vec2& x) const
{
    return incident(x) + scattered(x);
}

cplx MieSolution::neumann(double theta) const
{
    const double phi = theta - alpha_;
    cplx sum = neumann_[0];
    for (int n = 1; n <= n_max_; ++n)
        sum += 2.0 * neumann_[n] * std::cos(n * phi);
    return sum;
}

cplx MieSolution::far_field(double theta) const
{
    const double phi = theta - alpha_;
    cplx sum = ratio_[0];
    for (int n = 1; n <= n_max_; ++n)
        sum += 2.0 * ratio_[n] * std::cos(n * phi);
    return -std::sqrt(2.0 / (kPi * k_)) * std::exp(-kI * (kPi / 4.0)) * sum;
}

MieSolution mie_dirichlet(double k, double radius, double alpha)
{
    return MieSolution(k, radius, alpha);
}

double ball_sharpness_ratio(double k, int mu, int d)
{
    if (!(k >= 1.0) || !std::isfinite(k))
        throw InvalidParameter("ball_sharpness_ratio: k must be >= 1");
    if (d != 2 && d != 3)
        throw InvalidParameter("ball_sharpness_ratio: d must be 2 or 3");
    if (mu < 0)
        throw InvalidParameter("ball_sharpness_ratio: mu must be >= 0");
    const double nu = 0.5 * std::sqrt(double(d - 2) * (d - 2) + 4.0 * mu * mu);

    // ||u||^2 = int_0^1 r^{2-d} J_nu(kr)^2 r^{d-1} dr ||phi||^2.
    auto integrand = [&](double r) {
        if (r <= 0.0)
            return 0.0;
        const double j = bessel(nu, k * r).J.real();
        return r * j * j;
    };
    // Adaptive Gauss-Kronrod on panels about one oscillation wide.
    const int panels = static_cast<int>(std::ceil(k / kPi)) + 1;
    double I = 0.0, err = 0.0;
    for (int p = 0; p < panels; ++p) {
        double e = 0.0;
        I += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            integrand, double(p) / panels, double(p + 1) / panels, 8, 1e-10, &e);
        err += e;
    }
    if (!(err <= 1e-8 * std::abs(I)))
        throw ConvergenceError("ball_sharpness_ratio: radial quadrature did not converge");

    const BesselEval be = bessel(nu, cplx(k, 0.0));
    const double J = be.J.real(), Jp = be.Jprime.real();
    // g = d/dr (r^{1-d/2} J_nu(kr)) - i k J_nu(k) at r = 1.
    const cplx g = k * Jp + (1.0 - 0.5 * d) * J - kI * k * J;
    return k * std::sqrt(I) / std::abs(g);
}

PoleScan impedance_pole_scan(double a, double b, std::pair<double, double> re_window,
                             std::pair<double, double> im_window, double grid_density, int n_max)
{
    check_positive(a, "a");
    if (!(b >= 0.0) || !std::isfinite(b))
        throw InvalidParameter("pole scan: b must be >= 0");
    const auto [re0, re1] = re_window;
    const auto [im0, im1] = im_window;
    if (!(re0 > 0.0 && re1 > re0 && re1 <= 40.0))
        throw InvalidParameter("pole scan: Re window must satisfy 0 < lo < hi <= 40");
    if (!(im1 > im0 && im0 >= -10.0 && im1 <= 10.0))
        throw InvalidParameter("pole scan: Im window must lie in [-10, 10]");
    if (!(grid_density >= 1.0 && grid_density <= 200.0))
        throw InvalidParameter("pole scan: grid_density must lie in [1, 200]");
    if (n_max < 0 || n_max > 200)
        throw InvalidParameter("pole scan: n_max must lie in [0, 200]");

    auto eta = [&](cplx k) { return a * k + kI * b; };
    auto scaled_residual = [&](cplx k, cplx rho) {
        const cplx kr = k * rho;
        const cplx e = eta(k);
        return std::abs(kr - kI * e) / (std::abs(kr) + 1.0 + std::abs(e));
    };

    const int nx = static_cast<int>(std::ceil((re1 - re0) * grid_density)) + 1;
    const int ny = static_cast<int>(std::ceil((im1 - im0) * grid_density)) + 1;
    const double hx = (re1 - re0) / (nx - 1), hy = (im1 - im0) / (ny - 1);
    // res[(n * nx + i) * ny + j]
    std::vector<double> res(static_cast<std::size_t>(n_max + 1) * nx * ny);
    auto at = [&](int n, int i, int j) -> double& {
        return res[(static_cast<std::size_t>(n) * nx + i) * ny + j];
    };
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const cplx k(re0 + i * hx, im0 + j * hy);
            const std::vector<cplx> rho = bessel_log_derivatives(k, n_max);
            for (int n = 0; n <= n_max; ++n)
                at(n, i, j) = std::isfinite(std::abs(rho[n])) ? scaled_residual(k, rho[n]) : 1.0;
        }
    }

    PoleScan scan;
    for (int n = 0; n <= n_max; ++n) {
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const double v = at(n, i, j);
                if (v > 0.25)
                    continue;
                bool minimum = true;
                for (int di = -1; di <= 1 && minimum; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        const int ii = i + di, jj = j + dj;
                        if ((di || dj) && ii >= 0 && ii < nx && jj >= 0 && jj < ny && at(n, ii, jj) < v) {
                            minimum = false;
                            break;
                        }
                    }
                if (!minimum)
                    continue;

                // Newton on g(k) = k rho_n(k) - i eta(k);
                // g'(k) = n^2/k - k - k rho^2 - i a.
                PoleCandidate c;
                c.n = n;
                cplx k(re0 + i * hx, im0 + j * hy);
                for (int it = 0; it < 60; ++it) {
                    const cplx rho = bessel_log_derivatives(k, n)[n];
                    const cplx g = k * rho - kI * eta(k);
                    const cplx dg = double(n) * n / k - k - k * rho * rho - kI * a;
                    const cplx step = g / dg;
                    k -= step;
                    if (!(std::abs(k.imag()) <= 10.0 && k.real() > 0.0))
                        break;
                    if (std::abs(step) <= 1e-13 * std::abs(k)) {
                        c.refined = true;
                        break;
                    }
                }
                if (!c.refined)
                    k = cplx(re0 + i * hx, im0 + j * hy);
                const cplx rho = bessel_log_derivatives(k, n)[n];
                c.k = k;
                c.residual = scaled_residual(k, rho);
                if (c.refined && c.residual > 1e-8)
                    c.refined = false;
                if (!c.refined)
                    continue;
                if (k.real() < re0 - hx || k.real() > re1 + hx || k.imag() < im0 - hy || k.imag() > im1 + hy)
                    continue;
                const bool duplicate = std::any_of(scan.poles.begin(), scan.poles.end(), [&](const PoleCandidate& p) {
                    return p.n == n && std::abs(p.k - k) <= 1e-8 * std::max(1.0, std::abs(k));
                });
                if (!duplicate)
                    scan.poles.push_back(c);
            }
        }
    }
    std::sort(scan.poles.begin(), scan.poles.end(), [](const PoleCandidate& x, const PoleCandidate& y) {
        return x.k.real() != y.k.real() ? x.k.real() < y.k.real() : x.n < y.n;
    });

    double top = -std::numeric_limits<double>::infinity();
    for (const PoleCandidate& p : scan.poles) {
        if (p.k.imag() >= 0.0)
            ++scan.upper_half_count;
        else
            top = std::max(top, p.k.imag());
    }
    if (std::isfinite(top)) {
        scan.strip_width = -top;
    } else {
        scan.strip_width = -im0;
        scan.strip_from_window = true;
    }
    // k rho_n(k) -> n as k -> 0, so the scaled determinant tends to n + b.
    scan.origin_degenerate = b == 0.0;
    return scan;
}

} // namespace hbie
