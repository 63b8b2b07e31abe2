#include "hbie/geom.hpp"

#include "hbie/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hbie {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw InvalidParameter(message);
}

} // namespace

Curve::Curve(CurveFamily family, std::string name, std::vector<double> params)
    : family_(family), name_(std::move(name)), params_(std::move(params))
{
}

Curve Curve::circle(double radius)
{
    require(std::isfinite(radius) && radius > 0.0, "circle: radius must be positive");
    return Curve(CurveFamily::Circle, "circle", {radius});
}

Curve Curve::ellipse(double semi_x, double semi_y)
{
    require(std::isfinite(semi_x) && std::isfinite(semi_y) && semi_x > 0.0 && semi_y > 0.0,
            "ellipse: semi-axes must be positive");
    return Curve(CurveFamily::Ellipse, "ellipse", {semi_x, semi_y});
}

Curve Curve::kite(double c, double h)
{
    require(std::isfinite(c) && std::isfinite(h) && h > 0.0 && c >= 0.0, "kite: invalid parameters");
    // Regularity for c < 1/2 is easy; larger c is checked by sampling.
    Curve out(CurveFamily::Kite, "kite", {c, h});
    for (int j = 0; j < 4096; ++j)
        require(out.speed(kTwoPi * j / 4096.0) > 1e-8, "kite: parametrization is not regular");
    return out;
}

Curve Curve::smooth_star(double eps, int m, double r0)
{
    require(std::isfinite(eps) && eps >= 0.0, "smooth_star: eps must be >= 0");
    require(m >= 1, "smooth_star: m must be >= 1");
    require(eps * m < 1.0, "smooth_star: eps * m must be < 1");
    require(std::isfinite(r0) && r0 > 0.0, "smooth_star: r0 must be positive");
    return Curve(CurveFamily::SmoothStar, "smooth_star", {eps, static_cast<double>(m), r0});
}

Curve Curve::translated(const Vec2& shift) const
{
    Curve out = *this;
    out.offset_ = {offset_[0] + shift[0], offset_[1] + shift[1]};
    return out;
}

Curve Curve::scaled(double factor) const
{
    require(std::isfinite(factor) && factor > 0.0, "scaled: factor must be positive");
    Curve out = *this;
    out.scale_ = scale_ * factor;
    out.offset_ = {offset_[0] * factor, offset_[1] * factor};
    return out;
}

Vec2 Curve::shape(double t, int order) const
{
    const double c = std::cos(t), s = std::sin(t);
    switch (family_) {
    case CurveFamily::Circle: {
        const double r = params_[0];
        if (order == 0)
            return {r * c, r * s};
        if (order == 1)
            return {-r * s, r * c};
        return {-r * c, -r * s};
    }
    case CurveFamily::Ellipse: {
        const double a = params_[0], b = params_[1];
        if (order == 0)
            return {a * c, b * s};
        if (order == 1)
            return {-a * s, b * c};
        return {-a * c, -b * s};
    }
    case CurveFamily::Kite: {
        const double k = params_[0], h = params_[1];
        const double c2 = std::cos(2.0 * t), s2 = std::sin(2.0 * t);
        if (order == 0)
            return {c + k * c2 - k, h * s};
        if (order == 1)
            return {-s - 2.0 * k * s2, h * c};
        return {-c - 4.0 * k * c2, -h * s};
    }
    case CurveFamily::SmoothStar: {
        const double eps = params_[0], m = params_[1], r0 = params_[2];
        const double cm = std::cos(m * t), sm = std::sin(m * t);
        const double r = r0 * (1.0 + eps * cm);
        const double r1 = -r0 * eps * m * sm;
        const double r2 = -r0 * eps * m * m * cm;
        if (order == 0)
            return {r * c, r * s};
        if (order == 1)
            return {r1 * c - r * s, r1 * s + r * c};
        return {r2 * c - 2.0 * r1 * s - r * c, r2 * s + 2.0 * r1 * c - r * s};
    }
    }
    return {0.0, 0.0};
}

Vec2 Curve::point(double t) const
{
    const Vec2 p = shape(t, 0);
    return {scale_ * p[0] + offset_[0], scale_ * p[1] + offset_[1]};
}

Vec2 Curve::d1(double t) const
{
    const Vec2 p = shape(t, 1);
    return {scale_ * p[0], scale_ * p[1]};
}

Vec2 Curve::d2(double t) const
{
    const Vec2 p = shape(t, 2);
    return {scale_ * p[0], scale_ * p[1]};
}

double Curve::speed(double t) const
{
    const Vec2 v = d1(t);
    return std::hypot(v[0], v[1]);
}

Vec2 Curve::normal(double t) const
{
    const Vec2 v = d1(t);
    const double s = std::hypot(v[0], v[1]);
    return {v[1] / s, -v[0] / s};
}

double Curve::curvature(double t) const
{
    const Vec2 a = d1(t), b = d2(t);
    const double s = std::hypot(a[0], a[1]);
    return (a[0] * b[1] - a[1] * b[0]) / (s * s * s);
}

double Curve::radius() const
{
    if (!is_circle())
        throw InvalidParameter("radius: curve is not a circle");
    return scale_ * params_[0];
}

double Curve::bounding_radius() const
{
    double r = 0.0;
    for (int j = 0; j < 4096; ++j) {
        const Vec2 p = point(kTwoPi * j / 4096.0);
        r = std::max(r, std::hypot(p[0], p[1]));
    }
    // Sampling slack: the curves have bounded curvature at this resolution.
    return r * (1.0 + 1e-3);
}

Curve make_curve(const std::string& name, const std::vector<double>& params)
{
    if (name == "circle") {
        require(params.size() == 1, "circle expects [radius]");
        return Curve::circle(params[0]);
    }
    if (name == "ellipse") {
        require(params.size() == 2, "ellipse expects [semi_x, semi_y]");
        return Curve::ellipse(params[0], params[1]);
    }
    if (name == "kite") {
        require(params.empty() || params.size() == 2, "kite expects [] or [c, h]");
        return params.empty() ? Curve::kite() : Curve::kite(params[0], params[1]);
    }
    if (name == "smooth_star") {
        require(params.size() == 2 || params.size() == 3, "smooth_star expects [eps, m] or [eps, m, r0]");
        const double m = params[1];
        require(m == std::floor(m) && m >= 1.0 && m < 1e6, "smooth_star: m must be a positive integer");
        return Curve::smooth_star(params[0], static_cast<int>(m), params.size() == 3 ? params[2] : 1.0);
    }
    throw InvalidParameter("unknown curve family: " + name);
}

double BoundaryGrid::length() const
{
    double sum = 0.0;
    for (double w : weights)
        sum += w;
    return sum;
}

BoundaryGrid boundary_grid(const Curve& curve, int N)
{
    require(N >= 16 && N <= 16384 && N % 2 == 0, "boundary_grid: N must be even in [16, 16384]");
    BoundaryGrid g{curve, N, {}, {}, {}, {}, {}, {}, {}};
    g.t.resize(N);
    g.points.resize(N);
    g.d1.resize(N);
    g.d2.resize(N);
    g.normals.resize(N);
    g.speeds.resize(N);
    g.weights.resize(N);
    const double h = kTwoPi / N;
    Vec2 centroid{0.0, 0.0};
    for (int j = 0; j < N; ++j) {
        const double t = h * j;
        g.t[j] = t;
        g.points[j] = curve.point(t);
        g.d1[j] = curve.d1(t);
        g.d2[j] = curve.d2(t);
        g.speeds[j] = std::hypot(g.d1[j][0], g.d1[j][1]);
        g.normals[j] = {g.d1[j][1] / g.speeds[j], -g.d1[j][0] / g.speeds[j]};
        g.weights[j] = h * g.speeds[j];
        centroid[0] += g.points[j][0] / N;
        centroid[1] += g.points[j][1] / N;
    }
    // Outward orientation: the flux of (x - c) through the curve is twice the area.
    double flux = 0.0;
    for (int j = 0; j < N; ++j)
        flux += g.weights[j] * ((g.points[j][0] - centroid[0]) * g.normals[j][0] +
                                (g.points[j][1] - centroid[1]) * g.normals[j][1]);
    if (!(flux > 0.0))
        throw InvalidParameter("boundary_grid: curve is not counterclockwise");
    return g;
}

double star_shaped_margin(const Curve& curve, int M)
{
    require(M >= 256, "star_shaped_margin: M must be >= 256");
    double margin = INFINITY;
    for (int j = 0; j < M; ++j) {
        const double t = kTwoPi * j / M;
        const Vec2 x = curve.point(t);
        const Vec2 n = curve.normal(t);
        margin = std::min(margin, x[0] * n[0] + x[1] * n[1]);
    }
    return margin;
}

} // namespace hbie
