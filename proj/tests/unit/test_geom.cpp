#include "doctest.h"

#include "hbie/errors.hpp"
#include "hbie/geom.hpp"
#include "hbie/specfun.hpp"

#include <cmath>

using namespace hbie;

TEST_CASE("make_curve by name")
{
    CHECK(make_curve("circle", {2.0}).radius() == doctest::Approx(2.0));
    CHECK(make_curve("kite", {}).family() == CurveFamily::Kite);
    CHECK(make_curve("ellipse", {2.0, 1.0}).family() == CurveFamily::Ellipse);
    CHECK(make_curve("smooth_star", {0.1, 5}).family() == CurveFamily::SmoothStar);
    CHECK_THROWS_AS(make_curve("blob", {}), InvalidParameter);
    CHECK_THROWS_AS(make_curve("circle", {}), InvalidParameter);
    CHECK_THROWS_AS(make_curve("circle", {-1.0}), InvalidParameter);
    CHECK_THROWS_AS(make_curve("ellipse", {1.0}), InvalidParameter);
}

TEST_CASE("kite parametrization")
{
    const Curve c = Curve::kite();
    const double t = 0.7;
    const Vec2 x = c.point(t);
    CHECK(x[0] == doctest::Approx(std::cos(t) + 0.65 * std::cos(2 * t) - 0.65));
    CHECK(x[1] == doctest::Approx(1.5 * std::sin(t)));
    const Vec2 d = c.d1(t);
    CHECK(d[0] == doctest::Approx(-std::sin(t) - 1.3 * std::sin(2 * t)));
    CHECK(d[1] == doctest::Approx(1.5 * std::cos(t)));
}

TEST_CASE("derivatives match finite differences")
{
    for (const Curve& c : {Curve::kite(), Curve::ellipse(2, 1), Curve::smooth_star(0.1, 5)}) {
        const double t = 1.1, h = 1e-5;
        const Vec2 p = c.point(t + h), m = c.point(t - h), d = c.d1(t);
        CHECK((p[0] - m[0]) / (2 * h) == doctest::Approx(d[0]).epsilon(1e-8));
        CHECK((p[1] - m[1]) / (2 * h) == doctest::Approx(d[1]).epsilon(1e-8));
        const Vec2 dp = c.d1(t + h), dm = c.d1(t - h), d2 = c.d2(t);
        CHECK((dp[0] - dm[0]) / (2 * h) == doctest::Approx(d2[0]).epsilon(1e-7));
        CHECK((dp[1] - dm[1]) / (2 * h) == doctest::Approx(d2[1]).epsilon(1e-7));
    }
}

TEST_CASE("normals are unit, orthogonal to the tangent and outward")
{
    const Curve c = Curve::kite();
    for (int m = 0; m < 64; ++m) {
        const double t = 2 * kPi * m / 64;
        const Vec2 n = c.normal(t), d = c.d1(t);
        CHECK(std::hypot(n[0], n[1]) == doctest::Approx(1.0));
        CHECK(std::abs(n[0] * d[0] + n[1] * d[1]) < 1e-12);
        // counterclockwise: the normal points right of the tangent
        CHECK(d[0] * n[1] - d[1] * n[0] < 0.0);
    }
}

TEST_CASE("circle geometry")
{
    const Curve c = Curve::circle(0.8).translated({1.0, -2.0});
    CHECK(c.is_circle());
    CHECK(c.radius() == doctest::Approx(0.8));
    CHECK(c.curvature(0.3) == doctest::Approx(1.0 / 0.8));
    const Vec2 x = c.point(0.0);
    CHECK(x[0] == doctest::Approx(1.8));
    CHECK(x[1] == doctest::Approx(-2.0));
    CHECK(Curve::circle(1).scaled(3).radius() == doctest::Approx(3.0));
}

TEST_CASE("boundary grid lengths")
{
    const BoundaryGrid g = boundary_grid(Curve::circle(1.5), 64);
    CHECK(g.length() == doctest::Approx(3 * kPi).epsilon(1e-14));
    const double l256 = boundary_grid(Curve::kite(), 256).length();
    const double l1024 = boundary_grid(Curve::kite(), 1024).length();
    CHECK(std::abs(l256 - l1024) < 1e-10);
    CHECK(g.t[1] - g.t[0] == doctest::Approx(2 * kPi / 64));
    CHECK(g.weights[0] == doctest::Approx(2 * kPi / 64 * 1.5));
}

TEST_CASE("boundary grid rejects bad sizes")
{
    CHECK_THROWS_AS(boundary_grid(Curve::kite(), 15), InvalidParameter);
    CHECK_THROWS_AS(boundary_grid(Curve::kite(), 8), InvalidParameter);
    CHECK_THROWS_AS(boundary_grid(Curve::kite(), 32768), InvalidParameter);
}

TEST_CASE("star-shaped margin")
{
    CHECK(star_shaped_margin(Curve::circle(2), 256) == doctest::Approx(2.0));
    CHECK(star_shaped_margin(Curve::ellipse(2, 1), 256) > 0.0);
    CHECK(star_shaped_margin(Curve::circle(1).translated({3, 0}), 256) < 0.0);
    CHECK_THROWS_AS(star_shaped_margin(Curve::kite(), 100), InvalidParameter);
}

TEST_CASE("bounding radius covers the curve")
{
    for (const Curve& c : {Curve::kite(), Curve::ellipse(2, 1).translated({1, 1}), Curve::smooth_star(0.2, 4)}) {
        double m = 0.0;
        for (int j = 0; j < 1000; ++j) {
            const Vec2 x = c.point(2 * kPi * j / 1000);
            m = std::max(m, std::hypot(x[0], x[1]));
        }
        CHECK(m <= c.bounding_radius() + 1e-12);
    }
}
