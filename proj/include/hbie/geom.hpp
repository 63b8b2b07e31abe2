#pragma once
//
// Smooth closed parametrized curves and their trapezoid discretizations.
//

#include <array>
#include <string>
#include <vector>

namespace hbie {

using Vec2 = std::array<double, 2>;

enum class CurveFamily { Circle, Ellipse, Kite, SmoothStar };

// Analytic closed curve x : [0, 2pi) -> R^2, counterclockwise. Immutable;
// translated()/scaled() return new curves.
class Curve {
public:
    static Curve circle(double radius);
    static Curve ellipse(double semi_x, double semi_y);
    // (cos t + c cos 2t - c, h sin t); standard kite has c = 0.65, h = 1.5.
    static Curve kite(double c = 0.65, double h = 1.5);
    // radius r0 (1 + eps cos(m t)).
    static Curve smooth_star(double eps, int m, double r0 = 1.0);

    Curve translated(const Vec2& shift) const;
    Curve scaled(double factor) const;

    Vec2 point(double t) const;
    Vec2 d1(double t) const;
    Vec2 d2(double t) const;
    // Unit outward normal (x2', -x1') / |x'|.
    Vec2 normal(double t) const;
    double speed(double t) const;
    double curvature(double t) const;

    CurveFamily family() const { return family_; }
    const std::string& name() const { return name_; }
    const std::vector<double>& params() const { return params_; }
    double scale() const { return scale_; }
    const Vec2& offset() const { return offset_; }
    // True for a circle (any centre); radius() is then meaningful.
    bool is_circle() const { return family_ == CurveFamily::Circle; }
    double radius() const;
    // Upper bound on sup |x(t)|.
    double bounding_radius() const;

private:
    Curve(CurveFamily family, std::string name, std::vector<double> params);
    // Unscaled, untranslated shape and its derivatives (order 0, 1, 2).
    Vec2 shape(double t, int order) const;

    CurveFamily family_;
    std::string name_;
    std::vector<double> params_;
    double scale_ = 1.0;
    Vec2 offset_{0.0, 0.0};
};

// Construct by family name: circle [r], ellipse [a, b], kite [] or [c, h],
// smooth_star [eps, m] or [eps, m, r0]. Throws InvalidParameter.
Curve make_curve(const std::string& name, const std::vector<double>& params);

struct BoundaryGrid {
    Curve curve;
    int N = 0;
    std::vector<double> t;
    std::vector<Vec2> points;
    std::vector<Vec2> d1;
    std::vector<Vec2> d2;
    std::vector<Vec2> normals;
    std::vector<double> speeds;
    std::vector<double> weights;

    double length() const;
};

// N even, 16 <= N <= 16384.
BoundaryGrid boundary_grid(const Curve& curve, int N);

// min over M samples of x(t) . n(t); M >= 256.
double star_shaped_margin(const Curve& curve, int M);

} // namespace hbie
