#include "hbie/billiards.hpp"

#include "hbie/errors.hpp"
#include "hbie/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hbie {

namespace {

constexpr int kCurveSamples = 1024;
constexpr double kMinFlight = 1e-10;
constexpr double kVertexTolerance = 1e-12;
constexpr int kMaxBounces = 1000000;
constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }
double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
Vec2 axpy(const Vec2& p, double s, const Vec2& v) { return {p[0] + s * v[0], p[1] + s * v[1]}; }
double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

// Even-odd test against a closed polyline.
bool inside_polyline(const std::vector<Vec2>& poly, const Vec2& x)
{
    bool in = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a[1] > x[1]) != (b[1] > x[1])) {
            const double xc = a[0] + (x[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if (x[0] < xc)
                in = !in;
        }
    }
    return in;
}

struct Hit {
    double s = kInf;
    Vec2 normal{};
    int obstacle = -1;
    bool vertex = false;
    bool failed = false;
};

// Root of f(t) = cross(v, x(t) - p) in [a, b] with f(a) f(b) <= 0:
// Newton steps kept inside a shrinking bracket.
bool refine_root(const Curve& c, const Vec2& p, const Vec2& v, double a, double b, double fa, double& t)
{
    t = 0.5 * (a + b);
    for (int it = 0; it < 100; ++it) {
        const double f = cross(v, sub(c.point(t), p));
        if (f == 0.0 || (b - a) < 1e-15)
            return true;
        if ((f < 0) == (fa < 0)) {
            a = t;
            fa = f;
        } else {
            b = t;
        }
        const double df = cross(v, c.d1(t));
        double tn = df != 0.0 ? t - f / df : 0.5 * (a + b);
        if (!(tn > a && tn < b))
            tn = 0.5 * (a + b);
        if (std::abs(tn - t) < 1e-15)
            return true;
        t = tn;
    }
    return std::isfinite(t);
}

void curve_hit(const Curve& c, const Scene::Prepared& pr, int index, const Vec2& p, const Vec2& v, Hit& best)
{
    const int M = static_cast<int>(pr.samples.size());
    std::vector<double> f(M + 1), s(M + 1);
    for (int m = 0; m < M; ++m) {
        const Vec2 d = sub(pr.samples[m], p);
        f[m] = cross(v, d);
        s[m] = dot(v, d);
    }
    f[M] = f[0];
    s[M] = s[0];
    const double h = 2.0 * kPi / M;
    for (int m = 0; m < M; ++m) {
        if ((f[m] > 0) == (f[m + 1] > 0) && f[m] != 0.0)
            continue;
        if (std::max(s[m], s[m + 1]) < 0.0)
            continue;
        double t;
        if (!refine_root(c, p, v, m * h, (m + 1) * h, f[m], t)) {
            best.failed = true;
            continue;
        }
        const double sh = dot(v, sub(c.point(t), p));
        if (sh > kMinFlight && sh < best.s) {
            best.s = sh;
            best.normal = c.normal(t);
            best.obstacle = index;
            best.vertex = false;
        }
    }
}

// Circles are intersected in closed form; this keeps symmetric orbits
// exactly symmetric.
void circle_hit(const Curve& c, int index, const Vec2& p, const Vec2& v, Hit& best)
{
    const Vec2 q = sub(p, c.offset());
    const double r = c.radius();
    const double b = dot(q, v);
    const double disc = b * b - (dot(q, q) - r * r);
    if (disc < 0.0)
        return;
    const double sq = std::sqrt(disc);
    for (double sh : {-b - sq, -b + sq}) {
        if (sh > kMinFlight && sh < best.s) {
            const Vec2 x = axpy(q, sh, v);
            best.s = sh;
            best.normal = {x[0] / r, x[1] / r};
            best.obstacle = index;
            best.vertex = false;
            return;
        }
    }
}

void polygon_hit(const std::vector<Vec2>& V, int index, const Vec2& p, const Vec2& v, Hit& best)
{
    const std::size_t n = V.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = V[i];
        const Vec2& b = V[(i + 1) % n];
        const Vec2 e = sub(b, a);
        const double den = cross(v, e);
        if (den == 0.0)
            continue;
        const Vec2 ap = sub(a, p);
        const double s = cross(ap, e) / den;
        const double u = cross(ap, v) / den;
        if (!(s > kMinFlight) || s >= best.s)
            continue;
        const double len = norm(e);
        const double tol = kVertexTolerance / len;
        if (u < -tol || u > 1.0 + tol)
            continue;
        best.s = s;
        best.normal = {e[1] / len, -e[0] / len};
        best.obstacle = index;
        best.vertex = u * len <= kVertexTolerance || (1.0 - u) * len <= kVertexTolerance;
    }
}

double exit_distance(const Vec2& p, const Vec2& v, double R)
{
    const double pv = dot(p, v);
    const double c = dot(p, p) - R * R;
    return -pv + std::sqrt(std::max(0.0, pv * pv - c));
}

} // namespace

const char* termination_name(Termination t)
{
    switch (t) {
    case Termination::Escaped:
        return "escaped";
    case Termination::TimeBudget:
        return "time_budget";
    case Termination::VertexHit:
        return "vertex_hit";
    }
    return "?";
}

Scene::Scene(std::vector<Obstacle> obstacles, double R) : obstacles_(std::move(obstacles)), R_(R)
{
    if (!(R > 0.0) || !std::isfinite(R))
        throw InvalidParameter("scene: R must be positive and finite");
    for (const Obstacle& o : obstacles_) {
        Prepared pr;
        if (const auto* c = std::get_if<Curve>(&o)) {
            for (int m = 0; m < kCurveSamples; ++m)
                pr.samples.push_back(c->point(2.0 * kPi * m / kCurveSamples));
        } else {
            const Polygon& poly = std::get<Polygon>(o);
            const std::size_t n = poly.vertices.size();
            if (n < 3)
                throw InvalidParameter("scene: polygon needs at least 3 vertices");
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2 e1 = sub(poly.vertices[(i + 1) % n], poly.vertices[i]);
                const Vec2 e2 = sub(poly.vertices[(i + 2) % n], poly.vertices[(i + 1) % n]);
                if (!(cross(e1, e2) > 0.0))
                    throw InvalidParameter("scene: polygon must be strictly convex and counterclockwise");
            }
            pr.polygon = true;
            pr.samples = poly.vertices;
        }
        Vec2 c{0.0, 0.0};
        for (const Vec2& x : pr.samples) {
            c[0] += x[0] / pr.samples.size();
            c[1] += x[1] / pr.samples.size();
        }
        pr.centre = c;
        for (const Vec2& x : pr.samples) {
            pr.radius = std::max(pr.radius, norm(sub(x, c)));
            if (!(norm(x) < R))
                throw InvalidParameter("scene: obstacles must lie inside the ball of radius R");
        }
        // Curved arcs bulge between samples.
        pr.radius = pr.radius * 1.01 + 1e-9;
        prepared_.push_back(std::move(pr));
    }
    for (std::size_t i = 0; i < prepared_.size(); ++i)
        for (std::size_t j = i + 1; j < prepared_.size(); ++j) {
            const Prepared& a = prepared_[i];
            const Prepared& b = prepared_[j];
            if (norm(sub(a.centre, b.centre)) > a.radius + b.radius)
                continue;
            const bool overlap =
                std::any_of(a.samples.begin(), a.samples.end(), [&](const Vec2& x) { return inside_polyline(b.samples, x); }) ||
                std::any_of(b.samples.begin(), b.samples.end(), [&](const Vec2& x) { return inside_polyline(a.samples, x); });
            if (overlap)
                throw InvalidParameter("scene: obstacles must be pairwise disjoint");
        }
}

bool Scene::has_polygons() const
{
    return std::any_of(prepared_.begin(), prepared_.end(), [](const Prepared& p) { return p.polygon; });
}

namespace {

// Near the curve the sampled polygon is off by the chord sag; there the
// sign of (x - x(t*)) . n(t*) at the nearest point t* decides.
bool inside_curve(const Curve& c, const std::vector<Vec2>& samples, const Vec2& x)
{
    if (c.is_circle())
        return norm(sub(x, c.offset())) <= c.radius();
    const int M = static_cast<int>(samples.size());
    int best = 0;
    double dbest = kInf, spacing = 0.0;
    for (int m = 0; m < M; ++m) {
        const double d = norm(sub(x, samples[m]));
        if (d < dbest) {
            dbest = d;
            best = m;
        }
        spacing = std::max(spacing, norm(sub(samples[(m + 1) % M], samples[m])));
    }
    if (dbest > 2.0 * spacing)
        return inside_polyline(samples, x);
    // Newton on g(t) = (x(t) - x) . x'(t)
    const double h = 2.0 * kPi / M;
    double t = h * best;
    for (int it = 0; it < 30; ++it) {
        const Vec2 r = sub(c.point(t), x), d1 = c.d1(t), d2 = c.d2(t);
        const double g = dot(r, d1), gp = dot(d1, d1) + dot(r, d2);
        if (!(gp > 0.0))
            break;
        const double step = std::clamp(g / gp, -h, h);
        t -= step;
        if (std::abs(step) < 1e-15)
            break;
    }
    return dot(sub(x, c.point(t)), c.normal(t)) <= 0.0;
}

} // namespace

bool Scene::inside_obstacle(const Vec2& x) const
{
    for (std::size_t i = 0; i < prepared_.size(); ++i) {
        const Prepared& p = prepared_[i];
        if (norm(sub(x, p.centre)) > p.radius)
            continue;
        const bool in = p.polygon ? inside_polyline(p.samples, x)
                                  : inside_curve(std::get<Curve>(obstacles_[i]), p.samples, x);
        if (in)
            return true;
    }
    return false;
}

RayOutcome trace_ray(const Scene& scene, const Vec2& start, const Vec2& direction, double time_budget)
{
    if (!(time_budget > 0.0) || !std::isfinite(time_budget))
        throw InvalidParameter("trace_ray: time budget must be positive and finite");
    const double vn = norm(direction);
    if (!(vn > 0.0) || !std::isfinite(vn))
        throw InvalidParameter("trace_ray: direction must be nonzero");
    if (!(norm(start) <= scene.R() * (1.0 + 1e-12)))
        throw InvalidParameter("trace_ray: start must lie in the ball of radius R");
    if (scene.inside_obstacle(start))
        throw InvalidParameter("trace_ray: start lies inside an obstacle");

    RayOutcome out;
    Vec2 p = start;
    Vec2 v{direction[0] / vn, direction[1] / vn};
    double time = 0.0;
    const auto& prepared = scene.prepared();
    for (;;) {
        Hit hit;
        for (std::size_t i = 0; i < prepared.size(); ++i) {
            const Scene::Prepared& pr = prepared[i];
            const Vec2 pc = sub(pr.centre, p);
            if (std::abs(cross(v, pc)) > pr.radius || dot(v, pc) < -pr.radius)
                continue;
            if (pr.polygon)
                polygon_hit(pr.samples, static_cast<int>(i), p, v, hit);
            else if (const Curve& c = std::get<Curve>(scene.obstacles()[i]); c.is_circle())
                circle_hit(c, static_cast<int>(i), p, v, hit);
            else
                curve_hit(c, pr, static_cast<int>(i), p, v, hit);
        }
        const double se = exit_distance(p, v, scene.R());
        if (se <= hit.s) {
            if (time + se <= time_budget) {
                out.escaped = true;
                out.reason = Termination::Escaped;
                time += se;
                out.escape_time = time;
                p = axpy(p, se, v);
            } else {
                p = axpy(p, time_budget - time, v);
                time = time_budget;
                out.unresolved_graze = hit.failed;
            }
            break;
        }
        if (time + hit.s > time_budget) {
            p = axpy(p, time_budget - time, v);
            time = time_budget;
            break;
        }
        time += hit.s;
        p = axpy(p, hit.s, v);
        if (hit.vertex) {
            out.reason = Termination::VertexHit;
            break;
        }
        const Vec2 n = hit.normal;
        const double vn_dot = dot(v, n);
        if (vn_dot > 0.0 || out.bounces >= kMaxBounces) {
            // Hit from the inside or runaway grazing sequence: stop conservatively.
            out.unresolved_graze = true;
            break;
        }
        const Vec2 w{v[0] - 2.0 * vn_dot * n[0], v[1] - 2.0 * vn_dot * n[1]};
        out.path.push_back({p, n, v, w, hit.obstacle});
        v = w;
        ++out.bounces;
    }
    out.time = time;
    out.position = p;
    out.direction = v;
    return out;
}

EscapeStatistics escape_statistics(const Scene& scene, int sample_count, double time_budget, std::uint64_t seed)
{
    if (sample_count < 1000)
        throw InvalidParameter("escape_statistics: sample_count must be >= 1000");
    std::vector<RayOutcome> outcomes(sample_count);
    const double R = scene.R();
#pragma omp parallel for schedule(dynamic, 64)
    for (int i = 0; i < sample_count; ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 gen(seq);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        Vec2 x;
        do {
            const double r = R * std::sqrt(U(gen));
            const double th = 2.0 * kPi * U(gen);
            x = {r * std::cos(th), r * std::sin(th)};
        } while (scene.inside_obstacle(x));
        const double phi = 2.0 * kPi * U(gen);
        RayOutcome o = trace_ray(scene, x, {std::cos(phi), std::sin(phi)}, time_budget);
        o.path.clear();
        o.path.shrink_to_fit();
        outcomes[i] = std::move(o);
    }

    EscapeStatistics st;
    st.samples = sample_count;
    for (const RayOutcome& o : outcomes) {
        if (o.reason == Termination::VertexHit) {
            ++st.vertex_hits;
            continue;
        }
        if (o.unresolved_graze)
            ++st.unresolved;
        if (o.escaped) {
            ++st.escaped;
            st.max_escape_time = std::max(st.max_escape_time, o.escape_time);
        }
    }
    const int counted = st.samples - st.vertex_hits;
    st.fraction_escaped = counted > 0 ? double(st.escaped) / counted : 0.0;
    st.classification = st.escaped == counted ? "nontrapping_empirical" : "trapping_empirical";
    return st;
}

} // namespace hbie
