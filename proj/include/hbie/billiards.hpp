#pragma once
//
// Billiard flow in the exterior of a set of obstacles: unit-speed straight
// flight with specular reflection, stopped when the ray leaves the ball of
// radius R. Used to classify configurations as trapping or nontrapping
// empirically. The gliding flow along the boundary is not modelled.
//

#include "hbie/geom.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace hbie {

// Convex polygon, vertices counterclockwise.
struct Polygon {
    std::vector<Vec2> vertices;
};

using Obstacle = std::variant<Curve, Polygon>;

class Scene {
public:
    // Throws InvalidParameter when obstacles overlap or do not fit inside
    // the ball of radius R.
    Scene(std::vector<Obstacle> obstacles, double R);

    double R() const { return R_; }
    std::size_t size() const { return obstacles_.size(); }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    bool has_polygons() const;
    // True when x lies inside (or on) some obstacle.
    bool inside_obstacle(const Vec2& x) const;

    struct Prepared {
        bool polygon = false;
        std::vector<Vec2> samples;  // curve samples at t_m = 2 pi m / M, or vertices
        Vec2 centre{};
        double radius = 0.0;        // bounding circle about centre
    };
    const std::vector<Prepared>& prepared() const { return prepared_; }

private:
    std::vector<Obstacle> obstacles_;
    double R_;
    std::vector<Prepared> prepared_;
};

enum class Termination { Escaped, TimeBudget, VertexHit };
const char* termination_name(Termination t);

struct Bounce {
    Vec2 point;
    Vec2 normal;     // unit normal of the obstacle at the hit
    Vec2 incoming;   // unit direction before reflection
    Vec2 outgoing;   // after
    int obstacle = 0;
};

struct RayOutcome {
    bool escaped = false;
    double escape_time = 0.0;  // time of flight until |x| = R when escaped
    double time = 0.0;         // time of flight when tracing stopped
    int bounces = 0;
    Termination reason = Termination::TimeBudget;
    // Set when a near-grazing hit could not be resolved; the ray is then
    // stopped with reason TimeBudget.
    bool unresolved_graze = false;
    Vec2 position{};
    Vec2 direction{};
    std::vector<Bounce> path;
};

// start inside B_R and outside all obstacles; direction nonzero (normalized
// internally).
RayOutcome trace_ray(const Scene& scene, const Vec2& start, const Vec2& direction, double time_budget);

struct EscapeStatistics {
    int samples = 0;
    int escaped = 0;
    int vertex_hits = 0;
    int unresolved = 0;
    double max_escape_time = 0.0;
    double fraction_escaped = 0.0;  // escaped / (samples - vertex_hits)
    std::string classification;     // "nontrapping_empirical" or "trapping_empirical"
};

// Uniform starts in B_R minus the obstacles, uniform directions. Ray i uses
// its own generator seeded from (seed, i), so results do not depend on the
// thread count.
EscapeStatistics escape_statistics(const Scene& scene, int sample_count, double time_budget, std::uint64_t seed);

} // namespace hbie
