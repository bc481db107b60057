#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "foldtrace/diagnostics.hpp"
#include "foldtrace/field.hpp"
#include "foldtrace/types.hpp"

// Turning-point navigation: sample the half-circle facing away from the blocked
// half-plane, collect the solutions found on it, and pick the one furthest from a
// reference point on the incoming branch as the place to resume iteration.

namespace foldtrace {

struct ScanConfig {
    double radius = 0.01;      ///< radius r of the disk R around the turning point
    int mesh_count = 8;        ///< n samples on the half-circle
    int reference_lag = 5;     ///< k steps back for the reference point
    double residual_tol = 1e-10;

    void validate() const {
        if (!(radius > 0.0) || !(residual_tol > 0.0) || mesh_count < 1 || reference_lag < 1) {
            throw std::invalid_argument("ScanConfig: radius, residual_tol > 0 and mesh_count, reference_lag >= 1");
        }
    }
};

struct Candidate {
    Point2 point;
    int mesh_index = 0;  ///< mesh interval (or mesh point) the solution was found in
};

struct CandidateSet {
    std::vector<Candidate> candidates;  ///< ordered by strictly increasing mesh_index
    std::vector<int> skipped;           ///< mesh indices where the field could not be evaluated

    bool empty() const { return candidates.empty(); }
    std::size_t size() const { return candidates.size(); }
};

/// Angle of the first sample for each kind; the arc then runs counter-clockwise
/// through pi radians, always on the side opposite the blocked direction.
inline double half_circle_start_angle(TurningPointKind kind) {
    constexpr double pi = std::numbers::pi;
    switch (kind) {
        case TurningPointKind::Type1: return pi / 2.0;        // west half
        case TurningPointKind::Type2: return pi;              // south half
        case TurningPointKind::Type3: return 3.0 * pi / 2.0;  // east half
        case TurningPointKind::Type4: return 0.0;             // north half
    }
    return 0.0;
}

/// Angle of sample i out of n. For Type1 this is (pi / 2n)(n + 2i).
inline double half_circle_angle(TurningPointKind kind, int n, int i) {
    constexpr double pi = std::numbers::pi;
    const double type1 = pi / (2.0 * n) * (n + 2 * i);
    return type1 + (half_circle_start_angle(kind) - pi / 2.0);
}

inline Point2 point_on_circle(Point2 center, double radius, double theta) {
    return {radius * std::cos(theta) + center.x, radius * std::sin(theta) + center.y};
}

/// n uniformly spaced samples g_0..g_{n-1} of the half-circle of the given radius
/// about `center` that faces away from the blocked direction of `kind`.
inline std::vector<Point2> mesh_half_circle(Point2 center, double radius, int n, TurningPointKind kind) {
    if (!(radius > 0.0) || n < 1) {
        throw std::invalid_argument("mesh_half_circle: radius > 0 and n >= 1 required");
    }
    std::vector<Point2> mesh;
    mesh.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        mesh.push_back(point_on_circle(center, radius, half_circle_angle(kind, n, i)));
    }
    return mesh;
}

namespace detail {

inline std::optional<double> try_evaluate(ResidualField& field, Point2 p) {
    try {
        const double v = field(p);
        if (!std::isfinite(v)) {
            return std::nullopt;
        }
        return v;
    } catch (const FieldEvaluationError& e) {
        log(LogLevel::Debug, "field evaluation failed at (", p.x, ", ", p.y, "): ", e.what());
        return std::nullopt;
    }
}

// Bisection in arc angle on [a, b] where f changes sign. Returns the refined point
// only if it satisfies the residual tolerance.
inline std::optional<Point2> bisect_arc(ResidualField& field, Point2 center, double radius, double a, double fa,
                                        double b, double tol) {
    Point2 best = point_on_circle(center, radius, a);
    double best_abs = std::abs(fa);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (!(mid > a && mid < b)) {
            break;
        }
        const Point2 p = point_on_circle(center, radius, mid);
        const auto fm = try_evaluate(field, p);
        if (!fm) {
            return std::nullopt;
        }
        if (std::abs(*fm) < best_abs) {
            best = p;
            best_abs = std::abs(*fm);
        }
        if (best_abs <= tol) {
            return best;
        }
        if (std::signbit(*fm) == std::signbit(fa)) {
            a = mid;
            fa = *fm;
        } else {
            b = mid;
        }
    }
    if (best_abs <= tol) {
        return best;
    }
    log(LogLevel::Debug, "sign change without a root near angle ", 0.5 * (a + b), " (|f| = ", best_abs, ")");
    return std::nullopt;
}

}  // namespace detail

/// Finds the solutions of f = 0 on the sampled half-circle.
///
/// `mesh` must be the output of mesh_half_circle for (center, radius). Mesh points with
/// |f| <= residual_tol are accepted directly; a sign change between consecutive samples
/// is refined by bisection in arc angle. The arc's closing endpoint (angle pi past the
/// first sample) is evaluated as well, with mesh index n, so roots between the last
/// sample and the end of the arc are not lost.
inline CandidateSet scan_boundary(ResidualField& field, std::span<const Point2> mesh, Point2 center, double radius,
                                  const ScanConfig& cfg) {
    if (mesh.empty()) {
        throw std::invalid_argument("scan_boundary: empty mesh");
    }
    const int n = static_cast<int>(mesh.size());
    const double step = std::numbers::pi / n;
    const double theta0 = std::atan2(mesh[0].y - center.y, mesh[0].x - center.x);
    const double tol = cfg.residual_tol;

    std::vector<std::optional<double>> values(static_cast<std::size_t>(n) + 1);
    std::vector<Point2> points(mesh.begin(), mesh.end());
    points.push_back(point_on_circle(center, radius, theta0 + n * step));

    CandidateSet out;
    for (int i = 0; i <= n; ++i) {
        values[i] = detail::try_evaluate(field, points[i]);
        if (!values[i]) {
            out.skipped.push_back(i);
        }
    }
    auto is_root = [&](int i) { return values[i] && std::abs(*values[i]) <= tol; };

    for (int i = 0; i <= n; ++i) {
        if (is_root(i)) {
            out.candidates.push_back({points[i], i});
            continue;
        }
        if (i == n || is_root(i + 1) || !values[i] || !values[i + 1]) {
            continue;
        }
        if (std::signbit(*values[i]) == std::signbit(*values[i + 1])) {
            continue;
        }
        const double a = theta0 + i * step;
        const double b = theta0 + (i + 1) * step;
        if (auto root = detail::bisect_arc(field, center, radius, a, *values[i], b, tol)) {
            out.candidates.push_back({*root, i});
        }
    }
    return out;
}

/// Index of the reference point for a turning point at path index j.
///
/// Starts at i = max(j - k, 0). If that point is not strictly inside the disk R the
/// search moves forward towards j for the first point that is; the immediate
/// predecessor j - 1 is the fallback. Points on the circle itself count as outside.
inline std::size_t reference_index(std::span<const Point2> path, std::size_t j, const ScanConfig& cfg) {
    if (j == 0 || path.size() < 2) {
        throw InsufficientHistory("choose_reference_point: the turning point has no predecessor");
    }
    if (j >= path.size()) {
        throw std::out_of_range("choose_reference_point: turning index outside the path");
    }
    const Point2 center = path[j];
    const double inside = cfg.radius * (1.0 - 1e-9);
    const std::size_t lag = static_cast<std::size_t>(cfg.reference_lag);
    const std::size_t first = j > lag ? j - lag : 0;
    for (std::size_t i = first; i < j; ++i) {
        if (distance(path[i], center) < inside) {
            return i;
        }
    }
    return j - 1;
}

inline Point2 choose_reference_point(std::span<const Point2> path, std::size_t j, const ScanConfig& cfg) {
    return path[reference_index(path, j, cfg)];
}

/// Candidate minimizing phi(s, t) = 1 / |(s, t) - reference|, i.e. the one furthest from
/// the reference. Equal distances go to the smallest mesh index. Candidates that
/// coincide with the reference are discarded. nullopt means the curve terminates here.
inline std::optional<Candidate> select_exit_point(const CandidateSet& set, Point2 reference) {
    const double coincide = 1e-12 * (1.0 + std::abs(reference.x) + std::abs(reference.y));
    std::optional<Candidate> best;
    double best_distance = -1.0;
    for (const Candidate& c : set.candidates) {
        const double d = distance(c.point, reference);
        if (d <= coincide) {
            log(LogLevel::Info, "discarding candidate at mesh index ", c.mesh_index, ": coincides with the reference");
            continue;
        }
        if (d > best_distance) {
            best = c;
            best_distance = d;
        }
    }
    return best;
}

struct Redirect {
    StepDirection direction;
    Point2 restart;
};

/// Direction of iteration after leaving a turning point through `exit`: the axis of
/// the larger component of exit - turning, signed like that component. On an exact
/// tie the axis perpendicular to the incoming direction wins.
inline Redirect new_direction(Point2 turning, Point2 exit, StepDirection incoming) {
    const double vx = exit.x - turning.x;
    const double vy = exit.y - turning.y;
    if (vx == 0.0 && vy == 0.0) {
        throw ZeroVector("new_direction: exit point equals the turning point");
    }
    Axis axis;
    if (std::abs(vy) > std::abs(vx)) {
        axis = Axis::Y;
    } else if (std::abs(vx) > std::abs(vy)) {
        axis = Axis::X;
    } else {
        axis = other(incoming.axis);
    }
    const double component = axis == Axis::X ? vx : vy;
    return {{axis, component < 0.0 ? Sign::Minus : Sign::Plus}, exit};
}

}  // namespace foldtrace
