#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "foldtrace/diagnostics.hpp"
#include "foldtrace/field.hpp"
#include "foldtrace/rootfind.hpp"
#include "foldtrace/turnpoint.hpp"
#include "foldtrace/types.hpp"

namespace foldtrace {

enum class PointFlag { Ordinary, TurningPoint, Restart };

inline std::string to_string(PointFlag f) {
    switch (f) {
        case PointFlag::Ordinary: return "ordinary";
        case PointFlag::TurningPoint: return "turning_point";
        case PointFlag::Restart: return "restart";
    }
    return "ordinary";
}

inline std::optional<PointFlag> parse_flag(std::string_view s) {
    if (s == "ordinary") return PointFlag::Ordinary;
    if (s == "turning_point") return PointFlag::TurningPoint;
    if (s == "restart") return PointFlag::Restart;
    return std::nullopt;
}

/// Ordered points accepted by the tracer, each with an annotation.
struct SolutionPath {
    std::vector<Point2> points;
    std::vector<PointFlag> flags;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    const Point2& back() const { return points.back(); }

    void push_back(Point2 p, PointFlag f = PointFlag::Ordinary) {
        points.push_back(p);
        flags.push_back(f);
    }

    std::size_t count(PointFlag f) const { return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), f)); }

    friend bool operator==(const SolutionPath&, const SolutionPath&) = default;
};

struct Box {
    double x_min = -std::numeric_limits<double>::infinity();
    double x_max = std::numeric_limits<double>::infinity();
    double y_min = -std::numeric_limits<double>::infinity();
    double y_max = std::numeric_limits<double>::infinity();

    bool contains(Point2 p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
};

struct TraceConfig {
    double step_x = 0.01;  ///< delta along x
    double step_y = 0.01;  ///< delta along y
    /// Turning-point scan. A radius of 0 selects the step size of the axis that stalled.
    ScanConfig scan{0.0, 8, 5, 1e-10};
    int slice_max_iter = 50;
    std::size_t max_points = 100000;
    std::optional<Box> domain_box;
    std::optional<double> closure_tol;     ///< default: the smaller step size
    std::optional<double> slice_bracket;   ///< default: 10 x the transverse step size
    std::size_t closure_min_points = 10;
    /// When set, an accepted step whose transverse displacement exceeds this many times
    /// its driven displacement (both in units of their step sizes) switches the stepping
    /// axis to the transverse one. Off by default: the curve then changes axis only at
    /// turning points.
    std::optional<double> steep_switch;

    double step(Axis a) const { return a == Axis::X ? step_x : step_y; }
    double scan_radius(Axis stalled) const { return scan.radius > 0.0 ? scan.radius : step(stalled); }
    double closure_tolerance() const { return closure_tol.value_or(std::min(step_x, step_y)); }
    double bracket(Axis transverse) const { return slice_bracket.value_or(10.0 * step(transverse)); }

    void validate() const {
        if (!(step_x > 0.0) || !(step_y > 0.0) || max_points < 2 || slice_max_iter < 1 || scan.radius < 0.0 ||
            !(scan.residual_tol > 0.0) || scan.mesh_count < 1 || scan.reference_lag < 1 ||
            (closure_tol && !(*closure_tol > 0.0)) || (slice_bracket && !(*slice_bracket > 0.0)) ||
            (steep_switch && !(*steep_switch > 0.0))) {
            throw std::invalid_argument("TraceConfig: step sizes, tolerances and counts must be positive");
        }
    }
};

/// Normal control-flow signal: the slice solve lost its root.
struct Stalled {
    std::string reason;
};

using StepOutcome = std::variant<Point2, Stalled>;

/// Moves the driven coordinate of `from` by `offset` and re-solves the transverse
/// coordinate, seeded at its current value and confined to `bracket` around it.
inline StepOutcome slice_solve(ResidualField& field, Point2 from, Axis driven, double offset, double bracket,
                               double tol, int max_iter) {
    const Axis transverse = other(driven);
    const double target = coordinate(from, driven) + offset;
    const double seed = coordinate(from, transverse);
    field.set_free_axis(transverse);
    auto g = [&](double t) {
        Point2 p = with_coordinate(from, driven, target);
        return field(with_coordinate(p, transverse, t));
    };
    ScalarSolveConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    try {
        const ScalarSolution s = solve_scalar(g, seed, cfg);
        if (std::abs(s.x - seed) > bracket) {
            return Stalled{"root left the slice bracket"};
        }
        return with_coordinate(with_coordinate(from, driven, target), transverse, s.x);
    } catch (const NoConvergence& e) {
        return Stalled{e.what()};
    } catch (const FieldEvaluationError& e) {
        return Stalled{e.what()};
    } catch (const std::invalid_argument& e) {
        return Stalled{e.what()};
    }
}

/// One continuation step of size delta along `dir`.
inline StepOutcome step(ResidualField& field, Point2 current, StepDirection dir, const TraceConfig& cfg) {
    const double delta = cfg.step(dir.axis);
    return slice_solve(field, current, dir.axis, dir.unit() * delta, cfg.bracket(other(dir.axis)),
                       cfg.scan.residual_tol, cfg.slice_max_iter);
}

/// A stall while stepping along `dir` means the half-plane in that direction is empty.
inline TurningPointKind classify_turning_point(StepDirection dir) {
    if (dir.axis == Axis::X) {
        return dir.sign == Sign::Plus ? TurningPointKind::Type1 : TurningPointKind::Type3;
    }
    return dir.sign == Sign::Plus ? TurningPointKind::Type2 : TurningPointKind::Type4;
}

enum class Termination { Closed, CurveTerminated, LeftDomain, MaxPoints, InsufficientHistory };

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::Closed: return "closed";
        case Termination::CurveTerminated: return "curve terminated";
        case Termination::LeftDomain: return "left domain";
        case Termination::MaxPoints: return "max points";
        case Termination::InsufficientHistory: return "insufficient history";
    }
    return "unknown";
}

struct TurningEvent {
    std::size_t index = 0;  ///< path index of the turning point
    TurningPointKind kind = TurningPointKind::Type1;
    std::size_t candidates = 0;
    std::optional<std::size_t> restart_index;  ///< unset when the event ended the trace
    std::optional<StepDirection> new_direction;
};

struct TraceResult {
    SolutionPath path;
    std::vector<TurningEvent> events;
    Termination termination = Termination::MaxPoints;
};

/// A field failure that aborted a trace; carries the path up to that point.
class TraceFailure : public Error {
public:
    TraceFailure(const std::string& what, TraceResult partial) : Error(what), partial_(std::move(partial)) {}
    const TraceResult& partial() const { return partial_; }

private:
    TraceResult partial_;
};

namespace detail {

inline double distance_to_segment(Point2 p, Point2 a, Point2 b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, {a.x + t * dx, a.y + t * dy});
}

class Tracer {
public:
    Tracer(ResidualField& field, StepDirection initial, const TraceConfig& cfg)
        : field_(field), initial_(initial), cfg_(cfg) {}

    TraceResult run(Point2 start) {
        try {
            return run_unchecked(start);
        } catch (const FieldEvaluationError& e) {
            throw TraceFailure(e.what(), std::move(result_));
        } catch (const ZeroVector& e) {
            throw TraceFailure(e.what(), std::move(result_));
        }
    }

private:
    TraceResult run_unchecked(Point2 start) {
        field_.set_free_axis(std::nullopt);
        const double f0 = field_(start);
        if (!(std::abs(f0) <= cfg_.scan.residual_tol)) {
            throw std::invalid_argument("trace: |f(start)| exceeds the residual tolerance");
        }
        if (cfg_.domain_box && !cfg_.domain_box->contains(start)) {
            throw std::invalid_argument("trace: start lies outside the domain box");
        }
        append(start, PointFlag::Ordinary);

        StepDirection dir = initial_;
        while (true) {
            if (result_.path.size() >= cfg_.max_points) {
                return finish(Termination::MaxPoints);
            }
            const Point2 current = result_.path.back();
            StepOutcome outcome = step(field_, current, dir, cfg_);
            if (const Point2* next = std::get_if<Point2>(&outcome)) {
                if (auto t = accept(*next, PointFlag::Ordinary, dir)) {
                    return finish(*t);
                }
                maybe_switch_axis(current, *next, dir);
                continue;
            }
            log(LogLevel::Debug, "stalled at (", current.x, ", ", current.y, ") heading ", to_string(dir), ": ",
                std::get<Stalled>(outcome).reason);
            if (auto t = handle_turning_point(dir)) {
                return finish(*t);
            }
        }
    }

    void maybe_switch_axis(Point2 from, Point2 to, StepDirection& dir) const {
        if (!cfg_.steep_switch) {
            return;
        }
        const Axis transverse = other(dir.axis);
        const double moved = coordinate(to, transverse) - coordinate(from, transverse);
        const double driven = std::abs(coordinate(to, dir.axis) - coordinate(from, dir.axis)) / cfg_.step(dir.axis);
        if (std::abs(moved) / cfg_.step(transverse) > *cfg_.steep_switch * driven) {
            dir = {transverse, moved < 0.0 ? Sign::Minus : Sign::Plus};
            log(LogLevel::Debug, "steep slice at (", to.x, ", ", to.y, "): now heading ", to_string(dir));
        }
    }

    void append(Point2 p, PointFlag f) {
        result_.path.push_back(p, f);
        field_.on_accept(p);
    }

    TraceResult finish(Termination t) {
        result_.termination = t;
        log(LogLevel::Info, "trace finished: ", to_string(t), " after ", result_.path.size(), " points and ",
            result_.events.size(), " turning points");
        return std::move(result_);
    }

    // Back on the first stretch of the path, heading the original way.
    bool closes(Point2 p, StepDirection dir) const {
        const auto& pts = result_.path.points;
        if (pts.size() < cfg_.closure_min_points || dir != initial_) {
            return false;
        }
        const double tol = cfg_.closure_tolerance();
        if (distance(p, pts[0]) <= tol) {
            return true;
        }
        const std::size_t last = std::min<std::size_t>(pts.size(), 3);
        for (std::size_t i = 1; i < last; ++i) {
            if (distance_to_segment(p, pts[i - 1], pts[i]) <= tol) {
                return true;
            }
        }
        return false;
    }

    // Appends p unless it lies outside the domain box. The point that closes the curve
    // is kept, so the path ends within closure tolerance of its start.
    std::optional<Termination> accept(Point2 p, PointFlag f, StepDirection dir) {
        if (cfg_.domain_box && !cfg_.domain_box->contains(p)) {
            return Termination::LeftDomain;
        }
        const bool closed = closes(p, dir);
        append(p, f);
        if (closed) {
            return Termination::Closed;
        }
        return std::nullopt;
    }

    struct Fold {
        Point2 point;
        bool full_step = false;  ///< every probe succeeded, so the stall was not a fold
    };

    // Pushes the driven coordinate as far as the slice still has a root, bisecting on
    // the step length. Returns the furthest on-curve point found.
    Fold locate_fold(Point2 current, StepDirection dir, double radius) {
        const Axis transverse = other(dir.axis);
        const double bracket = cfg_.bracket(transverse);
        const double origin = coordinate(current, dir.axis);
        const double width = std::max(1e-9 * radius, 8.0 * std::numeric_limits<double>::epsilon() *
                                                         (1.0 + std::abs(origin)));
        double lo = 0.0;
        double hi = cfg_.step(dir.axis);
        bool failed = false;
        Point2 best = current;
        for (int it = 0; it < 100 && hi - lo > width; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double offset = origin + dir.unit() * mid - coordinate(best, dir.axis);
            StepOutcome o =
                slice_solve(field_, best, dir.axis, offset, bracket, cfg_.scan.residual_tol, cfg_.slice_max_iter);
            if (const Point2* p = std::get_if<Point2>(&o)) {
                lo = mid;
                best = *p;
            } else {
                hi = mid;
                failed = true;
            }
        }
        return {best, !failed};
    }

    std::optional<Termination> handle_turning_point(StepDirection& dir) {
        const double radius = cfg_.scan_radius(dir.axis);
        const Point2 current = result_.path.back();
        const auto [fold, full_step] = locate_fold(current, dir, radius);
        if (full_step) {
            // The root jumped past the slice bracket; approaching in smaller steps reached it.
            return accept(fold, PointFlag::Ordinary, dir);
        }

        if (distance(fold, current) > 1e-3 * radius) {
            if (auto t = accept(fold, PointFlag::TurningPoint, dir)) {
                return t;
            }
        } else {
            result_.path.flags.back() = PointFlag::TurningPoint;
        }
        const std::size_t j = result_.path.size() - 1;
        const Point2 turning = result_.path.points[j];

        TurningEvent event;
        event.index = j;
        event.kind = classify_turning_point(dir);

        ScanConfig scan = cfg_.scan;
        scan.radius = radius;
        const auto mesh = mesh_half_circle(turning, radius, scan.mesh_count, event.kind);
        field_.set_free_axis(dir.axis);
        const CandidateSet candidates = scan_boundary(field_, mesh, turning, radius, scan);
        event.candidates = candidates.size();
        log(LogLevel::Info, "turning point ", to_string(event.kind), " at (", turning.x, ", ", turning.y, "): ",
            candidates.size(), " candidate(s)");

        if (candidates.empty()) {
            result_.events.push_back(event);
            return Termination::CurveTerminated;
        }
        if (j == 0) {
            result_.events.push_back(event);
            return Termination::InsufficientHistory;
        }
        const Point2 reference = choose_reference_point(result_.path.points, j, scan);
        const auto exit = select_exit_point(candidates, reference);
        if (!exit) {
            result_.events.push_back(event);
            return Termination::CurveTerminated;
        }
        const Redirect redirect = new_direction(turning, exit->point, dir);
        event.new_direction = redirect.direction;
        result_.events.push_back(event);

        const auto t = accept(redirect.restart, PointFlag::Restart, redirect.direction);
        if (t != Termination::LeftDomain) {
            result_.events.back().restart_index = result_.path.size() - 1;
        }
        dir = redirect.direction;
        return t;
    }

    ResidualField& field_;
    StepDirection initial_;
    TraceConfig cfg_;
    TraceResult result_;
};

}  // namespace detail

/// Traces the solution curve of `field` from `start`, stepping along `initial_dir`.
///
/// Each stall is treated as a turning point: the fold is located by bisection on the
/// step length, the facing half-circle is scanned for solutions, and stepping resumes
/// from the selected exit point. The trace ends when no exit exists, when the path
/// rejoins its first stretch heading the original way, when it leaves the domain box,
/// or at max_points. Evaluation failures outside the slice and scan solves raise
/// TraceFailure carrying the partial result.
inline TraceResult trace(ResidualField& field, Point2 start, StepDirection initial_dir, const TraceConfig& cfg) {
    cfg.validate();
    if (!is_finite(start)) {
        throw std::invalid_argument("trace: non-finite start point");
    }
    return detail::Tracer(field, initial_dir, cfg).run(start);
}

}  // namespace foldtrace
