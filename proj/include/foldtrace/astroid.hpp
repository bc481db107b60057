#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "foldtrace/field.hpp"
#include "foldtrace/tracer.hpp"
#include "foldtrace/types.hpp"

namespace foldtrace {

/// f(x, y) = cbrt(x)^2 + cbrt(y)^2 - 1, real on the whole plane.
inline double astroid_residual(double x, double y) {
    const double cx = std::cbrt(x);
    const double cy = std::cbrt(y);
    return cx * cx + cy * cy - 1.0;
}

inline auto astroid_field() { return make_field(astroid_residual); }

/// (cos^3 t, sin^3 t)
inline Point2 astroid_point(double t) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    return {c * c * c, s * s * s};
}

/// Parameter of the exact astroid point nearest to p: dense sampling, then
/// golden-section refinement of the squared distance around the best sample.
inline double nearest_astroid_parameter(Point2 p) {
    constexpr int samples = 2048;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto d2 = [&](double t) {
        const Point2 q = astroid_point(t);
        return (q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y);
    };
    int best = 0;
    double best_d = d2(0.0);
    for (int i = 1; i < samples; ++i) {
        const double d = d2(two_pi * i / samples);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    const double h = two_pi / samples;
    double a = h * (best - 1);
    double b = h * (best + 1);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = d2(c);
    double fd = d2(d);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = d2(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = d2(d);
        }
    }
    const double t = 0.5 * (a + b);
    return d2(t) <= best_d ? t : h * best;
}

/// Signed radial percent error of p against its nearest exact astroid point:
/// (|p| - |q|) / |q| * 100.
inline double percent_error(Point2 p) {
    if (p.x == 0.0 && p.y == 0.0) {
        throw std::invalid_argument("percent_error: undefined at the origin");
    }
    const Point2 q = astroid_point(nearest_astroid_parameter(p));
    const double rq = std::hypot(q.x, q.y);
    return (std::hypot(p.x, p.y) - rq) / rq * 100.0;
}

inline double max_abs_percent_error(const SolutionPath& path) {
    double worst = 0.0;
    for (const Point2& p : path.points) {
        worst = std::max(worst, std::abs(percent_error(p)));
    }
    return worst;
}

inline constexpr std::array<Point2, 4> kAstroidCusps{{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}};

// True when the path comes within `reach` of the cusp or one of its stepping segments
// crosses the cusp's axis ray. Jumps to restart points do not count.
inline bool passes_cusp(const SolutionPath& path, Point2 cusp, double reach) {
    auto side = [&](Point2 p) { return cusp.x * p.y - cusp.y * p.x; };
    auto ahead = [&](Point2 p) { return cusp.x * p.x + cusp.y * p.y > 0.0; };
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Point2 b = path.points[i];
        if (distance(b, cusp) <= reach) {
            return true;
        }
        if (i == 0 || path.flags[i] == PointFlag::Restart) {
            continue;
        }
        const Point2 a = path.points[i - 1];
        if (ahead(a) && ahead(b) && (side(a) == 0.0 || std::signbit(side(a)) != std::signbit(side(b)))) {
            return true;
        }
    }
    return false;
}

/// A trace navigated the astroid when it closed and passed every cusp.
inline bool navigated_all_cusps(const TraceResult& r, double reach) {
    if (r.termination != Termination::Closed) {
        return false;
    }
    return std::all_of(kAstroidCusps.begin(), kAstroidCusps.end(),
                       [&](Point2 cusp) { return passes_cusp(r.path, cusp, reach); });
}

struct SweepResult {
    double r_factor = 0.0;  ///< scan radius in units of the step size
    int k = 0;
    int n = 0;
    double max_pe = 0.0;  ///< max |PE| in percent, over the (possibly partial) path
    bool navigated_all_cusps = false;
    std::size_t points = 0;
    std::size_t turning_points = 0;
    std::string termination;
};

inline TraceConfig astroid_config(double delta, double r_factor, int k, int n) {
    TraceConfig cfg;
    cfg.step_x = cfg.step_y = delta;
    cfg.scan.radius = r_factor * delta;
    cfg.scan.reference_lag = k;
    cfg.scan.mesh_count = n;
    cfg.max_points = static_cast<std::size_t>(40.0 / delta) + 1000;
    return cfg;
}

/// Full astroid trace from (0, 1) heading +x.
inline SweepResult run_astroid(double delta, double r_factor, int k, int n) {
    SweepResult out;
    out.r_factor = r_factor;
    out.k = k;
    out.n = n;
    auto field = astroid_field();
    TraceResult result;
    try {
        result = trace(field, {0.0, 1.0}, {Axis::X, Sign::Plus}, astroid_config(delta, r_factor, k, n));
        out.termination = to_string(result.termination);
    } catch (const TraceFailure& e) {
        result = e.partial();
        out.termination = std::string("failure: ") + e.what();
    } catch (const Error& e) {
        out.termination = std::string("failure: ") + e.what();
    } catch (const std::invalid_argument& e) {
        out.termination = std::string("failure: ") + e.what();
    }
    out.max_pe = max_abs_percent_error(result.path);
    out.navigated_all_cusps = navigated_all_cusps(result, 2.0 * delta);
    out.points = result.path.size();
    out.turning_points = result.events.size();
    return out;
}

/// One astroid trace per (r_factor, k, n) combination, in input order with n varying fastest.
inline std::vector<SweepResult> run_sweep(const std::vector<double>& r_factors, const std::vector<int>& k_values,
                                          const std::vector<int>& n_values, double delta) {
    if (r_factors.empty() || k_values.empty() || n_values.empty()) {
        throw std::invalid_argument("run_sweep: parameter lists must be nonempty");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("run_sweep: step size must be positive");
    }
    std::vector<SweepResult> out;
    for (double r : r_factors) {
        for (int k : k_values) {
            for (int n : n_values) {
                out.push_back(run_astroid(delta, r, k, n));
            }
        }
    }
    return out;
}

inline bool sweep_passes(const SweepResult& s, double pe_limit = 0.1) {
    return s.navigated_all_cusps && s.max_pe < pe_limit;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& rows) {
    const auto old = os.precision(17);
    os << "r_factor,k,n,max_pe_percent,navigated_all_cusps\n";
    for (const SweepResult& s : rows) {
        os << s.r_factor << ',' << s.k << ',' << s.n << ',' << s.max_pe << ','
           << (s.navigated_all_cusps ? "true" : "false") << '\n';
    }
    os.precision(old);
}

}  // namespace foldtrace
