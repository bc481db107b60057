// Acceptance checks. `acceptance` runs every criterion; `acceptance N` runs one.
// Each prints a single PASS/FAIL line; the exit status is nonzero if any failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "foldtrace/foldtrace.hpp"
#include "support.hpp"

using namespace foldtrace;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

constexpr double kDelta = 0.01;

TraceResult astroid_trace(int n = 8) {
    auto f = astroid_field();
    return trace(f, {0.0, 1.0}, {Axis::X, Sign::Plus}, astroid_config(kDelta, 1.0, 5, n));
}

TraceResult circle_trace() {
    auto f = unit_circle_field();
    TraceConfig cfg;
    cfg.step_x = cfg.step_y = 0.05;
    return trace(f, {1.0, 0.0}, {Axis::Y, Sign::Minus}, cfg);
}

Outcome astroid_accuracy() {
    const auto t0 = Clock::now();
    const TraceResult r = astroid_trace();
    const double pe = max_abs_percent_error(r.path);
    const double elapsed = seconds_since(t0);
    const bool closed = r.termination == Termination::Closed;
    const bool cusps = navigated_all_cusps(r, 2.0 * kDelta);
    return {closed && cusps && pe < 0.1 && elapsed < 5.0,
            fmt("closed=%d cusps=%d max|PE|=%.3e%% (limit 0.1, target 0.01: %s) runtime=%.2fs (limit 5)", closed, cusps,
                pe, pe < 0.01 ? "met" : "missed", elapsed)};
}

Outcome robustness_region() {
    const auto rows = run_sweep({1e-4, 1.0, 100.0}, {1, 5, 10}, {4, 8, 10}, kDelta);
    int passed = 0;
    double worst = 0.0;
    std::string failures;
    for (const SweepResult& s : rows) {
        worst = std::max(worst, s.max_pe);
        if (sweep_passes(s, 0.1)) {
            ++passed;
        } else {
            failures += fmt(" [r=%g k=%d n=%d %s]", s.r_factor, s.k, s.n, s.termination.c_str());
        }
    }
    return {passed == static_cast<int>(rows.size()),
            fmt("%d/%zu combinations navigate all cusps with max|PE| < 0.1%% (worst %.3e%%)", passed, rows.size(),
                worst) +
                failures};
}

Outcome failure_threshold() {
    const SweepResult s = run_astroid(kDelta, 1.0, 5, 3);
    const bool reported = s.termination != "closed";
    return {!s.navigated_all_cusps && reported,
            fmt("n=3: navigated_all_cusps=%d termination=\"%s\" after %zu points", s.navigated_all_cusps,
                s.termination.c_str(), s.points)};
}

Outcome circle_closure() {
    const TraceResult r = circle_trace();
    double worst = 0.0;
    for (const Point2& p : r.path.points) {
        worst = std::max(worst, std::abs(std::hypot(p.x, p.y) - 1.0));
    }
    const bool closed = r.termination == Termination::Closed;
    return {closed && worst <= 1e-6 && r.events.size() == 4,
            fmt("closed=%d events=%zu (need 4) max||p|-1|=%.2e (limit 1e-6) points=%zu", closed, r.events.size(),
                worst, r.path.size())};
}

Outcome exit_point_oracle() {
    std::mt19937 rng(20240601);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> size(1, 100);
    std::bernoulli_distribution mirror(0.2);
    int agree = 0;
    int ties = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Point2 ref{u(rng), u(rng)};
        CandidateSet set;
        const int n = size(rng);
        for (int i = 0; i < n; ++i) {
            Point2 p{u(rng), u(rng)};
            // Reflections through the reference create exact distance ties.
            if (i > 0 && mirror(rng)) {
                const Point2 q = set.candidates.back().point;
                p = {2.0 * ref.x - q.x, 2.0 * ref.y - q.y};
                ++ties;
            }
            set.candidates.push_back({p, i});
        }
        // Brute force: the first index attaining the largest distance.
        std::size_t best = 0;
        for (std::size_t i = 1; i < set.candidates.size(); ++i) {
            if (distance(set.candidates[i].point, ref) > distance(set.candidates[best].point, ref)) best = i;
        }
        const auto chosen = select_exit_point(set, ref);
        if (chosen && chosen->mesh_index == set.candidates[best].mesh_index) ++agree;
    }
    return {agree == 1000, fmt("%d/1000 random sets agree with brute-force argmax (%d mirrored ties)", agree, ties)};
}

Outcome mesh_fidelity() {
    constexpr double pi = std::numbers::pi;
    double worst_angle = 0.0;
    int outside = 0;
    int outside_interior = 0;
    int total = 0;
    double worst_excess = -1.0;
    for (int n = 1; n <= 64; ++n) {
        const Point2 center{0.0, 0.0};
        const auto mesh = mesh_half_circle(center, 1.0, n, TurningPointKind::Type1);
        for (int i = 0; i < n; ++i) {
            ++total;
            const double theta = pi / (2.0 * n) * (n + 2 * i);
            double measured = std::atan2(mesh[i].y - center.y, mesh[i].x - center.x);
            if (measured < 0.0) measured += 2.0 * pi;
            worst_angle = std::max(worst_angle, std::abs(measured - theta));
            worst_angle = std::max(worst_angle, std::abs(half_circle_angle(TurningPointKind::Type1, n, i) - theta));
            if (!(mesh[i].x < center.x)) {
                ++outside;
                outside_interior += i > 0 ? 1 : 0;
                worst_excess = std::max(worst_excess, mesh[i].x - center.x);
            }
        }
    }
    std::string detail = fmt("angles within 1e-14: %s (max error %.2e); %d/%d points not strictly in x < x_j, "
                             "samples with i > 0 among them: %d",
                             worst_angle <= 1e-14 ? "yes" : "no", worst_angle, outside, total, outside_interior);
    if (outside > 0) {
        detail += fmt("; the i=0 sample at angle pi/2 lies on the line x = x_j up to rounding, largest x - x_j = %.2e",
                      worst_excess);
    }
    return {worst_angle <= 1e-14 && outside == 0, detail};
}

Outcome spectral_exactness() {
    const SpectralGrid g(32);
    double worst = 0.0;
    for (int k = 0; k <= 10; ++k) {
        Eigen::VectorXd s(32), c(32);
        for (int i = 0; i < 32; ++i) {
            s[i] = std::sin(k * g.nodes()[i]);
            c[i] = std::cos(k * g.nodes()[i]);
        }
        const double k3 = static_cast<double>(k) * k * k;
        worst = std::max(worst, (g.d1() * s - k * c).lpNorm<Eigen::Infinity>());
        worst = std::max(worst, (g.d1() * c + k * s).lpNorm<Eigen::Infinity>());
        worst = std::max(worst, (g.d3() * s + k3 * c).lpNorm<Eigen::Infinity>());
        worst = std::max(worst, (g.d3() * c - k3 * s).lpNorm<Eigen::Infinity>());
    }
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(32);
    const double constant =
        std::max((g.d1() * one).lpNorm<Eigen::Infinity>(), (g.d3() * one).lpNorm<Eigen::Infinity>());
    return {worst < 1e-9 && constant <= 1e-12,
            fmt("max mode error %.2e (limit 1e-9); constant image %.2e (limit 1e-12)", worst, constant)};
}

Outcome jacobian_correctness() {
    const SpectralGrid g(32);
    const double eps = 1e-3;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> uh(0.5, 1.5), uq(0.2, 1.0), um(3.0, 9.0);
    double worst = 0.0;
    auto relative = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        double w = 0.0;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                w = std::max(w, std::abs(a(i, j) - b(i, j)) / std::max(std::abs(a(i, j)), 1.0));
            }
        }
        return w;
    };
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd h(32);
        for (auto& v : h) v = uh(rng);
        const double Q = uq(rng);
        const double M = um(rng);
        auto fq = [&](const Eigen::VectorXd& x) { return residual_fixed_Q(x, Q, eps, g); };
        worst = std::max(worst, relative(jacobian_fixed_Q(h, Q, eps, g), finite_difference_jacobian(fq, h)));
        Eigen::VectorXd z(33);
        z << h, Q;
        auto fm = [&](const Eigen::VectorXd& x) { return residual_fixed_M(x, M, eps, g); };
        worst = std::max(worst, relative(jacobian_fixed_M(z, eps, g), finite_difference_jacobian(fm, z)));
    }
    return {worst <= 1e-5,
            fmt("10 states, fixed-Q and bordered: max relative deviation %.2e (limit 1e-5)", worst)};
}

Outcome lubrication_folds() {
    const auto t0 = Clock::now();
    DiagramConfig cfg;
    cfg.epsilon = 1e-3;
    cfg.m = 128;
    Diagram d;
    bool failed = false;
    try {
        d = trace_diagram(cfg);
    } catch (const TraceFailure& e) {
        failed = true;
        d.trace = e.partial();
    }
    const double elapsed = seconds_since(t0);
    const SpectralGrid g(cfg.m);
    double residual = 0.0;
    double identity = 0.0;
    for (const LubricationState& s : d.states) {
        residual = std::max(residual, residual_norm(s, g));
        identity = std::max(identity, std::abs(periodic_identity(s, g)));
    }
    const std::size_t points = d.trace.path.size();
    const std::size_t events = d.trace.events.size();
    const bool ok = !failed && points >= 200 && events >= 1 && d.states.size() == points && residual < 1e-8 &&
                    identity < 1e-8 && elapsed < 300.0;
    return {ok, fmt("points=%zu (>=200) events=%zu (>=1) max residual=%.2e max identity=%.2e (limits 1e-8) "
                    "termination=%s runtime=%.1fs (limit 300)",
                    points, events, residual, identity,
                    failed ? "failure" : to_string(d.trace.termination).c_str(), elapsed)};
}

Outcome no_backtrack() {
    const int k = 5;
    const TraceResult astroid = astroid_trace();
    const TraceResult circle = circle_trace();
    const auto a = test_support::check_backtracking(astroid, kDelta, k);
    const auto c = test_support::check_backtracking(circle, 0.05, k);
    return {a.violations == 0 && c.violations == 0,
            fmt("astroid: %zu violations (closest %.2e, limit delta/2=%.3f); circle: %zu violations (closest %.2e, "
                "limit %.3f)",
                a.violations, a.closest, kDelta / 2, c.violations, c.closest, 0.05 / 2)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"astroid accuracy", astroid_accuracy},
    {"astroid robustness region", robustness_region},
    {"failure threshold n=3", failure_threshold},
    {"circle closure", circle_closure},
    {"exit-point oracle equivalence", exit_point_oracle},
    {"mesh formula fidelity", mesh_fidelity},
    {"spectral exactness", spectral_exactness},
    {"jacobian correctness", jacobian_correctness},
    {"lubrication fold traversal", lubrication_folds},
    {"no backtracking", no_backtrack},
};

bool run_one(std::size_t index) {
    Outcome o;
    try {
        o = kCriteria[index].second();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu (%s): %s - %s\n", index + 1, kCriteria[index].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 2) {
        std::fprintf(stderr, "usage: acceptance [criterion 1-%zu]\n", kCriteria.size());
        return 2;
    }
    if (argc == 2) {
        char* end = nullptr;
        const long n = std::strtol(argv[1], &end, 10);
        if (*end != '\0' || n < 1 || n > static_cast<long>(kCriteria.size())) {
            std::fprintf(stderr, "usage: acceptance [criterion 1-%zu]\n", kCriteria.size());
            return 2;
        }
        return run_one(static_cast<std::size_t>(n - 1)) ? 0 : 1;
    }
    bool all = true;
    for (std::size_t i = 0; i < kCriteria.size(); ++i) {
        all = run_one(i) && all;
    }
    return all ? 0 : 1;
}
