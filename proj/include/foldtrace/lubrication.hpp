#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "foldtrace/diagnostics.hpp"
#include "foldtrace/field.hpp"
#include "foldtrace/rootfind.hpp"
#include "foldtrace/spectral.hpp"
#include "foldtrace/tracer.hpp"
#include "foldtrace/types.hpp"

// Steady thin film on a rotating cylinder:
//   (eps/3)(h' + h''') - cos(theta)/3 - Q/h^3 + 1/h^2 = 0,   M = integral of h,
// discretized on a periodic spectral grid and exposed as f(Q, M) = 0.

namespace foldtrace {

class NonpositiveThickness : public DomainError {
public:
    using DomainError::DomainError;
};

namespace detail {

inline void require_positive(const Eigen::VectorXd& h) {
    if (!(h.minCoeff() > 0.0)) {
        throw NonpositiveThickness("film thickness must be positive at every node");
    }
}

inline void require_size(const Eigen::VectorXd& v, Eigen::Index n, const char* what) {
    if (v.size() != n) {
        throw std::invalid_argument(std::string(what) + ": vector size does not match the grid");
    }
}

}  // namespace detail

inline Eigen::VectorXd residual_fixed_Q(const Eigen::VectorXd& h, double Q, double eps, const SpectralGrid& grid) {
    detail::require_size(h, grid.m(), "residual_fixed_Q");
    detail::require_positive(h);
    const Eigen::ArrayXd ha = h.array();
    Eigen::VectorXd r = (eps / 3.0) * (grid.d1_plus_d3() * h);
    r.array() += -grid.cos_nodes().array() / 3.0 - Q / ha.cube() + 1.0 / ha.square();
    return r;
}

inline Eigen::MatrixXd jacobian_fixed_Q(const Eigen::VectorXd& h, double Q, double eps, const SpectralGrid& grid) {
    detail::require_size(h, grid.m(), "jacobian_fixed_Q");
    detail::require_positive(h);
    const Eigen::ArrayXd ha = h.array();
    Eigen::MatrixXd j = (eps / 3.0) * grid.d1_plus_d3();
    j.diagonal().array() += 3.0 * Q / ha.pow(4) - 2.0 / ha.cube();
    return j;
}

inline double mass(const Eigen::VectorXd& h, const SpectralGrid& grid) { return grid.integrate(h); }

/// Residual of the fixed-M system in the unknowns z = (h_0..h_{m-1}, Q).
inline Eigen::VectorXd residual_fixed_M(const Eigen::VectorXd& z, double M, double eps, const SpectralGrid& grid) {
    const int m = grid.m();
    detail::require_size(z, m + 1, "residual_fixed_M");
    const Eigen::VectorXd h = z.head(m);
    Eigen::VectorXd r(m + 1);
    r.head(m) = residual_fixed_Q(h, z[m], eps, grid);
    r[m] = mass(h, grid) - M;
    return r;
}

/// Bordered Jacobian [J_Q, -1/h^3; w ... w, 0] of residual_fixed_M.
inline Eigen::MatrixXd jacobian_fixed_M(const Eigen::VectorXd& z, double eps, const SpectralGrid& grid) {
    const int m = grid.m();
    detail::require_size(z, m + 1, "jacobian_fixed_M");
    const Eigen::VectorXd h = z.head(m);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m + 1, m + 1);
    j.topLeftCorner(m, m) = jacobian_fixed_Q(h, z[m], eps, grid);
    j.col(m).head(m) = -h.array().cube().inverse().matrix();
    j.row(m).head(m).setConstant(grid.weight());
    return j;
}

struct LubricationState {
    Eigen::VectorXd h;
    double Q = 0.0;
    double M = 0.0;
    double epsilon = 0.0;
    int iterations = 0;
};

/// max |residual_fixed_Q| of a state.
inline double residual_norm(const LubricationState& s, const SpectralGrid& grid) {
    return residual_fixed_Q(s.h, s.Q, s.epsilon, grid).lpNorm<Eigen::Infinity>();
}

/// (2pi/m) sum [Q/h^3 - 1/h^2 + cos(theta)/3]; zero for any solution because the
/// derivative terms integrate to zero over a period.
inline double periodic_identity(const LubricationState& s, const SpectralGrid& grid) {
    const Eigen::ArrayXd ha = s.h.array();
    const Eigen::ArrayXd terms = s.Q / ha.cube() - 1.0 / ha.square() + grid.cos_nodes().array() / 3.0;
    return grid.weight() * terms.sum();
}

inline VectorSolveConfig default_lubrication_solve() {
    VectorSolveConfig cfg;
    cfg.tol = 1e-11;
    cfg.max_iter = 40;
    return cfg;
}

/// Newton solve of the fixed-Q system for h; M follows by quadrature.
inline LubricationState solve_at_Q(double Q, double eps, const SpectralGrid& grid, const Eigen::VectorXd& h0,
                                   const VectorSolveConfig& cfg = default_lubrication_solve()) {
    detail::require_size(h0, grid.m(), "solve_at_Q");
    detail::require_positive(h0);
    auto f = [&](const Eigen::VectorXd& h) { return residual_fixed_Q(h, Q, eps, grid); };
    auto j = [&](const Eigen::VectorXd& h) { return jacobian_fixed_Q(h, Q, eps, grid); };
    VectorSolution sol = solve_vector(f, j, h0, cfg);
    LubricationState s;
    s.h = std::move(sol.x);
    s.Q = Q;
    s.M = mass(s.h, grid);
    s.epsilon = eps;
    s.iterations = sol.iterations;
    return s;
}

/// Newton solve of the bordered fixed-M system for (h, Q).
inline LubricationState solve_at_M(double M, double eps, const SpectralGrid& grid, const Eigen::VectorXd& h0,
                                   double Q0, const VectorSolveConfig& cfg = default_lubrication_solve()) {
    detail::require_size(h0, grid.m(), "solve_at_M");
    detail::require_positive(h0);
    const int m = grid.m();
    Eigen::VectorXd z0(m + 1);
    z0.head(m) = h0;
    z0[m] = Q0;
    auto f = [&](const Eigen::VectorXd& z) { return residual_fixed_M(z, M, eps, grid); };
    auto j = [&](const Eigen::VectorXd& z) { return jacobian_fixed_M(z, eps, grid); };
    VectorSolution sol = solve_vector(f, j, z0, cfg);
    LubricationState s;
    s.h = sol.x.head(m);
    s.Q = sol.x[m];
    s.M = M;
    s.epsilon = eps;
    s.iterations = sol.iterations;
    return s;
}

/// Converged state at mass M reached from the flat film h = M / 2pi by continuation
/// in eps, starting from eps = max(1, eps) and decreasing geometrically.
inline LubricationState seed_state(double M, double eps, const SpectralGrid& grid, int homotopy_steps = 25) {
    if (!(M > 0.0) || !(eps > 0.0) || homotopy_steps < 1) {
        throw std::invalid_argument("seed_state: M, eps and homotopy_steps must be positive");
    }
    const double hbar = M / (2.0 * std::numbers::pi);
    Eigen::VectorXd h = Eigen::VectorXd::Constant(grid.m(), hbar);
    double Q = hbar;
    const double eps0 = std::max(1.0, eps);
    LubricationState s;
    for (int i = 0; i <= homotopy_steps; ++i) {
        const double e = eps0 * std::pow(eps / eps0, static_cast<double>(i) / homotopy_steps);
        s = solve_at_M(M, e, grid, h, Q);
        h = s.h;
        Q = s.Q;
        if (eps0 == eps) {
            break;
        }
    }
    s.epsilon = eps;
    return s;
}

/// f(Q, M) for the lubrication branch, traceable by the tracer.
///
/// With no free-axis hint, evaluation solves the fixed-Q system and returns
/// M(h) - M*, falling back to the fixed-M system (returning Q(h) - Q*) when that
/// fails. When the tracer announces which coordinate it is solving for, only the
/// formulation regular in that coordinate is used: fixed-Q while M is free,
/// fixed-M while Q is free. Solves start from a secant prediction through the last
/// two accepted states, falling back to the last accepted state itself, since the
/// tracer only probes near the end of its path.
class BifurcationField final : public ResidualField {
public:
    BifurcationField(double eps, const SpectralGrid& grid, LubricationState seed,
                     VectorSolveConfig solve = default_lubrication_solve())
        : eps_(eps), grid_(grid), solve_(solve) {
        if (!(eps > 0.0)) {
            throw std::invalid_argument("BifurcationField: eps must be positive");
        }
        detail::require_size(seed.h, grid.m(), "BifurcationField");
        remember(std::move(seed));
    }

    double evaluate(Point2 p) override {
        if (!is_finite(p)) {
            throw FieldEvaluationError("lubrication field: non-finite probe");
        }
        if (free_ == Axis::Y) {
            return by_Q(p);
        }
        if (free_ == Axis::X) {
            return by_M(p);
        }
        try {
            return by_Q(p);
        } catch (const FieldEvaluationError&) {
            return by_M(p);
        }
    }

    void set_free_axis(std::optional<Axis> axis) override { free_ = axis; }

    /// Units of Q and M used to match an accepted point to its converged state.
    void set_metric_scales(double q_unit, double m_unit) {
        if (!(q_unit > 0.0) || !(m_unit > 0.0)) {
            throw std::invalid_argument("BifurcationField: metric scales must be positive");
        }
        scale_ = {q_unit, m_unit};
    }

    void on_accept(Point2 p) override {
        const LubricationState* best = nearest(recent_, p);
        if (best == nullptr) {
            throw FieldEvaluationError("lubrication field: accepted a point without a converged state");
        }
        accepted_.push_back(*best);
    }

    /// States recorded for each accepted path point, in path order.
    const std::vector<LubricationState>& accepted_states() const { return accepted_; }

    double epsilon() const { return eps_; }
    const SpectralGrid& grid() const { return grid_; }

private:
    struct Memo {
        Axis formulation;
        double parameter;
        std::size_t generation;
        LubricationState state;
    };

    double by_Q(Point2 p) {
        const LubricationState& s = solved(Axis::Y, p);
        return s.M - p.y;
    }

    double by_M(Point2 p) {
        const LubricationState& s = solved(Axis::X, p);
        return s.Q - p.x;
    }

    // The fixed-Q solution does not depend on M* (nor the fixed-M one on Q*), so a
    // slice of probes sharing the fixed parameter costs one solve until the next accept.
    const LubricationState& solved(Axis formulation, Point2 p) {
        const double parameter = formulation == Axis::Y ? p.x : p.y;
        if (memo_ && memo_->formulation == formulation && memo_->parameter == parameter &&
            memo_->generation == accepted_.size()) {
            return memo_->state;
        }
        auto solve_from = [&](const Eigen::VectorXd& h0, double q0) {
            return formulation == Axis::Y ? solve_at_Q(p.x, eps_, grid_, h0, solve_)
                                          : solve_at_M(p.y, eps_, grid_, h0, q0, solve_);
        };
        const LubricationState& base = accepted_.empty() ? recent_.back() : accepted_.back();
        std::optional<LubricationState> result;
        if (auto guess = predict(formulation, parameter)) {
            try {
                result = solve_from(guess->h, guess->Q);
            } catch (const Error& e) {
                log(LogLevel::Debug, "predicted start failed: ", e.what());
            } catch (const std::invalid_argument& e) {
                log(LogLevel::Debug, "predicted start failed: ", e.what());
            }
        }
        if (!result) {
            try {
                result = solve_from(base.h, base.Q);
            } catch (const Error& e) {
                throw FieldEvaluationError(std::string("lubrication field: ") + e.what());
            } catch (const std::invalid_argument& e) {
                throw FieldEvaluationError(std::string("lubrication field: ") + e.what());
            }
        }
        memo_ = Memo{formulation, parameter, accepted_.size(), *result};
        remember(std::move(*result));
        return memo_->state;
    }

    double metric(const LubricationState& s, Point2 p) const {
        return std::hypot((s.Q - p.x) / scale_.x, (s.M - p.y) / scale_.y);
    }

    const LubricationState* nearest(const std::deque<LubricationState>& pool, Point2 p) const {
        const LubricationState* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        for (const LubricationState& s : pool) {
            const double d = metric(s, p);
            if (d < best_d) {
                best_d = d;
                best = &s;
            }
        }
        return best;
    }

    // Secant extrapolation in the fixed parameter through the last two accepted states.
    std::optional<LubricationState> predict(Axis formulation, double parameter) const {
        if (accepted_.size() < 2) {
            return std::nullopt;
        }
        const LubricationState& a = accepted_.back();
        const LubricationState& b = accepted_[accepted_.size() - 2];
        const double pa = formulation == Axis::Y ? a.Q : a.M;
        const double pb = formulation == Axis::Y ? b.Q : b.M;
        const double t = (parameter - pa) / (pa - pb);
        if (!std::isfinite(t) || std::abs(t) > 4.0) {
            return std::nullopt;
        }
        LubricationState guess = a;
        guess.h = a.h + t * (a.h - b.h);
        guess.Q = a.Q + t * (a.Q - b.Q);
        if (!(guess.h.minCoeff() > 0.0)) {
            return std::nullopt;
        }
        return guess;
    }

    void remember(LubricationState s) {
        recent_.push_back(std::move(s));
        if (recent_.size() > kRecent) {
            recent_.pop_front();
        }
    }

    static constexpr std::size_t kRecent = 32;

    double eps_;
    const SpectralGrid& grid_;
    VectorSolveConfig solve_;
    std::optional<Axis> free_;
    std::deque<LubricationState> recent_;
    std::vector<LubricationState> accepted_;
    std::optional<Memo> memo_;
    Point2 scale_{1.0, 1.0};
};

/// One row per state: Q,M,epsilon,m,h_0..h_{m-1}.
inline void write_states_csv(std::ostream& os, const std::vector<LubricationState>& states) {
    const auto old = os.precision(17);
    const Eigen::Index m = states.empty() ? 0 : states.front().h.size();
    os << "Q,M,epsilon,m";
    for (Eigen::Index i = 0; i < m; ++i) {
        os << ",h_" << i;
    }
    os << '\n';
    for (const LubricationState& s : states) {
        os << s.Q << ',' << s.M << ',' << s.epsilon << ',' << s.h.size();
        for (Eigen::Index i = 0; i < s.h.size(); ++i) {
            os << ',' << s.h[i];
        }
        os << '\n';
    }
    os.precision(old);
}

struct DiagramConfig {
    double epsilon = 1e-3;
    int m = 128;
    double seed_mass = 2.0 * std::numbers::pi;
    double step_Q = 5e-5;
    double step_M = 0.025;
    StepDirection direction{Axis::Y, Sign::Minus};
    std::optional<double> steep_switch = 5.0;  ///< in units of the step sizes
    Box box{0.0, 1.0, 1.0, 80.0};              ///< in (Q, M)
    std::size_t max_points = 20000;
    double residual_tol = 1e-9;
    int mesh_count = 8;
    int reference_lag = 5;

    void validate() const {
        if (!(epsilon > 0.0) || !(seed_mass > 0.0) || !(step_Q > 0.0) || !(step_M > 0.0)) {
            throw std::invalid_argument("DiagramConfig: epsilon, seed mass and step sizes must be positive");
        }
        if (m < 8 || m % 2 != 0) {
            throw std::invalid_argument("DiagramConfig: m must be even and >= 8, got " + std::to_string(m));
        }
    }
};

struct Diagram {
    TraceResult trace;  ///< path in (Q, M)
    std::vector<LubricationState> states;  ///< one per path point
    LubricationState seed;
};

/// Traces the (Q, M) diagram from the seed state at cfg.seed_mass.
///
/// The tracer runs in coordinates (Q / step_Q, M / step_M), where both steps and the
/// scan radius are 1; the returned path is in (Q, M).
inline Diagram trace_diagram(const DiagramConfig& cfg) {
    cfg.validate();
    const SpectralGrid grid(cfg.m);
    Diagram out;
    out.seed = seed_state(cfg.seed_mass, cfg.epsilon, grid);

    BifurcationField field(cfg.epsilon, grid, out.seed);
    field.set_metric_scales(cfg.step_Q, cfg.step_M);
    ScaledField scaled(field, cfg.step_Q, cfg.step_M);

    TraceConfig tc;
    tc.step_x = tc.step_y = 1.0;
    tc.scan.radius = 1.0;
    tc.scan.mesh_count = cfg.mesh_count;
    tc.scan.reference_lag = cfg.reference_lag;
    tc.scan.residual_tol = cfg.residual_tol;
    tc.max_points = cfg.max_points;
    tc.steep_switch = cfg.steep_switch;
    tc.domain_box = Box{cfg.box.x_min / cfg.step_Q, cfg.box.x_max / cfg.step_Q, cfg.box.y_min / cfg.step_M,
                        cfg.box.y_max / cfg.step_M};

    auto to_qm = [&](TraceResult r) {
        for (Point2& p : r.path.points) {
            p = scaled.to_inner(p);
        }
        return r;
    };
    try {
        out.trace = to_qm(trace(scaled, scaled.from_inner({out.seed.Q, out.seed.M}), cfg.direction, tc));
    } catch (const TraceFailure& e) {
        throw TraceFailure(e.what(), to_qm(e.partial()));
    }
    out.states = field.accepted_states();
    return out;
}

}  // namespace foldtrace
