#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "foldtrace/types.hpp"

namespace foldtrace {

struct ScalarSolveConfig {
    double tol = 1e-12;  ///< stop once |g(x)| <= tol
    int max_iter = 50;
    /// Forward-difference step; unset selects sqrt(machine eps) * (1 + |x|). The step is
    /// taken away from the origin so it never straddles a kink at x = 0.
    std::optional<double> fd_step;

    void validate() const {
        if (!(tol > 0.0) || max_iter < 1 || (fd_step && !(*fd_step > 0.0))) {
            throw std::invalid_argument("ScalarSolveConfig: tol and fd_step must be positive, max_iter >= 1");
        }
    }
};

struct ScalarSolution {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Newton iteration with a forward-difference derivative. Once two iterates of
/// opposite sign are seen, steps that leave the bracket are replaced by bisection.
/// Throws NoConvergence after cfg.max_iter steps.
template <std::invocable<double> G>
ScalarSolution solve_scalar(G&& g, double x0, const ScalarSolveConfig& cfg = {}) {
    cfg.validate();
    double x = x0;
    double gx = g(x);
    if (!std::isfinite(x0) || !std::isfinite(gx)) {
        throw std::invalid_argument("solve_scalar: g must be finite at the initial iterate");
    }

    // Sign-change bracket [lo, hi] with g(lo) * g(hi) < 0, once known.
    bool bracketed = false;
    double lo = 0.0, glo = 0.0, hi = 0.0, ghi = 0.0;
    auto observe = [&](double a, double ga) {
        if (!std::isfinite(ga)) {
            return;
        }
        if (bracketed) {
            if (a > lo && a < hi) {
                if (std::signbit(ga) == std::signbit(glo)) {
                    lo = a;
                    glo = ga;
                } else {
                    hi = a;
                    ghi = ga;
                }
            }
        } else if (ga != 0.0 && gx != 0.0 && std::signbit(ga) != std::signbit(gx)) {
            bracketed = true;
            lo = std::min(a, x);
            hi = std::max(a, x);
            glo = lo == a ? ga : gx;
            ghi = hi == a ? ga : gx;
        }
    };

    for (int it = 0; it < cfg.max_iter; ++it) {
        if (std::abs(gx) <= cfg.tol) {
            return {x, std::abs(gx), it};
        }
        const double h = std::copysign(
            cfg.fd_step.value_or(std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x))), x);
        const double gh = g(x + h);
        observe(x + h, gh);
        const double slope = (gh - gx) / h;

        double next = x - gx / slope;
        const bool newton_ok = std::isfinite(next) && slope != 0.0;
        if (bracketed && (!newton_ok || next <= lo || next >= hi)) {
            next = 0.5 * (lo + hi);
        } else if (!newton_ok) {
            throw NoConvergence("solve_scalar: vanishing derivative", {x}, std::abs(gx), it + 1);
        }

        const double gnext = g(next);
        if (!std::isfinite(gnext)) {
            throw NoConvergence("solve_scalar: non-finite residual", {next}, std::abs(gx), it + 1);
        }
        observe(next, gnext);
        x = next;
        gx = gnext;
    }
    if (std::abs(gx) <= cfg.tol) {
        return {x, std::abs(gx), cfg.max_iter};
    }
    throw NoConvergence("solve_scalar: iteration limit reached", {x}, std::abs(gx), cfg.max_iter);
}

// Dense linear algebra -------------------------------------------------------

/// Relative pivot size below which a factorization is reported singular.
inline constexpr double kPivotThreshold = 1e-14;

/// Solves A x = b by LU factorization with partial pivoting.
/// Throws SingularMatrix when a pivot is negligible relative to the largest one.
inline Eigen::VectorXd dense_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() == 0) {
        throw std::invalid_argument("dense_solve: A must be square and match b");
    }
    if (!a.allFinite() || !b.allFinite()) {
        throw std::invalid_argument("dense_solve: non-finite entries");
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double largest = a.cwiseAbs().maxCoeff();
    if (largest == 0.0 || pivots.minCoeff() <= kPivotThreshold * largest) {
        throw SingularMatrix("dense_solve: matrix is singular to working precision");
    }
    Eigen::VectorXd x = lu.solve(b);
    if (!x.allFinite()) {
        throw SingularMatrix("dense_solve: non-finite solution");
    }
    return x;
}

// Vector Newton --------------------------------------------------------------

struct VectorSolveConfig {
    double tol = 1e-10;  ///< max-norm of the residual
    int max_iter = 50;
    double damping_min = 1.0 / 1024.0;  ///< smallest step fraction tried by backtracking

    void validate() const {
        if (!(tol > 0.0) || max_iter < 1 || !(damping_min > 0.0 && damping_min <= 1.0)) {
            throw std::invalid_argument("VectorSolveConfig: tol > 0, max_iter >= 1, damping_min in (0, 1]");
        }
    }
};

struct VectorSolution {
    Eigen::VectorXd x;
    double residual = 0.0;
    int iterations = 0;
};

/// Central-difference Jacobian of `residual` at x.
template <class F>
Eigen::MatrixXd finite_difference_jacobian(F&& residual, const Eigen::VectorXd& x, double rel_step = 1e-6) {
    const Eigen::VectorXd f0 = residual(x);
    Eigen::MatrixXd jac(f0.size(), x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = rel_step * (1.0 + std::abs(x[j]));
        probe[j] = x[j] + h;
        const Eigen::VectorXd fp = residual(probe);
        probe[j] = x[j] - h;
        const Eigen::VectorXd fm = residual(probe);
        probe[j] = x[j];
        jac.col(j) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

namespace detail {

template <class F>
std::optional<Eigen::VectorXd> try_residual(F& residual, const Eigen::VectorXd& x) {
    try {
        Eigen::VectorXd r = residual(x);
        if (!r.allFinite()) {
            return std::nullopt;
        }
        return r;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Damped Newton–Raphson for F(x) = 0. Each step solves J dx = -F by dense_solve and
/// halves the step until the residual max-norm decreases or cfg.damping_min is reached.
/// Throws SingularMatrix or NoConvergence.
template <class F, class J>
VectorSolution solve_vector(F&& residual, J&& jacobian, Eigen::VectorXd x0, const VectorSolveConfig& cfg = {}) {
    cfg.validate();
    if (x0.size() == 0) {
        throw std::invalid_argument("solve_vector: empty unknown vector");
    }
    Eigen::VectorXd x = std::move(x0);
    auto r0 = detail::try_residual(residual, x);
    if (!r0) {
        throw std::invalid_argument("solve_vector: residual must be finite at the initial iterate");
    }
    Eigen::VectorXd r = std::move(*r0);
    double norm = r.template lpNorm<Eigen::Infinity>();

    for (int it = 0; it < cfg.max_iter; ++it) {
        if (norm <= cfg.tol) {
            return {x, norm, it};
        }
        const Eigen::VectorXd dx = dense_solve(jacobian(x), -r);

        double lambda = 1.0;
        bool moved = false;
        while (true) {
            Eigen::VectorXd trial = x + lambda * dx;
            auto rt = detail::try_residual(residual, trial);
            const double trial_norm = rt ? rt->template lpNorm<Eigen::Infinity>() : std::numeric_limits<double>::infinity();
            const bool floor_reached = lambda * 0.5 < cfg.damping_min;
            if (trial_norm < norm || (floor_reached && rt)) {
                x = std::move(trial);
                r = std::move(*rt);
                norm = trial_norm;
                moved = true;
                break;
            }
            if (floor_reached) {
                break;
            }
            lambda *= 0.5;
        }
        if (!moved) {
            throw NoConvergence("solve_vector: no admissible step", std::vector<double>(x.data(), x.data() + x.size()),
                                norm, it + 1);
        }
    }
    if (norm <= cfg.tol) {
        return {x, norm, cfg.max_iter};
    }
    throw NoConvergence("solve_vector: iteration limit reached", std::vector<double>(x.data(), x.data() + x.size()),
                        norm, cfg.max_iter);
}

/// solve_vector with a central-difference Jacobian.
template <class F>
VectorSolution solve_vector(F&& residual, Eigen::VectorXd x0, const VectorSolveConfig& cfg = {}) {
    auto jac = [&residual](const Eigen::VectorXd& x) { return finite_difference_jacobian(residual, x); };
    return solve_vector(residual, jac, std::move(x0), cfg);
}

}  // namespace foldtrace
