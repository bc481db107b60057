#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include "foldtrace/types.hpp"

namespace foldtrace {

/// Evaluator for the scalar residual f(x, y) whose zero set is traced.
///
/// Implementations may keep internal state (warm starts, caches), so evaluation
/// is non-const and a single instance must not be shared between concurrent traces.
class ResidualField {
public:
    virtual ~ResidualField() = default;

    /// Throws FieldEvaluationError when f cannot be evaluated at p.
    virtual double evaluate(Point2 p) = 0;

    double operator()(Point2 p) { return evaluate(p); }

    /// The coordinate the caller is currently solving for, or nullopt for none.
    /// Fields with several internal formulations use it to pick the one that is
    /// regular in that coordinate. The default ignores it.
    virtual void set_free_axis(std::optional<Axis> /*axis*/) {}

    /// Notification that p has been appended to the solution path.
    virtual void on_accept(Point2 /*p*/) {}
};

/// Adapts any callable double(double x, double y).
template <class F>
class FunctionField final : public ResidualField {
public:
    explicit FunctionField(F f) : f_(std::move(f)) {}

    double evaluate(Point2 p) override { return f_(p.x, p.y); }

private:
    F f_;
};

template <class F>
FunctionField<F> make_field(F f) {
    return FunctionField<F>(std::move(f));
}

/// Views another field in rescaled coordinates: g(u, v) = f(u * sx, v * sy).
/// Useful when the natural step sizes of the two coordinates differ by orders of
/// magnitude, since the turning-point scan works on a circle.
class ScaledField final : public ResidualField {
public:
    ScaledField(ResidualField& inner, double sx, double sy) : inner_(inner), sx_(sx), sy_(sy) {
        if (!(sx > 0.0) || !(sy > 0.0)) {
            throw std::invalid_argument("ScaledField: scales must be positive");
        }
    }

    double evaluate(Point2 p) override { return inner_(to_inner(p)); }
    void set_free_axis(std::optional<Axis> axis) override { inner_.set_free_axis(axis); }
    void on_accept(Point2 p) override { inner_.on_accept(to_inner(p)); }

    Point2 to_inner(Point2 p) const { return {p.x * sx_, p.y * sy_}; }
    Point2 from_inner(Point2 p) const { return {p.x / sx_, p.y / sy_}; }

private:
    ResidualField& inner_;
    double sx_;
    double sy_;
};

/// x^2 + y^2 - 1
inline auto unit_circle_field() {
    return make_field([](double x, double y) { return x * x + y * y - 1.0; });
}

}  // namespace foldtrace
