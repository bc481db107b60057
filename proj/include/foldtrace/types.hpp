#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace foldtrace {

/// A coordinate pair in the trace plane.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

enum class Axis { X, Y };

constexpr Axis other(Axis a) { return a == Axis::X ? Axis::Y : Axis::X; }

inline double coordinate(Point2 p, Axis a) { return a == Axis::X ? p.x : p.y; }

inline Point2 with_coordinate(Point2 p, Axis a, double value) {
    if (a == Axis::X) {
        p.x = value;
    } else {
        p.y = value;
    }
    return p;
}

enum class Sign { Plus, Minus };

/// Axis-aligned iteration direction of the continuation.
struct StepDirection {
    Axis axis = Axis::X;
    Sign sign = Sign::Plus;

    double unit() const { return sign == Sign::Plus ? 1.0 : -1.0; }

    friend bool operator==(const StepDirection&, const StepDirection&) = default;
};

inline std::string to_string(StepDirection d) {
    std::string s = d.sign == Sign::Plus ? "+" : "-";
    s += d.axis == Axis::X ? "x" : "y";
    return s;
}

/// Parses "+x", "-x", "+y", "-y" (a bare "x"/"y" means positive).
inline std::optional<StepDirection> parse_direction(std::string_view text) {
    if (text.empty() || text.size() > 2) {
        return std::nullopt;
    }
    Sign sign = Sign::Plus;
    if (text.size() == 2) {
        if (text[0] == '-') {
            sign = Sign::Minus;
        } else if (text[0] != '+') {
            return std::nullopt;
        }
        text.remove_prefix(1);
    }
    if (text == "x" || text == "X") {
        return StepDirection{Axis::X, sign};
    }
    if (text == "y" || text == "Y") {
        return StepDirection{Axis::Y, sign};
    }
    return std::nullopt;
}

/// Which open half-plane next to a turning point contains no other solutions.
///   Type1: east (+x) blocked, Type2: north (+y), Type3: west (-x), Type4: south (-y).
enum class TurningPointKind { Type1, Type2, Type3, Type4 };

inline StepDirection blocked_direction(TurningPointKind kind) {
    switch (kind) {
        case TurningPointKind::Type1: return {Axis::X, Sign::Plus};
        case TurningPointKind::Type2: return {Axis::Y, Sign::Plus};
        case TurningPointKind::Type3: return {Axis::X, Sign::Minus};
        case TurningPointKind::Type4: return {Axis::Y, Sign::Minus};
    }
    return {};
}

inline std::string to_string(TurningPointKind kind) {
    switch (kind) {
        case TurningPointKind::Type1: return "type1";
        case TurningPointKind::Type2: return "type2";
        case TurningPointKind::Type3: return "type3";
        case TurningPointKind::Type4: return "type4";
    }
    return "unknown";
}

// Errors ------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a residual is evaluated outside its domain (e.g. non-positive film
/// thickness). Line searches treat it as a rejected trial step.
class DomainError : public Error {
public:
    using Error::Error;
};

class FieldEvaluationError : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    NoConvergence(std::string what, std::vector<double> last_iterate, double residual, int iterations)
        : Error(std::move(what)),
          last_iterate_(std::move(last_iterate)),
          residual_(residual),
          iterations_(iterations) {}

    const std::vector<double>& last_iterate() const { return last_iterate_; }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    std::vector<double> last_iterate_;
    double residual_;
    int iterations_;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class InsufficientHistory : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

}  // namespace foldtrace
