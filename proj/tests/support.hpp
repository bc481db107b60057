#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>

#include "foldtrace/tracer.hpp"

namespace foldtrace::test_support {

struct BacktrackReport {
    std::size_t violations = 0;
    double closest = std::numeric_limits<double>::infinity();  ///< smallest distance seen
};

// Points accepted within 2k steps after each turning-point event, checked against
// every point before the event except the turning point itself. The final point of a
// closed trace rejoins the start by definition and is not counted.
inline BacktrackReport check_backtracking(const TraceResult& r, double delta, int k) {
    BacktrackReport out;
    const auto& pts = r.path.points;
    if (pts.empty()) {
        return out;
    }
    std::size_t end = pts.size() - 1;
    if (r.termination == Termination::Closed && end > 0) {
        --end;
    }
    for (const TurningEvent& e : r.events) {
        const std::size_t j = e.index;
        const std::size_t last = std::min(end, j + 2 * static_cast<std::size_t>(k));
        for (std::size_t a = j + 1; a <= last; ++a) {
            for (std::size_t b = 0; b < j; ++b) {
                const double d = distance(pts[a], pts[b]);
                out.closest = std::min(out.closest, d);
                if (d < delta / 2.0) {
                    ++out.violations;
                }
            }
        }
    }
    return out;
}

}  // namespace foldtrace::test_support
