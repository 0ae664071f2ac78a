#pragma once

#include <algorithm>
#include <cmath>

#include "relayplan/sampling.hpp"
#include "relayplan/scenario.hpp"

namespace testutil {

inline double rel_diff(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
}

// Uniform point in the disc of radius r around center.
inline relayplan::Vec2 disc_point(relayplan::Rng& rng, relayplan::Vec2 center,
                                  double r) {
    const double ang = 6.283185307179586 * rng.next_double();
    const double rad = r * std::sqrt(rng.next_double());
    return {center.x + rad * std::cos(ang), center.y + rad * std::sin(ang)};
}

}  // namespace testutil
