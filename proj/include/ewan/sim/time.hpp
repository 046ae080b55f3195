#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ewan::sim {

/// Simulated time and durations share one representation: integer microseconds
/// since the start of the run.
using Duration = std::chrono::microseconds;
using Time = Duration;

inline constexpr Time kTimeZero{0};

/// Rounds a non-negative duration in seconds up to the next whole microsecond.
inline Duration ceil_micros(double seconds) {
    if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
        throw std::invalid_argument("ceil_micros: duration must be finite and non-negative");
    }
    // Absorb representation noise such as 0.1 * 1e6 == 100000.00000000001.
    const double us = seconds * 1e6;
    const double nearest = std::round(us);
    if (std::abs(us - nearest) < 1e-6) {
        return Duration{static_cast<std::int64_t>(nearest)};
    }
    return Duration{static_cast<std::int64_t>(std::ceil(us))};
}

inline constexpr double to_seconds(Duration d) {
    return static_cast<double>(d.count()) * 1e-6;
}

inline constexpr Duration seconds(std::int64_t s) { return Duration{s * 1'000'000}; }

}  // namespace ewan::sim
