#include "ewan/sim/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ewan::sim {

double RandomStream::uniform(double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("draw_uniform: lo > hi");
    if (lo == hi) return lo;
    const double v = lo + (hi - lo) * next_unit();
    return v > hi ? hi : v;
}

double RandomStream::gaussian(double mean, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("draw_gaussian: sigma < 0");
    // Always consume two words so the stream position does not depend on sigma.
    double u1 = next_unit();
    const double u2 = next_unit();
    if (sigma == 0.0) return mean;
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RandomStream::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below: n must be positive");
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = 0;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

}  // namespace ewan::sim
