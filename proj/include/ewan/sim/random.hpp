#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace ewan::sim {

/// SplitMix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// FNV-1a over the label bytes.
constexpr std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Seed of run `index` derived from a campaign master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ mix64(index + 0x51ED27ULL));
}

/// A labelled random stream. Each stochastic concern (reception, capture,
/// traces, back-off, ...) owns its own stream split from the run seed, so
/// consuming one never perturbs another. All transforms are implemented here
/// rather than via <random> distributions, whose output is not specified
/// bit-for-bit by the standard.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::string_view label)
        : seed_(seed), label_(label), engine_(mix64(seed ^ hash_label(label))) {}

    std::uint64_t seed() const { return seed_; }
    const std::string& label() const { return label_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi]; throws std::invalid_argument when lo > hi.
    double uniform(double lo, double hi);

    /// Normal draw (Box-Muller, one value per call).
    double gaussian(double mean, double sigma);

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Derives an independent child stream.
    RandomStream split(std::string_view child_label) const {
        return RandomStream(mix64(seed_ ^ hash_label(label_)), std::string(label_) + "/" + std::string(child_label));
    }

  private:
    std::uint64_t seed_;
    std::string label_;
    std::mt19937_64 engine_;
};

/// Free-function spellings of the stream draws.
inline double draw_uniform(RandomStream& s, double lo, double hi) { return s.uniform(lo, hi); }
inline double draw_gaussian(RandomStream& s, double mean, double sigma) { return s.gaussian(mean, sigma); }

}  // namespace ewan::sim
