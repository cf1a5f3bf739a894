#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dsdl {

/// Seeded generator with hand-rolled transforms so that streams are
/// reproducible bit-for-bit across standard libraries (the distribution
/// classes in <random> are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Box-Muller; draws two uniforms per call and keeps only the cosine
    /// branch so the stream position is independent of caller history.
    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Derives an independent stream for a named sub-purpose.
    Rng fork(std::uint64_t salt) const {
        return Rng(seed_ ^ (salt * 0x9e3779b97f4a7c15ULL));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace dsdl
