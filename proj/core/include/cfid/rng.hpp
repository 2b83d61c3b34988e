#ifndef CFID_RNG_HPP
#define CFID_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cfid {

/// Deterministic random source. All randomized operations in the library
/// take an explicit 64-bit seed; identical seeds give identical draws on
/// the same build. Uniform doubles are derived from the raw 64-bit stream
/// directly so results do not depend on std::uniform_real_distribution
/// internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// splitmix64-style combiner for deriving per-item seeds from
    /// (seed, index) pairs.
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1].
    double uniform() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

    /// Point on the n-simplex with every entry >= floor. Draws a
    /// symmetric Dirichlet(1) vector via exponential spacings and maps it
    /// affinely onto the floored simplex, so the floor holds exactly.
    std::vector<double> simplex(int n, double floor) {
        std::vector<double> v(static_cast<std::size_t>(n));
        double total = 0.0;
        for (auto& x : v) {
            x = -std::log(uniform());
            total += x;
        }
        const double free_mass = 1.0 - floor * n;
        for (auto& x : v) x = floor + free_mass * (x / total);
        return v;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace cfid

#endif
