#pragma once

#include <cstdint>
#include <cmath>
#include <random>

#include "omitlab/constants.hpp"

// Seeded random number generation.
//
// Requirements served here: (1) a fixed seed fully determines every stochastic
// output, and (2) parallel workers draw from generators derived from
// (master seed, task index), so results do not depend on thread count or
// scheduling order.  The Gaussian transform is written out explicitly
// (Box-Muller) instead of using std::normal_distribution, whose sample
// sequence is implementation-defined and would break reproducibility claims
// across standard libraries.

namespace omitlab {

// One round of the splitmix64 finalizer; good avalanche for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream seed for worker `index` under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

// Gaussian source over a fixed, standard-specified engine (mt19937_64).
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform draw on (0, 1]; never 0, so log() below is safe.
    double uniform() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (both outputs used, in order).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace omitlab
