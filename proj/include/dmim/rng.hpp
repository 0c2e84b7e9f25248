#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dmim/errors.hpp"

namespace dmim {

/// splitmix64 finalizer. Bijective on 64-bit words, good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Substream seed for one trial: a pure function of (master seed, trial
/// index), so trials can run in any order or thread and still draw the
/// same values.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return mix64(master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15ull);
}

/// mt19937_64 with hand-rolled mappings. The engine's output sequence is
/// pinned by the standard, and both mappings below use only exact binary
/// operations, so every draw is identical across platforms and compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits, the double's full mantissa.
    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Index drawn proportionally to weights (non-negative, roughly summing
    /// to 1). Rounding may push the draw past the running sum; the fallback
    /// is the last strictly positive weight, so zero-weight categories are
    /// never returned.
    int categorical(const std::vector<double>& weights) {
        double u = u01();
        double acc = 0.0;
        int last_positive = -1;
        for (size_t k = 0; k < weights.size(); ++k) {
            if (weights[k] > 0.0) last_positive = static_cast<int>(k);
            acc += weights[k];
            if (u < acc && weights[k] > 0.0) return static_cast<int>(k);
        }
        if (last_positive < 0) throw ValidationError("categorical draw from all-zero weights");
        return last_positive;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace dmim
