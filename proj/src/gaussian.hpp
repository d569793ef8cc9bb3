#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rr::detail {

// Box-Muller over explicitly mapped uniforms so streams are reproducible
// across standard-library implementations.
class Gaussian {
public:
    Gaussian(uint64_t seed, uint64_t stream) {
        std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                          static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
        eng_.seed(seq);
    }

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = ((eng_() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        const double u2 = (eng_() >> 11) * 0x1.0p-53;       // [0, 1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rr::detail
