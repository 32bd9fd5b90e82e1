#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lossav {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-stream generator. mt19937_64 output is fixed by the standard, and the
// normal transform below is ours, so draws are identical on every platform.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : eng_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

    double uniform() {
        // 53 random bits in (0,1)
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lossav
