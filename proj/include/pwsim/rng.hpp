// rng.hpp — seeded random stream with explicit, portable distributions.
//
// std::uniform_real_distribution and friends are implementation-defined, so
// sampling goes through hand-rolled transforms on top of mt19937_64. The
// engine state serializes to text for checkpointing.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace pwsim {

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller without the cached spare, so the stream state is exactly the
    // engine state.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t raw() { return engine_(); }

    std::string serialize() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    static RandomStream deserialize(const std::string& text) {
        RandomStream r;
        std::istringstream is(text);
        is >> r.engine_;
        return r;
    }

    bool operator==(const RandomStream& other) const { return engine_ == other.engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace pwsim
