#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace finitemix {

// FNV-1a over a label plus mixed-in integers. Batch drivers (rate tables,
// sweeps) derive one stream per row from (family, n, k) so results do not
// depend on evaluation order or thread count.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(base);
    for (const char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    mix(a);
    mix(b);
    return h;
}

// Standard normal draws: Box-Muller over mt19937_64 uniforms. Implemented
// directly because std::normal_distribution is not pinned across standard
// libraries and traces must reproduce bit for bit.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open_closed();
        const double u2 = uniform_open_closed();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * pi() * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static constexpr double pi() { return 3.14159265358979323846; }

    // (0, 1]: never feeds log() a zero.
    double uniform_open_closed() {
        const std::uint64_t bits = engine_() >> 11;  // top 53 bits
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace finitemix
