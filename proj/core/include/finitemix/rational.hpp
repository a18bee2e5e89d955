#pragma once

#include <charconv>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "finitemix/error.hpp"

namespace finitemix {

// Exact edge weight. Always normalized: den > 0, gcd(|num|, den) == 1.
// Every weight a builder emits is a small fraction (1/n_l, 1/|V'|, ratios of
// subset sizes), so int64 components never come close to overflow.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    friend bool operator==(const Rational&, const Rational&) = default;
};

inline Rational make_rational(std::int64_t num, std::int64_t den) {
    if (den == 0) raise("BadRational", "zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num == 0) den = 1;
    return Rational{num, den};
}

inline double to_double(const Rational& r) {
    return static_cast<double>(r.num) / static_cast<double>(r.den);
}

// Canonical form used in JSON files: "num/den", always with the slash.
inline std::string to_string(const Rational& r) {
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

inline Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    std::int64_t num = 0;
    std::int64_t den = 1;
    const char* nb = text.data();
    const char* ne = text.data() + (slash == std::string_view::npos ? text.size() : slash);
    auto rn = std::from_chars(nb, ne, num);
    if (rn.ec != std::errc() || rn.ptr != ne)
        raise("BadRational", "cannot parse numerator in '" + std::string(text) + "'");
    if (slash != std::string_view::npos) {
        const char* db = text.data() + slash + 1;
        const char* de = text.data() + text.size();
        auto rd = std::from_chars(db, de, den);
        if (rd.ec != std::errc() || rd.ptr != de || db == de)
            raise("BadRational", "cannot parse denominator in '" + std::string(text) + "'");
    }
    return make_rational(num, den);
}

}  // namespace finitemix
