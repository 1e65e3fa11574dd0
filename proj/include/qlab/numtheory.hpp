#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "qlab/errors.hpp"

namespace qlab {

inline std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exponent,
                             std::uint64_t modulus) {
    if (modulus == 0) throw InputError("modulus must be >= 1");
    if (modulus == 1) return 0;
    std::uint64_t result = 1;
    base %= modulus;
    while (exponent > 0) {
        if (exponent & 1) result = mod_mul(result, base, modulus);
        base = mod_mul(base, base, modulus);
        exponent >>= 1;
    }
    return result;
}

/// Reduced non-negative rational with denominator >= 1.
struct Fraction {
    std::uint64_t numerator;
    std::uint64_t denominator;

    Fraction(std::uint64_t num, std::uint64_t den) {
        if (den == 0) throw InputError("fraction denominator must be >= 1");
        const std::uint64_t g = std::gcd(num, den);
        numerator = num / g;
        denominator = den / g;
    }

    bool operator==(const Fraction&) const = default;
};

/// All continued-fraction convergents of numerator/denominator whose
/// denominator does not exceed max_denominator, in expansion order.
inline std::vector<Fraction> continued_fractions(std::uint64_t numerator,
                                                 std::uint64_t denominator,
                                                 std::uint64_t max_denominator) {
    if (denominator == 0) throw InputError("denominator must be >= 1");
    if (numerator >= denominator) {
        throw InputError("continued fractions expect numerator < denominator");
    }
    std::vector<Fraction> convergents;
    std::uint64_t h_prev = 1, h_pprev = 0;  // numerators
    std::uint64_t k_prev = 0, k_pprev = 1;  // denominators
    std::uint64_t n = numerator, d = denominator;
    while (d != 0) {
        const std::uint64_t a = n / d;
        const std::uint64_t r = n % d;
        const std::uint64_t h = a * h_prev + h_pprev;
        const std::uint64_t k = a * k_prev + k_pprev;
        if (k > max_denominator) break;
        convergents.emplace_back(h, k);
        h_pprev = h_prev;
        h_prev = h;
        k_pprev = k_prev;
        k_prev = k;
        n = d;
        d = r;
    }
    return convergents;
}

/// Trial division; fine at desk scale.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

/// Returns (base, k) with base^k == n and k >= 2, if n is a perfect power.
/// Integer k-th roots are probed for every k up to log2(n), largest k first,
/// so the smallest base is reported (16 -> (2, 4)).
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> perfect_power(
    std::uint64_t n) {
    if (n < 4) return std::nullopt;
    std::uint64_t max_k = 2;
    while ((std::uint64_t{1} << (max_k + 1)) <= n) ++max_k;
    for (std::uint64_t k = max_k; k >= 2; --k) {
        std::uint64_t lo = 2, hi = n;
        while (lo <= hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            // mid^k with overflow guard
            std::uint64_t power = 1;
            bool overflow = false;
            for (std::uint64_t i = 0; i < k; ++i) {
                if (power > n / mid) {
                    overflow = true;
                    break;
                }
                power *= mid;
            }
            if (!overflow && power == n) return std::make_pair(mid, k);
            if (overflow || power > n) {
                hi = mid - 1;
            } else {
                lo = mid + 1;
            }
        }
    }
    return std::nullopt;
}

} // namespace qlab
