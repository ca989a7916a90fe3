#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pspin {

using Int128 = __int128;

/// Exact integer power in 128-bit signed arithmetic. Throws std::overflow_error
/// once |base|^exponent reaches 2^127.
inline Int128 checked_pow(std::int64_t base, int exponent) {
    if (exponent < 0) throw std::invalid_argument("checked_pow: negative exponent");
    const Int128 limit = std::numeric_limits<Int128>::max();
    Int128 magnitude = base < 0 ? -static_cast<Int128>(base) : static_cast<Int128>(base);
    Int128 result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (magnitude != 0 && result > limit / magnitude)
            throw std::overflow_error("checked_pow: |" + std::to_string(base) + "|^" +
                                      std::to_string(exponent) + " exceeds 128-bit range");
        result *= magnitude;
    }
    if (base < 0 && (exponent % 2 == 1)) result = -result;
    return result;
}

inline double to_double(Int128 v) { return static_cast<double>(v); }

inline std::string to_string(Int128 v) {
    if (v == 0) return "0";
    const bool negative = v < 0;
    std::string digits;
    while (v != 0) {
        int d = static_cast<int>(v % 10);
        digits.insert(digits.begin(), static_cast<char>('0' + (d < 0 ? -d : d)));
        v /= 10;
    }
    return negative ? "-" + digits : digits;
}

/// The fully-connected p-spin ferromagnet
///   H = -(sum_j sz_j)^p / N^(p-1) - h * sum_j sx_j.
struct ProblemSpec {
    int n_sites = 1;
    int p_exponent = 2;
    double field = 0.0;

    ProblemSpec() = default;
    ProblemSpec(int n, int p, double h) : n_sites(n), p_exponent(p), field(h) { validate(); }

    void validate() const {
        if (n_sites < 1) throw std::invalid_argument("ProblemSpec: N must be >= 1");
        if (p_exponent < 2) throw std::invalid_argument("ProblemSpec: p must be >= 2");
        if (!(field >= 0.0) || !std::isfinite(field))
            throw std::invalid_argument("ProblemSpec: h must be finite and >= 0");
        // N^p must fit below 2^127 for exact phase arithmetic.
        checked_pow(n_sites, p_exponent);
    }

    bool p_even() const { return p_exponent % 2 == 0; }
    bool n_odd() const { return n_sites % 2 == 1; }

    /// N^(p-1) as a double; used for the interaction normalization.
    double interaction_scale() const { return to_double(checked_pow(n_sites, p_exponent - 1)); }

    /// Depth above which every local minimum reaches the ground state:
    /// N/2 + 2 for even p (integer division), N + 1 for odd p.
    int critical_depth() const { return p_even() ? n_sites / 2 + 2 : n_sites + 1; }

    /// Coordinate that collapses residual curves across sizes.
    double collapse_coordinate(int depth) const {
        const int shift = p_even() ? 2 : 1;
        return static_cast<double>(depth - shift) / n_sites;
    }

    friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Golden-ratio field used throughout the depth-scaling experiments.
inline const double kGoldenField = (std::sqrt(5.0) - 1.0) / 2.0;

/// Transverse field at the transition, used as a plot marker only.
/// p = 2 is the exact second-order point and p = 3 the commonly quoted
/// first-order value; larger p use the mean-field tie condition
/// h_c = max_m m^p / (1 - sqrt(1 - m^2)).
inline double critical_field(int p) {
    if (p <= 2) return 2.0;
    if (p == 3) return 1.2956;
    auto ratio = [p](double m) { return std::pow(m, p) / (1.0 - std::sqrt(1.0 - m * m)); };
    double best_m = 1.0;
    double best = ratio(1.0);
    for (int i = 1; i < 1000; ++i) {
        const double m = i / 1000.0;
        if (const double r = ratio(m); r > best) { best = r; best_m = m; }
    }
    double lo = std::max(1e-3, best_m - 1e-3), hi = std::min(1.0, best_m + 1e-3);
    for (int it = 0; it < 100; ++it) {
        const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
        if (ratio(a) < ratio(b)) lo = a; else hi = b;
    }
    return ratio(0.5 * (lo + hi));
}

}  // namespace pspin
