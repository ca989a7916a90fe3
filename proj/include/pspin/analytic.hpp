#pragma once

// Closed-form depth-1 preparation of the h = 0 ground state for odd N, the
// modular-arithmetic identity behind the even-p angle, and the symmetry group
// of the QAOA energy landscape.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pspin/problem.hpp"
#include "pspin/qaoa.hpp"
#include "pspin/spin_sector.hpp"

namespace pspin {

/// 0 for M = +-1 (mod 8), 1 for M = +-3 (mod 8). M must be odd.
inline int f_of_m(std::int64_t m) {
    if (m % 2 == 0) throw std::invalid_argument("f_of_m: M must be odd, got " + std::to_string(m));
    const std::int64_t r = ((m % 8) + 8) % 8;
    return (r == 1 || r == 7) ? 0 : 1;
}

/// p = 2^(k+1) + n 2^k.
struct EvenPDecomposition {
    int k = 0;
    std::int64_t n = 0;

    std::int64_t value() const { return (std::int64_t{1} << (k + 1)) + n * (std::int64_t{1} << k); }
    friend bool operator==(const EvenPDecomposition&, const EvenPDecomposition&) = default;
};

/// Every (k, n) with n >= 0 that reconstructs p, ordered by increasing k.
inline std::vector<EvenPDecomposition> all_even_p_decompositions(std::int64_t p) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("even_p_decomposition: p must be even and >= 2");
    std::vector<EvenPDecomposition> out;
    for (int k = 0; k < 62 && (std::int64_t{1} << (k + 1)) <= p; ++k) {
        const std::int64_t pow_k = std::int64_t{1} << k;
        if (p % pow_k != 0) break;
        out.push_back({k, (p - 2 * pow_k) / pow_k});
    }
    return out;
}

/// The decomposition with the largest admissible k (smallest gamma).
inline EvenPDecomposition even_p_decomposition(std::int64_t p) { return all_even_p_decompositions(p).back(); }

/// The decomposition for which the power identity holds for every odd m:
/// the identity needs 4 | n, which leaves exactly k = v2(p) - 1. It coincides
/// with the maximal-k decomposition only when p is a power of two.
inline EvenPDecomposition exact_even_p_decomposition(std::int64_t p) {
    for (const auto& d : all_even_p_decompositions(p))
        if (d.n % 4 == 0) return d;
    throw std::logic_error("exact_even_p_decomposition: no decomposition with 4 | n");
}

inline double even_p_gamma(int k) { return 2.0 * std::numbers::pi / std::ldexp(1.0, k + 4); }

struct AnglePair {
    double gamma = 0.0;
    double beta = 0.0;
};

/// Depth-1 angles that prepare the h = 0 ground state exactly. Only odd N
/// admits such a pair.
inline std::optional<AnglePair> exact_p1_params(int p, int n_sites) {
    if (p < 2 || n_sites < 1) throw std::invalid_argument("exact_p1_params: need p >= 2 and N >= 1");
    if (n_sites % 2 == 0) return std::nullopt;
    constexpr double quarter = std::numbers::pi / 4.0;
    if (p % 2 == 1) return AnglePair{quarter, quarter};
    return AnglePair{even_p_gamma(exact_even_p_decomposition(p).k), quarter};
}

/// base^exponent mod modulus by binary exponentiation (modulus < 2^63).
inline std::uint64_t modpow(std::uint64_t base, std::uint64_t exponent, std::uint64_t modulus) {
    if (modulus == 0) throw std::invalid_argument("modpow: zero modulus");
    if (modulus == 1) return 0;
    using u128 = unsigned __int128;
    std::uint64_t result = 1;
    base %= modulus;
    while (exponent > 0) {
        if (exponent & 1u) result = static_cast<std::uint64_t>(static_cast<u128>(result) * base % modulus);
        base = static_cast<std::uint64_t>(static_cast<u128>(base) * base % modulus);
        exponent >>= 1;
    }
    return result;
}

/// Checks m^(2^(k+1) + n 2^k) = f(m) 2^(k+3) + 1 (mod 2^(k+4)) for odd m.
/// Holds for every odd m when 4 | n; for other n it fails for some m
/// (k = 1, n = 1, m = 3 gives 25).
inline bool verify_power_identity(int k, std::uint64_t n, std::int64_t m) {
    if (m % 2 == 0) throw std::invalid_argument("verify_power_identity: m must be odd");
    if (k < 0 || k > 58) throw std::invalid_argument("verify_power_identity: k out of range [0, 58]");
    const std::uint64_t pow_k = std::uint64_t{1} << k;
    if (n > (std::numeric_limits<std::uint64_t>::max() - 2 * pow_k) / pow_k)
        throw std::overflow_error("verify_power_identity: exponent exceeds 64 bits");
    const std::uint64_t exponent = 2 * pow_k + n * pow_k;
    const std::uint64_t modulus = std::uint64_t{1} << (k + 4);
    const auto mod_signed = static_cast<std::int64_t>(modulus);
    const auto base = static_cast<std::uint64_t>(((m % mod_signed) + mod_signed) % mod_signed);
    const std::uint64_t expected = static_cast<std::uint64_t>(f_of_m(m)) * (std::uint64_t{1} << (k + 3)) + 1;
    return modpow(base, exponent, modulus) == expected;
}

/// Fidelity of the depth-1 state at beta = pi/4 with the h = 0 ground state,
/// summed over magnetization sectors straight from the closed-form
/// interference sums:
///   odd p:  |2^-N sum_l e^{i gamma M_l^p} e^{i pi/2 Ndown_l}|^2
///   even p: |2^-N sum_l e^{i (gamma M_l^p - pi f(M_l))}|^2   (odd N only)
inline double p1_fidelity_closed_form(int p, int n_sites, double gamma) {
    if (p < 2 || n_sites < 1) throw std::invalid_argument("p1_fidelity_closed_form: need p >= 2 and N >= 1");
    if (p % 2 == 0 && n_sites % 2 == 0)
        throw std::invalid_argument("p1_fidelity_closed_form: even p requires odd N");
    const auto weights = binomial_weights(n_sites);  // C(N,k)/2^N
    std::complex<double> sum = 0.0;
    for (int k = 0; k <= n_sites; ++k) {
        const int m = n_sites - 2 * k;
        double phase = reduced_phase(gamma, checked_pow(m, p));
        if (p % 2 == 1)
            phase += 0.5 * std::numbers::pi * (k % 4);
        else
            phase -= std::numbers::pi * f_of_m(m);
        sum += weights[k] * std::polar(1.0, phase);
    }
    return std::norm(sum);
}

// ---------------------------------------------------------------------------
// Symmetries of E_P(gamma, beta)

enum class SymmetryKind { NegateAll, BetaShift, GammaShift };

struct SymmetryTransform {
    SymmetryKind kind = SymmetryKind::NegateAll;
    double shift = 0.0;
    int component = -1;  // -1: every component

    friend bool operator==(const SymmetryTransform&, const SymmetryTransform&) = default;
};

/// pi for odd p; pi/2 for even p (global spin flip).
inline double beta_period(int p) { return p % 2 == 1 ? std::numbers::pi : std::numbers::pi / 2.0; }

/// pi for odd N; pi/2^(p-1) for even N, where M^p is a multiple of 2^p.
inline double gamma_period(int p, int n_sites) {
    return n_sites % 2 == 1 ? std::numbers::pi : std::numbers::pi / std::ldexp(1.0, p - 1);
}

inline std::vector<SymmetryTransform> symmetry_group(int p, int n_sites) {
    return {{SymmetryKind::NegateAll, 0.0, -1},
            {SymmetryKind::BetaShift, beta_period(p), -1},
            {SymmetryKind::GammaShift, gamma_period(p, n_sites), -1}};
}

/// The group generators acting on one component at a time.
inline std::vector<SymmetryTransform> per_component_symmetries(int p, int n_sites, int depth) {
    std::vector<SymmetryTransform> out{{SymmetryKind::NegateAll, 0.0, -1}};
    for (int m = 0; m < depth; ++m) {
        out.push_back({SymmetryKind::BetaShift, beta_period(p), m});
        out.push_back({SymmetryKind::GammaShift, gamma_period(p, n_sites), m});
    }
    return out;
}

inline QaoaParams apply_symmetry(const SymmetryTransform& t, QaoaParams params) {
    auto shift = [&](std::vector<double>& v) {
        if (t.component < 0) {
            for (auto& x : v) x += t.shift;
        } else {
            if (t.component >= static_cast<int>(v.size())) throw std::out_of_range("apply_symmetry: component index");
            v[t.component] += t.shift;
        }
    };
    switch (t.kind) {
        case SymmetryKind::NegateAll:
            for (auto& x : params.gammas) x = -x;
            for (auto& x : params.betas) x = -x;
            break;
        case SymmetryKind::BetaShift: shift(params.betas); break;
        case SymmetryKind::GammaShift: shift(params.gammas); break;
    }
    return params;
}

/// Folds every angle into [0, period).
inline QaoaParams canonicalize(QaoaParams params, int p, int n_sites) {
    auto fold = [](double x, double period) {
        double r = std::fmod(x, period);
        if (r < 0.0) r += period;
        return r >= period ? 0.0 : r;
    };
    const double gp = gamma_period(p, n_sites), bp = beta_period(p);
    for (auto& g : params.gammas) g = fold(g, gp);
    for (auto& b : params.betas) b = fold(b, bp);
    return params;
}

}  // namespace pspin
