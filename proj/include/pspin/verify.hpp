#pragma once

// Self-checks of the analytic results against the simulator: the modular
// power identity, exact depth-1 preparation, the closed-form fidelity and the
// invariance of the energy under the landscape symmetries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pspin/analytic.hpp"
#include "pspin/qaoa.hpp"

namespace pspin {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Exhaustive over odd m in [1, 2^(k+4)). The identity must hold whenever
/// 4 | n; for the remaining n the first counterexample is reported.
inline CheckResult check_power_identity(int max_k = 6, std::uint64_t max_n = 8) {
    std::size_t checks = 0, failures = 0, other_n_failures = 0;
    std::string counterexample;
    for (int k = 0; k <= max_k; ++k)
        for (std::uint64_t n = 0; n <= max_n; ++n)
            for (std::int64_t m = 1; m < (std::int64_t{1} << (k + 4)); m += 2) {
                const bool holds = verify_power_identity(k, n, m);
                if (n % 4 == 0) {
                    ++checks;
                    if (!holds) ++failures;
                } else if (!holds && other_n_failures++ == 0) {
                    counterexample = "k=" + std::to_string(k) + " n=" + std::to_string(n) + " m=" + std::to_string(m);
                }
            }
    std::string detail = std::to_string(checks) + " cases with 4 | n, " + std::to_string(failures) + " failures";
    if (!counterexample.empty()) detail += "; other n fail, first at " + counterexample;
    return {"power identity", failures == 0, detail};
}

inline CheckResult check_even_p_decompositions(int max_p = 64) {
    int bad = 0, total = 0;
    for (int p = 2; p <= max_p; p += 2)
        for (const auto& d : all_even_p_decompositions(p)) {
            ++total;
            if (d.value() != p || d.n < 0) ++bad;
        }
    return {"even-p decompositions", bad == 0, std::to_string(total) + " decompositions, " + std::to_string(bad) + " bad"};
}

/// Depth-1 fidelity at the given angles for h = 0.
inline double p1_engine_fidelity(int p, int n_sites, double gamma, double beta) {
    const QaoaProblem problem(ProblemSpec(n_sites, p, 0.0));
    return problem.evaluate(QaoaParams({gamma}, {beta})).fidelity;
}

inline CheckResult check_p1_odd_p(const std::vector<int>& ps = {3, 5, 7}, const std::vector<int>& ns = {5, 7, 9, 11},
                                  double tol = 1e-12) {
    double worst = 1.0;
    for (int p : ps)
        for (int n : ns) {
            const auto angles = exact_p1_params(p, n);
            worst = std::min(worst, p1_engine_fidelity(p, n, angles->gamma, angles->beta));
        }
    std::ostringstream os;
    os.precision(17);
    os << "min fidelity " << worst;
    return {"depth-1 exact, odd p", worst >= 1.0 - tol, os.str()};
}

inline CheckResult check_p1_even_p(const std::vector<int>& ps = {2, 4, 6, 8, 10, 12},
                                   const std::vector<int>& ns = {5, 7, 9, 11, 13, 15}, double tol = 1e-12) {
    double worst = 1.0;
    for (int p : ps)
        for (int n : ns) {
            const auto angles = exact_p1_params(p, n);
            worst = std::min(worst, p1_engine_fidelity(p, n, angles->gamma, angles->beta));
        }
    std::ostringstream os;
    os.precision(17);
    os << "min fidelity " << worst;
    return {"depth-1 exact, even p", worst >= 1.0 - tol, os.str()};
}

inline CheckResult check_closed_form_oracle(int grid_points = 64, double tol = 1e-10) {
    double worst = 0.0;
    for (int p : {2, 3, 4, 5})
        for (int n : {3, 5, 7, 9}) {
            const QaoaProblem problem(ProblemSpec(n, p, 0.0));
            for (int i = 0; i < grid_points; ++i) {
                const double gamma = std::numbers::pi * i / grid_points;
                const double engine = problem.evaluate(QaoaParams({gamma}, {std::numbers::pi / 4.0})).fidelity;
                worst = std::max(worst, std::abs(engine - p1_fidelity_closed_form(p, n, gamma)));
            }
        }
    std::ostringstream os;
    os << "max |engine - closed form| = " << worst;
    return {"closed-form fidelity", worst < tol, os.str()};
}

/// Random circuits on small instances of every parity combination; each
/// symmetry generator, acting globally or on one component, must leave the
/// energy unchanged.
inline CheckResult check_symmetries(int n_vectors = 100, std::uint64_t seed = 7, double tol = 1e-12) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> field(0.0, 2.0);
    const int sizes[][2] = {{2, 4}, {2, 5}, {3, 4}, {3, 5}, {2, 6}, {3, 7}, {4, 4}, {5, 3}};
    double worst = 0.0;
    int transforms = 0;
    for (int v = 0; v < n_vectors; ++v) {
        const auto [p, n] = std::pair{sizes[v % 8][0], sizes[v % 8][1]};
        const QaoaProblem problem(ProblemSpec(n, p, field(rng)));
        const int depth = 1 + static_cast<int>(rng() % 5);
        std::vector<double> g(depth), b(depth);
        for (auto& x : g) x = angle(rng);
        for (auto& x : b) x = angle(rng);
        const QaoaParams params(g, b);
        const double e0 = problem.energy(problem.state(params));
        auto group = symmetry_group(p, n);
        const auto local = per_component_symmetries(p, n, depth);
        group.insert(group.end(), local.begin(), local.end());
        for (const auto& t : group) {
            ++transforms;
            worst = std::max(worst, std::abs(problem.energy(problem.state(apply_symmetry(t, params))) - e0));
        }
    }
    std::ostringstream os;
    os << transforms << " transforms, max |dE| = " << worst;
    return {"landscape symmetries", worst < tol, os.str()};
}

inline CheckResult check_canonicalize(int n_vectors = 50, std::uint64_t seed = 11, double tol = 1e-12) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    const int sizes[][2] = {{2, 4}, {2, 5}, {3, 4}, {3, 5}};
    double worst = 0.0;
    bool in_domain = true;
    for (int v = 0; v < n_vectors; ++v) {
        const auto [p, n] = std::pair{sizes[v % 4][0], sizes[v % 4][1]};
        const QaoaProblem problem(ProblemSpec(n, p, 0.5));
        const int depth = 1 + static_cast<int>(rng() % 4);
        std::vector<double> g(depth), b(depth);
        for (auto& x : g) x = angle(rng);
        for (auto& x : b) x = angle(rng);
        const QaoaParams params(g, b);
        const auto folded = canonicalize(params, p, n);
        for (double x : folded.gammas) in_domain &= x >= 0.0 && x < gamma_period(p, n);
        for (double x : folded.betas) in_domain &= x >= 0.0 && x < beta_period(p);
        worst = std::max(worst, std::abs(problem.energy(problem.state(folded)) - problem.energy(problem.state(params))));
    }
    std::ostringstream os;
    os << "max |dE| = " << worst << (in_domain ? "" : ", angle outside fundamental domain");
    return {"canonicalize", in_domain && worst < tol, os.str()};
}

inline std::vector<CheckResult> run_verify_suite() {
    return {check_power_identity(),  check_even_p_decompositions(), check_p1_odd_p(),   check_p1_even_p(),
            check_closed_form_oracle(), check_symmetries(),         check_canonicalize()};
}

}  // namespace pspin
