#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pspin/bfgs.hpp"
#include "pspin/parallel.hpp"
#include "pspin/qaoa.hpp"
#include "pspin/seeding.hpp"

namespace pspin {

using OptimizerConfig = BfgsConfig;

/// Uniform draws in [low, high] for every angle.
struct RandomInit {
    double low = 0.0;
    double high = std::numbers::pi;
    friend bool operator==(const RandomInit&, const RandomInit&) = default;
};

/// Digitized linear annealing schedule s_m = m/P with time step dt, each
/// entry scaled by (1 + r), r uniform in [-noise_amplitude, noise_amplitude].
struct LinearInit {
    double dt = 1.0;
    double noise_amplitude = 0.05;
    friend bool operator==(const LinearInit&, const LinearInit&) = default;
};

using InitScheme = std::variant<RandomInit, LinearInit>;

inline std::string scheme_name(const InitScheme& s) {
    return std::holds_alternative<RandomInit>(s) ? "r" : "l";
}

inline void validate_scheme(const InitScheme& s) {
    if (const auto* lin = std::get_if<LinearInit>(&s)) {
        if (!(lin->dt > 0.0)) throw std::invalid_argument("LinearInit: dt must be > 0");
        if (!(lin->noise_amplitude >= 0.0)) throw std::invalid_argument("LinearInit: noise_amplitude must be >= 0");
    } else {
        const auto& r = std::get<RandomInit>(s);
        if (!(r.high >= r.low)) throw std::invalid_argument("RandomInit: empty range");
    }
}

inline QaoaParams r_init(int depth, std::uint64_t seed, const RandomInit& range = {}) {
    if (depth < 1) throw std::invalid_argument("r_init: depth must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(range.low, range.high);
    std::vector<double> g(depth), b(depth);
    for (auto& v : g) v = angle(rng);
    for (auto& v : b) v = angle(rng);
    return QaoaParams(std::move(g), std::move(b));
}

inline QaoaParams l_init(int depth, const ProblemSpec& spec, double dt, double noise_amplitude, std::uint64_t seed) {
    if (depth < 1) throw std::invalid_argument("l_init: depth must be >= 1");
    validate_scheme(LinearInit{dt, noise_amplitude});
    const double scale = spec.interaction_scale();
    std::vector<double> g(depth), b(depth);
    for (int m = 1; m <= depth; ++m) {
        const double s = static_cast<double>(m) / depth;
        g[m - 1] = dt * s / scale;
        b[m - 1] = dt * (1.0 - s * (1.0 - spec.field));
    }
    if (noise_amplitude > 0.0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> noise(-noise_amplitude, noise_amplitude);
        for (auto& v : g) v *= 1.0 + noise(rng);
        for (auto& v : b) v *= 1.0 + noise(rng);
    }
    return QaoaParams(std::move(g), std::move(b));
}

inline QaoaParams initial_params(const InitScheme& scheme, int depth, const ProblemSpec& spec, std::uint64_t seed) {
    if (const auto* lin = std::get_if<LinearInit>(&scheme)) return l_init(depth, spec, lin->dt, lin->noise_amplitude, seed);
    return r_init(depth, seed, std::get<RandomInit>(scheme));
}

struct OptimizationResult {
    QaoaParams params_star;
    QaoaParams params_initial;
    EvaluationRecord record;
    int n_iters = 0;
    bool converged = false;
    StopReason stop_reason = StopReason::MaxIterations;
    double grad_inf_norm = 0.0;
    InitScheme scheme;
    std::uint64_t seed = 0;
};

/// Seed diagonal for the inverse Hessian. The energy curvature along gamma
/// grows like N^(2(p-1)) relative to beta, so gamma is rescaled by 1/N^(p-1).
inline Eigen::VectorXd angle_preconditioner(const ProblemSpec& spec, int depth) {
    const double g = 1.0 / spec.interaction_scale();
    Eigen::VectorXd d(2 * depth);
    d.head(depth).setConstant(g * g);
    d.tail(depth).setConstant(1.0);
    return d;
}

inline OptimizationResult optimize(const QaoaProblem& problem, int depth, const InitScheme& scheme,
                                   const OptimizerConfig& config, std::uint64_t seed) {
    validate_scheme(scheme);
    OptimizationResult out;
    out.scheme = scheme;
    out.seed = seed;
    out.params_initial = initial_params(scheme, depth, problem.spec(), seed);

    const auto x0 = out.params_initial.flat();
    auto objective = [&problem](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        const auto [e, g] = problem.energy_and_gradient(QaoaParams::from_flat({x.data(), static_cast<std::size_t>(x.size())}));
        grad = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
        return e;
    };
    const auto res = bfgs_minimize(objective, Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size())),
                                   config, angle_preconditioner(problem.spec(), depth));
    out.params_star = QaoaParams::from_flat({res.x.data(), static_cast<std::size_t>(res.x.size())});
    out.record = problem.evaluate(out.params_star);
    out.n_iters = res.n_iters;
    out.converged = res.converged;
    out.stop_reason = res.reason;
    out.grad_inf_norm = res.gradient.lpNorm<Eigen::Infinity>();
    return out;
}

inline OptimizationResult optimize(const ProblemSpec& spec, int depth, const InitScheme& scheme,
                                   const OptimizerConfig& config, std::uint64_t seed) {
    return optimize(QaoaProblem(spec), depth, scheme, config, seed);
}

/// Summary of a sample. Values are sorted before accumulation so the result
/// does not depend on the order the samples arrived in.
struct SampleStats {
    double mean = 0.0;
    double std_dev = 0.0;   // sample standard deviation (n - 1), 0 for n = 1
    double std_error = 0.0; // std_dev / sqrt(n)
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

inline SampleStats summarize(std::vector<double> values) {
    SampleStats s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    s.std_error = s.std_dev / std::sqrt(static_cast<double>(values.size()));
    s.min = values.front();
    s.max = values.back();
    return s;
}

struct MultiStartResult {
    SampleStats residual;
    SampleStats iterations;
    SampleStats annealing_time;
    int n_nonconverged = 0;
    std::vector<OptimizationResult> runs;  // in restart-index order
};

inline MultiStartResult aggregate(std::vector<OptimizationResult> runs) {
    MultiStartResult out;
    std::vector<double> res, iters, tau;
    for (const auto& r : runs) {
        res.push_back(r.record.residual);
        iters.push_back(r.n_iters);
        tau.push_back(r.record.annealing_time);
        if (!r.converged) ++out.n_nonconverged;
    }
    out.residual = summarize(std::move(res));
    out.iterations = summarize(std::move(iters));
    out.annealing_time = summarize(std::move(tau));
    out.runs = std::move(runs);
    return out;
}

inline MultiStartResult multi_start(const QaoaProblem& problem, int depth, const InitScheme& scheme, int n_restarts,
                                    std::uint64_t base_seed, const OptimizerConfig& config, int workers = 1) {
    if (n_restarts < 1) throw std::invalid_argument("multi_start: n_restarts must be >= 1");
    const auto& spec = problem.spec();
    std::vector<OptimizationResult> runs(static_cast<std::size_t>(n_restarts));
    parallel_for(runs.size(), workers, [&](std::size_t i) {
        const auto seed = task_seed(base_seed, spec.n_sites, depth, spec.field, static_cast<int>(i));
        runs[i] = optimize(problem, depth, scheme, config, seed);
    });
    return aggregate(std::move(runs));
}

inline MultiStartResult multi_start(const ProblemSpec& spec, int depth, const InitScheme& scheme, int n_restarts,
                                    std::uint64_t base_seed, const OptimizerConfig& config, int workers = 1) {
    return multi_start(QaoaProblem(spec), depth, scheme, n_restarts, base_seed, config, workers);
}

}  // namespace pspin
