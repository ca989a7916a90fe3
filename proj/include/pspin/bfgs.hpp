#pragma once

/**
 * Dense inverse-Hessian BFGS with a line search that enforces the strong
 * Wolfe conditions (the bracketing/zoom search from Nocedal & Wright, with
 * safeguarded cubic interpolation inside zoom).
 *
 * The objective is any callable `double f(const Eigen::VectorXd& x, Eigen::VectorXd& grad)`
 * that returns the value at x and writes the gradient into grad.
 *
 * An optional positive diagonal D seeds the inverse Hessian as H0 = diag(D),
 * which is the same iteration as plain BFGS on rescaled variables
 * x = diag(D)^(1/2) y. Resets and the first-step scaling keep that diagonal.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace pspin {

struct BfgsConfig {
    double grad_tol = 1e-9;         // infinity norm
    int max_iters = 10000;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    double stagnation_tol = 1e-15;  // relative energy decrease
    int max_line_search_evals = 60;

    void validate() const {
        if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
            throw std::invalid_argument("BfgsConfig: need 0 < c1 < c2 < 1");
        if (!(grad_tol > 0.0)) throw std::invalid_argument("BfgsConfig: grad_tol must be > 0");
        if (max_iters < 1) throw std::invalid_argument("BfgsConfig: max_iters must be >= 1");
        if (!(stagnation_tol >= 0.0)) throw std::invalid_argument("BfgsConfig: stagnation_tol must be >= 0");
        if (max_line_search_evals < 2) throw std::invalid_argument("BfgsConfig: max_line_search_evals must be >= 2");
    }
};

enum class StopReason { GradientTolerance, Stagnation, MaxIterations, LineSearchFailure };

inline std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::GradientTolerance: return "gradient";
        case StopReason::Stagnation: return "stagnation";
        case StopReason::MaxIterations: return "max_iters";
        case StopReason::LineSearchFailure: return "line_search";
    }
    return "unknown";
}

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int n_iters = 0;
    int n_evals = 0;
    StopReason reason = StopReason::MaxIterations;
    bool converged = false;  // stopped on gradient tolerance or stagnation
};

template <typename F>
concept GradientObjective = requires(F f, const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    { f(x, g) } -> std::convertible_to<double>;
};

namespace detail {

struct LinePoint {
    double alpha = 0.0;
    double value = 0.0;
    double slope = 0.0;  // directional derivative
    Eigen::VectorXd x;
    Eigen::VectorXd grad;
};

// Minimizer of the cubic matching values and slopes at a and b, clamped to
// the inner 80% of the interval.
inline double cubic_step(const LinePoint& a, const LinePoint& b) {
    const double lo = std::min(a.alpha, b.alpha), hi = std::max(a.alpha, b.alpha);
    const double margin = 0.1 * (hi - lo);
    const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.alpha - b.alpha);
    const double disc = d1 * d1 - a.slope * b.slope;
    double trial = 0.5 * (lo + hi);
    if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
        const double denom = b.slope - a.slope + 2.0 * d2;
        if (denom != 0.0) {
            const double t = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
            if (std::isfinite(t)) trial = t;
        }
    }
    return std::clamp(trial, lo + margin, hi - margin);
}

struct LineSearchOutcome {
    bool ok = false;
    LinePoint point;
};

template <typename F>
LineSearchOutcome strong_wolfe(F& f, const Eigen::VectorXd& x, const Eigen::VectorXd& dir, const LinePoint& origin,
                               double alpha_init, const BfgsConfig& cfg, int& evals) {
    auto probe = [&](double alpha) {
        LinePoint p;
        p.alpha = alpha;
        p.x = x + alpha * dir;
        p.grad.resize(x.size());
        p.value = f(p.x, p.grad);
        p.slope = p.grad.dot(dir);
        ++evals;
        return p;
    };
    const double f0 = origin.value, s0 = origin.slope;
    auto armijo = [&](const LinePoint& p) { return p.value <= f0 + cfg.wolfe_c1 * p.alpha * s0; };
    auto curvature = [&](const LinePoint& p) { return std::abs(p.slope) <= -cfg.wolfe_c2 * s0; };

    int budget = cfg.max_line_search_evals;
    auto zoom = [&](LinePoint lo, LinePoint hi) -> LineSearchOutcome {
        while (budget-- > 0) {
            if (std::abs(hi.alpha - lo.alpha) <= std::numeric_limits<double>::epsilon() * std::max(1.0, lo.alpha))
                break;
            LinePoint trial = probe(cubic_step(lo, hi));
            if (!std::isfinite(trial.value) || !armijo(trial) || trial.value >= lo.value) {
                hi = std::move(trial);
            } else {
                if (curvature(trial)) return {true, std::move(trial)};
                if (trial.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = std::move(trial);
            }
        }
        // out of budget: lo (if it moved) still satisfies sufficient decrease
        if (lo.alpha > 0.0) return {true, std::move(lo)};
        return {false, std::move(lo)};
    };

    LinePoint prev = origin;
    double alpha = alpha_init;
    for (int i = 0; budget-- > 0; ++i) {
        LinePoint cur = probe(alpha);
        if (!std::isfinite(cur.value) || !armijo(cur) || (i > 0 && cur.value >= prev.value))
            return zoom(std::move(prev), std::move(cur));
        if (curvature(cur)) return {true, std::move(cur)};
        if (cur.slope >= 0.0) return zoom(std::move(cur), std::move(prev));
        prev = std::move(cur);
        alpha *= 2.0;
    }
    if (prev.alpha > 0.0) return {true, std::move(prev)};
    return {false, std::move(prev)};
}

}  // namespace detail

template <GradientObjective F>
BfgsResult bfgs_minimize(F&& objective, const Eigen::VectorXd& x0, const BfgsConfig& cfg = {},
                         const Eigen::VectorXd& initial_diagonal = {}) {
    cfg.validate();
    const Eigen::Index n = x0.size();
    if (n < 1) throw std::invalid_argument("bfgs_minimize: dimension must be >= 1");
    const Eigen::VectorXd h0 = initial_diagonal.size() == 0 ? Eigen::VectorXd::Ones(n) : initial_diagonal;
    if (h0.size() != n || !(h0.array() > 0.0).all())
        throw std::invalid_argument("bfgs_minimize: initial diagonal must be positive with matching size");

    BfgsResult res;
    res.x = x0;
    res.gradient.resize(n);
    res.value = objective(res.x, res.gradient);
    res.n_evals = 1;
    if (!std::isfinite(res.value)) throw std::domain_error("bfgs_minimize: objective is not finite at x0");

    Eigen::MatrixXd inv_hessian = h0.asDiagonal();
    bool identity_hessian = true;  // still the (unscaled) seed diagonal
    auto stagnant = [&](double decrease, double ref) {
        return decrease <= cfg.stagnation_tol * std::max(1.0, std::abs(ref));
    };

    while (true) {
        if (res.gradient.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) {
            res.reason = StopReason::GradientTolerance;
            break;
        }
        if (res.n_iters >= cfg.max_iters) {
            res.reason = StopReason::MaxIterations;
            break;
        }
        Eigen::VectorXd dir = -(inv_hessian * res.gradient);
        double slope = res.gradient.dot(dir);
        if (!(slope < 0.0)) {
            inv_hessian = h0.asDiagonal();
            identity_hessian = true;
            dir = -(h0.cwiseProduct(res.gradient));
            slope = res.gradient.dot(dir);
        }
        // predicted decrease of a full quasi-Newton step is below resolution
        if (stagnant(-slope, res.value)) {
            res.reason = StopReason::Stagnation;
            break;
        }

        const double alpha0 =
            res.n_iters == 0 ? std::min(1.0, 1.0 / h0.cwiseSqrt().cwiseProduct(res.gradient).lpNorm<Eigen::Infinity>()) : 1.0;
        detail::LinePoint origin{0.0, res.value, slope, res.x, res.gradient};
        auto ls = detail::strong_wolfe(objective, res.x, dir, origin, alpha0, cfg, res.n_evals);
        if (!ls.ok) {
            if (!identity_hessian) {
                inv_hessian = h0.asDiagonal();
                identity_hessian = true;
                continue;
            }
            res.reason = StopReason::LineSearchFailure;
            break;
        }

        const Eigen::VectorXd s = ls.point.x - res.x;
        const Eigen::VectorXd y = ls.point.grad - res.gradient;
        const double decrease = res.value - ls.point.value;
        res.x = std::move(ls.point.x);
        res.gradient = std::move(ls.point.grad);
        const double previous = res.value;
        res.value = ls.point.value;
        ++res.n_iters;
        if (stagnant(decrease, previous)) {
            res.reason = StopReason::Stagnation;
            break;
        }

        const double sy = s.dot(y);
        if (sy > std::numeric_limits<double>::epsilon() * s.norm() * y.norm()) {
            if (identity_hessian) inv_hessian *= sy / y.dot(h0.cwiseProduct(y));
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = inv_hessian * y;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded
            inv_hessian.noalias() += (rho * rho * y.dot(hy) + rho) * (s * s.transpose());
            inv_hessian.noalias() -= rho * (hy * s.transpose() + s * hy.transpose());
            identity_hessian = false;
        }
    }
    res.converged = res.reason == StopReason::GradientTolerance || res.reason == StopReason::Stagnation;
    return res;
}

}  // namespace pspin
