#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace pspin {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double rms_residual = 0.0;
    std::size_t n_points = 0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("fit_line: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: all x values coincide");
    LinearFit fit;
    fit.n_points = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.rms_residual = std::sqrt(ss_res / n);
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

/// Residuals below this are numerical zeros and never enter log fits.
inline constexpr double kExactZeroResidual = 1e-10;

struct ScalingPoint {
    int depth = 0;
    int critical_depth = 0;
    double mean_residual = 0.0;
};

struct ScalingExponentFit {
    double exponent = 0.0;      // b in (1 - P/P*)^b
    double rms_residual = 0.0;  // in log space
    double intercept = 0.0;
    std::size_t n_used = 0;
};

/// Slope of log(mean residual) against log(1 - P/P*) over points with
/// 0.1 <= P/P* <= 0.9 and a residual above the numerical-zero floor.
inline ScalingExponentFit fit_scaling_exponent(std::span<const ScalingPoint> rows) {
    std::vector<double> x, y;
    for (const auto& r : rows) {
        if (r.critical_depth <= 0) continue;
        const double ratio = static_cast<double>(r.depth) / r.critical_depth;
        if (ratio < 0.1 || ratio > 0.9 || !(r.mean_residual >= kExactZeroResidual)) continue;
        x.push_back(std::log(1.0 - ratio));
        y.push_back(std::log(r.mean_residual));
    }
    if (x.size() < 3)
        throw std::invalid_argument("fit_scaling_exponent: fewer than 3 usable rows (" + std::to_string(x.size()) + ")");
    const auto line = fit_line(x, y);
    return {line.slope, line.rms_residual, line.intercept, line.n_points};
}

}  // namespace pspin
