#pragma once

// QAOA circuit |psi_P> = prod_m e^{-i beta_m Hx} e^{-i gamma_m Hz} |+>
// restricted to the symmetric sector, with Hx = -sum sx and Hz = -(sum sz)^p.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pspin/problem.hpp"
#include "pspin/spin_sector.hpp"

namespace pspin {

struct QaoaParams {
    std::vector<double> gammas;
    std::vector<double> betas;

    QaoaParams() = default;
    QaoaParams(std::vector<double> g, std::vector<double> b) : gammas(std::move(g)), betas(std::move(b)) {
        validate();
    }

    int depth() const { return static_cast<int>(gammas.size()); }

    void validate() const {
        if (gammas.size() != betas.size()) throw std::invalid_argument("QaoaParams: gamma/beta length mismatch");
        if (gammas.empty()) throw std::invalid_argument("QaoaParams: depth must be >= 1");
    }

    /// Packed as (gamma_1..gamma_P, beta_1..beta_P).
    std::vector<double> flat() const {
        std::vector<double> x(gammas);
        x.insert(x.end(), betas.begin(), betas.end());
        return x;
    }

    static QaoaParams from_flat(std::span<const double> x) {
        if (x.size() % 2 != 0 || x.empty()) throw std::invalid_argument("QaoaParams: flat vector must have even length >= 2");
        const auto p = x.size() / 2;
        return QaoaParams({x.begin(), x.begin() + p}, {x.begin() + p, x.end()});
    }

    static QaoaParams zeros(int depth) {
        return QaoaParams(std::vector<double>(depth, 0.0), std::vector<double>(depth, 0.0));
    }

    friend bool operator==(const QaoaParams&, const QaoaParams&) = default;
};

struct EvaluationRecord {
    double energy = 0.0;
    double residual = 0.0;
    double fidelity = 0.0;
    double annealing_time = 0.0;
};

/// gamma * value reduced modulo 2 pi. When gamma is 2 pi/q for an integer q
/// (to within 4 ulp) the value is first folded exactly modulo q, so angles such
/// as pi/4 or 2 pi/2^(k+4) stay exact for any M^p. Otherwise the product is
/// formed in long double before reduction.
inline double reduced_phase(double gamma, Int128 value) {
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const double q = std::round(2.0 * std::numbers::pi / gamma);
    if (std::isfinite(q) && std::abs(q) >= 1.0 && std::abs(q) < 0x1p62 &&
        std::abs(q * gamma - 2.0 * std::numbers::pi) <= 4.0 * std::numeric_limits<double>::epsilon() * 2.0 * std::numbers::pi)
        value %= static_cast<Int128>(static_cast<std::int64_t>(q));
    const long double v = static_cast<long double>(gamma) * static_cast<long double>(value);
    return static_cast<double>(std::fmod(v, two_pi));
}

/// amplitude_k *= exp(-i gamma hz_k)
inline void apply_phase_layer(StateVector& state, double gamma, std::span<const Int128> hz) {
    if (static_cast<Eigen::Index>(hz.size()) != state.size())
        throw std::invalid_argument("apply_phase_layer: dimension mismatch");
    for (Eigen::Index k = 0; k < state.size(); ++k)
        state.amplitudes[k] *= std::polar(1.0, -reduced_phase(gamma, hz[k]));
}

/// state <- V diag(e^{i beta lambda}) V^T state, i.e. e^{-i beta Hx} with Hx = -X.
inline void apply_mixer_layer(StateVector& state, double beta, const XSpectralDecomposition& xdec) {
    if (xdec.eigenvalues.size() != state.size())
        throw std::invalid_argument("apply_mixer_layer: dimension mismatch");
    Eigen::VectorXcd rotated = xdec.eigenvectors.transpose() * state.amplitudes;
    for (Eigen::Index j = 0; j < rotated.size(); ++j) rotated[j] *= std::polar(1.0, beta * xdec.eigenvalues[j]);
    state.amplitudes = xdec.eigenvectors * rotated;
}

/// Everything needed to evaluate circuits for one ProblemSpec. Immutable after
/// construction, so one instance can serve concurrent evaluations.
class QaoaProblem {
public:
    explicit QaoaProblem(const ProblemSpec& spec)
        : spec_(spec),
          basis_(build_basis(spec.n_sites)),
          hz_(hz_integers(basis_, spec.p_exponent)),
          x_(collective_x_matrix(basis_)),
          target_(target_matrix(spec, basis_, x_)),
          xdec_(cached_x_decomposition(spec.n_sites)),
          plus_(plus_state(basis_)),
          spectrum_(diagonalize_target(spec)) {
        hz_real_.resize(static_cast<Eigen::Index>(hz_.size()));
        for (std::size_t k = 0; k < hz_.size(); ++k) hz_real_[static_cast<Eigen::Index>(k)] = to_double(hz_[k]);
    }

    const ProblemSpec& spec() const { return spec_; }
    const SymmetricBasis& basis() const { return basis_; }
    std::span<const Int128> hz() const { return hz_; }
    const SymTridiagonal& collective_x() const { return x_; }
    const SymTridiagonal& target() const { return target_; }
    const XSpectralDecomposition& x_decomposition() const { return *xdec_; }
    const StateVector& initial_state() const { return plus_; }
    const TargetSpectrum& spectrum() const { return spectrum_; }

    StateVector state(const QaoaParams& params) const {
        params.validate();
        StateVector psi = plus_;
        for (int m = 0; m < params.depth(); ++m) {
            apply_phase_layer(psi, params.gammas[m], hz_);
            apply_mixer_layer(psi, params.betas[m], *xdec_);
        }
        return psi;
    }

    double energy(const StateVector& psi) const {
        const Eigen::VectorXcd h_psi = target_.apply(psi.amplitudes);
        const Complex e = psi.amplitudes.dot(h_psi);
        if (std::abs(e.imag()) > 1e-12 * std::max(1.0, std::abs(e.real())))
            throw std::logic_error("energy: expectation value has a non-negligible imaginary part");
        return e.real();
    }

    /// Energy and its exact gradient with respect to (gamma_1..gamma_P, beta_1..beta_P),
    /// from one forward sweep and one adjoint sweep.
    std::pair<double, std::vector<double>> energy_and_gradient(const QaoaParams& params) const {
        params.validate();
        const int depth = params.depth();
        std::vector<Eigen::VectorXcd> after_phase(depth), after_mixer(depth);
        StateVector psi = plus_;
        for (int m = 0; m < depth; ++m) {
            apply_phase_layer(psi, params.gammas[m], hz_);
            after_phase[m] = psi.amplitudes;
            apply_mixer_layer(psi, params.betas[m], *xdec_);
            after_mixer[m] = psi.amplitudes;
        }
        StateVector costate(target_.apply(psi.amplitudes));
        const double e = psi.amplitudes.dot(costate.amplitudes).real();

        std::vector<double> grad(2 * static_cast<std::size_t>(depth));
        for (int m = depth - 1; m >= 0; --m) {
            const Eigen::VectorXcd x_psi = x_.apply(after_mixer[m]);
            grad[depth + m] = -2.0 * costate.amplitudes.dot(x_psi).imag();
            apply_mixer_layer(costate, -params.betas[m], *xdec_);
            const Eigen::VectorXcd hz_psi = hz_real_.cwiseProduct(after_phase[m]);
            grad[m] = 2.0 * costate.amplitudes.dot(hz_psi).imag();
            apply_phase_layer(costate, -params.gammas[m], hz_);
        }
        return {e, std::move(grad)};
    }

    double annealing_time(const QaoaParams& params) const;
    EvaluationRecord evaluate(const QaoaParams& params) const;

private:
    ProblemSpec spec_;
    SymmetricBasis basis_;
    std::vector<Int128> hz_;
    Eigen::VectorXd hz_real_;
    SymTridiagonal x_;
    SymTridiagonal target_;
    std::shared_ptr<const XSpectralDecomposition> xdec_;
    StateVector plus_;
    TargetSpectrum spectrum_;
};

inline StateVector qaoa_state(const ProblemSpec& spec, const QaoaParams& params) {
    const auto basis = build_basis(spec.n_sites);
    const auto hz = hz_integers(basis, spec.p_exponent);
    const auto xdec = cached_x_decomposition(spec.n_sites);
    StateVector psi = plus_state(basis);
    params.validate();
    for (int m = 0; m < params.depth(); ++m) {
        apply_phase_layer(psi, params.gammas[m], hz);
        apply_mixer_layer(psi, params.betas[m], *xdec);
    }
    return psi;
}

inline double energy(const ProblemSpec& spec, const StateVector& state) {
    const auto h = target_matrix(spec);
    const Complex e = state.amplitudes.dot(h.apply(state.amplitudes));
    if (std::abs(e.imag()) > 1e-12 * std::max(1.0, std::abs(e.real())))
        throw std::logic_error("energy: expectation value has a non-negligible imaginary part");
    return e.real();
}

/// (E - E_min)/(E_max - E_min). Values within 1e-12 outside [0, 1] are
/// clamped; anything beyond 1e-9 of the spectrum bounds is an error.
inline double residual_energy(const TargetSpectrum& spectrum, double e) {
    const double width = spectrum.e_max - spectrum.e_min;
    if (!(width > 0.0)) throw std::domain_error("residual_energy: degenerate spectrum (e_max == e_min)");
    if (e < spectrum.e_min - 1e-9 || e > spectrum.e_max + 1e-9)
        throw std::domain_error("residual_energy: energy lies outside the spectrum");
    const double r = (e - spectrum.e_min) / width;
    if (r < 0.0 && r >= -1e-12) return 0.0;
    if (r > 1.0 && r <= 1.0 + 1e-12) return 1.0;
    return r;
}

inline double fidelity(const StateVector& state, const StateVector& target) {
    if (state.size() != target.size()) throw std::invalid_argument("fidelity: dimension mismatch");
    return std::norm(target.amplitudes.dot(state.amplitudes));
}

inline std::pair<double, std::vector<double>> energy_and_gradient(const ProblemSpec& spec, const QaoaParams& params) {
    return QaoaProblem(spec).energy_and_gradient(params);
}

/// tau/hbar = sum_m [beta_m + (1 - h) gamma_m N^(p-1)].
inline double equivalent_annealing_time(const ProblemSpec& spec, const QaoaParams& params) {
    params.validate();
    const double scale = spec.interaction_scale();
    double tau = 0.0;
    for (int m = 0; m < params.depth(); ++m) tau += params.betas[m] + (1.0 - spec.field) * params.gammas[m] * scale;
    return tau;
}

inline double QaoaProblem::annealing_time(const QaoaParams& params) const {
    return equivalent_annealing_time(spec_, params);
}

inline EvaluationRecord QaoaProblem::evaluate(const QaoaParams& params) const {
    const StateVector psi = state(params);
    EvaluationRecord rec;
    rec.energy = energy(psi);
    rec.residual = residual_energy(spectrum_, rec.energy);
    rec.fidelity = fidelity(psi, spectrum_.ground_state);
    rec.annealing_time = annealing_time(params);
    return rec;
}

}  // namespace pspin
