#pragma once

// Exact linear algebra in the maximum-spin (S = N/2) sector. The basis state
// with index k has k spins down and magnetization M_k = N - 2k.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "pspin/problem.hpp"

namespace pspin {

using Complex = std::complex<double>;

struct SymmetricBasis {
    int n_sites = 0;
    std::vector<int> magnetizations;

    int dimension() const { return n_sites + 1; }
};

inline SymmetricBasis build_basis(int n_sites) {
    if (n_sites < 1) throw std::invalid_argument("build_basis: N must be >= 1");
    SymmetricBasis basis;
    basis.n_sites = n_sites;
    basis.magnetizations.resize(static_cast<std::size_t>(n_sites) + 1);
    for (int k = 0; k <= n_sites; ++k) basis.magnetizations[k] = n_sites - 2 * k;
    return basis;
}

/// Complex amplitudes over the symmetric basis, indexed by the number of down spins.
struct StateVector {
    Eigen::VectorXcd amplitudes;

    StateVector() = default;
    explicit StateVector(Eigen::VectorXcd a) : amplitudes(std::move(a)) {}

    Eigen::Index size() const { return amplitudes.size(); }
    double norm() const { return amplitudes.norm(); }
    Complex operator[](Eigen::Index k) const { return amplitudes[k]; }

    static StateVector basis_state(int n_sites, int k) {
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n_sites + 1);
        a[k] = 1.0;
        return StateVector(std::move(a));
    }
};

/// Real symmetric tridiagonal matrix stored by diagonal and first off-diagonal.
struct SymTridiagonal {
    Eigen::VectorXd diagonal;
    Eigen::VectorXd off_diagonal;  // entry k couples rows k and k+1

    Eigen::Index dimension() const { return diagonal.size(); }

    Eigen::MatrixXd dense() const {
        const Eigen::Index n = dimension();
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        m.diagonal() = diagonal;
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            m(k, k + 1) = off_diagonal[k];
            m(k + 1, k) = off_diagonal[k];
        }
        return m;
    }

    template <typename Vec>
    Vec apply(const Vec& v) const {
        const Eigen::Index n = dimension();
        Vec out(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            auto acc = diagonal[k] * v[k];
            if (k > 0) acc += off_diagonal[k - 1] * v[k - 1];
            if (k + 1 < n) acc += off_diagonal[k] * v[k + 1];
            out[k] = acc;
        }
        return out;
    }
};

/// C(N,k) / 2^N for every k; their square roots are the amplitudes of |+>.
/// Binomials come from exact 64-bit integers for N <= 30 and from a running
/// log-ratio accumulation above that.
inline std::vector<double> binomial_weights(int n_sites) {
    std::vector<double> w(static_cast<std::size_t>(n_sites) + 1);
    if (n_sites <= 30) {
        std::uint64_t c = 1;
        const double denom = std::ldexp(1.0, n_sites);
        for (int k = 0; k <= n_sites; ++k) {
            w[k] = static_cast<double>(c) / denom;
            c = c * static_cast<std::uint64_t>(n_sites - k) / static_cast<std::uint64_t>(k + 1);
        }
        return w;
    }
    const double log_half = -n_sites * std::log(2.0);
    double log_c = 0.0;
    for (int k = 0; k <= n_sites; ++k) {
        w[k] = std::exp(log_c + log_half);
        if (k < n_sites) log_c += std::log(static_cast<double>(n_sites - k) / (k + 1));
    }
    return w;
}

/// Same weights as binomial_weights but always via log-gamma; kept for cross-checks.
inline std::vector<double> binomial_weights_lgamma(int n_sites) {
    std::vector<double> w(static_cast<std::size_t>(n_sites) + 1);
    const double log_norm = std::lgamma(n_sites + 1.0) - n_sites * std::log(2.0);
    for (int k = 0; k <= n_sites; ++k)
        w[k] = std::exp(log_norm - std::lgamma(k + 1.0) - std::lgamma(n_sites - k + 1.0));
    return w;
}

inline StateVector plus_state(const SymmetricBasis& basis) {
    const auto weights = binomial_weights(basis.n_sites);
    Eigen::VectorXcd a(basis.dimension());
    double norm2 = 0.0;
    for (int k = 0; k < basis.dimension(); ++k) norm2 += weights[k];
    for (int k = 0; k < basis.dimension(); ++k) a[k] = std::sqrt(weights[k] / norm2);
    return StateVector(std::move(a));
}

/// sum_j sx_j in the Dicke basis: zero diagonal, <k|X|k+1> = sqrt((k+1)(N-k)).
inline SymTridiagonal collective_x_matrix(const SymmetricBasis& basis) {
    const int n = basis.n_sites;
    SymTridiagonal x;
    x.diagonal = Eigen::VectorXd::Zero(n + 1);
    x.off_diagonal.resize(n);
    for (int k = 0; k < n; ++k)
        x.off_diagonal[k] = std::sqrt(static_cast<double>(k + 1) * static_cast<double>(n - k));
    return x;
}

struct XSpectralDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns
};

inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve_tridiagonal(const SymTridiagonal& m,
                                                                       bool with_vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    if (m.dimension() == 1) {
        solver.compute(m.dense(), with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    } else {
        solver.computeFromTridiagonal(m.diagonal, m.off_diagonal,
                                      with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    }
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("tridiagonal eigensolver failed to converge (dimension " +
                                 std::to_string(m.dimension()) + ")");
    return solver;
}

inline XSpectralDecomposition decompose_collective_x(const SymmetricBasis& basis) {
    auto solver = solve_tridiagonal(collective_x_matrix(basis), true);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Process-wide cache of the collective-X decomposition, one entry per N.
/// Entries are immutable once published.
inline std::shared_ptr<const XSpectralDecomposition> cached_x_decomposition(int n_sites) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const XSpectralDecomposition>> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(n_sites); it != cache.end()) return it->second;
    }
    auto dec = std::make_shared<const XSpectralDecomposition>(decompose_collective_x(build_basis(n_sites)));
    std::lock_guard lock(mutex);
    return cache.try_emplace(n_sites, std::move(dec)).first->second;
}

/// Exact eigenvalues -M_k^p of H_z = -(sum sz)^p.
inline std::vector<Int128> hz_integers(const SymmetricBasis& basis, int p) {
    if (p < 2) throw std::invalid_argument("hz_diagonal: p must be >= 2");
    std::vector<Int128> hz(basis.magnetizations.size());
    for (std::size_t k = 0; k < hz.size(); ++k) hz[k] = -checked_pow(basis.magnetizations[k], p);
    return hz;
}

inline std::vector<double> hz_diagonal(const SymmetricBasis& basis, int p) {
    const auto exact = hz_integers(basis, p);
    std::vector<double> out(exact.size());
    for (std::size_t k = 0; k < exact.size(); ++k) out[k] = to_double(exact[k]);
    return out;
}

inline SymTridiagonal target_matrix(const ProblemSpec& spec, const SymmetricBasis& basis,
                                    const SymTridiagonal& xmat) {
    if (basis.n_sites != spec.n_sites || xmat.dimension() != basis.dimension())
        throw std::invalid_argument("target_matrix: inconsistent N across inputs");
    const double scale = spec.interaction_scale();
    const auto hz = hz_integers(basis, spec.p_exponent);
    SymTridiagonal h;
    h.diagonal.resize(basis.dimension());
    for (int k = 0; k < basis.dimension(); ++k) h.diagonal[k] = to_double(hz[k]) / scale;
    h.off_diagonal = -spec.field * xmat.off_diagonal;
    return h;
}

inline SymTridiagonal target_matrix(const ProblemSpec& spec) {
    const auto basis = build_basis(spec.n_sites);
    return target_matrix(spec, basis, collective_x_matrix(basis));
}

// Global spin flip maps k -> N - k. For even p the target Hamiltonian commutes
// with it, and the sector splits into an even and an odd block. The even block
// uses the basis (e_j + e_{N-j})/sqrt(2) for j < N/2, plus e_{N/2} for even N.
struct ParityBlock {
    SymTridiagonal matrix;
    int sign = +1;
};

inline ParityBlock parity_block(const SymTridiagonal& h, int sign) {
    const Eigen::Index n = h.dimension() - 1;  // N
    ParityBlock block;
    block.sign = sign;
    const bool n_even = (n % 2 == 0);
    const Eigen::Index half = n / 2;
    Eigen::Index dim = n_even ? (sign > 0 ? half + 1 : half) : half + 1;
    if (dim == 0) throw std::invalid_argument("parity_block: empty odd block for N = 0");
    block.matrix.diagonal.resize(dim);
    block.matrix.off_diagonal.resize(dim - 1);
    for (Eigen::Index j = 0; j < dim; ++j) block.matrix.diagonal[j] = h.diagonal[j];
    for (Eigen::Index j = 0; j + 1 < dim; ++j) block.matrix.off_diagonal[j] = h.off_diagonal[j];
    if (n_even) {
        if (sign > 0 && dim >= 2) block.matrix.off_diagonal[dim - 2] *= std::sqrt(2.0);
    } else {
        // the two central states (N-1)/2 and (N+1)/2 fold onto each other
        block.matrix.diagonal[dim - 1] += sign * h.off_diagonal[half];
    }
    return block;
}

/// Maps a parity-block vector back onto the full N+1 dimensional sector.
inline Eigen::VectorXd unfold_parity_vector(const Eigen::VectorXd& v, int n_sites, int sign) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n_sites + 1);
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const Eigen::Index mirror = n_sites - j;
        if (mirror == j) {
            full[j] = v[j];
        } else {
            full[j] = r * v[j];
            full[mirror] = sign * r * v[j];
        }
    }
    return full;
}

struct TargetSpectrum {
    double e_min = 0.0;
    double e_max = 0.0;
    double spectral_gap = 0.0;
    StateVector ground_state;
    Eigen::VectorXd eigenvalues;  // full sector, ascending
};

/// Exact diagonalization of the target Hamiltonian within the sector. For
/// even p the ground state is taken from the spin-flip-even block, which is
/// where the QAOA state lives; at h = 0 this is the cat (e_0 + e_N)/sqrt(2).
inline TargetSpectrum diagonalize_target(const ProblemSpec& spec) {
    spec.validate();
    const auto h = target_matrix(spec);
    const auto full = solve_tridiagonal(h, !spec.p_even());
    TargetSpectrum out;
    out.eigenvalues = full.eigenvalues();
    const Eigen::Index dim = out.eigenvalues.size();
    out.e_min = out.eigenvalues[0];
    out.e_max = out.eigenvalues[dim - 1];
    out.spectral_gap = dim > 1 ? out.eigenvalues[1] - out.eigenvalues[0] : 0.0;

    Eigen::VectorXd ground;
    if (spec.p_even()) {
        const auto even = parity_block(h, +1);
        const auto block = solve_tridiagonal(even.matrix, true);
        ground = unfold_parity_vector(block.eigenvectors().col(0), spec.n_sites, +1);
    } else {
        ground = full.eigenvectors().col(0);
    }
    Eigen::Index peak = 0;
    ground.cwiseAbs().maxCoeff(&peak);
    if (ground[peak] < 0) ground = -ground;
    ground.normalize();
    out.ground_state = StateVector(ground.cast<Complex>());
    return out;
}

inline Eigen::VectorXd sector_eigenvalues(const SymTridiagonal& m) {
    return solve_tridiagonal(m, false).eigenvalues();
}

/// Gap above the ground state in the symmetry block that the dynamics
/// actually explores: the spin-flip-even block for even p, the full sector
/// otherwise.
inline double dynamical_gap(const ProblemSpec& spec) {
    const auto h = target_matrix(spec);
    const auto ev = spec.p_even() ? sector_eigenvalues(parity_block(h, +1).matrix) : sector_eigenvalues(h);
    if (ev.size() < 2) throw std::invalid_argument("dynamical_gap: block has a single level");
    return ev[1] - ev[0];
}

}  // namespace pspin
