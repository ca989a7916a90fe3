#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pspin/problem.hpp"
#include "pspin/spin_sector.hpp"

using namespace pspin;

TEST(CheckedPow, ExactValues) {
    EXPECT_TRUE(checked_pow(3, 4) == 81);
    EXPECT_TRUE(checked_pow(-3, 3) == -27);
    EXPECT_TRUE(checked_pow(-2, 2) == 4);
    EXPECT_TRUE(checked_pow(7, 0) == 1);
    EXPECT_TRUE(checked_pow(0, 5) == 0);
    EXPECT_EQ(to_string(checked_pow(2, 126)), "85070591730234615865843651857942052864");
    EXPECT_EQ(to_string(checked_pow(-5, 3)), "-125");
}

TEST(CheckedPow, OverflowAndBadExponent) {
    EXPECT_THROW(checked_pow(2, 127), std::overflow_error);
    EXPECT_THROW(checked_pow(1000, 13), std::overflow_error);
    EXPECT_THROW(checked_pow(2, -1), std::invalid_argument);
}

TEST(ProblemSpec, Validation) {
    EXPECT_NO_THROW(ProblemSpec(8, 2, 0.5));
    EXPECT_THROW(ProblemSpec(0, 2, 0.5), std::invalid_argument);
    EXPECT_THROW(ProblemSpec(4, 1, 0.5), std::invalid_argument);
    EXPECT_THROW(ProblemSpec(4, 2, -0.1), std::invalid_argument);
    EXPECT_THROW(ProblemSpec(4, 2, std::nan("")), std::invalid_argument);
    EXPECT_THROW(ProblemSpec(4, 2, INFINITY), std::invalid_argument);
    EXPECT_THROW(ProblemSpec(1000000, 10, 0.0), std::overflow_error);
}

TEST(ProblemSpec, CriticalDepthAndCollapse) {
    EXPECT_EQ(ProblemSpec(8, 2, 0.6).critical_depth(), 6);
    EXPECT_EQ(ProblemSpec(16, 4, 0.6).critical_depth(), 10);
    EXPECT_EQ(ProblemSpec(5, 3, 0.6).critical_depth(), 6);
    EXPECT_EQ(ProblemSpec(13, 3, 0.6).critical_depth(), 14);
    EXPECT_DOUBLE_EQ(ProblemSpec(8, 2, 0.6).collapse_coordinate(6), 0.5);
    EXPECT_DOUBLE_EQ(ProblemSpec(5, 3, 0.6).collapse_coordinate(6), 1.0);
    EXPECT_DOUBLE_EQ(ProblemSpec(8, 3, 0.0).interaction_scale(), 64.0);
}

TEST(ProblemSpec, CriticalFieldMarkers) {
    EXPECT_DOUBLE_EQ(critical_field(2), 2.0);
    EXPECT_DOUBLE_EQ(critical_field(3), 1.2956);
    // brute-force maximization of the mean-field tie ratio
    for (int p : {4, 5, 7}) {
        double best = 0.0;
        for (int i = 1; i <= 200000; ++i) {
            const double m = i / 200000.0;
            best = std::max(best, std::pow(m, p) / (1.0 - std::sqrt(1.0 - m * m)));
        }
        EXPECT_NEAR(critical_field(p), best, 1e-8) << "p=" << p;
    }
}

TEST(SymmetricBasis, Magnetizations) {
    const auto b = build_basis(4);
    EXPECT_EQ(b.dimension(), 5);
    EXPECT_EQ(b.magnetizations, (std::vector<int>{4, 2, 0, -2, -4}));
    EXPECT_THROW(build_basis(0), std::invalid_argument);
}

TEST(BinomialWeights, MatchExactBinomials) {
    for (int n : {1, 2, 7, 30, 31, 45, 64, 200}) {
        const auto exact = oracle::pascal_row(n);
        const auto w = binomial_weights(n);
        const auto wl = binomial_weights_lgamma(n);
        long double total = 0;
        for (int k = 0; k <= n; ++k) {
            const double ref = static_cast<double>(exact[k] / std::pow(2.0L, n));
            EXPECT_NEAR(w[k], ref, 1e-12 * ref + 1e-300) << "n=" << n << " k=" << k;
            EXPECT_NEAR(wl[k], ref, 1e-10 * ref + 1e-300);
            total += w[k];
        }
        EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-13);
    }
}

TEST(PlusState, EqualsProjectedUniformState) {
    for (int n : {1, 3, 6, 9}) {
        const auto plus = plus_state(build_basis(n));
        EXPECT_NEAR(plus.norm(), 1.0, 1e-14);
        const Eigen::VectorXcd full = oracle::embed_sector(plus.amplitudes, n);
        const oracle::FullState uniform(n);
        EXPECT_NEAR(std::abs(full.dot(uniform.amp)), 1.0, 1e-13);
    }
}

TEST(CollectiveX, MatchesFullSpaceMatrixElements) {
    // <D_j| sum sx |D_k> from explicit bit flips on the 2^N space
    for (int n : {1, 2, 5, 8}) {
        const auto x = collective_x_matrix(build_basis(n)).dense();
        const Eigen::MatrixXd sx_full = -oracle::full_hamiltonian(n, 2, 1.0) - (-oracle::full_hamiltonian(n, 2, 0.0));
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k) {
                Eigen::VectorXcd dj = Eigen::VectorXcd::Zero(n + 1), dk = Eigen::VectorXcd::Zero(n + 1);
                dj[j] = 1;
                dk[k] = 1;
                const auto fj = oracle::embed_sector(dj, n), fk = oracle::embed_sector(dk, n);
                const double ref = fj.dot(sx_full.cast<std::complex<double>>() * fk).real();
                EXPECT_NEAR(x(j, k), ref, 1e-12) << "n=" << n << " j=" << j << " k=" << k;
            }
    }
}

TEST(CollectiveX, SpectralDecomposition) {
    for (int n : {1, 2, 9, 40}) {
        const auto basis = build_basis(n);
        const auto x = collective_x_matrix(basis);
        const auto dec = decompose_collective_x(basis);
        const Eigen::MatrixXd rebuilt = dec.eigenvectors * dec.eigenvalues.asDiagonal() * dec.eigenvectors.transpose();
        EXPECT_LT((rebuilt - x.dense()).cwiseAbs().maxCoeff(), 1e-11 * n);
        EXPECT_LT((dec.eigenvectors.transpose() * dec.eigenvectors - Eigen::MatrixXd::Identity(n + 1, n + 1))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-12);
        // spectrum of the collective spin is {-N, -N+2, ..., N}
        for (int k = 0; k <= n; ++k) EXPECT_NEAR(dec.eigenvalues[k], -n + 2 * k, 1e-10 * n);
    }
}

TEST(CollectiveX, CacheReturnsSharedEntry) {
    const auto a = cached_x_decomposition(11);
    const auto b = cached_x_decomposition(11);
    EXPECT_EQ(a.get(), b.get());
    EXPECT_NE(a.get(), cached_x_decomposition(12).get());
}

TEST(TargetMatrix, MatchesDenseOracle) {
    for (auto [n, p, h] : {std::tuple{4, 2, 0.7}, {5, 3, 1.3}, {6, 4, 0.0}, {12, 5, 2.0}}) {
        const auto m = target_matrix(ProblemSpec(n, p, h)).dense();
        EXPECT_LT((m - oracle::sector_hamiltonian(n, p, h)).cwiseAbs().maxCoeff(), 1e-12);
    }
    const auto hz = hz_integers(build_basis(3), 3);
    EXPECT_TRUE(hz[0] == -27 && hz[1] == -1 && hz[2] == 1 && hz[3] == 27);
}

TEST(Diagonalize, SectorGroundEnergyEqualsFullSpace) {
    for (auto [n, p, h] : {std::tuple{4, 2, 0.6}, {5, 3, 1.0}, {6, 2, 2.5}, {7, 3, 0.2}, {8, 4, 1.1}}) {
        const auto spec = diagonalize_target(ProblemSpec(n, p, h));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(oracle::full_hamiltonian(n, p, h), Eigen::EigenvaluesOnly);
        EXPECT_NEAR(spec.e_min, full.eigenvalues()[0], 1e-10) << n << " " << p << " " << h;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(oracle::sector_hamiltonian(n, p, h));
        EXPECT_NEAR(spec.e_max, dense.eigenvalues()[n], 1e-10);
    }
}

TEST(Diagonalize, GroundStateIsEigenvector) {
    for (auto [n, p, h] : {std::tuple{6, 2, 0.6}, {7, 2, 0.0}, {9, 3, 1.3}, {10, 4, 0.9}}) {
        const ProblemSpec ps(n, p, h);
        const auto spec = diagonalize_target(ps);
        const Eigen::VectorXcd v = spec.ground_state.amplitudes;
        const Eigen::VectorXcd hv = oracle::sector_hamiltonian(n, p, h).cast<std::complex<double>>() * v;
        EXPECT_LT((hv - spec.e_min * v).norm(), 1e-10);
        EXPECT_NEAR(v.norm(), 1.0, 1e-13);
    }
}

TEST(Diagonalize, EvenPZeroFieldGivesCatState) {
    const auto spec = diagonalize_target(ProblemSpec(6, 2, 0.0));
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(spec.ground_state[0].real(), r, 1e-12);
    EXPECT_NEAR(spec.ground_state[6].real(), r, 1e-12);
    EXPECT_NEAR(spec.e_min, -6.0, 1e-12);
}

TEST(Diagonalize, OddPZeroFieldGivesAllUp) {
    const auto spec = diagonalize_target(ProblemSpec(5, 3, 0.0));
    EXPECT_NEAR(std::abs(spec.ground_state[0]), 1.0, 1e-12);
    EXPECT_NEAR(spec.e_min, -5.0, 1e-12);
}

TEST(ParityBlocks, UnionIsFullSpectrum) {
    for (auto [n, h] : {std::pair{6, 0.8}, {7, 1.9}, {2, 0.0}, {1, 0.5}}) {
        const auto m = target_matrix(ProblemSpec(n, 2, h));
        std::vector<double> both;
        for (int sign : {+1, -1}) {
            const auto ev = sector_eigenvalues(parity_block(m, sign).matrix);
            both.insert(both.end(), ev.data(), ev.data() + ev.size());
        }
        std::sort(both.begin(), both.end());
        const auto full = sector_eigenvalues(m);
        ASSERT_EQ(static_cast<Eigen::Index>(both.size()), full.size());
        for (Eigen::Index i = 0; i < full.size(); ++i) EXPECT_NEAR(both[i], full[i], 1e-10);
    }
}

TEST(DynamicalGap, TinyCaseMatchesDenseOracle) {
    EXPECT_NEAR(dynamical_gap(ProblemSpec(2, 2, 0.0)), oracle::even_parity_gap(2, 2, 0.0), 1e-13);
    EXPECT_NEAR(dynamical_gap(ProblemSpec(2, 2, 0.0)), 2.0, 1e-13);
    for (auto [n, h] : {std::pair{9, 1.7}, {16, 2.0}, {25, 0.3}})
        EXPECT_NEAR(dynamical_gap(ProblemSpec(n, 2, h)), oracle::even_parity_gap(n, 2, h), 1e-10);
    // odd p: full sector gap
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::sector_hamiltonian(11, 3, 1.3), Eigen::EigenvaluesOnly);
    EXPECT_NEAR(dynamical_gap(ProblemSpec(11, 3, 1.3)), es.eigenvalues()[1] - es.eigenvalues()[0], 1e-10);
}
