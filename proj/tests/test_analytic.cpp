#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "pspin/analytic.hpp"
#include "pspin/verify.hpp"

using namespace pspin;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(FofM, Classification) {
    EXPECT_EQ(f_of_m(1), 0);
    EXPECT_EQ(f_of_m(-3), 1);
    EXPECT_EQ(f_of_m(15), 0);
    EXPECT_EQ(f_of_m(5), 1);
    EXPECT_EQ(f_of_m(-1), 0);
    EXPECT_EQ(f_of_m(-7), 0);
    EXPECT_THROW(f_of_m(4), std::invalid_argument);
    EXPECT_THROW(f_of_m(0), std::invalid_argument);
}

TEST(EvenPDecomposition, MaximalK) {
    EXPECT_EQ(even_p_decomposition(2), (EvenPDecomposition{0, 0}));
    EXPECT_EQ(even_p_decomposition(4), (EvenPDecomposition{1, 0}));
    EXPECT_EQ(even_p_decomposition(6), (EvenPDecomposition{1, 1}));
    EXPECT_EQ(even_p_decomposition(8), (EvenPDecomposition{2, 0}));
    EXPECT_THROW(even_p_decomposition(3), std::invalid_argument);
    EXPECT_THROW(even_p_decomposition(0), std::invalid_argument);
}

TEST(EvenPDecomposition, AllReconstruct) {
    for (int p = 2; p <= 64; p += 2) {
        const auto all = all_even_p_decompositions(p);
        ASSERT_FALSE(all.empty());
        for (const auto& d : all) {
            EXPECT_EQ(d.value(), p);
            EXPECT_GE(d.n, 0);
        }
        EXPECT_EQ(all.back(), even_p_decomposition(p));
    }
    EXPECT_EQ(all_even_p_decompositions(6).size(), 2u);
}

TEST(EvenPDecomposition, ExactOneHasNDivisibleByFour) {
    EXPECT_EQ(exact_even_p_decomposition(2), (EvenPDecomposition{0, 0}));
    EXPECT_EQ(exact_even_p_decomposition(6), (EvenPDecomposition{0, 4}));
    EXPECT_EQ(exact_even_p_decomposition(8), (EvenPDecomposition{2, 0}));
    EXPECT_EQ(exact_even_p_decomposition(12), (EvenPDecomposition{1, 4}));
    for (int p = 2; p <= 64; p += 2) {
        const auto d = exact_even_p_decomposition(p);
        EXPECT_EQ(d.n % 4, 0);
        EXPECT_EQ(d.value(), p);
    }
}

TEST(ExactP1Params, Examples) {
    const auto odd = exact_p1_params(3, 7);
    ASSERT_TRUE(odd);
    EXPECT_DOUBLE_EQ(odd->gamma, kPi / 4);
    EXPECT_DOUBLE_EQ(odd->beta, kPi / 4);
    const auto even = exact_p1_params(2, 5);
    ASSERT_TRUE(even);
    EXPECT_DOUBLE_EQ(even->gamma, kPi / 8);
    EXPECT_DOUBLE_EQ(even->beta, kPi / 4);
    EXPECT_FALSE(exact_p1_params(4, 4));
    EXPECT_FALSE(exact_p1_params(3, 6));
    EXPECT_DOUBLE_EQ(exact_p1_params(6, 5)->gamma, kPi / 8);
    EXPECT_THROW(exact_p1_params(1, 5), std::invalid_argument);
}

TEST(ExactP1Params, UnitFidelityForEvenPUpTo64) {
    for (int p = 2; p <= 64; p += 2)
        for (int n = 3; n <= 15; n += 2) {
            if (p * std::log2(static_cast<double>(n)) >= 126.0) continue;  // N^p beyond 128 bits
            const auto a = exact_p1_params(p, n);
            EXPECT_GE(p1_engine_fidelity(p, n, a->gamma, a->beta), 1.0 - 1e-12) << "p=" << p << " N=" << n;
        }
}

TEST(ExactP1Params, BothMaximalAndExactDecompositionForP4AndP8) {
    for (int p : {4, 8})
        for (int n : {5, 7, 9})
            EXPECT_GE(p1_engine_fidelity(p, n, even_p_gamma(even_p_decomposition(p).k), kPi / 4), 1.0 - 1e-12);
}

TEST(ExactP1Params, IdentityFailureShowsUpInFidelity) {
    // p = 6: (k=0, n=4) is exact, the maximal (k=1, n=1) is not
    EXPECT_GE(p1_engine_fidelity(6, 7, even_p_gamma(0), kPi / 4), 1.0 - 1e-12);
    EXPECT_LT(p1_engine_fidelity(6, 7, even_p_gamma(1), kPi / 4), 0.5);
}

TEST(PowerIdentity, Examples) {
    EXPECT_TRUE(verify_power_identity(0, 0, 3));
    EXPECT_TRUE(verify_power_identity(1, 0, 5));
    EXPECT_TRUE(verify_power_identity(0, 0, 1));
    EXPECT_TRUE(verify_power_identity(0, 0, -3));
    EXPECT_FALSE(verify_power_identity(1, 1, 3));  // 3^6 mod 32 = 25
    EXPECT_THROW(verify_power_identity(0, 0, 2), std::invalid_argument);
    EXPECT_THROW(verify_power_identity(-1, 0, 3), std::invalid_argument);
}

TEST(PowerIdentity, ExhaustiveWhenFourDividesN) {
    for (int k = 0; k <= 6; ++k)
        for (std::uint64_t n = 0; n <= 8; n += 4)
            for (std::int64_t m = 1; m < (std::int64_t{1} << (k + 4)); m += 2)
                ASSERT_TRUE(verify_power_identity(k, n, m)) << k << " " << n << " " << m;
}

TEST(PowerIdentity, FailsForEveryOtherN) {
    for (int k = 0; k <= 6; ++k)
        for (std::uint64_t n = 1; n <= 8; ++n) {
            if (n % 4 == 0) continue;
            bool any_failure = false;
            for (std::int64_t m = 1; m < (std::int64_t{1} << (k + 4)); m += 2) any_failure |= !verify_power_identity(k, n, m);
            EXPECT_TRUE(any_failure) << k << " " << n;
        }
}

TEST(ModPow, AgainstRepeatedMultiplication) {
    for (std::uint64_t b : {0u, 1u, 3u, 7u, 12345u})
        for (std::uint64_t e : {0u, 1u, 2u, 13u, 40u}) {
            std::uint64_t ref = 1 % 1000003;
            for (std::uint64_t i = 0; i < e; ++i) ref = ref * b % 1000003;
            EXPECT_EQ(modpow(b, e, 1000003), ref);
        }
    EXPECT_EQ(modpow(5, 3, 1), 0u);
    EXPECT_THROW(modpow(2, 2, 0), std::invalid_argument);
}

TEST(ClosedForm, Examples) {
    EXPECT_NEAR(p1_fidelity_closed_form(3, 5, kPi / 4), 1.0, 1e-12);
    EXPECT_NEAR(p1_fidelity_closed_form(2, 5, kPi / 8), 1.0, 1e-12);
    EXPECT_NEAR(p1_fidelity_closed_form(3, 5, 0.0), p1_engine_fidelity(3, 5, 0.0, kPi / 4), 1e-12);
    EXPECT_THROW(p1_fidelity_closed_form(2, 4, 0.1), std::invalid_argument);
}

TEST(ClosedForm, AgreesWithEngineOnGammaGrid) {
    const auto r = check_closed_form_oracle(64, 1e-10);
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Symmetry, GroupGenerators) {
    const auto g = symmetry_group(3, 5);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[0].kind, SymmetryKind::NegateAll);
    EXPECT_DOUBLE_EQ(g[1].shift, kPi);
    EXPECT_DOUBLE_EQ(g[2].shift, kPi);
    const auto h = symmetry_group(2, 4);
    EXPECT_DOUBLE_EQ(h[1].shift, kPi / 2);
    EXPECT_DOUBLE_EQ(h[2].shift, kPi / 2);
    EXPECT_DOUBLE_EQ(symmetry_group(4, 6)[2].shift, kPi / 8);
    EXPECT_DOUBLE_EQ(symmetry_group(4, 7)[2].shift, kPi);
    EXPECT_EQ(per_component_symmetries(2, 4, 3).size(), 7u);
}

TEST(Symmetry, ApplyTransform) {
    const QaoaParams p({0.1, 0.2}, {0.3, 0.4});
    EXPECT_EQ(apply_symmetry({SymmetryKind::NegateAll, 0.0, -1}, p), QaoaParams({-0.1, -0.2}, {-0.3, -0.4}));
    EXPECT_EQ(apply_symmetry({SymmetryKind::BetaShift, 1.0, 1}, p), QaoaParams({0.1, 0.2}, {0.3, 1.4}));
    EXPECT_EQ(apply_symmetry({SymmetryKind::GammaShift, 1.0, -1}, p), QaoaParams({1.1, 1.2}, {0.3, 0.4}));
    EXPECT_THROW(apply_symmetry({SymmetryKind::GammaShift, 1.0, 5}, p), std::out_of_range);
}

TEST(Symmetry, EnergyInvariance) {
    const auto r = check_symmetries(100, 7, 1e-12);
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Symmetry, TransformAppliedTwiceKeepsEnergy) {
    const QaoaProblem problem(ProblemSpec(5, 2, 0.8));
    const QaoaParams p({0.3, 1.1}, {0.2, 2.0});
    const double e0 = problem.energy(problem.state(p));
    for (const auto& t : per_component_symmetries(2, 5, 2)) {
        const auto twice = apply_symmetry(t, apply_symmetry(t, p));
        EXPECT_NEAR(problem.energy(problem.state(twice)), e0, 1e-12);
    }
}

TEST(Canonicalize, Examples) {
    const auto a = canonicalize(QaoaParams({kPi + 0.3}, {0.1}), 3, 5);
    EXPECT_NEAR(a.gammas[0], 0.3, 1e-15);
    const auto b = canonicalize(QaoaParams({0.1}, {-0.2}), 2, 5);
    EXPECT_NEAR(b.betas[0], kPi / 2 - 0.2, 1e-15);
    const auto c = canonicalize(QaoaParams({-1.0}, {7.0}), 3, 4);
    EXPECT_NEAR(c.gammas[0], kPi / 4 - 1.0 + kPi / 4 * 1, 1e-12);
    EXPECT_NEAR(c.betas[0], 7.0 - 2 * kPi, 1e-12);
}

TEST(Canonicalize, EnergyInvariantAndInDomain) {
    const auto r = check_canonicalize(50, 11, 1e-12);
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(VerifySuite, AllChecksPass) {
    for (const auto& c : run_verify_suite()) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}
