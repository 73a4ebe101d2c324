#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace dimimo;

TEST(Rounding, SnapAndClamp) {
    const auto c = make_constellation(16);
    Vec x(4);
    x << 2.4, -5.1, 0.2, 3.9;  // I parts, then Q parts
    const VecC out = round_to_constellation(x, c);
    EXPECT_EQ(out(0), cplx(3.0, 1.0));
    EXPECT_EQ(out(1), cplx(-3.0, 3.0));  // both coordinates clamped to the grid
}

TEST(Rounding, BpskForcesRealAxis) {
    const auto c = make_constellation(2);
    Vec x(4);
    x << 0.4, -2.0, 0.9, -0.7;
    const VecC out = round_to_constellation(x, c);
    EXPECT_EQ(out(0), cplx(1.0, 0.0));
    EXPECT_EQ(out(1), cplx(-1.0, 0.0));
}

TEST(Rounding, Idempotence) {
    const auto c = make_constellation(64);
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(3 * c.bits_per_symbol));
        for (auto& b : bits) b = rng.bit() ? 1 : 0;
        const auto symbols = modulate(bits, c);
        Vec x(6);
        for (int k = 0; k < 3; ++k) {
            x(k) = symbols[static_cast<std::size_t>(k)].real();
            x(k + 3) = symbols[static_cast<std::size_t>(k)].imag();
        }
        const VecC rounded = round_to_constellation(x, c);
        for (int k = 0; k < 3; ++k) EXPECT_EQ(rounded(k), symbols[static_cast<std::size_t>(k)]);
    }
}

TEST(Rounding, TieBreaks) {
    const auto c4 = make_constellation(4);
    EXPECT_EQ(round_to_level(0.0, c4.pam_levels), -1);  // zero midpoint -> negative
    const auto c16 = make_constellation(16);
    EXPECT_EQ(round_to_level(2.0, c16.pam_levels), 1);   // toward smaller magnitude
    EXPECT_EQ(round_to_level(-2.0, c16.pam_levels), -1);
    EXPECT_EQ(round_to_level(0.0, c16.pam_levels), -1);
}

TEST(Rounding, BoundsWithinGrid) {
    const auto c = make_constellation(16);
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        Vec x(8);
        for (int i = 0; i < 8; ++i) x(i) = 20.0 * (rng.uniform() - 0.5);
        const VecC out = round_to_constellation(x, c);
        for (int k = 0; k < 4; ++k) {
            EXPECT_LE(std::abs(out(k).real()), 3.0);
            EXPECT_LE(std::abs(out(k).imag()), 3.0);
        }
    }
}

TEST(Objective, Basics) {
    ComplexSystem cs;
    cs.n_tx = cs.n_rx = 1;
    cs.H = MatC::Identity(1, 1);
    cs.y = VecC::Zero(1);
    cs.noise_var = 1.0;
    EXPECT_DOUBLE_EQ(objective(cs, VecC::Constant(1, cplx(1.0, 1.0))), 2.0);

    Rng rng(9);
    const auto c = make_constellation(4);
    std::vector<std::uint8_t> bits;
    ComplexSystem cs2 = test_util::random_instance(3, 3, c, 10.0, rng, &bits);
    const VecC x = Eigen::Map<const VecC>(modulate(bits, c).data(), 3);
    cs2.y = cs2.H * x;  // strip the noise
    EXPECT_NEAR(objective(cs2, x), 0.0, 1e-20);
}

TEST(Mmse, ClosedFormHalving) {
    // H = I and sigma^2/E_s = 1 shrink the estimate to y/2.
    const auto c = make_constellation(4);
    ComplexSystem cs;
    cs.n_tx = cs.n_rx = 2;
    cs.H = MatC::Identity(2, 2);
    cs.y = VecC::Constant(2, cplx(1.0, -1.0));
    cs.noise_var = c.avg_energy;
    const auto [xm, rep] = mmse_detect(cs, c);
    const VecC xmc = real_to_complex_symbols(xm);
    EXPECT_TRUE(xmc.isApprox(cs.y / 2.0, 1e-12));
    EXPECT_EQ(rep.tag, DetectorTag::MMSE);
}

TEST(Mmse, ZeroForcingLimit) {
    Rng rng(15);
    const auto c = make_constellation(16);
    std::vector<std::uint8_t> bits;
    ComplexSystem cs = test_util::random_instance(4, 4, c, 10.0, rng, &bits);
    const VecC x = Eigen::Map<const VecC>(modulate(bits, c).data(), 4);
    cs.y = cs.H * x;
    cs.noise_var = 1e-12;
    const auto [xm, rep] = mmse_detect(cs, c);
    EXPECT_TRUE(real_to_complex_symbols(xm).isApprox(x, 1e-4));
    EXPECT_TRUE(rep.symbols.isApprox(x));
}

TEST(Mmse, NormalEquationsResidual) {
    Rng rng(23);
    const auto c = make_constellation(16);
    const ComplexSystem cs = test_util::random_instance(4, 4, c, 8.0, rng);
    const auto [xm, rep] = mmse_detect(cs, c);
    const VecC xmc = real_to_complex_symbols(xm);
    MatC gram = cs.H.adjoint() * cs.H;
    gram.diagonal().array() += cs.noise_var / c.avg_energy;
    EXPECT_LT((gram * xmc - cs.H.adjoint() * cs.y).norm(), 1e-9);
}

TEST(Oracle, NoiselessRecovery) {
    Rng rng(31);
    const auto c = make_constellation(4);
    std::vector<std::uint8_t> bits;
    ComplexSystem cs = test_util::random_instance(2, 3, c, 10.0, rng, &bits);
    const VecC x = Eigen::Map<const VecC>(modulate(bits, c).data(), 2);
    cs.y = cs.H * x;
    const auto rep = ml_oracle(cs, c);
    EXPECT_TRUE(rep.symbols.isApprox(x));
    EXPECT_NEAR(rep.objective, 0.0, 1e-18);
}

TEST(Oracle, BudgetRefusal) {
    const auto c = make_constellation(256);
    ComplexSystem cs;
    cs.n_tx = 4;  // 32 bits of search space
    cs.n_rx = 4;
    cs.H = MatC::Identity(4, 4);
    cs.y = VecC::Zero(4);
    cs.noise_var = 1.0;
    EXPECT_THROW(ml_oracle(cs, c), std::invalid_argument);
}

// Independent re-enumeration through the bit-pattern route: every candidate
// is generated by modulating each possible bit string.
TEST(Oracle, MatchesBitwiseEnumeration) {
    Rng rng(37);
    const auto c = make_constellation(4);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexSystem cs = test_util::random_instance(2, 2, c, 6.0, rng);
        double best = std::numeric_limits<double>::infinity();
        for (unsigned pattern = 0; pattern < 16; ++pattern) {
            std::vector<std::uint8_t> bits(4);
            for (int b = 0; b < 4; ++b) bits[static_cast<std::size_t>(b)] =
                static_cast<std::uint8_t>((pattern >> b) & 1u);
            const VecC cand = Eigen::Map<const VecC>(modulate(bits, c).data(), 2);
            best = std::min(best, objective(cs, cand));
        }
        EXPECT_NEAR(ml_oracle(cs, c).objective, best, 1e-12);
    }
}

TEST(Oracle, DominatesMmse) {
    Rng rng(41);
    const auto c = make_constellation(16);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexSystem cs = test_util::random_instance(3, 4, c, 8.0, rng);
        EXPECT_LE(ml_oracle(cs, c).objective, mmse_detect(cs, c).second.objective + 1e-12);
    }
}
