#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qtk/qec.hpp"

using namespace qtk;

namespace {

// Averaging e^{-i d G} over d ~ N(0, sigma) gives rho -> (1 - q) rho + q G rho G.
double flip_weight(double sigma) { return (1 - std::exp(-2 * sigma * sigma)) / 2; }

}  // namespace

TEST(MajorityDecode, Examples) {
    EXPECT_EQ(majority_decode("110"), 1);
    EXPECT_EQ(majority_decode("000"), 0);
    EXPECT_EQ(majority_decode("001"), 0);
    EXPECT_EQ(majority_decode("111"), 1);
    EXPECT_THROW(majority_decode("01"), QtkError);
    EXPECT_THROW(majority_decode("012"), QtkError);
}

TEST(SingleQubitTest, NoiseOff) {
    Rng rng(1);
    EXPECT_DOUBLE_EQ(run_single_qubit_test(16, {}, 500, rng), 0);
    EXPECT_THROW(run_single_qubit_test(12, {}, 10, rng), QtkError);
    EXPECT_THROW(run_single_qubit_test(16, {}, 0, rng), QtkError);
}

TEST(SingleQubitTest, OverRotationMatchesChannelAverage) {
    const double sigma = 0.05;
    QecNoise noise;
    noise.gate_noise.over_rotation_sigma = sigma;
    // Density-matrix average over the 18 gates: H, 16 T, H.
    const double r2 = 1 / std::sqrt(2.0);
    CMat hgen(2, 2);
    hgen << r2, r2, r2, -r2;
    CMat z = Observable::pauli("Z").matrix;
    CMat h = standard_gate("h").matrix, t = standard_gate("t").matrix;
    std::vector<std::pair<CMat, CMat>> gates = {{h, hgen}};
    for (int k = 0; k < 16; k++) {
        gates.push_back({t, z});
    }
    gates.push_back({h, hgen});
    CMat rho = CMat::Zero(2, 2);
    rho(0, 0) = 1;
    double q = flip_weight(sigma);
    for (auto &[u, g] : gates) {
        rho = u * rho * u.adjoint();
        rho = (1 - q) * rho + q * g * rho * g;
    }
    double expect = rho(1, 1).real();
    EXPECT_GT(expect, 0.01);  // well above the sigma^2 of a single gate

    Rng rng(3);
    const int shots = 40000;
    double rate = run_single_qubit_test(16, noise, shots, rng);
    EXPECT_NEAR(rate, expect, 4 * std::sqrt(expect * (1 - expect) / shots));
}

TEST(GhzTest, NoiseOff) {
    Rng rng(5);
    QecReport r = run_ghz_test(16, {}, 1000, rng);
    EXPECT_DOUBLE_EQ(r.outcome_breakdown["000"], 1);
    EXPECT_DOUBLE_EQ(r.p_encoded, 0);
    EXPECT_DOUBLE_EQ(r.p_unencoded, 0);
    EXPECT_EQ(r.shots, 1000);
}

TEST(GhzTest, ReadoutFlipsFollowBinomialForm) {
    const double p = 0.1;
    const int shots = 100000;
    QecNoise noise;
    noise.readout_flip_p = p;
    Rng rng(7);
    QecReport r = run_ghz_test(16, noise, shots, rng);
    double expect = 3 * p * p - 2 * p * p * p;
    EXPECT_NEAR(expect, 0.028, 1e-12);
    double sigma = std::sqrt(expect * (1 - expect) / shots);
    EXPECT_NEAR(r.p_encoded, expect, 3 * sigma);
    EXPECT_NEAR(r.p_unencoded, p, 3 * std::sqrt(p * (1 - p) / shots));
    // Each pattern has probability p^k (1-p)^(3-k).
    for (auto [bits, f] : r.outcome_breakdown) {
        int k = (int)std::count(bits.begin(), bits.end(), '1');
        double pk = std::pow(p, k) * std::pow(1 - p, 3 - k);
        EXPECT_NEAR(f, pk, 4 * std::sqrt(pk / shots) + 1e-4) << bits;
    }
}

TEST(GhzTest, EncodingHelpsAgainstIndependentFlips) {
    Rng rng(11);
    for (double p : {0.01, 0.05, 0.1, 0.15, 0.2}) {
        QecNoise noise;
        noise.readout_flip_p = p;
        QecReport r = run_ghz_test(16, noise, 20000, rng);
        EXPECT_LT(r.p_encoded, r.p_unencoded) << p;
    }
}

TEST(GhzTest, CorrelatedRotationIsNotSuppressed) {
    Rng rng(13);
    const int shots = 100000;
    for (double sigma : {0.2, 0.3}) {
        QecNoise noise;
        noise.correlated_sigma = sigma;
        QecReport r = run_ghz_test(16, noise, shots, rng);
        double expect = flip_weight(sigma);  // cos d |000> - i sin d |111>
        double ci = 4 * std::sqrt(expect / shots);
        EXPECT_NEAR(r.p_encoded, expect, ci);
        EXPECT_NEAR(r.p_unencoded, expect, ci);
        EXPECT_GE(r.p_encoded, 0.9 * r.p_unencoded);
        // Only the all-flip pattern appears, so nothing is corrected.
        EXPECT_NEAR(r.outcome_breakdown["111"], r.p_encoded, 1e-12);
    }
}

TEST(GhzTest, BreakdownSumsToOne) {
    Rng rng(17);
    QecNoise noise;
    noise.gate_noise.bitflip_p = 0.02;
    noise.gate_noise.over_rotation_sigma = 0.05;
    noise.readout_flip_p = 0.03;
    noise.correlated_sigma = 0.1;
    const int shots = 3000;
    QecReport r = run_ghz_test(16, noise, shots, rng);
    double total = 0;
    double wrong = 0;
    for (auto [bits, f] : r.outcome_breakdown) {
        total += f;
        wrong += majority_decode(bits) * f;
        EXPECT_GE(f, 0);
    }
    EXPECT_NEAR(total, 1, 1.0 / shots);
    EXPECT_NEAR(wrong, r.p_encoded, 1e-12);
    EXPECT_GE(r.p_unencoded, 0);
    EXPECT_LE(r.p_unencoded, 1);
}

TEST(GhzTest, SeedDeterminism) {
    QecNoise noise;
    noise.readout_flip_p = 0.1;
    Rng a(19), b(19);
    QecReport ra = run_ghz_test(8, noise, 2000, a), rb = run_ghz_test(8, noise, 2000, b);
    EXPECT_EQ(ra.outcome_breakdown, rb.outcome_breakdown);
    EXPECT_EQ(ra.p_unencoded, rb.p_unencoded);
}

TEST(QecNoise, Validation) {
    QecNoise bad;
    bad.readout_flip_p = 2;
    EXPECT_THROW(bad.validate(), QtkError);
    QecNoise neg;
    neg.correlated_sigma = -1;
    EXPECT_THROW(neg.validate(), QtkError);
}
