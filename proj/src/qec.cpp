#include "qtk/qec.hpp"

#include <algorithm>
#include <cmath>

namespace qtk {

int majority_decode(const std::string &bits) {
    if (bits.size() != 3 || bits.find_first_not_of("01") != std::string::npos) {
        throw QtkError("majority_decode expects three bits");
    }
    int ones = (int)std::count(bits.begin(), bits.end(), '1');
    return ones >= 2 ? 1 : 0;
}

void QecNoise::validate() const {
    gate_noise.validate();
    if (readout_flip_p < 0 || readout_flip_p > 1 || correlated_sigma < 0) {
        throw QtkError("invalid QEC noise parameters");
    }
}

namespace {

void check_idle(int idle_gates, int shots) {
    if (idle_gates < 0 || idle_gates % 8 != 0) {
        throw QtkError("idle gate count must be a non-negative multiple of 8");
    }
    if (shots < 1) {
        throw QtkError("need at least one shot");
    }
}

// One shot: noisy gates, correlated X rotation on every qubit, readout flips.
std::string noisy_shot(const Circuit &c, const QecNoise &noise, Rng &rng) {
    int n = c.n_qubits;
    StateVector s = run_noisy_trajectory(c, noise.gate_noise, rng);
    CVec v = s.amps();
    if (noise.correlated_sigma > 0) {
        // e^{-i d X...X} mixes |x> with its complement.
        double d = rng.normal(noise.correlated_sigma);
        uint64_t all = (1ULL << n) - 1;
        CVec w = v;
        for (uint64_t x = 0; x < (uint64_t)v.size(); x++) {
            w[(Eigen::Index)x] = std::cos(d) * v[(Eigen::Index)x] - cplx(0, std::sin(d)) * v[(Eigen::Index)(x ^ all)];
        }
        v = w;
    }
    std::vector<double> p((size_t)v.size());
    for (Eigen::Index i = 0; i < v.size(); i++) {
        p[(size_t)i] = std::norm(v[i]);
    }
    std::string bits = index_to_bits(sample_index(p, rng), n);
    if (noise.readout_flip_p > 0) {
        for (char &b : bits) {
            if (rng.uniform() < noise.readout_flip_p) {
                b = b == '0' ? '1' : '0';
            }
        }
    }
    return bits;
}

}  // namespace

double run_single_qubit_test(int idle_gates, const QecNoise &noise, int shots, Rng &rng) {
    check_idle(idle_gates, shots);
    noise.validate();
    Circuit c(1);
    c.add("h", {0});
    for (int k = 0; k < idle_gates; k++) {
        c.add("t", {0});
    }
    c.add("h", {0});
    int wrong = 0;
    for (int s = 0; s < shots; s++) {
        wrong += noisy_shot(c, noise, rng) == "1";
    }
    return (double)wrong / shots;
}

QecReport run_ghz_test(int idle_gates, const QecNoise &noise, int shots, Rng &rng) {
    check_idle(idle_gates, shots);
    noise.validate();
    Circuit c(3);
    c.add("h", {0}).add("cx", {0, 1}).add("cx", {0, 2});
    for (int k = 0; k < idle_gates; k++) {
        c.add("t", {k % 3});
    }
    c.add("cx", {0, 2}).add("cx", {0, 1}).add("h", {0});

    QecReport r;
    r.shots = shots;
    Rng unencoded_rng = rng.split();
    std::map<std::string, int> counts;
    int wrong = 0;
    for (int s = 0; s < shots; s++) {
        std::string bits = noisy_shot(c, noise, rng);
        counts[bits]++;
        wrong += majority_decode(bits);
    }
    for (auto &[bits, k] : counts) {
        r.outcome_breakdown[bits] = (double)k / shots;
    }
    r.p_encoded = (double)wrong / shots;
    r.p_unencoded = run_single_qubit_test(idle_gates, noise, shots, unencoded_rng);
    return r;
}

}  // namespace qtk
