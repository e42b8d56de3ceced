#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "oracles.hpp"
#include "qtk/algorithms.hpp"
#include "qtk/circuit.hpp"

using namespace qtk;

namespace {

Circuit bell_circuit() {
    Circuit c(2);
    c.add("h", {0}).add("cx", {0, 1});
    return c;
}

const std::vector<std::string> kOneQubit = {"x", "y", "z", "h", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "u1", "u2", "u3"};

Circuit random_circuit(int n, int n_ops, Rng &rng, bool cx_only_multi) {
    Circuit c(n);
    for (int k = 0; k < n_ops; k++) {
        if (n > 1 && rng.uniform() < 0.4) {
            int a = (int)rng.below(n), b = (int)rng.below(n - 1);
            if (b >= a) {
                b++;
            }
            std::string name = cx_only_multi ? "cx" : std::vector<std::string>{"cx", "cz", "swap"}[rng.below(3)];
            c.add(name, {a, b});
        } else {
            const std::string &name = kOneQubit[rng.below(kOneQubit.size())];
            std::vector<double> params;
            for (int p = 0; p < standard_param_count(name); p++) {
                params.push_back((rng.uniform() * 2 - 1) * kPi);
            }
            c.add(name, {(int)rng.below(n)}, params);
        }
    }
    return c;
}

}  // namespace

TEST(RunStatevector, Examples) {
    StateVector b = run_statevector(bell_circuit());
    const double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(b[0].real(), r, 1e-15);
    EXPECT_NEAR(b[3].real(), r, 1e-15);

    StateVector e = run_statevector(Circuit(3));
    EXPECT_NEAR(std::abs(e[0]), 1, 1e-15);

    Circuit g(3);
    g.add("h", {0}).add("cx", {0, 1}).add("cx", {1, 2});
    StateVector s = run_statevector(g);
    EXPECT_NEAR(s[0].real(), r, 1e-15);
    EXPECT_NEAR(s[7].real(), r, 1e-15);
    EXPECT_NEAR(s.norm(), 1, 1e-12);
}

TEST(RunStatevector, RejectsMidCircuitMeasurement) {
    Circuit c(1, 1);
    c.add("h", {0}).measure(0, 0).add("h", {0});
    EXPECT_THROW(run_statevector(c), QtkError);
    Circuit ok(1, 1);
    ok.add("h", {0}).measure(0, 0);
    EXPECT_NO_THROW(run_statevector(ok));
}

TEST(RunStatevector, NormPreservedOverRandomCircuits) {
    Rng rng(3);
    for (int trial = 0; trial < 50; trial++) {
        Circuit c = random_circuit(1 + (int)rng.below(5), 30, rng, false);
        EXPECT_NEAR(run_statevector(c).norm(), 1, 1e-10);
    }
}

TEST(Sample, BellStatistics) {
    Circuit c = bell_circuit();
    c.measure_all();
    Rng rng(1);
    ShotHistogram h = sample(c, 1000, nullptr, rng);
    EXPECT_EQ(h.shots, 1000);
    EXPECT_EQ(h.counts.count("01") + h.counts.count("10"), 0u);
    EXPECT_NEAR(h.counts["00"], 500, 64);

    ShotHistogram big = sample(c, 100000, nullptr, rng);
    double tv = 0.5 * (std::abs(big.frequency("00") - 0.5) + std::abs(big.frequency("11") - 0.5) +
                       big.frequency("01") + big.frequency("10"));
    EXPECT_LT(tv, 0.02);
}

TEST(Sample, CountsSumToShots) {
    Rng rng(5);
    Circuit c = random_circuit(3, 20, rng, false);
    c.measure_all();
    ShotHistogram h = sample(c, 777, nullptr, rng);
    int total = 0;
    for (auto &[k, v] : h.counts) {
        total += v;
    }
    EXPECT_EQ(total, 777);
}

TEST(Sample, ZeroStateAndErrors) {
    Circuit c(1, 1);
    c.measure(0, 0);
    Rng rng(7);
    ShotHistogram h = sample(c, 50, nullptr, rng);
    EXPECT_EQ(h.counts.size(), 1u);
    EXPECT_EQ(h.counts["0"], 50);
    EXPECT_THROW(sample(c, 0, nullptr, rng), QtkError);
}

TEST(Sample, BitflipNoiseLeaksIntoOddParity) {
    Circuit c = bell_circuit();
    c.measure_all();
    NoiseModel noise;
    noise.bitflip_p = 0.05;
    Rng rng(9);
    ShotHistogram h = sample(c, 20000, &noise, rng);
    double odd = h.frequency("01") + h.frequency("10");
    EXPECT_GT(odd, 0.05);
    EXPECT_LT(odd, 0.2);
}

TEST(Sample, SeedDeterminism) {
    Circuit c = bell_circuit();
    c.measure_all();
    Rng a(42), b(42);
    EXPECT_EQ(sample(c, 500, nullptr, a).counts, sample(c, 500, nullptr, b).counts);
}

TEST(Qasm, ParseBell) {
    Circuit c = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];");
    EXPECT_TRUE(c == bell_circuit());
}

TEST(Qasm, ParseU3) {
    Circuit c = parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nu3(1.5707,0,3.14159) q[0];\n");
    ASSERT_EQ(c.ops.size(), 1u);
    EXPECT_LT(oracle::max_abs(c.ops[0].gate.matrix - u3_matrix(1.5707, 0, 3.14159)), 1e-15);
    // Direct evaluation of the u3 formula.
    double th = 1.5707, lam = 3.14159;
    CMat m(2, 2);
    m << std::cos(th / 2), -std::polar(1.0, lam) * std::sin(th / 2), std::sin(th / 2),
        std::polar(1.0, lam) * std::cos(th / 2);
    EXPECT_LT(oracle::max_abs(c.ops[0].gate.matrix - m), 1e-12);
}

TEST(Qasm, RoundTripCorpus) {
    Rng rng(11);
    for (int trial = 0; trial < 50; trial++) {
        int n = 1 + (int)rng.below(5);
        Circuit c = random_circuit(n, 1 + (int)rng.below(25), rng, false);
        if (trial % 3 == 0) {
            c.barrier();
        }
        if (trial % 2 == 0) {
            c.measure_all();
        }
        Circuit back = parse_qasm(emit_qasm(c));
        EXPECT_TRUE(back == c) << emit_qasm(c);
        EXPECT_EQ(emit_qasm(back), emit_qasm(c));
    }
}

TEST(Qasm, Errors) {
    try {
        parse_qasm("qreg q[2];\nh q[0];\n  foo q[1];\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line, 3);
        EXPECT_EQ(e.column, 3);
    }
    EXPECT_THROW(parse_qasm("qreg q[2]; h q[2];"), QtkError);
    EXPECT_THROW(parse_qasm("qreg q[2]; h q[0]"), QtkError);
    EXPECT_THROW(parse_qasm("qreg q[2]; u3(1) q[0];"), QtkError);
    EXPECT_THROW(parse_qasm("qreg q[1]; creg c[1]; measure q[0] -> c[3];"), QtkError);
}

TEST(Reroute, ReversedCnot) {
    Topology t(2, {{1, 0}});
    Circuit c(2);
    c.add("cx", {0, 1});
    Circuit r = reroute_for_topology(c, t);
    std::vector<std::string> names;
    for (const Op &op : r.ops) {
        names.push_back(op.gate.name);
        if (op.gate.name == "cx") {
            EXPECT_EQ(op.qubits, (std::vector<int>{1, 0}));
        }
    }
    EXPECT_EQ(names, (std::vector<std::string>{"h", "h", "cx", "h", "h"}));
    EXPECT_LT(phase_distance(circuit_unitary(r), circuit_unitary(c)), 1e-12);
}

TEST(Reroute, TwoHopChain) {
    Topology t(3, {{0, 1}, {1, 2}});
    Circuit c(3);
    c.add("cx", {0, 2});
    Circuit r = reroute_for_topology(c, t);
    EXPECT_EQ(metrics(r).cnot_count, 4);
    for (const Op &op : r.ops) {
        if (op.gate.name == "cx") {
            EXPECT_TRUE(t.has(op.qubits[0], op.qubits[1]));
        }
    }
    EXPECT_LT(phase_distance(circuit_unitary(r), circuit_unitary(c)), 1e-12);
}

TEST(Reroute, LegalCircuitUnchanged) {
    Topology t = Topology::ibmqx4();
    Circuit c(5);
    c.add("h", {0}).add("cx", {1, 0}).add("cx", {3, 4}).add("t", {2});
    EXPECT_TRUE(reroute_for_topology(c, t) == c);
}

TEST(Reroute, PreservesUnitaryOnIbmqx4) {
    Topology t = Topology::ibmqx4();
    Rng rng(13);
    for (int trial = 0; trial < 60; trial++) {
        int n = 3 + trial % 3;
        Circuit c = random_circuit(n, 15, rng, true);
        Circuit r = reroute_for_topology(c, t);
        for (const Op &op : r.ops) {
            if (op.gate.name == "cx") {
                ASSERT_TRUE(t.has(op.qubits[0], op.qubits[1]));
            }
        }
        EXPECT_LT(phase_distance(circuit_unitary(r), circuit_unitary(c)), 1e-9);
    }
}

TEST(Reroute, UnroutableThrows) {
    Topology t(4, {{0, 1}, {1, 2}, {2, 3}});
    Circuit c(4);
    c.add("cx", {0, 3});
    EXPECT_THROW(reroute_for_topology(c, t), QtkError);
}

TEST(Metrics, Examples) {
    CircuitMetrics e = metrics(Circuit(2));
    EXPECT_EQ(e.gate_count, 0);
    EXPECT_EQ(e.cnot_count, 0);
    EXPECT_EQ(e.depth, 0);

    CircuitMetrics b = metrics(bell_circuit());
    EXPECT_EQ(b.gate_count, 2);
    EXPECT_EQ(b.cnot_count, 1);
    EXPECT_EQ(b.depth, 2);

    // Transcribed figure: 10 unitary gates (the prose says 11).
    EXPECT_EQ(metrics(shor15_compiled_circuit()).gate_count, 10);
}

TEST(Metrics, DepthOfParallelLayers) {
    Circuit c(3);
    c.add("h", {0}).add("h", {1}).add("h", {2}).add("cx", {0, 1}).add("x", {2});
    EXPECT_EQ(metrics(c).depth, 2);
    c.barrier();
    EXPECT_EQ(metrics(c).depth, 2);
    c.measure_all();
    EXPECT_EQ(metrics(c).depth, 3);
}

TEST(Circuit, InverseComposesToIdentity) {
    Rng rng(17);
    Circuit c = random_circuit(3, 20, rng, false);
    Circuit both = c;
    both.append(c.inverse());
    EXPECT_LT(phase_distance(circuit_unitary(both), CMat::Identity(8, 8)), 1e-12);
}

TEST(Noise, Validation) {
    NoiseModel bad;
    bad.bitflip_p = 1.5;
    EXPECT_THROW(bad.validate(), QtkError);
    NoiseModel neg;
    neg.over_rotation_sigma = -0.1;
    EXPECT_THROW(neg.validate(), QtkError);
}

TEST(IdleDecoherence, NoNoiseKeepsCoherence) {
    Rng rng(19);
    NoiseModel none;
    CoherenceReport r = idle_decoherence_experiment(3, 5, none, 200, rng);
    for (double v : r.per_qubit) {
        EXPECT_DOUBLE_EQ(v, 1);
    }
    EXPECT_DOUBLE_EQ(r.combined, 1);
}

TEST(IdleDecoherence, MarkovClosedForm) {
    Rng rng(23);
    NoiseModel noise;
    noise.idle_flip_p = 0.05;
    const int k = 5, shots = 40000;
    CoherenceReport r = idle_decoherence_experiment(5, k, noise, shots, rng);
    // Closed form by iterating the two-state chain.
    double stay = 1;
    for (int i = 0; i < k; i++) {
        stay = stay * (1 - noise.idle_flip_p) + (1 - stay) * noise.idle_flip_p;
    }
    EXPECT_NEAR(stay, (1 + std::pow(1 - 2 * noise.idle_flip_p, k)) / 2, 1e-15);
    double sigma = std::sqrt(stay * (1 - stay) / shots);
    double product = 1;
    for (double v : r.per_qubit) {
        EXPECT_NEAR(v, stay, 4 * sigma);
        product *= v;
    }
    double combined = std::pow(stay, 5);
    EXPECT_NEAR(r.combined, combined, 4 * std::sqrt(combined * (1 - combined) / shots));
    EXPECT_NEAR(r.combined, product, 0.02);
}

TEST(OverRotation, WrongOutcomeRateIsSigmaSquared) {
    // |+> then back to the Z basis; each Hadamard carries an angle error.
    Circuit c(1, 1);
    c.add("h", {0}).add("h", {0}).measure(0, 0);
    Rng rng(29);
    const int shots = 100000;
    for (double sigma : {0.05, 0.1}) {
        NoiseModel noise;
        noise.over_rotation_sigma = sigma;
        double wrong = sample(c, shots, &noise, rng).frequency("1");
        // The two errors add along the Hadamard axis: sin^2(d1 + d2) / 2 averaged.
        double exact = (1 - std::exp(-4 * sigma * sigma)) / 4;
        EXPECT_NEAR(wrong, exact, 4 * std::sqrt(exact / shots));
        EXPECT_NEAR(exact / (sigma * sigma), 1, 0.03);
    }
}
