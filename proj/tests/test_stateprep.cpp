#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qtk/stateprep.hpp"

using namespace qtk;

namespace {

double state_fidelity(const Circuit &c, const StateVector &target) {
    return std::norm(inner_product(target, run_statevector(c)));
}

int count_cnots(const Circuit &c) {
    int n = 0;
    for (const Op &op : c.ops) {
        n += op.kind == Op::Kind::Gate && op.gate.name == "cx";
    }
    return n;
}

CMat su4(Rng &rng) {
    CMat u = oracle::random_unitary(4, rng);
    return u / std::pow(cplx(u.determinant()), 0.25);
}

}  // namespace

TEST(Euler, Examples) {
    EulerAngles id = euler_decompose(CMat::Identity(2, 2));
    EXPECT_NEAR(id.alpha, 0, 1e-12);
    EXPECT_NEAR(id.beta, 0, 1e-12);
    EXPECT_NEAR(id.gamma, 0, 1e-12);
    EXPECT_NEAR(id.delta, 0, 1e-12);

    CMat h = standard_gate("h").matrix;
    EulerAngles e = euler_decompose(h);
    EXPECT_NEAR(e.gamma, kPi / 2, 1e-12);
    EXPECT_LT(oracle::max_abs(e.reconstruct() - h), 1e-10);

    CMat bad(2, 2);
    bad << 1, 1, 0, 1;
    EXPECT_THROW(euler_decompose(bad), QtkError);
}

TEST(Euler, RoundTripOnRandomUnitaries) {
    Rng rng(3);
    for (int trial = 0; trial < 500; trial++) {
        CMat u = oracle::random_unitary(2, rng);
        if (trial % 50 == 0) {
            u = std::polar(1.0, rng.uniform() * 6) * rz_matrix(rng.normal());  // diagonal branch
        } else if (trial % 50 == 1) {
            u = std::polar(1.0, rng.uniform() * 6) * standard_gate("x").matrix * rz_matrix(rng.normal());
        }
        EulerAngles e = euler_decompose(u);
        EXPECT_LT(oracle::max_abs(e.reconstruct() - u), 1e-10);
        EXPECT_GE(e.gamma, 0);
        EXPECT_LE(e.gamma, kPi + 1e-12);
        EXPECT_GT(e.beta, -kPi);
        EXPECT_LE(e.beta, kPi);
    }
}

TEST(PrepSingle, Examples) {
    SynthesizedCircuit zero = prep_single(1, 0);
    EXPECT_TRUE(zero.circuit.ops.empty());
    EXPECT_NEAR(zero.fidelity, 1, 1e-12);

    const double r = 1 / std::sqrt(2.0);
    SynthesizedCircuit plus = prep_single(r, r);
    ASSERT_EQ(plus.circuit.ops.size(), 1u);
    EXPECT_LT(phase_distance(plus.circuit.ops[0].gate.matrix, standard_gate("h").matrix), 1e-12);

    double th = 0.3, ph = 1.1;
    SynthesizedCircuit s = prep_single(std::cos(th), std::polar(std::sin(th), ph));
    CVec t(2);
    t << std::cos(th), std::polar(std::sin(th), ph);
    EXPECT_GE(state_fidelity(s.circuit, StateVector(1, t)), 1 - 1e-12);
    EXPECT_LE(s.circuit.ops.size(), 1u);

    EXPECT_THROW(prep_single(1, 1), QtkError);
}

TEST(PrepTwoQubit, Examples) {
    const double r = 1 / std::sqrt(2.0);
    CVec b(4);
    b << r, 0, 0, r;
    StateVector bell(2, b);
    EXPECT_NEAR(schmidt_decompose(bell, 1).coefficients[0], r, 1e-12);
    SynthesizedCircuit sb = prep_two_qubit(bell);
    EXPECT_EQ(sb.cnot_count, 1);
    EXPECT_GE(state_fidelity(sb.circuit, bell), 1 - 1e-12);

    Rng rng(5);
    StateVector prod = tensor_product(StateVector(1, oracle::random_vector(2, rng)),
                                      StateVector(1, oracle::random_vector(2, rng)));
    SynthesizedCircuit sp = prep_two_qubit(prod);
    EXPECT_EQ(sp.cnot_count, 1);
    EXPECT_GE(state_fidelity(sp.circuit, prod), 1 - 1e-10);
    EXPECT_THROW(prep_two_qubit(StateVector::zero(3)), QtkError);
}

TEST(PrepTwoQubit, RandomStates) {
    Rng rng(7);
    for (int trial = 0; trial < 100; trial++) {
        StateVector t(2, oracle::random_vector(4, rng));
        SynthesizedCircuit s = prep_two_qubit(t);
        EXPECT_EQ(s.cnot_count, 1);
        EXPECT_EQ(count_cnots(s.circuit), 1);
        double f = state_fidelity(s.circuit, t);
        EXPECT_GE(f, 1 - 1e-10);
        EXPECT_NEAR(s.fidelity, f, 1e-12);
    }
}

TEST(SynthTwoQubit, NamedGates) {
    for (std::string name : {"cx", "swap", "cz"}) {
        CMat target = standard_gate(name).matrix;
        SynthesizedCircuit s = synth_two_qubit_gate(target);
        EXPECT_EQ(s.cnot_count, 3) << name;
        EXPECT_EQ(count_cnots(s.circuit), 3) << name;
        EXPECT_LT(oracle::phase_dist(circuit_unitary(s.circuit), target), 1e-8) << name;
    }
    CMat bad = CMat::Identity(4, 4);
    bad(0, 1) = 1;
    EXPECT_THROW(synth_two_qubit_gate(bad), QtkError);
}

TEST(SynthTwoQubit, LocalGates) {
    Rng rng(11);
    for (int trial = 0; trial < 20; trial++) {
        CMat target = kron(oracle::random_unitary(2, rng), oracle::random_unitary(2, rng));
        SynthesizedCircuit s = synth_two_qubit_gate(target);
        EXPECT_EQ(count_cnots(s.circuit), 3);
        EXPECT_LT(oracle::phase_dist(circuit_unitary(s.circuit), target), 1e-8);
    }
}

TEST(SynthTwoQubit, RandomUnitaries) {
    Rng rng(13);
    for (int trial = 0; trial < 100; trial++) {
        CMat target = trial % 2 ? su4(rng) : oracle::random_unitary(4, rng);
        SynthesizedCircuit s = synth_two_qubit_gate(target);
        EXPECT_EQ(count_cnots(s.circuit), 3);
        double d = oracle::phase_dist(circuit_unitary(s.circuit), target);
        EXPECT_LT(d, 1e-8);
        EXPECT_NEAR(s.fidelity, 1 - d, 1e-12);
    }
}

TEST(PrepFourQubit, Examples) {
    SynthesizedCircuit z = prep_four_qubit(StateVector::zero(4));
    EXPECT_TRUE(z.circuit.ops.empty());
    EXPECT_NEAR(z.fidelity, 1, 1e-12);

    CVec g = CVec::Zero(16);
    g[0] = g[15] = 1 / std::sqrt(2.0);
    StateVector ghz(4, g);
    SynthesizedCircuit s = prep_four_qubit(ghz);
    EXPECT_LE(count_cnots(s.circuit), 9);
    EXPECT_GE(state_fidelity(s.circuit, ghz), 1 - 1e-8);
    EXPECT_THROW(prep_four_qubit(StateVector::zero(2)), QtkError);
}

TEST(PrepFourQubit, RandomStates) {
    Rng rng(17);
    for (int trial = 0; trial < 50; trial++) {
        StateVector t(4, oracle::random_vector(16, rng));
        SynthesizedCircuit s = prep_four_qubit(t);
        EXPECT_LE(count_cnots(s.circuit), 9);
        EXPECT_EQ(s.cnot_count, count_cnots(s.circuit));
        double f = state_fidelity(s.circuit, t);
        EXPECT_GE(f, 1 - 1e-8);
        EXPECT_NEAR(s.fidelity, f, 1e-12);
    }
}

TEST(PrepFourQubit, ProductAcrossTheCut) {
    Rng rng(19);
    for (int trial = 0; trial < 10; trial++) {
        StateVector t = tensor_product(StateVector(2, oracle::random_vector(4, rng)),
                                       StateVector(2, oracle::random_vector(4, rng)));
        SynthesizedCircuit s = prep_four_qubit(t);
        EXPECT_LE(count_cnots(s.circuit), 2);
        EXPECT_GE(state_fidelity(s.circuit, t), 1 - 1e-8);
    }
}

TEST(PrepFourQubit, RoundTripsThroughQasm) {
    Rng rng(23);
    StateVector t(4, oracle::random_vector(16, rng));
    Circuit c = prep_four_qubit(t).circuit;
    Circuit back = parse_qasm(emit_qasm(c));
    EXPECT_GE(state_fidelity(back, t), 1 - 1e-8);
}
