#pragma once

#include "qtk/circuit.hpp"

namespace qtk {

// u = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta), standard Rz(t) = exp(-i t Z / 2).
struct EulerAngles {
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
    CMat reconstruct() const;
};

struct SynthesizedCircuit {
    Circuit circuit;
    double fidelity = 0;  // |<target|prepared>|^2, or 1 - phase distance for gates
    int cnot_count = 0;
};

EulerAngles euler_decompose(const CMat &u);
// Prepares alpha|0> + beta|1> with at most one u3.
SynthesizedCircuit prep_single(cplx alpha, cplx beta);
// Schmidt recipe: one qubit rotation, one CNOT, then local unitaries.
SynthesizedCircuit prep_two_qubit(const StateVector &target);
// Exactly three CNOTs; equals the target up to global phase.
SynthesizedCircuit synth_two_qubit_gate(const CMat &target);
// Schmidt cut 2|2 with at most nine CNOTs.
SynthesizedCircuit prep_four_qubit(const StateVector &target);

}  // namespace qtk
