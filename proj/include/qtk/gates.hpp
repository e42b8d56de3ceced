#pragma once

#include <string>
#include <vector>

#include "qtk/qstate.hpp"

namespace qtk {

struct Gate {
    int arity = 0;
    CMat matrix;
    std::string name;
    std::vector<double> params;  // kept for QASM emission of named gates
};

struct GateApplication {
    Gate gate;
    std::vector<int> targets;  // controls first
};

// Named gates of the QASM subset plus "r" (phase shift), "p", "cp"/"cu1",
// "cswap" and "id". Parameter counts are enforced.
Gate standard_gate(const std::string &name, const std::vector<double> &params = {});
bool is_standard_gate(const std::string &name);
int standard_param_count(const std::string &name);
int standard_arity(const std::string &name);

Gate controlled(const Gate &u);
Gate exp_hermitian_gate(const CMat &h, double t);  // e^{-i h t}
Gate gate_from_matrix(const CMat &m, const std::string &name);

StateVector apply(const StateVector &s, const GateApplication &app);
// In-place kernel behind apply(): multiplies the targeted subspace by `m`.
void apply_matrix(CVec &amps, int n_qubits, const CMat &m, const std::vector<int> &targets);

// 1 - |Tr(A^dag B)| / dim, zero iff equal up to global phase.
double phase_distance(const CMat &a, const CMat &b);
bool is_unitary(const CMat &m, double tol);

CMat kron(const CMat &a, const CMat &b);

// Single-qubit rotation matrices, standard convention R(θ) = exp(-iθP/2).
CMat rx_matrix(double theta);
CMat ry_matrix(double theta);
CMat rz_matrix(double theta);
CMat u3_matrix(double theta, double phi, double lambda);

}  // namespace qtk
