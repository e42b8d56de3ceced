#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qtk/circuit.hpp"

namespace qtk {

// QFT on n qubits. With swaps the unitary is exactly the DFT matrix
// W_jk = w^{jk}/sqrt(N); without them the output register is bit-reversed.
Circuit qft_circuit(int n, bool inverse = false, bool swaps = true);
// Appends a QFT (or inverse) acting on `qubits` of `c`, qubits[0] most significant.
void append_qft(Circuit &c, const std::vector<int> &qubits, bool inverse = false, bool swaps = true);

struct Oracle {
    int n_inputs = 0;
    std::function<bool(uint64_t)> predicate;
    Gate realized_gate;  // |x>|q> -> |x>|q xor f(x)>, ancilla last
};
Oracle make_oracle(int n_inputs, std::function<bool(uint64_t)> predicate);

struct PhaseEstimate {
    std::string bits;
    double phase = 0;
    int t = 0;
};

// Ancilla 0 holds the most significant bit of the phase and controls U^{2^{t-1}}.
Circuit phase_estimation_circuit(const Gate &u, int t);
std::vector<double> phase_estimate_distribution(const Gate &u, const StateVector &eigenstate, int t);
PhaseEstimate phase_estimate(const Gate &u, const StateVector &eigenstate, int t, Rng &rng);

enum class Part { Real, Imaginary };
struct HadamardTestResult {
    double estimate = 0;  // 2 P0 - 1
    double p0 = 0;
};
// shots == 0 gives the exact value from amplitudes.
HadamardTestResult hadamard_test(const Gate &u, const StateVector &psi, Part part, int shots, Rng &rng);

// (2|s><s| - I) O on the n inputs plus ancilla, with |s> the uniform state.
Gate grover_operator(const Oracle &o);
// round(pi / (4 asin sqrt(M/N)) - 1/2), at least 1. The alternative is ceil(pi sqrt(N) / 4).
int grover_iterations(uint64_t n_items, uint64_t n_marked, bool ceil_formula = false);

struct AmplifyResult {
    std::string bits;
    bool marked = false;
    double success_probability = 0;
};
// Applies (U (2|0><0| - I) U^dag O)^iterations to U|0...0> and measures.
AmplifyResult amplitude_amplify(const Gate &prep, const Oracle &o, int iterations, Rng &rng);

struct BoyerResult {
    std::optional<uint64_t> found;
    int grover_iterations = 0;
    int rounds = 0;
};
// Search with an unknown number of marked items. `budget` caps the total
// Grover iterations (negative means unlimited).
BoyerResult boyer_search(const Oracle &o, Rng &rng, int budget = -1);

// Main-register amplitudes after k Grover iterations from the uniform state,
// with the oracle acting by phase kickback.
CVec grover_amplitudes(int n, const std::function<bool(uint64_t)> &predicate, int k);

}  // namespace qtk
