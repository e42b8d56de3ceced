#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qtk/gates.hpp"

namespace qtk {

struct Op {
    enum class Kind { Gate, Measure, Barrier, Reset };
    Kind kind = Kind::Gate;
    Gate gate;                // Kind::Gate only
    std::vector<int> qubits;  // gate targets, measured/reset qubit, or barrier span
    int clbit = -1;           // Kind::Measure only
};

class Circuit {
   public:
    Circuit() = default;
    Circuit(int n_qubits, int n_clbits = 0);

    int n_qubits = 0;
    int n_clbits = 0;
    std::vector<Op> ops;

    Circuit &add(const std::string &name, const std::vector<int> &qubits, const std::vector<double> &params = {});
    Circuit &add_gate(const Gate &g, const std::vector<int> &qubits);
    Circuit &measure(int qubit, int clbit);
    Circuit &measure_all();  // qubit i -> clbit i, growing the classical register if needed
    Circuit &barrier(const std::vector<int> &qubits = {});
    Circuit &reset(int qubit);
    // Appends `other` with its qubit i placed on qubit_map[i] (identity if empty).
    Circuit &append(const Circuit &other, const std::vector<int> &qubit_map = {});
    Circuit inverse() const;  // gates only

    bool operator==(const Circuit &o) const;
};

struct Topology {
    int n_qubits = 0;
    std::set<std::pair<int, int>> cnot_edges;  // (control, target)

    Topology(int n, std::set<std::pair<int, int>> edges);
    bool has(int c, int t) const { return cnot_edges.count({c, t}) > 0; }
    bool linked(int a, int b) const { return has(a, b) || has(b, a); }
    static Topology ibmqx4();
};

struct NoiseModel {
    double over_rotation_sigma = 0;
    double bitflip_p = 0;
    double idle_flip_p = 0;

    void validate() const;
    bool active() const { return over_rotation_sigma > 0 || bitflip_p > 0 || idle_flip_p > 0; }
};

struct ShotHistogram {
    std::map<std::string, int> counts;
    int shots = 0;

    double frequency(const std::string &bits) const;
};

struct CircuitMetrics {
    int gate_count = 0;
    int cnot_count = 0;
    int depth = 0;
};

struct ParseError : QtkError {
    int line;
    int column;
    ParseError(const std::string &msg, int line, int column);
};

// Exact final state from |0...0>; terminal measurements are ignored.
StateVector run_statevector(const Circuit &c);
StateVector run_statevector(const Circuit &c, const StateVector &initial);
CMat circuit_unitary(const Circuit &c);

// Classical strings list clbit 0 first.
ShotHistogram sample(const Circuit &c, int shots, const NoiseModel *noise, Rng &rng);
// One noisy pass over the gates of `c` from |0...0>; measurements are ignored.
StateVector run_noisy_trajectory(const Circuit &c, const NoiseModel &noise, Rng &rng);

Circuit parse_qasm(const std::string &text);
std::string emit_qasm(const Circuit &c);

Circuit reroute_for_topology(const Circuit &c, const Topology &t);
CircuitMetrics metrics(const Circuit &c);

struct CoherenceReport {
    std::vector<double> per_qubit;
    double combined = 0;
};
CoherenceReport idle_decoherence_experiment(int n_qubits, int idle_steps, const NoiseModel &noise, int shots,
                                            Rng &rng);

}  // namespace qtk
