#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qtk/transforms.hpp"

namespace qtk {

// ---- Grover and Bernstein-Vazirani -----------------------------------------

struct GroverResult {
    std::string bits;
    double success_probability = 0;  // of the marked string, noiseless
    int iterations = 0;
};
GroverResult grover_search(const std::function<bool(uint64_t)> &marked, int n, Rng &rng,
                           bool ceil_iterations = false);

Oracle make_bv_oracle(const std::string &hidden);
struct BvResult {
    std::string bits;
    double probability = 0;  // of the returned string
    int oracle_calls = 0;
};
BvResult bv_hidden_string(const Oracle &s_oracle, Rng &rng);

// ---- Shor ------------------------------------------------------------------

uint64_t period_find_classical(uint64_t k, uint64_t n);

// The compiled N = 15, x = 11 circuit: five qubits, counting register q0..q2
// read with q0 as the least significant bit.
Circuit shor15_compiled_circuit();
std::map<uint64_t, double> shor15_register_distribution();

// Counting register of 2n qubits (most significant first) followed by the
// n-qubit work register holding |1>.
Circuit period_finding_circuit(uint64_t k, uint64_t n);
std::vector<double> period_finding_distribution(uint64_t k, uint64_t n);
// Continued-fraction recovery of the period from a counting-register readout.
std::optional<uint64_t> period_from_measurement(uint64_t y, int m_bits, uint64_t k, uint64_t n);

struct ShorResult {
    uint64_t factor1 = 0, factor2 = 0;
    std::string method;  // "quantum", "even", "prime-power", "prime", "gcd"
    uint64_t base = 0;
    uint64_t period = 0;
    int attempts = 0;
    std::vector<uint64_t> measurements;
};
// base == 0 draws random bases; otherwise that base is used on every attempt.
ShorResult shor_factor(uint64_t n, Rng &rng, uint64_t base = 0);

// ---- HHL -------------------------------------------------------------------

struct HhlProblem {
    Eigen::Matrix2d a;
    Eigen::Vector2cd b;
    void validate() const;
    static HhlProblem standard(const Eigen::Vector2cd &b);
};
struct HhlResult {
    double value = 0;
    double postselect_probability = 0;
    int kept_shots = 0;
    int raw_shots = 0;
};
// Qubits: ancilla, two clock qubits, one system qubit.
Circuit hhl_circuit(const HhlProblem &p);
// observable is 'X', 'Y' or 'Z'. shots == 0 is exact; otherwise `shots`
// post-selected samples are collected.
HhlResult hhl_solve(const HhlProblem &p, char observable, int shots, Rng &rng);

// ---- Quantum walk ----------------------------------------------------------

// Register [node bits, coin]. Keys are bit strings of that register.
std::map<std::string, double> quantum_walk_cycle(int n_nodes, int steps, int start, int shots, Rng &rng);
StateVector quantum_walk_state(int n_nodes, int steps, int start);

// ---- QAOA ------------------------------------------------------------------

struct MaxCutInstance {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> edges;
    void validate() const;
    static MaxCutInstance single_edge();
    static MaxCutInstance triangle();
    static MaxCutInstance paw();  // triangle with a pendant edge
    static MaxCutInstance named(const std::string &name);
};
struct QaoaParams {
    std::vector<double> gamma, beta;
    int rounds() const { return (int)gamma.size(); }
};
struct QaoaResult {
    double expected_cut = 0;
    double prob_max_cut = 0;
    int max_cut = 0;
    std::map<int, double> cut_distribution;
};
int cut_value(const MaxCutInstance &g, uint64_t assignment);
StateVector qaoa_state(const MaxCutInstance &g, const QaoaParams &p);
// shots == 0 is exact.
QaoaResult qaoa_maxcut(const MaxCutInstance &g, const QaoaParams &p, int shots, Rng &rng);
struct GridSearchResult {
    QaoaParams params;
    double expected_cut = 0;
    uint64_t points = 0;
};
GridSearchResult qaoa_grid_search(const MaxCutInstance &g, int r, double resolution);

// ---- Transverse Ising VQE --------------------------------------------------

struct IsingModel {
    int n_spins = 2;
    double h = 0;
    bool periodic = true;
    void validate() const;
};
double exact_ising_ground(const IsingModel &m);
double ising_energy(const IsingModel &m, const StateVector &s);
// -<Z_i Z_j> from a joint outcome distribution over (q_i, q_j) ordered 00,01,10,11.
double bond_energy(const std::array<double, 4> &joint);

enum class AnsatzKind { Product, Entangled };
struct AnsatzParams {
    AnsatzKind kind = AnsatzKind::Product;
    std::vector<double> thetas;
    double theta0 = 0, phi0 = 0;
};
StateVector ansatz_state(const AnsatzParams &p);

struct VqeConfig {
    double fd_step = 1e-3;
    double tau0 = 0.1;
    double grad_tol = 1e-4;
    int max_iterations = 20000;
    int shots = 0;  // > 0 adds a sampled energy estimate at the optimum
};
struct VqeResult {
    double energy = 0;
    std::optional<double> sampled_energy;
    AnsatzParams params;
    double magnetization_x = 0;
    double magnetization_z = 0;
    std::vector<double> energy_trace;  // accepted steps
    bool converged = false;
    int iterations = 0;
};
VqeResult vqe_ising(const IsingModel &m, AnsatzKind kind, const VqeConfig &cfg, Rng &rng);

// ---- Split-operator Schrodinger evolution ----------------------------------

// potential_phase[x] is V(x)*dt for grid point x (empty means V = 0); phi is
// the characteristic kinetic phase.
StateVector schrodinger_evolve(const StateVector &initial, const std::vector<double> &potential_phase, double phi,
                               int steps);

// ---- Minimum finding and layered partitioning ------------------------------

struct MinFindResult {
    size_t index = 0;
    int grover_iterations = 0;
    int searches = 0;
};
double min_find_budget(size_t n_items);
MinFindResult min_find(const std::vector<double> &values, Rng &rng);

inline constexpr int kUnreached = -1;
struct LayerResult {
    std::vector<int> layers;  // kUnreached for nodes not connected to the source
    bool connected = true;
    int searches = 0;
};
LayerResult layered_partition(const std::vector<std::vector<bool>> &adjacency, int source, Rng &rng);

// ---- Group representations -------------------------------------------------

struct FiniteGroup {
    int order = 0;
    std::vector<std::vector<int>> table;  // table[a][b] = a . b
    std::vector<std::string> labels;
    void validate() const;
    int identity() const;
    static FiniteGroup cyclic(int n);  // a_i . a_j = a_{(i+j) mod n}
    static FiniteGroup symmetric3();   // [123] [231] [312] [213] [132] [321]
};
// R_ij = [g_i = g_k . g_j], padded with identity up to a power of two.
Gate regular_representation(const FiniteGroup &g, int element);
double rep_matrix_element(const FiniteGroup &g, int element, const StateVector &psi, Part part, int shots,
                          Rng &rng);

// ---- Quantum PCA -----------------------------------------------------------

struct PcaResult {
    Eigen::Matrix2d covariance;
    double trace = 0;
    double purity = 0;
    std::array<double, 2> eigenvalues{};
    std::array<double, 2> classical_eigenvalues{};
};
// Ancilla followed by two copies of the purified state [A, A'].
Circuit purity_circuit(const StateVector &purified);
PcaResult qpca_two_feature(const std::vector<double> &x1, const std::vector<double> &x2, int shots, Rng &rng);

// ---- Potts partition function ----------------------------------------------

struct PottsModel {
    int n_vertices = 0;
    std::vector<std::tuple<int, int, double>> edges;  // (i, j, J_ij)
    int q = 2;
    double beta = 0;
};
double potts_partition(const PottsModel &m);
// The two-qubit QFT step applied to (|+>, |->); keys are gamma in 0..3.
std::map<int, double> potts_qft2_gamma_distribution();

}  // namespace qtk
