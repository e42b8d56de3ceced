#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qtk/core.hpp"

namespace qtk {

// Dense pure state over 2^n basis states. Qubit 0 is the most significant
// bit of the basis index.
class StateVector {
   public:
    StateVector() = default;
    // Validates normalization to 1e-10.
    StateVector(int n_qubits, CVec amps);

    static StateVector zero(int n_qubits);
    static StateVector basis(int n_qubits, uint64_t index);
    static StateVector from_bits(const std::string &bits);
    // Normalizes its input instead of rejecting it.
    static StateVector normalized(int n_qubits, CVec amps);
    // Skips the norm check; used for intermediate results of unitary evolution.
    static StateVector unchecked(int n_qubits, CVec amps);

    int n_qubits() const { return n_; }
    uint64_t dim() const { return (uint64_t)amps_.size(); }
    const CVec &amps() const { return amps_; }
    CVec &mutable_amps() { return amps_; }
    cplx operator[](uint64_t i) const { return amps_[(Eigen::Index)i]; }

    std::vector<double> probabilities() const;
    double norm() const { return amps_.norm(); }

   private:
    int n_ = 0;
    CVec amps_;
};

class DensityMatrix {
   public:
    DensityMatrix() = default;
    // Validates trace, hermiticity and positivity.
    DensityMatrix(int n_qubits, CMat elems);
    static DensityMatrix unchecked(int n_qubits, CMat elems);
    static DensityMatrix pure(const StateVector &s);
    static DensityMatrix maximally_mixed(int n_qubits);

    int n_qubits() const { return n_; }
    const CMat &elems() const { return m_; }

   private:
    int n_ = 0;
    CMat m_;
};

struct Observable {
    CMat matrix;
    std::string label;

    // Validates hermiticity.
    Observable(CMat m, std::string label = "");
    static Observable pauli(const std::string &word);  // e.g. "XZI"
};

struct MeasurementOutcome {
    std::string bits;
    double probability = 0;
    StateVector post_state;
};

struct SchmidtForm {
    std::vector<double> coefficients;
    std::vector<StateVector> left_basis;
    std::vector<StateVector> right_basis;

    StateVector reconstruct() const;
};

StateVector tensor_product(const StateVector &a, const StateVector &b);
cplx inner_product(const StateVector &a, const StateVector &b);
CMat outer_product(const StateVector &a, const StateVector &b);

MeasurementOutcome measure_all(const StateVector &s, Rng &rng);
MeasurementOutcome measure_subset(const StateVector &s, const std::vector<int> &qubits, Rng &rng);
// Probability of reading `bits` on `qubits`, and the renormalized projection.
MeasurementOutcome project_subset(const StateVector &s, const std::vector<int> &qubits, const std::string &bits);

double expectation(const StateVector &s, const Observable &o);
double expectation(const DensityMatrix &rho, const Observable &o);
MeasurementOutcome basis_change_measure(const StateVector &s, const std::vector<StateVector> &basis, Rng &rng);

DensityMatrix density_from_ensemble(const std::vector<std::pair<double, StateVector>> &pairs);
DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<int> &keep);
SchmidtForm schmidt_decompose(const StateVector &s, int cut);
StateVector purify(const DensityMatrix &rho);

// Makes the first component with magnitude above `eps` real and positive.
CVec fix_phase(CVec v, double eps = 1e-12);

// Draws an index with probability proportional to probs[i].
uint64_t sample_index(const std::vector<double> &probs, Rng &rng);

}  // namespace qtk
