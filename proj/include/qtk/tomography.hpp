#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qtk/qstate.hpp"

namespace qtk {

// Projectors grouped by measurement setting; each group sums to identity.
struct Povm {
    int n_qubits = 0;
    std::vector<CMat> projectors;
    std::vector<std::string> labels;  // "basis:outcome", e.g. "zx:01"
    std::vector<int> group;           // group index of each projector
    std::vector<std::string> group_names;

    void validate() const;
    // One group per Pauli setting, e.g. {"z", "y", "x"} or {"zz", "yy", "xx", "zx", "yz"}.
    // Outcome bit 0 is the +1 eigenvector.
    static Povm pauli_bases(const std::vector<std::string> &bases);
    // Every pairing of {x, y, z} over n qubits.
    static Povm all_pauli_bases(int n_qubits);
};

struct MeasurementRecord {
    std::vector<int> counts;
    std::vector<double> frequencies;  // per projector; sums to 1 within each group
    std::vector<int> shots;           // per group
};

// shots == 0 gives the exact frequencies Tr(P_i rho).
MeasurementRecord simulate_povm(const DensityMatrix &rho, const Povm &povm, int shots, Rng &rng);
MeasurementRecord simulate_povm(const StateVector &s, const Povm &povm, int shots, Rng &rng);

// Least-norm solution of Tr(P_i rho) = w_i with Tr(rho) = 1. Throws when the
// projectors do not span the Hermitian matrices.
CMat linear_inversion(const MeasurementRecord &rec, const Povm &povm);

// Nearest probability vector in Euclidean norm (water-filling).
std::vector<double> project_to_simplex(std::vector<double> v);
// Nearest trace-one PSD matrix in Frobenius norm.
DensityMatrix psd_project(const CMat &m);

struct MlConfig {
    int max_iterations = 5000;
    double gain_tol = 1e-10;
};
struct MlResult {
    DensityMatrix rho;
    std::vector<double> log_likelihood;  // one entry per accepted iterate
    int iterations = 0;
    bool monotone = true;
};
double log_likelihood(const MeasurementRecord &rec, const Povm &povm, const CMat &rho);
MlResult ml_estimate(const MeasurementRecord &rec, const Povm &povm, const MlConfig &cfg = {});

// Descending eigenvalues with phase-fixed eigenvectors.
std::vector<std::pair<double, CVec>> spectral_report(const DensityMatrix &rho);

}  // namespace qtk
