#include "qtk/stateprep.hpp"

#include <algorithm>
#include <cmath>

namespace qtk {

namespace {

double wrap_pi(double a) {
    a = std::remainder(a, 2 * kPi);
    return a <= -kPi ? a + 2 * kPi : a;
}

// Emits u as a u3 gate; gates equal to the identity up to phase are dropped.
void add_single(Circuit &c, const CMat &u, int q) {
    if (phase_distance(u, CMat::Identity(2, 2)) < 1e-14) {
        return;
    }
    EulerAngles e = euler_decompose(u);
    c.add("u3", {q}, {e.gamma, e.beta, e.delta});
}

double state_fidelity(const Circuit &c, const StateVector &target) {
    return std::norm(inner_product(target, run_statevector(c)));
}

CMat reshape_state(const StateVector &s, Eigen::Index rows, Eigen::Index cols) {
    CMat a(rows, cols);
    for (Eigen::Index i = 0; i < rows; i++) {
        for (Eigen::Index j = 0; j < cols; j++) {
            a(i, j) = s[(uint64_t)(i * cols + j)];
        }
    }
    return a;
}

// With `minimal` the CNOT and rotation are skipped for product states.
Circuit two_qubit_circuit(const StateVector &target, bool minimal) {
    Eigen::JacobiSVD<CMat> svd(reshape_state(target, 2, 2), Eigen::ComputeFullU | Eigen::ComputeFullV);
    auto s = svd.singularValues();
    CMat u = svd.matrixU();
    CMat v = svd.matrixV().conjugate();  // Vh transposed
    Circuit c(2);
    bool entangled = s[1] > 1e-14;
    if (entangled || !minimal) {
        double theta = 2 * std::atan2(s[1], s[0]);
        if (std::abs(theta) > 1e-14) {
            c.add("u3", {0}, {theta, 0.0, 0.0});
        }
        c.add("cx", {0, 1});
    }
    add_single(c, u, 0);
    add_single(c, v, 1);
    return c;
}

// Rank-one split of a Kronecker product a (x) b.
std::pair<CMat, CMat> kron_factor(const CMat &l) {
    CMat r(4, 4);
    for (int a = 0; a < 2; a++) {
        for (int b = 0; b < 2; b++) {
            for (int c = 0; c < 2; c++) {
                for (int d = 0; d < 2; d++) {
                    r(2 * a + c, 2 * b + d) = l(2 * a + b, 2 * c + d);
                }
            }
        }
    }
    Eigen::JacobiSVD<CMat> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    double sigma = std::sqrt(svd.singularValues()[0]);
    CMat a(2, 2), b(2, 2);
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            a(i, j) = sigma * svd.matrixU()(2 * i + j, 0);
            b(i, j) = sigma * std::conj(svd.matrixV()(2 * i + j, 0));
        }
    }
    return {a, b};
}

// Real orthogonal P with P^T s P diagonal, for a complex symmetric unitary s.
Eigen::MatrixXd real_diagonalizer(const CMat &s) {
    Eigen::MatrixXd mix = s.real() + 0.5772156649 * s.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mix);
    return es.eigenvectors();
}

CMat cnot_matrix(int control, int target) {
    CMat m = CMat::Zero(4, 4);
    for (int x = 0; x < 4; x++) {
        int y = ((x >> (1 - control)) & 1) ? x ^ (1 << (1 - target)) : x;
        m(y, x) = 1;
    }
    return m;
}

}  // namespace

CMat EulerAngles::reconstruct() const {
    return std::polar(1.0, alpha) * rz_matrix(beta) * ry_matrix(gamma) * rz_matrix(delta);
}

EulerAngles euler_decompose(const CMat &u) {
    if (u.rows() != 2 || u.cols() != 2 || !is_unitary(u, 1e-10)) {
        throw QtkError("euler_decompose expects a 2x2 unitary");
    }
    EulerAngles e;
    e.alpha = std::arg(u.determinant()) / 2;
    CMat v = std::polar(1.0, -e.alpha) * u;
    e.gamma = 2 * std::atan2(std::abs(v(1, 0)), std::abs(v(0, 0)));
    double sum = std::arg(v(1, 1));   // (beta + delta) / 2
    double diff = std::arg(v(1, 0));  // (beta - delta) / 2
    if (std::abs(v(1, 0)) < 1e-13) {
        e.beta = 2 * sum;
        e.delta = 0;
    } else if (std::abs(v(0, 0)) < 1e-13) {
        e.beta = 2 * diff;
        e.delta = 0;
    } else {
        e.beta = sum + diff;
        e.delta = sum - diff;
    }
    // Rz(x + 2 pi) = -Rz(x): wrap angles and move the sign into alpha.
    for (double *angle : {&e.beta, &e.delta}) {
        double w = wrap_pi(*angle);
        long turns = std::lround((*angle - w) / (2 * kPi));
        *angle = w;
        if (turns % 2 != 0) {
            e.alpha += kPi;
        }
    }
    e.alpha = wrap_pi(e.alpha);
    if ((e.reconstruct() - u).cwiseAbs().maxCoeff() > 1e-9) {
        e.alpha = wrap_pi(e.alpha + kPi);
    }
    return e;
}

SynthesizedCircuit prep_single(cplx alpha, cplx beta) {
    double norm2 = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm2 - 1) > 1e-10) {
        throw QtkError("prep_single: amplitudes are not normalized");
    }
    SynthesizedCircuit r;
    r.circuit = Circuit(1);
    if (std::abs(beta) > 1e-14) {
        // Only the first column matters. u3(theta, phi, pi) is the reflection
        // swapping |0> and the target, which makes |+> a plain Hadamard.
        double theta = 2 * std::atan2(std::abs(beta), std::abs(alpha));
        double phi = std::arg(beta) - (std::abs(alpha) > 1e-14 ? std::arg(alpha) : 0.0);
        r.circuit.add("u3", {0}, {theta, wrap_pi(phi), kPi});
    }
    CVec t(2);
    t << alpha, beta;
    r.fidelity = state_fidelity(r.circuit, StateVector(1, t));
    return r;
}

SynthesizedCircuit prep_two_qubit(const StateVector &target) {
    if (target.n_qubits() != 2) {
        throw QtkError("prep_two_qubit expects a two-qubit state");
    }
    SynthesizedCircuit r;
    r.circuit = two_qubit_circuit(target, false);
    r.cnot_count = metrics(r.circuit).cnot_count;
    r.fidelity = state_fidelity(r.circuit, target);
    return r;
}

SynthesizedCircuit synth_two_qubit_gate(const CMat &target) {
    if (target.rows() != 4 || target.cols() != 4 || !is_unitary(target, 1e-8)) {
        throw QtkError("synth_two_qubit_gate expects a 4x4 unitary");
    }
    const cplx i1(0, 1);
    // Move to SU(4), then to det -1 where the template lives.
    CMat u = target / std::pow(cplx(target.determinant()), 0.25);
    u *= std::polar(1.0, kPi / 4);

    CMat yy = kron(Observable::pauli("Y").matrix, Observable::pauli("Y").matrix);
    CMat gamma_u = u * yy * u.transpose() * yy;
    Eigen::ComplexEigenSolver<CMat> ces(gamma_u);
    double x = std::arg(ces.eigenvalues()[0]);
    double y = std::arg(ces.eigenvalues()[1]);
    double z = std::arg(ces.eigenvalues()[2]);
    double a = (x + y) / 2, b = (x + z) / 2, d = (y + z) / 2;

    CMat cx01 = cnot_matrix(0, 1), cx10 = cnot_matrix(1, 0);
    CMat core = cx10 * kron(CMat::Identity(2, 2), ry_matrix(a)) * cx01 * kron(rz_matrix(d), ry_matrix(b)) * cx10;

    CMat magic(4, 4);
    magic << 1, 0, 0, i1, 0, i1, 1, 0, 0, i1, -1, 0, 1, 0, 0, -i1;
    magic /= std::sqrt(2.0);
    CMat um = magic.adjoint() * u * magic;
    CMat km = magic.adjoint() * core * magic;
    CMat su = um * um.transpose(), sk = km * km.transpose();
    Eigen::MatrixXd p = real_diagonalizer(su);
    Eigen::MatrixXd q = real_diagonalizer(sk);
    CVec du = (p.transpose().cast<cplx>() * su * p.cast<cplx>()).diagonal();
    CVec dk = (q.transpose().cast<cplx>() * sk * q.cast<cplx>()).diagonal();

    // Pair equal eigenvalues so that P^T Su P = Q^T Sk Q.
    std::vector<bool> used(4, false);
    Eigen::MatrixXd q_sorted(4, 4);
    for (int i = 0; i < 4; i++) {
        int best = -1;
        for (int j = 0; j < 4; j++) {
            if (!used[j] && (best < 0 || std::abs(dk[j] - du[i]) < std::abs(dk[best] - du[i]))) {
                best = j;
            }
        }
        used[best] = true;
        q_sorted.col(i) = q.col(best);
    }
    if (p.determinant() * q_sorted.determinant() < 0) {
        p.col(0) *= -1;
    }
    CMat o1 = (p * q_sorted.transpose()).cast<cplx>();
    CMat o2 = km.inverse() * o1.transpose() * um;
    CMat l1 = magic * o1 * magic.adjoint();
    CMat l2 = magic * o2 * magic.adjoint();
    auto [a1, b1] = kron_factor(l1);
    auto [c2, d2] = kron_factor(l2);

    SynthesizedCircuit r;
    r.circuit = Circuit(2);
    Circuit &c = r.circuit;
    add_single(c, c2, 0);
    add_single(c, d2, 1);
    c.add("cx", {1, 0});
    c.add("rz", {0}, {d});
    c.add("ry", {1}, {b});
    c.add("cx", {0, 1});
    c.add("ry", {1}, {a});
    c.add("cx", {1, 0});
    add_single(c, a1, 0);
    add_single(c, b1, 1);
    r.cnot_count = 3;
    r.fidelity = 1 - phase_distance(circuit_unitary(c), target);
    return r;
}

SynthesizedCircuit prep_four_qubit(const StateVector &target) {
    if (target.n_qubits() != 4) {
        throw QtkError("prep_four_qubit expects a four-qubit state");
    }
    Eigen::JacobiSVD<CMat> svd(reshape_state(target, 4, 4), Eigen::ComputeFullU | Eigen::ComputeFullV);
    auto s = svd.singularValues();
    CMat u = svd.matrixU();
    CMat v = svd.matrixV().conjugate();
    SynthesizedCircuit r;
    r.circuit = Circuit(4);
    Circuit &c = r.circuit;
    if (s[1] < 1e-14) {
        // Product across the cut: each half is a two-qubit state.
        c.append(two_qubit_circuit(StateVector::normalized(2, u.col(0)), true), {0, 1});
        c.append(two_qubit_circuit(StateVector::normalized(2, v.col(0)), true), {2, 3});
    } else {
        CVec lam = s.cast<cplx>();
        c.append(two_qubit_circuit(StateVector::normalized(2, lam), false), {0, 1});
        c.add("cx", {0, 2});
        c.add("cx", {1, 3});
        c.append(synth_two_qubit_gate(u).circuit, {0, 1});
        c.append(synth_two_qubit_gate(v).circuit, {2, 3});
    }
    r.cnot_count = metrics(c).cnot_count;
    r.fidelity = state_fidelity(c, target);
    return r;
}

}  // namespace qtk
