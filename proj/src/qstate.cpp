#include "qtk/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qtk {

namespace {

void check_qubits(int n, const std::vector<int> &qubits) {
    std::vector<bool> seen(n, false);
    for (int q : qubits) {
        if (q < 0 || q >= n) {
            throw QtkError("qubit index " + std::to_string(q) + " out of range");
        }
        if (seen[q]) {
            throw QtkError("duplicate qubit index " + std::to_string(q));
        }
        seen[q] = true;
    }
}

}  // namespace

StateVector::StateVector(int n_qubits, CVec amps) : n_(n_qubits), amps_(std::move(amps)) {
    if (n_qubits < 0 || amps_.size() != ((Eigen::Index)1 << n_qubits)) {
        throw QtkError("amplitude count must be 2^n_qubits");
    }
    if (std::abs(amps_.squaredNorm() - 1) > 1e-10) {
        throw QtkError("state is not normalized");
    }
}

StateVector StateVector::zero(int n_qubits) { return basis(n_qubits, 0); }

StateVector StateVector::basis(int n_qubits, uint64_t index) {
    CVec v = CVec::Zero((Eigen::Index)1 << n_qubits);
    if (index >= (uint64_t)v.size()) {
        throw QtkError("basis index out of range");
    }
    v[(Eigen::Index)index] = 1;
    return StateVector(n_qubits, std::move(v));
}

StateVector StateVector::from_bits(const std::string &bits) {
    return basis((int)bits.size(), bits_to_index(bits));
}

StateVector StateVector::normalized(int n_qubits, CVec amps) {
    double nrm = amps.norm();
    if (nrm == 0) {
        throw QtkError("cannot normalize the zero vector");
    }
    return StateVector(n_qubits, amps / nrm);
}

StateVector StateVector::unchecked(int n_qubits, CVec amps) {
    StateVector s;
    s.n_ = n_qubits;
    s.amps_ = std::move(amps);
    return s;
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amps_.size());
    for (Eigen::Index i = 0; i < amps_.size(); i++) {
        p[i] = std::norm(amps_[i]);
    }
    return p;
}

DensityMatrix::DensityMatrix(int n_qubits, CMat elems) : n_(n_qubits), m_(std::move(elems)) {
    Eigen::Index d = (Eigen::Index)1 << n_qubits;
    if (m_.rows() != d || m_.cols() != d) {
        throw QtkError("density matrix must be 2^n x 2^n");
    }
    if (std::abs(m_.trace() - cplx(1)) > 1e-10) {
        throw QtkError("density matrix trace is not 1");
    }
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw QtkError("density matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(m_);
    if (es.eigenvalues().minCoeff() < -1e-9) {
        throw QtkError("density matrix has a negative eigenvalue");
    }
}

DensityMatrix DensityMatrix::unchecked(int n_qubits, CMat elems) {
    DensityMatrix r;
    r.n_ = n_qubits;
    r.m_ = std::move(elems);
    return r;
}

DensityMatrix DensityMatrix::pure(const StateVector &s) {
    return DensityMatrix(s.n_qubits(), s.amps() * s.amps().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    Eigen::Index d = (Eigen::Index)1 << n_qubits;
    return DensityMatrix(n_qubits, CMat::Identity(d, d) / (double)d);
}

Observable::Observable(CMat m, std::string label) : matrix(std::move(m)), label(std::move(label)) {
    if (matrix.rows() != matrix.cols()) {
        throw QtkError("observable must be square");
    }
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw QtkError("observable is not Hermitian");
    }
}

Observable Observable::pauli(const std::string &word) {
    CMat m = CMat::Identity(1, 1);
    for (char c : word) {
        CMat p(2, 2);
        switch (c) {
            case 'I':
                p << 1, 0, 0, 1;
                break;
            case 'X':
                p << 0, 1, 1, 0;
                break;
            case 'Y':
                p << 0, cplx(0, -1), cplx(0, 1), 0;
                break;
            case 'Z':
                p << 1, 0, 0, -1;
                break;
            default:
                throw QtkError(std::string("unknown Pauli letter ") + c);
        }
        CMat k(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index i = 0; i < m.rows(); i++) {
            for (Eigen::Index j = 0; j < m.cols(); j++) {
                k.block(2 * i, 2 * j, 2, 2) = m(i, j) * p;
            }
        }
        m = k;
    }
    return Observable(m, word);
}

StateVector SchmidtForm::reconstruct() const {
    if (left_basis.empty()) {
        throw QtkError("empty Schmidt form");
    }
    StateVector acc = tensor_product(left_basis[0], right_basis[0]);
    CVec v = CVec::Zero(acc.amps().size());
    for (size_t i = 0; i < coefficients.size(); i++) {
        v += coefficients[i] * tensor_product(left_basis[i], right_basis[i]).amps();
    }
    return StateVector::unchecked(acc.n_qubits(), v);
}

StateVector tensor_product(const StateVector &a, const StateVector &b) {
    CVec v(a.amps().size() * b.amps().size());
    Eigen::Index db = b.amps().size();
    for (Eigen::Index x = 0; x < a.amps().size(); x++) {
        v.segment(x * db, db) = a.amps()[x] * b.amps();
    }
    return StateVector::unchecked(a.n_qubits() + b.n_qubits(), v);
}

cplx inner_product(const StateVector &a, const StateVector &b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw QtkError("inner_product: dimension mismatch");
    }
    return a.amps().dot(b.amps());  // Eigen's dot conjugates the left operand
}

CMat outer_product(const StateVector &a, const StateVector &b) { return a.amps() * b.amps().adjoint(); }

uint64_t sample_index(const std::vector<double> &probs, Rng &rng) {
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    double r = rng.uniform() * total;
    double acc = 0;
    for (size_t i = 0; i < probs.size(); i++) {
        acc += probs[i];
        if (r < acc) {
            return i;
        }
    }
    // Rounding left r at the very top; return the last nonzero entry.
    for (size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0) {
            return i;
        }
    }
    return 0;
}

MeasurementOutcome measure_all(const StateVector &s, Rng &rng) {
    auto p = s.probabilities();
    uint64_t k = sample_index(p, rng);
    return {index_to_bits(k, s.n_qubits()), p[k], StateVector::basis(s.n_qubits(), k)};
}

MeasurementOutcome project_subset(const StateVector &s, const std::vector<int> &qubits, const std::string &bits) {
    if (qubits.empty()) {
        throw QtkError("measure_subset: empty qubit list");
    }
    check_qubits(s.n_qubits(), qubits);
    if (bits.size() != qubits.size()) {
        throw QtkError("outcome length does not match qubit list");
    }
    int n = s.n_qubits();
    CVec v = s.amps();
    double p = 0;
    for (Eigen::Index i = 0; i < v.size(); i++) {
        bool keep = true;
        for (size_t k = 0; k < qubits.size(); k++) {
            int bit = (int)((i >> (n - 1 - qubits[k])) & 1);
            if (bit != bits[k] - '0') {
                keep = false;
                break;
            }
        }
        if (keep) {
            p += std::norm(v[i]);
        } else {
            v[i] = 0;
        }
    }
    MeasurementOutcome out;
    out.bits = bits;
    out.probability = p;
    out.post_state = p > 0 ? StateVector::normalized(n, v) : StateVector::unchecked(n, v);
    return out;
}

MeasurementOutcome measure_subset(const StateVector &s, const std::vector<int> &qubits, Rng &rng) {
    if (qubits.empty()) {
        throw QtkError("measure_subset: empty qubit list");
    }
    check_qubits(s.n_qubits(), qubits);
    int n = s.n_qubits();
    std::vector<double> p((size_t)1 << qubits.size(), 0.0);
    for (Eigen::Index i = 0; i < s.amps().size(); i++) {
        uint64_t key = 0;
        for (int q : qubits) {
            key = (key << 1) | ((i >> (n - 1 - q)) & 1);
        }
        p[key] += std::norm(s.amps()[i]);
    }
    uint64_t k = sample_index(p, rng);
    return project_subset(s, qubits, index_to_bits(k, (int)qubits.size()));
}

double expectation(const StateVector &s, const Observable &o) {
    if (o.matrix.rows() != s.amps().size()) {
        throw QtkError("expectation: dimension mismatch");
    }
    cplx e = s.amps().dot(o.matrix * s.amps());
    if (std::abs(e.imag()) > 1e-9) {
        throw QtkError("expectation has an imaginary part");
    }
    return e.real();
}

double expectation(const DensityMatrix &rho, const Observable &o) {
    if (o.matrix.rows() != rho.elems().rows()) {
        throw QtkError("expectation: dimension mismatch");
    }
    return (rho.elems() * o.matrix).trace().real();
}

MeasurementOutcome basis_change_measure(const StateVector &s, const std::vector<StateVector> &basis, Rng &rng) {
    Eigen::Index d = s.amps().size();
    if ((Eigen::Index)basis.size() != d) {
        throw QtkError("basis must have one vector per dimension");
    }
    CMat u(d, d);  // rows are <phi_i|
    for (Eigen::Index i = 0; i < d; i++) {
        if (basis[i].amps().size() != d) {
            throw QtkError("basis vector dimension mismatch");
        }
        u.row(i) = basis[i].amps().adjoint();
    }
    if ((u * u.adjoint() - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8) {
        throw QtkError("basis is not orthonormal");
    }
    return measure_all(StateVector::unchecked(s.n_qubits(), u * s.amps()), rng);
}

DensityMatrix density_from_ensemble(const std::vector<std::pair<double, StateVector>> &pairs) {
    if (pairs.empty()) {
        throw QtkError("empty ensemble");
    }
    int n = pairs[0].second.n_qubits();
    double total = 0;
    Eigen::Index d = (Eigen::Index)1 << n;
    CMat m = CMat::Zero(d, d);
    for (const auto &[p, s] : pairs) {
        if (p < 0 || s.n_qubits() != n) {
            throw QtkError("bad ensemble entry");
        }
        total += p;
        m += p * s.amps() * s.amps().adjoint();
    }
    if (std::abs(total - 1) > 1e-9) {
        throw QtkError("ensemble probabilities do not sum to 1");
    }
    m = (m + m.adjoint()) / 2;
    return DensityMatrix(n, m);
}

DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<int> &keep) {
    int n = rho.n_qubits();
    check_qubits(n, keep);
    std::vector<int> traced;
    for (int q = 0; q < n; q++) {
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
            traced.push_back(q);
        }
    }
    int nk = (int)keep.size();
    int nt = (int)traced.size();
    auto compose = [&](uint64_t kept_bits, uint64_t traced_bits) {
        uint64_t idx = 0;
        for (int k = 0; k < nk; k++) {
            idx |= ((kept_bits >> (nk - 1 - k)) & 1) << (n - 1 - keep[k]);
        }
        for (int k = 0; k < nt; k++) {
            idx |= ((traced_bits >> (nt - 1 - k)) & 1) << (n - 1 - traced[k]);
        }
        return (Eigen::Index)idx;
    };
    Eigen::Index dk = (Eigen::Index)1 << nk;
    CMat r = CMat::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dk; i++) {
        for (Eigen::Index j = 0; j < dk; j++) {
            cplx acc = 0;
            for (uint64_t t = 0; t < ((uint64_t)1 << nt); t++) {
                acc += rho.elems()(compose(i, t), compose(j, t));
            }
            r(i, j) = acc;
        }
    }
    return DensityMatrix::unchecked(nk, r);
}

CVec fix_phase(CVec v, double eps) {
    for (Eigen::Index i = 0; i < v.size(); i++) {
        if (std::abs(v[i]) > eps) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            break;
        }
    }
    return v;
}

SchmidtForm schmidt_decompose(const StateVector &s, int cut) {
    int n = s.n_qubits();
    if (cut <= 0 || cut >= n) {
        throw QtkError("schmidt_decompose: cut must split the register");
    }
    Eigen::Index dl = (Eigen::Index)1 << cut;
    Eigen::Index dr = (Eigen::Index)1 << (n - cut);
    CMat a(dl, dr);
    for (Eigen::Index x = 0; x < dl; x++) {
        for (Eigen::Index y = 0; y < dr; y++) {
            a(x, y) = s.amps()[x * dr + y];
        }
    }
    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SchmidtForm f;
    Eigen::Index k = std::min(dl, dr);
    for (Eigen::Index i = 0; i < k; i++) {
        CVec u = svd.matrixU().col(i);
        CVec w = svd.matrixV().col(i).conjugate();
        CVec fixed = fix_phase(u);
        // Whatever phase left the left vector goes onto the right one.
        cplx ph = u.dot(fixed);
        w *= std::conj(ph);
        f.coefficients.push_back(svd.singularValues()[i]);
        f.left_basis.push_back(StateVector::unchecked(cut, fixed));
        f.right_basis.push_back(StateVector::unchecked(n - cut, w));
    }
    return f;
}

StateVector purify(const DensityMatrix &rho) {
    int n = rho.n_qubits();
    Eigen::SelfAdjointEigenSolver<CMat> es(rho.elems());
    Eigen::Index d = rho.elems().rows();
    CVec out = CVec::Zero(d * d);
    // Eigen sorts ascending; walk downward so the dominant term pairs with |0..0>.
    for (Eigen::Index k = 0; k < d; k++) {
        Eigen::Index src = d - 1 - k;
        double p = std::max(0.0, es.eigenvalues()[src]);
        CVec v = fix_phase(es.eigenvectors().col(src));
        for (Eigen::Index i = 0; i < d; i++) {
            out[i * d + k] += std::sqrt(p) * v[i];
        }
    }
    return StateVector::normalized(2 * n, out);
}

}  // namespace qtk
