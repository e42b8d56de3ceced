#include "qtk/gates.hpp"

#include <cmath>
#include <map>

namespace qtk {

namespace {

const cplx I1(0, 1);

struct GateSpec {
    int arity;
    int n_params;
};

const std::map<std::string, GateSpec> &gate_table() {
    static const std::map<std::string, GateSpec> table = {
        {"id", {1, 0}},  {"x", {1, 0}},   {"y", {1, 0}},   {"z", {1, 0}},    {"h", {1, 0}},
        {"s", {1, 0}},   {"sdg", {1, 0}}, {"t", {1, 0}},   {"tdg", {1, 0}},  {"u1", {1, 1}},
        {"u2", {1, 2}},  {"u3", {1, 3}},  {"r", {1, 1}},   {"p", {1, 1}},    {"rx", {1, 1}},
        {"ry", {1, 1}},  {"rz", {1, 1}},  {"cx", {2, 0}},  {"cz", {2, 0}},   {"swap", {2, 0}},
        {"cp", {2, 1}},  {"cu1", {2, 1}}, {"ccx", {3, 0}}, {"cswap", {3, 0}},
    };
    return table;
}

CMat mat2(cplx a, cplx b, cplx c, cplx d) {
    CMat m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

CMat rx_matrix(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return mat2(c, -I1 * s, -I1 * s, c);
}

CMat ry_matrix(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return mat2(c, -s, s, c);
}

CMat rz_matrix(double theta) { return mat2(std::exp(-I1 * (theta / 2)), 0, 0, std::exp(I1 * (theta / 2))); }

CMat u3_matrix(double theta, double phi, double lambda) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return mat2(c, -std::exp(I1 * lambda) * s, std::exp(I1 * phi) * s, std::exp(I1 * (phi + lambda)) * c);
}

CMat kron(const CMat &a, const CMat &b) {
    CMat k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return k;
}

bool is_standard_gate(const std::string &name) { return gate_table().count(name) > 0; }

int standard_param_count(const std::string &name) {
    auto it = gate_table().find(name);
    if (it == gate_table().end()) {
        throw QtkError("unknown gate '" + name + "'");
    }
    return it->second.n_params;
}

int standard_arity(const std::string &name) {
    auto it = gate_table().find(name);
    if (it == gate_table().end()) {
        throw QtkError("unknown gate '" + name + "'");
    }
    return it->second.arity;
}

Gate standard_gate(const std::string &name, const std::vector<double> &params) {
    int np = standard_param_count(name);
    if ((int)params.size() != np) {
        throw QtkError("gate '" + name + "' takes " + std::to_string(np) + " parameter(s), got " +
                       std::to_string(params.size()));
    }
    const double r2 = 1 / std::sqrt(2.0);
    CMat m;
    if (name == "id") {
        m = CMat::Identity(2, 2);
    } else if (name == "x") {
        m = mat2(0, 1, 1, 0);
    } else if (name == "y") {
        m = mat2(0, -I1, I1, 0);
    } else if (name == "z") {
        m = mat2(1, 0, 0, -1);
    } else if (name == "h") {
        m = mat2(r2, r2, r2, -r2);
    } else if (name == "s") {
        m = mat2(1, 0, 0, I1);
    } else if (name == "sdg") {
        m = mat2(1, 0, 0, -I1);
    } else if (name == "t") {
        m = mat2(1, 0, 0, std::exp(I1 * (kPi / 4)));
    } else if (name == "tdg") {
        m = mat2(1, 0, 0, std::exp(-I1 * (kPi / 4)));
    } else if (name == "u1" || name == "r" || name == "p") {
        m = u3_matrix(0, 0, params[0]);
    } else if (name == "u2") {
        m = u3_matrix(kPi / 2, params[0], params[1]);
    } else if (name == "u3") {
        m = u3_matrix(params[0], params[1], params[2]);
    } else if (name == "rx") {
        m = rx_matrix(params[0]);
    } else if (name == "ry") {
        m = ry_matrix(params[0]);
    } else if (name == "rz") {
        m = rz_matrix(params[0]);
    } else if (name == "cx") {
        return {2, controlled(standard_gate("x")).matrix, name, {}};
    } else if (name == "cz") {
        return {2, controlled(standard_gate("z")).matrix, name, {}};
    } else if (name == "cp" || name == "cu1") {
        return {2, controlled(standard_gate("u1", params)).matrix, name, params};
    } else if (name == "swap") {
        m = CMat::Zero(4, 4);
        m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
        return {2, m, name, {}};
    } else if (name == "ccx") {
        return {3, controlled(controlled(standard_gate("x"))).matrix, name, {}};
    } else if (name == "cswap") {
        return {3, controlled(standard_gate("swap")).matrix, name, {}};
    }
    return {1, m, name, params};
}

Gate controlled(const Gate &u) {
    Eigen::Index d = u.matrix.rows();
    CMat m = CMat::Zero(2 * d, 2 * d);
    m.topLeftCorner(d, d) = CMat::Identity(d, d);
    m.bottomRightCorner(d, d) = u.matrix;
    return {u.arity + 1, m, "c" + u.name, u.params};
}

bool is_unitary(const CMat &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m * m.adjoint() - CMat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

Gate exp_hermitian_gate(const CMat &h, double t) {
    if (h.rows() != h.cols() || (h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw QtkError("exp_hermitian_gate: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    CVec phases(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); i++) {
        phases[i] = std::exp(-I1 * (es.eigenvalues()[i] * t));
    }
    CMat u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    int k = 0;
    while (((Eigen::Index)1 << k) < h.rows()) {
        k++;
    }
    if (((Eigen::Index)1 << k) != h.rows()) {
        throw QtkError("exp_hermitian_gate: dimension is not a power of two");
    }
    return {k, u, "exp", {}};
}

Gate gate_from_matrix(const CMat &m, const std::string &name) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw QtkError("gate matrix must be square");
    }
    int k = 0;
    while (((Eigen::Index)1 << k) < m.rows()) {
        k++;
    }
    if (((Eigen::Index)1 << k) != m.rows() || k == 0) {
        throw QtkError("gate dimension must be a power of two");
    }
    if (!is_unitary(m, 1e-8)) {
        throw QtkError("gate matrix '" + name + "' is not unitary");
    }
    return {k, m, name, {}};
}

void apply_matrix(CVec &amps, int n, const CMat &m, const std::vector<int> &targets) {
    int k = (int)targets.size();
    if (m.rows() != ((Eigen::Index)1 << k)) {
        throw QtkError("gate arity does not match target count");
    }
    uint64_t mask = 0;
    for (int t : targets) {
        if (t < 0 || t >= n) {
            throw QtkError("target qubit " + std::to_string(t) + " out of range");
        }
        uint64_t bit = (uint64_t)1 << (n - 1 - t);
        if (mask & bit) {
            throw QtkError("duplicate target qubit " + std::to_string(t));
        }
        mask |= bit;
    }
    uint64_t dim = (uint64_t)1 << n;

    if (k == 1) {
        uint64_t bit = mask;
        cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
        for (uint64_t i = 0; i < dim; i++) {
            if (i & bit) {
                continue;
            }
            cplx x = amps[(Eigen::Index)i], y = amps[(Eigen::Index)(i | bit)];
            amps[(Eigen::Index)i] = a * x + b * y;
            amps[(Eigen::Index)(i | bit)] = c * x + d * y;
        }
        return;
    }

    uint64_t sub = (uint64_t)1 << k;
    std::vector<uint64_t> offsets(sub, 0);
    for (uint64_t local = 0; local < sub; local++) {
        for (int j = 0; j < k; j++) {
            if ((local >> (k - 1 - j)) & 1) {
                offsets[local] |= (uint64_t)1 << (n - 1 - targets[j]);
            }
        }
    }
    CVec in(sub), out(sub);
    for (uint64_t base = 0; base < dim; base++) {
        if (base & mask) {
            continue;
        }
        for (uint64_t local = 0; local < sub; local++) {
            in[(Eigen::Index)local] = amps[(Eigen::Index)(base | offsets[local])];
        }
        out.noalias() = m * in;
        for (uint64_t local = 0; local < sub; local++) {
            amps[(Eigen::Index)(base | offsets[local])] = out[(Eigen::Index)local];
        }
    }
}

StateVector apply(const StateVector &s, const GateApplication &app) {
    if ((int)app.targets.size() != app.gate.arity) {
        throw QtkError("gate '" + app.gate.name + "' needs " + std::to_string(app.gate.arity) + " target(s)");
    }
    CVec v = s.amps();
    apply_matrix(v, s.n_qubits(), app.gate.matrix, app.targets);
    return StateVector::unchecked(s.n_qubits(), v);
}

double phase_distance(const CMat &a, const CMat &b) {
    return 1 - std::abs((a.adjoint() * b).trace()) / (double)a.rows();
}

}  // namespace qtk
