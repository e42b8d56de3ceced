#include "qtk/transforms.hpp"

#include <cmath>

namespace qtk {

void append_qft(Circuit &c, const std::vector<int> &qubits, bool inverse, bool swaps) {
    int n = (int)qubits.size();
    if (n == 0) {
        throw QtkError("QFT needs at least one qubit");
    }
    Circuit f(n);
    for (int j = 0; j < n; j++) {
        f.add("h", {j});
        for (int k = j + 1; k < n; k++) {
            f.add("cp", {k, j}, {2 * kPi / (double)(1ULL << (k - j + 1))});
        }
    }
    if (swaps) {
        for (int j = 0; j < n / 2; j++) {
            f.add("swap", {j, n - 1 - j});
        }
    }
    c.append(inverse ? f.inverse() : f, qubits);
}

Circuit qft_circuit(int n, bool inverse, bool swaps) {
    if (n < 1) {
        throw QtkError("QFT needs at least one qubit");
    }
    Circuit c(n);
    std::vector<int> qs;
    for (int q = 0; q < n; q++) {
        qs.push_back(q);
    }
    append_qft(c, qs, inverse, swaps);
    return c;
}

Oracle make_oracle(int n_inputs, std::function<bool(uint64_t)> predicate) {
    if (n_inputs < 1) {
        throw QtkError("oracle needs at least one input qubit");
    }
    Eigen::Index d = (Eigen::Index)1 << (n_inputs + 1);
    CMat m = CMat::Zero(d, d);
    for (uint64_t x = 0; x < ((uint64_t)1 << n_inputs); x++) {
        Eigen::Index base = (Eigen::Index)(x << 1);
        if (predicate(x)) {
            m(base, base + 1) = m(base + 1, base) = 1;
        } else {
            m(base, base) = m(base + 1, base + 1) = 1;
        }
    }
    return {n_inputs, std::move(predicate), {n_inputs + 1, m, "oracle", {}}};
}

namespace {

CMat matrix_power(const CMat &u, uint64_t p) {
    CMat result = CMat::Identity(u.rows(), u.cols());
    CMat base = u;
    while (p) {
        if (p & 1) {
            result = result * base;
        }
        base = base * base;
        p >>= 1;
    }
    return result;
}

}  // namespace

Circuit phase_estimation_circuit(const Gate &u, int t) {
    if (t < 1) {
        throw QtkError("phase estimation needs at least one ancilla");
    }
    int k = u.arity;
    Circuit c(t + k);
    std::vector<int> sys, anc;
    for (int q = 0; q < k; q++) {
        sys.push_back(t + q);
    }
    for (int i = 0; i < t; i++) {
        anc.push_back(i);
        c.add("h", {i});
    }
    for (int i = 0; i < t; i++) {
        uint64_t power = 1ULL << (t - 1 - i);
        Gate up{k, matrix_power(u.matrix, power), u.name + "^" + std::to_string(power), {}};
        std::vector<int> targets{i};
        targets.insert(targets.end(), sys.begin(), sys.end());
        c.add_gate(controlled(up), targets);
    }
    append_qft(c, anc, true);
    return c;
}

std::vector<double> phase_estimate_distribution(const Gate &u, const StateVector &eigenstate, int t) {
    if (eigenstate.n_qubits() != u.arity) {
        throw QtkError("eigenstate width does not match the unitary");
    }
    Circuit c = phase_estimation_circuit(u, t);
    StateVector out = run_statevector(c, tensor_product(StateVector::zero(t), eigenstate));
    std::vector<double> p((size_t)1 << t, 0.0);
    uint64_t sys_dim = (uint64_t)1 << u.arity;
    for (uint64_t i = 0; i < out.dim(); i++) {
        p[i / sys_dim] += std::norm(out[i]);
    }
    return p;
}

PhaseEstimate phase_estimate(const Gate &u, const StateVector &eigenstate, int t, Rng &rng) {
    auto p = phase_estimate_distribution(u, eigenstate, t);
    uint64_t j = sample_index(p, rng);
    return {index_to_bits(j, t), (double)j / (double)(1ULL << t), t};
}

HadamardTestResult hadamard_test(const Gate &u, const StateVector &psi, Part part, int shots, Rng &rng) {
    if (psi.n_qubits() != u.arity) {
        throw QtkError("hadamard_test: state width does not match the unitary");
    }
    if (shots < 0) {
        throw QtkError("hadamard_test: negative shot count");
    }
    int k = u.arity;
    Circuit c(k + 1);
    c.add("h", {0});
    if (part == Part::Imaginary) {
        c.add("sdg", {0});  // ancilla (|0> - i|1>)/sqrt2
    }
    std::vector<int> targets{0};
    for (int q = 1; q <= k; q++) {
        targets.push_back(q);
    }
    c.add_gate(controlled(u), targets);
    c.add("h", {0});
    StateVector out = run_statevector(c, tensor_product(StateVector::zero(1), psi));
    double p0 = 0;
    for (uint64_t i = 0; i < out.dim() / 2; i++) {
        p0 += std::norm(out[i]);
    }
    if (shots > 0) {
        int zeros = 0;
        for (int s = 0; s < shots; s++) {
            zeros += rng.uniform() < p0;
        }
        p0 = (double)zeros / shots;
    }
    return {2 * p0 - 1, p0};
}

Gate grover_operator(const Oracle &o) {
    Eigen::Index d = (Eigen::Index)1 << o.n_inputs;
    CMat diffusion = CMat::Constant(d, d, cplx(2.0 / (double)d)) - CMat::Identity(d, d);
    CMat g = kron(diffusion, CMat::Identity(2, 2)) * o.realized_gate.matrix;
    return {o.n_inputs + 1, g, "grover", {}};
}

int grover_iterations(uint64_t n_items, uint64_t n_marked, bool ceil_formula) {
    if (n_items == 0 || n_marked > n_items) {
        throw QtkError("grover_iterations: bad counts");
    }
    if (ceil_formula) {
        return (int)std::ceil(kPi * std::sqrt((double)n_items) / 4);
    }
    if (n_marked == 0 || n_marked == n_items) {
        return 0;
    }
    double theta = std::asin(std::sqrt((double)n_marked / (double)n_items));
    return std::max(1, (int)std::lround(kPi / (4 * theta) - 0.5));
}

AmplifyResult amplitude_amplify(const Gate &prep, const Oracle &o, int iterations, Rng &rng) {
    int n = o.n_inputs;
    if (prep.arity != n) {
        throw QtkError("amplitude_amplify: preparation width does not match oracle");
    }
    if (iterations < 0) {
        throw QtkError("amplitude_amplify: negative iteration count");
    }
    Eigen::Index d = (Eigen::Index)1 << n;
    CMat reflect0 = -CMat::Identity(d, d);
    reflect0(0, 0) = 1;
    Gate prep_dg{n, prep.matrix.adjoint(), prep.name + "_dg", {}};
    Gate reflect{n, reflect0, "reflect0", {}};

    Circuit c(n + 1);
    std::vector<int> inputs;
    for (int q = 0; q < n; q++) {
        inputs.push_back(q);
    }
    std::vector<int> all = inputs;
    all.push_back(n);
    c.add_gate(prep, inputs);
    c.add("x", {n}).add("h", {n});
    for (int k = 0; k < iterations; k++) {
        c.add_gate(o.realized_gate, all);
        c.add_gate(prep_dg, inputs);
        c.add_gate(reflect, inputs);
        c.add_gate(prep, inputs);
    }
    StateVector out = run_statevector(c);
    std::vector<double> p((size_t)d, 0.0);
    for (uint64_t i = 0; i < out.dim(); i++) {
        p[i >> 1] += std::norm(out[i]);
    }
    AmplifyResult r;
    for (uint64_t x = 0; x < (uint64_t)d; x++) {
        if (o.predicate(x)) {
            r.success_probability += p[x];
        }
    }
    uint64_t x = sample_index(p, rng);
    r.bits = index_to_bits(x, n);
    r.marked = o.predicate(x);
    return r;
}

CVec grover_amplitudes(int n, const std::function<bool(uint64_t)> &predicate, int k) {
    uint64_t d = (uint64_t)1 << n;
    std::vector<bool> marked(d);
    for (uint64_t x = 0; x < d; x++) {
        marked[x] = predicate(x);
    }
    CVec a = CVec::Constant((Eigen::Index)d, cplx(1 / std::sqrt((double)d)));
    for (int it = 0; it < k; it++) {
        for (uint64_t x = 0; x < d; x++) {
            if (marked[x]) {
                a[(Eigen::Index)x] = -a[(Eigen::Index)x];
            }
        }
        cplx mean = a.mean();
        a = (2.0 * mean) * CVec::Ones((Eigen::Index)d) - a;
    }
    return a;
}

BoyerResult boyer_search(const Oracle &o, Rng &rng, int budget) {
    int n = o.n_inputs;
    uint64_t d = (uint64_t)1 << n;
    const double growth = 6.0 / 5.0;
    uint64_t m_max = (uint64_t)std::ceil(std::sqrt((double)d));
    uint64_t m = 1;
    int rounds_at_max = 0;
    BoyerResult r;
    while (true) {
        if (budget >= 0 && r.grover_iterations >= budget) {
            return r;
        }
        int j = (int)rng.below(m);
        if (budget >= 0) {
            j = std::min(j, budget - r.grover_iterations);
        }
        CVec a = grover_amplitudes(n, o.predicate, j);
        std::vector<double> p(d);
        for (uint64_t x = 0; x < d; x++) {
            p[x] = std::norm(a[(Eigen::Index)x]);
        }
        uint64_t x = sample_index(p, rng);
        r.grover_iterations += j;
        r.rounds++;
        if (o.predicate(x)) {
            r.found = x;
            return r;
        }
        if (m == m_max) {
            if (++rounds_at_max >= 3) {
                return r;
            }
        }
        m = std::min<uint64_t>((uint64_t)std::ceil(growth * (double)m), m_max);
    }
}

}  // namespace qtk
