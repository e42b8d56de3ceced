#include "qtk/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qtk/stateprep.hpp"

namespace qtk {

namespace {

int bit_length(uint64_t x) {
    int n = 0;
    while (x) {
        n++;
        x >>= 1;
    }
    return n;
}

int qubits_for(size_t n_items) { return std::max(1, bit_length(n_items > 1 ? n_items - 1 : 1)); }

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) { return (uint64_t)((unsigned __int128)a * b % m); }

uint64_t powmod(uint64_t b, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

std::vector<int> range(int from, int to) {
    std::vector<int> v;
    for (int i = from; i < to; i++) {
        v.push_back(i);
    }
    return v;
}

// Marginal distribution over the first `width` qubits of a state.
std::vector<double> leading_marginal(const StateVector &s, int width) {
    std::vector<double> p((size_t)1 << width, 0.0);
    int rest = s.n_qubits() - width;
    for (uint64_t i = 0; i < s.dim(); i++) {
        p[i >> rest] += std::norm(s[i]);
    }
    return p;
}

}  // namespace

// ---- Grover and Bernstein-Vazirani -----------------------------------------

GroverResult grover_search(const std::function<bool(uint64_t)> &marked, int n, Rng &rng, bool ceil_iterations) {
    if (n < 1) {
        throw QtkError("grover_search needs at least one qubit");
    }
    Oracle o = make_oracle(n, marked);
    uint64_t n_marked = 0;
    for (uint64_t x = 0; x < (1ULL << n); x++) {
        n_marked += marked(x);
    }
    if (n_marked == 0) {
        throw QtkError("grover_search: predicate marks nothing");
    }
    int k = grover_iterations(1ULL << n, n_marked, ceil_iterations);
    Gate g = grover_operator(o);

    Circuit c(n + 1);
    c.add("x", {n});
    for (int q = 0; q <= n; q++) {
        c.add("h", {q});
    }
    for (int i = 0; i < k; i++) {
        c.add_gate(g, range(0, n + 1));
    }
    StateVector out = run_statevector(c);
    auto p = leading_marginal(out, n);
    GroverResult r;
    r.iterations = k;
    for (uint64_t x = 0; x < p.size(); x++) {
        if (marked(x)) {
            r.success_probability += p[x];
        }
    }
    r.bits = index_to_bits(sample_index(p, rng), n);
    return r;
}

Oracle make_bv_oracle(const std::string &hidden) {
    uint64_t s = bits_to_index(hidden);
    return make_oracle((int)hidden.size(), [s](uint64_t x) { return __builtin_popcountll(s & x) % 2 == 1; });
}

BvResult bv_hidden_string(const Oracle &s_oracle, Rng &rng) {
    int n = s_oracle.n_inputs;
    Circuit c(n + 1);
    c.add("x", {n});
    for (int q = 0; q <= n; q++) {
        c.add("h", {q});
    }
    c.add_gate(s_oracle.realized_gate, range(0, n + 1));
    for (int q = 0; q < n; q++) {
        c.add("h", {q});
    }
    BvResult r;
    for (const Op &op : c.ops) {
        r.oracle_calls += op.kind == Op::Kind::Gate && op.gate.name == s_oracle.realized_gate.name;
    }
    auto p = leading_marginal(run_statevector(c), n);
    uint64_t x = sample_index(p, rng);
    r.bits = index_to_bits(x, n);
    r.probability = p[x];
    return r;
}

// ---- Shor ------------------------------------------------------------------

uint64_t period_find_classical(uint64_t k, uint64_t n) {
    if (n < 1 || std::gcd(k, n) != 1) {
        throw QtkError("period_find_classical: base must be coprime to the modulus");
    }
    uint64_t v = k % n, r = 1;
    while (v != 1 % n) {
        v = mulmod(v, k, n);
        r++;
    }
    return r;
}

Circuit shor15_compiled_circuit() {
    Circuit c(5, 3);
    c.add("h", {0}).add("h", {1}).add("h", {2});
    c.add("cx", {2, 3}).add("cx", {2, 4});
    c.add("h", {1});
    c.add("cp", {1, 0}, {kPi / 2});
    c.add("h", {0});
    c.add("cp", {1, 2}, {kPi / 4});
    c.add("cp", {0, 2}, {kPi / 2});
    c.measure(0, 0).measure(1, 1).measure(2, 2);
    return c;
}

std::map<uint64_t, double> shor15_register_distribution() {
    StateVector s = run_statevector(shor15_compiled_circuit());
    std::map<uint64_t, double> out;
    for (uint64_t i = 0; i < s.dim(); i++) {
        double p = std::norm(s[i]);
        if (p < 1e-15) {
            continue;
        }
        uint64_t q0 = (i >> 4) & 1, q1 = (i >> 3) & 1, q2 = (i >> 2) & 1;
        out[4 * q2 + 2 * q1 + q0] += p;
    }
    return out;
}

Circuit period_finding_circuit(uint64_t k, uint64_t n) {
    if (n < 3 || std::gcd(k, n) != 1) {
        throw QtkError("period_finding_circuit: need n >= 3 and gcd(k, n) = 1");
    }
    int w = bit_length(n);
    int m = 2 * w;
    Circuit c(m + w);
    for (int i = 0; i < m; i++) {
        c.add("h", {i});
    }
    c.add("x", {m + w - 1});
    Eigen::Index dw = (Eigen::Index)1 << w;
    std::vector<int> work = range(m, m + w);
    for (int i = 0; i < m; i++) {
        uint64_t a = powmod(k, 1ULL << (m - 1 - i), n);
        CMat perm = CMat::Zero(dw, dw);
        for (Eigen::Index y = 0; y < dw; y++) {
            Eigen::Index to = (uint64_t)y < n ? (Eigen::Index)mulmod(a, (uint64_t)y, n) : y;
            perm(to, y) = 1;
        }
        std::vector<int> targets{i};
        targets.insert(targets.end(), work.begin(), work.end());
        c.add_gate(controlled(gate_from_matrix(perm, "mul" + std::to_string(a))), targets);
    }
    append_qft(c, range(0, m), true);
    return c;
}

std::vector<double> period_finding_distribution(uint64_t k, uint64_t n) {
    Circuit c = period_finding_circuit(k, n);
    return leading_marginal(run_statevector(c), 2 * bit_length(n));
}

std::optional<uint64_t> period_from_measurement(uint64_t y, int m_bits, uint64_t k, uint64_t n) {
    if (y == 0) {
        return std::nullopt;
    }
    // Convergents p/q of y / 2^m.
    uint64_t num = y, den = 1ULL << m_bits;
    uint64_t q_prev = 1, q_cur = 0;
    while (den != 0) {
        uint64_t a = num / den;
        uint64_t q_next = a * q_cur + q_prev;
        if (q_next >= n) {
            break;
        }
        q_prev = q_cur;
        q_cur = q_next;
        for (uint64_t mult = 1; mult * q_cur < n; mult++) {
            if (powmod(k, mult * q_cur, n) == 1) {
                return mult * q_cur;
            }
        }
        uint64_t rem = num - a * den;
        num = den;
        den = rem;
    }
    return std::nullopt;
}

ShorResult shor_factor(uint64_t n, Rng &rng, uint64_t base) {
    if (n < 4) {
        throw QtkError("shor_factor: N must be at least 4");
    }
    ShorResult r;
    if (n % 2 == 0) {
        r.factor1 = 2;
        r.factor2 = n / 2;
        r.method = "even";
        return r;
    }
    bool prime = true;
    for (uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d == 0) {
            prime = false;
            break;
        }
    }
    if (prime) {
        r.factor1 = 1;
        r.factor2 = n;
        r.method = "prime";
        return r;
    }
    for (int b = 2; b <= bit_length(n); b++) {
        auto root = (uint64_t)std::llround(std::pow((double)n, 1.0 / b));
        for (uint64_t cand = root > 0 ? root - 1 : 0; cand <= root + 1; cand++) {
            uint64_t p = 1;
            for (int e = 0; e < b && p <= n; e++) {
                p *= cand;
            }
            if (cand > 1 && p == n) {
                r.factor1 = cand;
                r.factor2 = n / cand;
                r.method = "prime-power";
                return r;
            }
        }
    }

    if (base != 0 && (base < 2 || base >= n)) {
        throw QtkError("shor_factor: base must lie in [2, N)");
    }
    int m = 2 * bit_length(n);
    std::map<uint64_t, std::vector<double>> cache;
    for (r.attempts = 1; r.attempts <= 64; r.attempts++) {
        uint64_t k = base != 0 ? base : 2 + rng.below(n - 3);
        r.base = k;
        uint64_t g = std::gcd(k, n);
        if (g > 1) {
            r.factor1 = std::min(g, n / g);
            r.factor2 = std::max(g, n / g);
            r.method = "gcd";
            return r;
        }
        auto it = cache.find(k);
        if (it == cache.end()) {
            it = cache.emplace(k, period_finding_distribution(k, n)).first;
        }
        uint64_t y = sample_index(it->second, rng);
        r.measurements.push_back(y);
        auto period = period_from_measurement(y, m, k, n);
        if (!period) {
            continue;
        }
        r.period = *period;
        if (*period % 2 == 1) {
            continue;
        }
        uint64_t half = powmod(k, *period / 2, n);
        if (half == n - 1) {
            continue;
        }
        uint64_t f = std::gcd(half + 1, n);
        if (f == 1 || f == n) {
            f = std::gcd(half + n - 1, n);
        }
        if (f == 1 || f == n) {
            continue;
        }
        r.factor1 = std::min(f, n / f);
        r.factor2 = std::max(f, n / f);
        r.method = "quantum";
        return r;
    }
    throw ExecutionError("shor_factor: no factor found after 64 attempts");
}

// ---- HHL -------------------------------------------------------------------

void HhlProblem::validate() const {
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw QtkError("HHL matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    if (std::abs(es.eigenvalues()[0] - 1) > 1e-9 || std::abs(es.eigenvalues()[1] - 2) > 1e-9) {
        throw QtkError("HHL matrix eigenvalues must be 1 and 2");
    }
    if (std::abs(b.norm() - 1) > 1e-10) {
        throw QtkError("HHL right-hand side must be a unit vector");
    }
}

HhlProblem HhlProblem::standard(const Eigen::Vector2cd &b) {
    HhlProblem p;
    p.a << 1.5, 0.5, 0.5, 1.5;
    p.b = b;
    p.validate();
    return p;
}

Circuit hhl_circuit(const HhlProblem &p) {
    p.validate();
    const double c_const = 1.0;
    Circuit c(4);
    Circuit b_prep = prep_single(p.b[0], p.b[1]).circuit;
    c.append(b_prep, {3});
    // U = e^{iA pi/2} has eigenphase e^{2 pi i lambda / 4}, so two clock
    // qubits hold lambda in {1, 2} exactly.
    Gate u = exp_hermitian_gate(p.a.cast<cplx>(), -kPi / 2);
    u.name = "eiA";
    Gate u2{1, u.matrix * u.matrix, "eiA^2", {}};
    Gate u_dg{1, u.matrix.adjoint(), "eiA_dg", {}};
    Gate u2_dg{1, u2.matrix.adjoint(), "eiA^2_dg", {}};

    c.add("h", {1}).add("h", {2});
    c.add_gate(controlled(u2), {1, 3});
    c.add_gate(controlled(u), {2, 3});
    append_qft(c, {1, 2}, true);
    // Clock |01> is lambda = 1, |10> is lambda = 2.
    c.add_gate(controlled(standard_gate("ry", {2 * std::asin(c_const / 1)})), {2, 0});
    c.add_gate(controlled(standard_gate("ry", {2 * std::asin(c_const / 2)})), {1, 0});
    append_qft(c, {1, 2}, false);
    c.add_gate(controlled(u_dg), {2, 3});
    c.add_gate(controlled(u2_dg), {1, 3});
    c.add("h", {1}).add("h", {2});
    return c;
}

HhlResult hhl_solve(const HhlProblem &p, char observable, int shots, Rng &rng) {
    if (observable != 'X' && observable != 'Y' && observable != 'Z') {
        throw QtkError("HHL observable must be X, Y or Z");
    }
    if (shots < 0) {
        throw QtkError("negative shot count");
    }
    Circuit c = hhl_circuit(p);
    if (observable == 'X') {
        c.add("h", {3});
    } else if (observable == 'Y') {
        c.add("sdg", {3}).add("h", {3});
    }
    StateVector out = run_statevector(c);
    // Ancilla is qubit 0, system is qubit 3.
    double p_keep = 0, p_plus = 0;
    std::array<double, 4> joint{};  // (ancilla, system)
    for (uint64_t i = 0; i < out.dim(); i++) {
        double pr = std::norm(out[i]);
        int anc = (int)((i >> 3) & 1), sys = (int)(i & 1);
        joint[2 * anc + sys] += pr;
    }
    p_keep = joint[2] + joint[3];
    p_plus = joint[2];
    HhlResult r;
    r.postselect_probability = p_keep;
    if (p_keep <= 0) {
        throw ExecutionError("HHL post-selection has zero probability");
    }
    if (shots == 0) {
        r.value = (2 * p_plus - p_keep) / p_keep;
        return r;
    }
    std::vector<double> jp(joint.begin(), joint.end());
    int plus = 0;
    int raw_cap = 64 * shots;
    while (r.kept_shots < shots && r.raw_shots < raw_cap) {
        uint64_t k = sample_index(jp, rng);
        r.raw_shots++;
        if (k >= 2) {
            r.kept_shots++;
            plus += k == 2;
        }
    }
    if (r.kept_shots == 0) {
        throw ExecutionError("HHL post-selection yielded zero shots");
    }
    r.value = (2.0 * plus - r.kept_shots) / r.kept_shots;
    return r;
}

// ---- Quantum walk ----------------------------------------------------------

StateVector quantum_walk_state(int n_nodes, int steps, int start) {
    int k = bit_length((uint64_t)n_nodes) - 1;
    if (n_nodes < 2 || (1 << k) != n_nodes) {
        throw QtkError("quantum walk needs a power-of-two cycle length >= 2");
    }
    if (start < 0 || start >= n_nodes || steps < 0) {
        throw QtkError("quantum walk: bad start node or step count");
    }
    Eigen::Index d = (Eigen::Index)2 * n_nodes;
    CMat shift = CMat::Zero(d, d);
    for (int node = 0; node < n_nodes; node++) {
        for (int coin = 0; coin < 2; coin++) {
            int next = (node + (coin ? 1 : -1) + n_nodes) % n_nodes;
            shift(2 * next + (coin ^ 1), 2 * node + coin) = 1;
        }
    }
    Gate s = gate_from_matrix(shift, "shift");
    Circuit c(k + 1);
    for (int step = 0; step < steps; step++) {
        c.add("h", {k});
        c.add_gate(s, range(0, k + 1));
    }
    return run_statevector(c, StateVector::basis(k + 1, (uint64_t)start << 1));
}

std::map<std::string, double> quantum_walk_cycle(int n_nodes, int steps, int start, int shots, Rng &rng) {
    StateVector s = quantum_walk_state(n_nodes, steps, start);
    auto p = s.probabilities();
    std::map<std::string, double> out;
    if (shots <= 0) {
        for (uint64_t i = 0; i < p.size(); i++) {
            if (p[i] > 1e-15) {
                out[index_to_bits(i, s.n_qubits())] = p[i];
            }
        }
        return out;
    }
    for (int k = 0; k < shots; k++) {
        out[index_to_bits(sample_index(p, rng), s.n_qubits())] += 1.0 / shots;
    }
    return out;
}

// ---- QAOA ------------------------------------------------------------------

void MaxCutInstance::validate() const {
    if (n_nodes < 1) {
        throw QtkError("graph needs at least one node");
    }
    if (edges.empty()) {
        throw QtkError("graph has no edges");
    }
    for (auto [a, b] : edges) {
        if (a == b || a < 0 || b < 0 || a >= n_nodes || b >= n_nodes) {
            throw QtkError("invalid graph edge");
        }
    }
}

MaxCutInstance MaxCutInstance::single_edge() { return {2, {{0, 1}}}; }
MaxCutInstance MaxCutInstance::triangle() { return {3, {{0, 1}, {1, 2}, {0, 2}}}; }
MaxCutInstance MaxCutInstance::paw() { return {4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}}; }

MaxCutInstance MaxCutInstance::named(const std::string &name) {
    if (name == "edge") {
        return single_edge();
    }
    if (name == "triangle") {
        return triangle();
    }
    if (name == "paw" || name == "triangle+edge") {
        return paw();
    }
    throw QtkError("unknown graph '" + name + "'");
}

int cut_value(const MaxCutInstance &g, uint64_t x) {
    int n = g.n_nodes, cut = 0;
    for (auto [a, b] : g.edges) {
        cut += ((x >> (n - 1 - a)) & 1) != ((x >> (n - 1 - b)) & 1);
    }
    return cut;
}

namespace {

void check_qaoa(const MaxCutInstance &g, const QaoaParams &p) {
    g.validate();
    if (g.edges.empty()) {
        throw QtkError("QAOA needs at least one edge");
    }
    if (p.gamma.size() != p.beta.size() || p.gamma.empty()) {
        throw QtkError("QAOA needs r >= 1 matching gamma and beta angles");
    }
}

QaoaResult summarize_cuts(const MaxCutInstance &g, const std::vector<double> &probs) {
    QaoaResult r;
    for (uint64_t x = 0; x < probs.size(); x++) {
        r.max_cut = std::max(r.max_cut, cut_value(g, x));
    }
    for (uint64_t x = 0; x < probs.size(); x++) {
        int cv = cut_value(g, x);
        r.expected_cut += probs[x] * cv;
        r.cut_distribution[cv] += probs[x];
        if (cv == r.max_cut) {
            r.prob_max_cut += probs[x];
        }
    }
    return r;
}

}  // namespace

StateVector qaoa_state(const MaxCutInstance &g, const QaoaParams &p) {
    check_qaoa(g, p);
    int n = g.n_nodes;
    CMat zz = Observable::pauli("ZZ").matrix;
    CMat clause = (CMat::Identity(4, 4) - zz) / 2;
    CMat x = Observable::pauli("X").matrix;
    Circuit c(n);
    for (int q = 0; q < n; q++) {
        c.add("h", {q});
    }
    for (int k = 0; k < p.rounds(); k++) {
        Gate edge = exp_hermitian_gate(clause, p.gamma[k]);
        edge.name = "cost";
        Gate mix = exp_hermitian_gate(x, p.beta[k]);
        mix.name = "mix";
        for (auto [a, b] : g.edges) {
            c.add_gate(edge, {a, b});
        }
        for (int q = 0; q < n; q++) {
            c.add_gate(mix, {q});
        }
    }
    return run_statevector(c);
}

QaoaResult qaoa_maxcut(const MaxCutInstance &g, const QaoaParams &p, int shots, Rng &rng) {
    auto probs = qaoa_state(g, p).probabilities();
    if (shots > 0) {
        std::vector<double> freq(probs.size(), 0.0);
        for (int k = 0; k < shots; k++) {
            freq[sample_index(probs, rng)] += 1.0 / shots;
        }
        return summarize_cuts(g, freq);
    }
    return summarize_cuts(g, probs);
}

GridSearchResult qaoa_grid_search(const MaxCutInstance &g, int r, double resolution) {
    g.validate();
    if (r < 1 || resolution <= 0) {
        throw QtkError("grid search needs r >= 1 and a positive resolution");
    }
    double ng = 2 * kPi / resolution, nb = kPi / resolution;
    if (std::abs(ng - std::round(ng)) > 1e-6 || std::abs(nb - std::round(nb)) > 1e-6) {
        throw QtkError("resolution must divide the angle ranges");
    }
    uint64_t steps_g = (uint64_t)std::llround(ng), steps_b = (uint64_t)std::llround(nb);
    double total = std::pow((double)steps_g * (double)steps_b, r);
    if (total > 1e7) {
        throw QtkError("grid too large");
    }
    int n = g.n_nodes;
    uint64_t dim = 1ULL << n;
    std::vector<double> cuts(dim);
    for (uint64_t x = 0; x < dim; x++) {
        cuts[x] = cut_value(g, x);
    }
    // Fast path of qaoa_state: the cost layer is the diagonal e^{-i gamma cut(x)}
    // and the mixer is Rx(2 beta) on every qubit.
    auto expected = [&](const std::vector<double> &gam, const std::vector<double> &bet) {
        CVec v = CVec::Constant((Eigen::Index)dim, cplx(1 / std::sqrt((double)dim)));
        for (int k = 0; k < r; k++) {
            for (uint64_t x = 0; x < dim; x++) {
                v[(Eigen::Index)x] *= std::polar(1.0, -gam[k] * cuts[x]);
            }
            CMat rx = rx_matrix(2 * bet[k]);
            for (int q = 0; q < n; q++) {
                apply_matrix(v, n, rx, {q});
            }
        }
        double e = 0;
        for (uint64_t x = 0; x < dim; x++) {
            e += std::norm(v[(Eigen::Index)x]) * cuts[x];
        }
        return e;
    };
    GridSearchResult best;
    best.expected_cut = -1;
    std::vector<uint64_t> idx(2 * r, 0);  // gamma indices then beta indices
    std::vector<double> gam(r), bet(r);
    while (true) {
        for (int k = 0; k < r; k++) {
            gam[k] = (double)idx[k] * resolution;
            bet[k] = (double)idx[r + k] * resolution;
        }
        double e = expected(gam, bet);
        best.points++;
        if (e > best.expected_cut + 1e-12) {
            best.expected_cut = e;
            best.params = {gam, bet};
        }
        int pos = 2 * r - 1;
        while (pos >= 0) {
            uint64_t lim = pos < r ? steps_g : steps_b;
            if (++idx[pos] < lim) {
                break;
            }
            idx[pos] = 0;
            pos--;
        }
        if (pos < 0) {
            break;
        }
    }
    return best;
}

// ---- Transverse Ising VQE --------------------------------------------------

void IsingModel::validate() const {
    if (n_spins < 2) {
        throw QtkError("Ising chain needs at least two spins");
    }
}

namespace {

std::vector<std::pair<int, int>> bonds(const IsingModel &m) {
    std::vector<std::pair<int, int>> b;
    for (int i = 0; i < m.n_spins; i++) {
        if (i + 1 < m.n_spins) {
            b.push_back({i, i + 1});
        } else if (m.periodic) {
            b.push_back({i, 0});
        }
    }
    return b;
}

double z_sign(uint64_t x, int n, int q) { return ((x >> (n - 1 - q)) & 1) ? -1.0 : 1.0; }

}  // namespace

double exact_ising_ground(const IsingModel &m) {
    m.validate();
    if (m.n_spins > 12) {
        throw QtkError("exact_ising_ground: at most 12 spins");
    }
    int n = m.n_spins;
    Eigen::Index d = (Eigen::Index)1 << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    auto bl = bonds(m);
    for (Eigen::Index x = 0; x < d; x++) {
        for (auto [i, j] : bl) {
            h(x, x) -= z_sign(x, n, i) * z_sign(x, n, j);
        }
        for (int q = 0; q < n; q++) {
            h(x ^ ((Eigen::Index)1 << (n - 1 - q)), x) -= m.h;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

double bond_energy(const std::array<double, 4> &joint) { return -(joint[0] + joint[3] - joint[1] - joint[2]); }

namespace {

struct IsingParts {
    std::vector<double> zz;  // per bond
    std::vector<double> x;   // per spin
    std::vector<double> z;
};

IsingParts ising_parts(const IsingModel &m, const StateVector &s) {
    int n = m.n_spins;
    IsingParts parts;
    auto p = s.probabilities();
    for (auto [i, j] : bonds(m)) {
        std::array<double, 4> joint{};
        for (uint64_t x = 0; x < p.size(); x++) {
            int bi = (int)((x >> (n - 1 - i)) & 1), bj = (int)((x >> (n - 1 - j)) & 1);
            joint[2 * bi + bj] += p[x];
        }
        parts.zz.push_back(-bond_energy(joint));
    }
    for (int q = 0; q < n; q++) {
        uint64_t bit = 1ULL << (n - 1 - q);
        cplx ex = 0;
        double ez = 0;
        for (uint64_t x = 0; x < s.dim(); x++) {
            ex += std::conj(s[x]) * s[x ^ bit];
            ez += p[x] * z_sign(x, n, q);
        }
        parts.x.push_back(ex.real());
        parts.z.push_back(ez);
    }
    return parts;
}

double sampled_ising_energy(const IsingModel &m, const StateVector &s, int shots, Rng &rng) {
    int n = m.n_spins;
    auto pz = s.probabilities();
    CVec xv = s.amps();
    CMat h = standard_gate("h").matrix;
    for (int q = 0; q < n; q++) {
        apply_matrix(xv, n, h, {q});
    }
    std::vector<double> px(pz.size());
    for (size_t i = 0; i < px.size(); i++) {
        px[i] = std::norm(xv[(Eigen::Index)i]);
    }
    auto bl = bonds(m);
    std::vector<std::array<double, 4>> joints(bl.size());
    std::vector<double> xsum(n, 0.0);
    for (int k = 0; k < shots; k++) {
        uint64_t zx = sample_index(pz, rng);
        for (size_t b = 0; b < bl.size(); b++) {
            int bi = (int)((zx >> (n - 1 - bl[b].first)) & 1), bj = (int)((zx >> (n - 1 - bl[b].second)) & 1);
            joints[b][2 * bi + bj] += 1.0 / shots;
        }
        uint64_t xx = sample_index(px, rng);
        for (int q = 0; q < n; q++) {
            xsum[q] += z_sign(xx, n, q) / shots;
        }
    }
    double e = 0;
    for (auto &j : joints) {
        e += bond_energy(j);
    }
    for (double v : xsum) {
        e -= m.h * v;
    }
    return e;
}

std::vector<double> pack(const AnsatzParams &p) {
    std::vector<double> v = p.thetas;
    if (p.kind == AnsatzKind::Entangled) {
        v.push_back(p.theta0);
        v.push_back(p.phi0);
    }
    return v;
}

AnsatzParams unpack(AnsatzKind kind, int n, const std::vector<double> &v) {
    AnsatzParams p;
    p.kind = kind;
    p.thetas.assign(v.begin(), v.begin() + n);
    if (kind == AnsatzKind::Entangled) {
        p.theta0 = v[n];
        p.phi0 = v[n + 1];
    }
    return p;
}

}  // namespace

double ising_energy(const IsingModel &m, const StateVector &s) {
    m.validate();
    if (s.n_qubits() != m.n_spins) {
        throw QtkError("ising_energy: state width mismatch");
    }
    IsingParts parts = ising_parts(m, s);
    double e = 0;
    for (double v : parts.zz) {
        e -= v;
    }
    for (double v : parts.x) {
        e -= m.h * v;
    }
    return e;
}

StateVector ansatz_state(const AnsatzParams &p) {
    int n = (int)p.thetas.size();
    if (n < 1) {
        throw QtkError("ansatz needs at least one angle");
    }
    Circuit c(n);
    for (int q = 0; q < n; q++) {
        c.add("ry", {q}, {p.thetas[q]});
    }
    StateVector psi = run_statevector(c);
    if (p.kind == AnsatzKind::Product) {
        return psi;
    }
    // alpha |Psi> + beta Rx(pi)^{(x)n} |Psi>
    Circuit flip(n);
    for (int q = 0; q < n; q++) {
        flip.add("rx", {q}, {kPi});
    }
    StateVector flipped = run_statevector(flip, psi);
    cplx alpha = std::cos(p.theta0 / 2);
    cplx beta = std::polar(std::sin(p.theta0 / 2), p.phi0);
    CVec v = alpha * psi.amps() + beta * flipped.amps();
    if (v.norm() < 1e-12) {
        return psi;
    }
    return StateVector::normalized(n, v);
}

VqeResult vqe_ising(const IsingModel &m, AnsatzKind kind, const VqeConfig &cfg, Rng &rng) {
    m.validate();
    int n = m.n_spins;
    AnsatzParams start;
    start.kind = kind;
    start.thetas.assign(n, 0.3);
    start.theta0 = kPi / 2;
    start.phi0 = 0;
    std::vector<double> x = pack(start);
    auto energy = [&](const std::vector<double> &v) { return ising_energy(m, ansatz_state(unpack(kind, n, v))); };

    VqeResult r;
    double e = energy(x);
    r.energy_trace.push_back(e);
    double tau = cfg.tau0;
    std::vector<double> grad(x.size());
    for (r.iterations = 0; r.iterations < cfg.max_iterations; r.iterations++) {
        double gmax = 0;
        for (size_t i = 0; i < x.size(); i++) {
            std::vector<double> up = x, dn = x;
            up[i] += cfg.fd_step;
            dn[i] -= cfg.fd_step;
            grad[i] = (energy(up) - energy(dn)) / (2 * cfg.fd_step);
            gmax = std::max(gmax, std::abs(grad[i]));
        }
        if (gmax < cfg.grad_tol) {
            r.converged = true;
            break;
        }
        // Relaxation step tau0 d(theta)/dt = -dE/d(theta), halved when it
        // would raise the energy.
        while (true) {
            std::vector<double> trial = x;
            for (size_t i = 0; i < x.size(); i++) {
                trial[i] -= tau * grad[i];
            }
            double et = energy(trial);
            if (et <= e) {
                x = trial;
                e = et;
                r.energy_trace.push_back(e);
                break;
            }
            tau /= 2;
            if (tau < 1e-14) {
                break;
            }
        }
        if (tau < 1e-14) {
            break;
        }
    }
    r.params = unpack(kind, n, x);
    r.energy = e;
    StateVector s = ansatz_state(r.params);
    IsingParts parts = ising_parts(m, s);
    r.magnetization_x = std::accumulate(parts.x.begin(), parts.x.end(), 0.0) / n;
    r.magnetization_z = std::accumulate(parts.z.begin(), parts.z.end(), 0.0) / n;
    if (cfg.shots > 0) {
        r.sampled_energy = sampled_ising_energy(m, s, cfg.shots, rng);
    }
    return r;
}

// ---- Split-operator Schrodinger evolution ----------------------------------

StateVector schrodinger_evolve(const StateVector &initial, const std::vector<double> &potential_phase, double phi,
                               int steps) {
    int n = initial.n_qubits();
    if (n < 1 || steps < 0) {
        throw QtkError("schrodinger_evolve: need n >= 1 and steps >= 0");
    }
    uint64_t dim = initial.dim();
    if (!potential_phase.empty() && potential_phase.size() != dim) {
        throw QtkError("potential needs one phase per grid point");
    }
    // Kinetic phase (phi/4) s^2 with s = 1 + sum_k 2^{n-k} z_k, z_k = +-1,
    // qubit 0 carrying the largest weight.
    std::vector<double> kinetic(dim);
    for (uint64_t x = 0; x < dim; x++) {
        double s = 1;
        for (int k = 1; k <= n; k++) {
            s += std::ldexp(1.0, n - k) * z_sign(x, n, k - 1);
        }
        kinetic[x] = phi / 4 * s * s;
    }
    CVec phase_k(dim), phase_v(dim);
    for (uint64_t x = 0; x < dim; x++) {
        phase_k[(Eigen::Index)x] = std::polar(1.0, -kinetic[x]);
        phase_v[(Eigen::Index)x] = std::polar(1.0, potential_phase.empty() ? 0.0 : -potential_phase[x]);
    }
    Gate gk{n, CMat(phase_k.asDiagonal()), "kinetic", {}};
    Gate gv{n, CMat(phase_v.asDiagonal()), "potential", {}};
    std::vector<int> all = range(0, n);
    Circuit step(n);
    append_qft(step, all, false);
    step.add("x", {0});
    step.add_gate(gk, all);
    step.add("x", {0});
    append_qft(step, all, true);
    step.add_gate(gv, all);
    StateVector s = initial;
    for (int i = 0; i < steps; i++) {
        s = run_statevector(step, s);
    }
    return s;
}

// ---- Minimum finding and layered partitioning ------------------------------

double min_find_budget(size_t n_items) {
    double lg = std::log2((double)n_items);
    return 22.5 * std::sqrt((double)n_items) + 1.4 * lg * lg;
}

MinFindResult min_find(const std::vector<double> &values, Rng &rng) {
    if (values.empty()) {
        throw QtkError("min_find: empty list");
    }
    size_t n_items = values.size();
    MinFindResult r;
    r.index = (size_t)rng.below(n_items);
    if (n_items == 1) {
        return r;
    }
    int n = qubits_for(n_items);
    // Each search costs its Grover iterations plus one per measurement round,
    // so the loop ends even when searches succeed without iterating.
    int budget = (int)std::floor(min_find_budget(n_items));
    int spent = 0;
    while (spent < budget) {
        size_t pivot = r.index;
        Oracle o;
        o.n_inputs = n;
        o.predicate = [&values, pivot, n_items](uint64_t i) { return i < n_items && values[i] <= values[pivot]; };
        BoyerResult b = boyer_search(o, rng, budget - spent);
        r.searches++;
        r.grover_iterations += b.grover_iterations;
        spent += b.grover_iterations + b.rounds;
        if (b.found && values[*b.found] <= values[pivot]) {
            r.index = (size_t)*b.found;
        }
    }
    return r;
}

LayerResult layered_partition(const std::vector<std::vector<bool>> &adjacency, int source, Rng &rng) {
    int n_nodes = (int)adjacency.size();
    if (n_nodes < 1 || n_nodes > 16) {
        throw QtkError("layered_partition: 1 to 16 nodes supported");
    }
    for (const auto &row : adjacency) {
        if ((int)row.size() != n_nodes) {
            throw QtkError("adjacency matrix must be square");
        }
    }
    if (source < 0 || source >= n_nodes) {
        throw QtkError("source node out of range");
    }
    LayerResult r;
    r.layers.assign(n_nodes, kUnreached);
    r.layers[source] = 0;
    int n = qubits_for((size_t)n_nodes);
    const int give_up_after = 20;
    for (int depth = 0;; depth++) {
        std::vector<int> frontier;
        for (int v = 0; v < n_nodes; v++) {
            if (r.layers[v] == depth) {
                frontier.push_back(v);
            }
        }
        if (frontier.empty()) {
            break;
        }
        for (int x : frontier) {
            int misses = 0;
            while (misses < give_up_after) {
                Oracle o;
                o.n_inputs = n;
                o.predicate = [&, x](uint64_t y) {
                    return y < (uint64_t)n_nodes && adjacency[x][y] && r.layers[y] == kUnreached;
                };
                BoyerResult b = boyer_search(o, rng);
                r.searches++;
                if (b.found) {
                    r.layers[*b.found] = depth + 1;
                    misses = 0;
                } else {
                    misses++;
                }
            }
        }
    }
    r.connected = std::find(r.layers.begin(), r.layers.end(), kUnreached) == r.layers.end();
    return r;
}

// ---- Group representations -------------------------------------------------

void FiniteGroup::validate() const {
    if (order < 1 || (int)table.size() != order) {
        throw QtkError("group table must be order x order");
    }
    for (const auto &row : table) {
        if ((int)row.size() != order) {
            throw QtkError("group table must be order x order");
        }
        for (int v : row) {
            if (v < 0 || v >= order) {
                throw QtkError("group table is not closed");
            }
        }
    }
    int e = identity();
    for (int a = 0; a < order; a++) {
        bool has_inverse = false;
        for (int b = 0; b < order; b++) {
            has_inverse |= table[a][b] == e && table[b][a] == e;
            for (int c = 0; c < order; c++) {
                if (table[table[a][b]][c] != table[a][table[b][c]]) {
                    throw QtkError("group table is not associative");
                }
            }
        }
        if (!has_inverse) {
            throw QtkError("group element without inverse");
        }
    }
}

int FiniteGroup::identity() const {
    for (int e = 0; e < order; e++) {
        bool ok = true;
        for (int a = 0; a < order && ok; a++) {
            ok = table[e][a] == a && table[a][e] == a;
        }
        if (ok) {
            return e;
        }
    }
    throw QtkError("group table has no identity");
}

FiniteGroup FiniteGroup::cyclic(int n) {
    if (n < 1) {
        throw QtkError("cyclic group order must be positive");
    }
    FiniteGroup g;
    g.order = n;
    g.table.assign(n, std::vector<int>(n));
    for (int a = 0; a < n; a++) {
        g.labels.push_back("a" + std::to_string(a));
        for (int b = 0; b < n; b++) {
            g.table[a][b] = (a + b) % n;
        }
    }
    return g;
}

FiniteGroup FiniteGroup::symmetric3() {
    const std::vector<std::array<int, 3>> perms = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
    FiniteGroup g;
    g.order = 6;
    g.table.assign(6, std::vector<int>(6));
    for (int a = 0; a < 6; a++) {
        g.labels.push_back("s" + std::to_string(a + 1));
        for (int b = 0; b < 6; b++) {
            std::array<int, 3> c{};
            for (int i = 0; i < 3; i++) {
                c[i] = perms[b][perms[a][i]];
            }
            g.table[a][b] = (int)(std::find(perms.begin(), perms.end(), c) - perms.begin());
        }
    }
    return g;
}

Gate regular_representation(const FiniteGroup &g, int element) {
    g.validate();
    if (element < 0 || element >= g.order) {
        throw QtkError("invalid group element");
    }
    int k = qubits_for((size_t)g.order);
    Eigen::Index d = (Eigen::Index)1 << k;
    CMat r = CMat::Identity(d, d);
    r.topLeftCorner(g.order, g.order).setZero();
    for (int j = 0; j < g.order; j++) {
        r(g.table[element][j], j) = 1;
    }
    std::string label = element < (int)g.labels.size() ? g.labels[element] : std::to_string(element);
    return gate_from_matrix(r, "R(" + label + ")");
}

double rep_matrix_element(const FiniteGroup &g, int element, const StateVector &psi, Part part, int shots,
                          Rng &rng) {
    return hadamard_test(regular_representation(g, element), psi, part, shots, rng).estimate;
}

// ---- Quantum PCA -----------------------------------------------------------

Circuit purity_circuit(const StateVector &purified) {
    if (purified.n_qubits() != 2) {
        throw QtkError("purity_circuit expects a two-qubit purification");
    }
    Circuit prep = prep_two_qubit(purified).circuit;
    Circuit c(5, 1);
    c.append(prep, {1, 2});
    c.append(prep, {3, 4});
    c.add("h", {0});
    c.add("cswap", {0, 1, 3});
    c.add("h", {0});
    c.measure(0, 0);
    return c;
}

PcaResult qpca_two_feature(const std::vector<double> &x1, const std::vector<double> &x2, int shots, Rng &rng) {
    if (x1.size() != x2.size() || x1.size() < 2) {
        throw QtkError("qpca_two_feature: need two equal-length feature lists of at least two samples");
    }
    size_t n = x1.size();
    double m1 = std::accumulate(x1.begin(), x1.end(), 0.0) / (double)n;
    double m2 = std::accumulate(x2.begin(), x2.end(), 0.0) / (double)n;
    PcaResult r;
    r.covariance.setZero();
    for (size_t i = 0; i < n; i++) {
        double a = x1[i] - m1, b = x2[i] - m2;
        r.covariance(0, 0) += a * a;
        r.covariance(0, 1) += a * b;
        r.covariance(1, 1) += b * b;
    }
    r.covariance(1, 0) = r.covariance(0, 1);
    r.covariance /= (double)(n - 1);
    r.trace = r.covariance.trace();
    if (r.trace <= 0) {
        throw QtkError("qpca_two_feature: covariance has zero trace");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(r.covariance);
    r.classical_eigenvalues = {es.eigenvalues()[1], es.eigenvalues()[0]};

    CMat rho = (r.covariance / r.trace).cast<cplx>();
    StateVector psi = purify(DensityMatrix(1, rho));
    Circuit c = purity_circuit(psi);
    if (shots > 0) {
        ShotHistogram h = sample(c, shots, nullptr, rng);
        r.purity = h.frequency("0") - h.frequency("1");
    } else {
        StateVector out = run_statevector(c);
        double p0 = 0;
        for (uint64_t i = 0; i < out.dim() / 2; i++) {
            p0 += std::norm(out[i]);
        }
        r.purity = 2 * p0 - 1;
    }
    double disc = std::sqrt(std::max(0.0, 2 * r.purity - 1));
    r.eigenvalues = {r.trace * (1 + disc) / 2, r.trace * (1 - disc) / 2};
    return r;
}

// ---- Potts partition function ----------------------------------------------

double potts_partition(const PottsModel &m) {
    if (m.q < 2 || m.n_vertices < 1) {
        throw QtkError("Potts model needs q >= 2 and at least one vertex");
    }
    double configs = std::pow((double)m.q, m.n_vertices);
    if (configs > 1e6) {
        throw QtkError("Potts enumeration too large");
    }
    for (auto &[i, j, w] : m.edges) {
        if (i < 0 || j < 0 || i >= m.n_vertices || j >= m.n_vertices || !std::isfinite(w)) {
            throw QtkError("invalid Potts edge");
        }
    }
    std::vector<int> sigma(m.n_vertices, 0);
    double z = 0;
    for (uint64_t c = 0; c < (uint64_t)configs; c++) {
        uint64_t v = c;
        for (int i = m.n_vertices - 1; i >= 0; i--) {
            sigma[i] = (int)(v % m.q);
            v /= m.q;
        }
        double energy = 0;
        for (auto &[i, j, w] : m.edges) {
            energy -= sigma[i] == sigma[j] ? w : 0.0;
        }
        z += std::exp(-m.beta * energy);
    }
    return z;
}

std::map<int, double> potts_qft2_gamma_distribution() {
    // Inputs q[0] = |+>, q[1] = |-> in the little-endian labelling of the
    // original circuit, so q[1] is our most significant qubit.
    Circuit c(2);
    c.add("x", {0}).add("h", {0});
    c.add("h", {1});
    c.append(qft_circuit(2));
    auto p = run_statevector(c).probabilities();
    std::map<int, double> out;
    for (int g = 0; g < 4; g++) {
        out[g] = p[g];
    }
    return out;
}

}  // namespace qtk
