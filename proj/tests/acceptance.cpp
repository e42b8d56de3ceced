// Acceptance checks: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qtk/algorithms.hpp"
#include "qtk/qec.hpp"
#include "qtk/stateprep.hpp"
#include "qtk/tomography.hpp"

using namespace qtk;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects sub-check failures for one criterion.
struct Check {
    std::vector<std::string> failures;
    std::ostringstream notes;

    void expect(bool ok, const std::string &what) {
        if (!ok) {
            failures.push_back(what);
        }
    }
    void near(double got, double want, double tol, const std::string &what) {
        if (!(std::abs(got - want) <= tol)) {
            std::ostringstream s;
            s << what << ": got " << got << ", want " << want << " +- " << tol;
            failures.push_back(s.str());
        }
    }
};

Eigen::Vector2cd vec2(cplx a, cplx b) {
    Eigen::Vector2cd v;
    v << a, b;
    return v;
}

int count_cnots(const Circuit &c) {
    int n = 0;
    for (const Op &op : c.ops) {
        n += op.kind == Op::Kind::Gate && op.gate.name == "cx";
    }
    return n;
}

double state_fidelity(const Circuit &c, const StateVector &target) {
    return std::norm(inner_product(target, run_statevector(c)));
}

double fidelity(const DensityMatrix &rho, const StateVector &psi) {
    return (psi.amps().adjoint() * rho.elems() * psi.amps())(0, 0).real();
}

void bell_sampling(Check &c) {
    auto t0 = Clock::now();
    Circuit bell(2);
    bell.add("h", {0}).add("cx", {0, 1}).measure_all();
    Rng rng(1);
    ShotHistogram h = sample(bell, 100000, nullptr, rng);
    double dt = seconds_since(t0);
    c.near(h.frequency("00"), 0.5, 0.01, "P(00)");
    c.expect(h.frequency("01") + h.frequency("10") == 0, "odd parity outcomes present");
    c.expect(dt < 1, "runtime >= 1 s");
    c.notes << "P(00)=" << h.frequency("00") << " t=" << dt << "s";
}

void grover(Check &c) {
    CVec a = grover_amplitudes(2, [](uint64_t x) { return x == 3; }, 1);
    c.near(std::norm(a[3]), 1, 1e-9, "n=2 target 11");
    double worst = 0;
    for (int n = 1; n <= 6; n++) {
        uint64_t big = 1ULL << n;
        for (uint64_t marked = 1; marked <= big; marked++) {
            auto pred = [marked](uint64_t x) { return x < marked; };
            double theta = std::asin(std::sqrt((double)marked / big));
            for (int k = 0; k <= 10; k++) {
                CVec v = grover_amplitudes(n, pred, k);
                double p = 0;
                for (uint64_t x = 0; x < marked; x++) {
                    p += std::norm(v[(Eigen::Index)x]);
                }
                worst = std::max(worst, std::abs(p - std::pow(std::sin((2 * k + 1) * theta), 2)));
            }
        }
    }
    c.near(worst, 0, 1e-10, "closed form deviation");
    c.notes << "max closed-form deviation " << worst;
}

void bernstein_vazirani(Check &c) {
    Rng rng(3);
    int runs = 0;
    for (int n = 1; n <= 8; n++) {
        for (uint64_t s = 0; s < (1ULL << n); s++) {
            std::string bits = index_to_bits(s, n);
            BvResult r = bv_hidden_string(make_bv_oracle(bits), rng);
            c.expect(r.bits == bits, "wrong string for " + bits);
            c.near(r.probability, 1, 1e-12, "probability for " + bits);
            c.expect(r.oracle_calls == 1, "oracle calls for " + bits);
            runs++;
        }
    }
    c.notes << runs << " hidden strings";
}

void qft(Check &c) {
    for (int n = 1; n <= 6; n++) {
        c.near(oracle::max_abs(circuit_unitary(qft_circuit(n)) - oracle::dft(n)), 0, 1e-10,
               "DFT n=" + std::to_string(n));
    }
    for (auto [m, r] : std::vector<std::pair<uint64_t, uint64_t>>{{8, 4}, {8, 2}, {16, 4}}) {
        int n = std::countr_zero(m);
        CVec v = CVec::Zero((Eigen::Index)m);
        for (uint64_t x = 1; x < m; x += r) {
            v[(Eigen::Index)x] = 1;
        }
        StateVector out = run_statevector(qft_circuit(n), StateVector::normalized(n, v));
        for (uint64_t y = 0; y < m; y++) {
            double p = std::norm(out[y]);
            bool on = y % (m / r) == 0;
            c.near(p, on ? 1.0 / r : 0, 1e-12, "support M=" + std::to_string(m) + " r=" + std::to_string(r));
        }
    }
}

void shor(Check &c) {
    auto dist = shor15_register_distribution();
    double both = dist[0] + dist[4];
    c.expect(both >= 0.999, "compiled N=15 mass on {0,4}");
    auto t0 = Clock::now();
    for (uint64_t n : {15, 21}) {
        Rng rng(n);
        ShorResult r = shor_factor(n, rng);
        c.expect(r.factor1 > 1 && r.factor2 > 1 && r.factor1 * r.factor2 == n, "factoring " + std::to_string(n));
        c.notes << n << "=" << r.factor1 << "x" << r.factor2 << " (" << r.method << ") ";
    }
    // Coprime bases force the period-finding circuit rather than a gcd shortcut.
    for (auto [n, base] : std::vector<std::pair<uint64_t, uint64_t>>{{15, 7}, {21, 2}}) {
        Rng rng(base);
        ShorResult r = shor_factor(n, rng, base);
        c.expect(r.method == "quantum", "base " + std::to_string(base) + " did not use period finding");
        c.expect(r.factor1 > 1 && r.factor2 > 1 && r.factor1 * r.factor2 == n, "factoring " + std::to_string(n));
        c.notes << n << "=" << r.factor1 << "x" << r.factor2 << " (base " << base << ") ";
    }
    double dt = seconds_since(t0);
    c.expect(dt < 10, "runtime >= 10 s");
    c.notes << "P{0,4}=" << both << " t=" << dt << "s";
}

void hhl(Check &c) {
    const double r = 1 / std::sqrt(2.0);
    struct Row {
        Eigen::Vector2cd b;
        double x, y, z;
    };
    std::vector<Row> rows = {{vec2(1, 0), -0.6, 0, 0.8}, {vec2(r, r), 1, 0, 0}, {vec2(r, -r), -1, 0, 0}};
    Rng rng(6);
    double worst_exact = 0, worst_sampled = 0;
    for (const Row &row : rows) {
        HhlProblem p = HhlProblem::standard(row.b);
        for (auto [obs, want] : std::vector<std::pair<char, double>>{{'X', row.x}, {'Y', row.y}, {'Z', row.z}}) {
            worst_exact = std::max(worst_exact, std::abs(hhl_solve(p, obs, 0, rng).value - want));
            worst_sampled = std::max(worst_sampled, std::abs(hhl_solve(p, obs, 4096, rng).value - want));
        }
    }
    c.near(worst_exact, 0, 1e-6, "exact entries");
    c.near(worst_sampled, 0, 0.05, "4096-shot entries");
    c.notes << "max error exact " << worst_exact << ", sampled " << worst_sampled;
}

void qaoa(Check &c) {
    Rng rng(7);
    struct Row {
        std::string label;
        MaxCutInstance g;
        QaoaParams p;
        double cut, prob;
    };
    std::vector<Row> rows = {
        {"edge r=1", MaxCutInstance::single_edge(), {{0.5 * kPi}, {0.125 * kPi}}, 1.000, 1.000},
        {"triangle r=1", MaxCutInstance::triangle(), {{0.8 * kPi}, {0.4 * kPi}}, 1.999, 1.000},
        {"paw r=1", MaxCutInstance::paw(), {{0.208 * kPi}, {0.105 * kPi}}, 2.720, 0.744},
        {"paw r=2", MaxCutInstance::paw(), {{0.2 * kPi, 0.4 * kPi}, {0.15 * kPi, 0.05 * kPi}}, 2.874, 0.895},
    };
    for (const Row &row : rows) {
        QaoaResult res = qaoa_maxcut(row.g, row.p, 0, rng);
        c.near(res.expected_cut, row.cut, 0.005, row.label + " expected cut");
        c.near(res.prob_max_cut, row.prob, 0.005, row.label + " P(max cut)");
        c.notes << row.label << " " << res.expected_cut << "/" << res.prob_max_cut << "; ";
    }
}

void walk(Check &c) {
    StateVector s4 = quantum_walk_state(4, 4, 0);
    c.near(std::norm(s4[bits_to_index("100")]), 1, 1e-9, "4 steps P(100)");
    StateVector s1 = quantum_walk_state(4, 1, 0);
    c.near(std::norm(s1[bits_to_index("111")]), 0.5, 1e-9, "1 step P(111)");
    c.near(std::norm(s1[bits_to_index("010")]), 0.5, 1e-9, "1 step P(010)");
}

void vqe(Check &c) {
    auto t0 = Clock::now();
    Rng rng(9);
    for (double h : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        IsingModel m{4, h, true};
        double exact = exact_ising_ground(m);
        VqeResult prod = vqe_ising(m, AnsatzKind::Product, {}, rng);
        VqeResult ent = vqe_ising(m, AnsatzKind::Entangled, {}, rng);
        std::string tag = "h=" + std::to_string(h).substr(0, 3);
        c.expect(prod.energy >= exact - 1e-9, tag + " product below exact");
        if (h == 1.0) {
            c.expect(prod.energy > exact + 1e-6, tag + " product not strictly above exact");
        }
        double rel = std::abs(ent.energy - exact) / std::abs(exact);
        c.expect(rel <= 0.02, tag + " entangled off by " + std::to_string(rel));
        c.notes << tag << " exact " << exact << " prod " << prod.energy << " ent " << ent.energy << "; ";
    }
    double dt = seconds_since(t0);
    c.expect(dt < 60, "runtime >= 60 s");
    c.notes << "t=" << dt << "s";
}

void pca(Check &c) {
    std::vector<double> x1 = {4, 3, 4, 4, 3, 3, 3, 3, 4, 4, 4, 5, 4, 3, 4};
    std::vector<double> x2 = {3.028, 1.365, 2.726, 2.538, 1.318, 1.693, 1.412, 1.632,
                              2.875, 3.564, 4.412, 4.444, 4.278, 3.064, 3.857};
    Rng rng(10);
    PcaResult exact = qpca_two_feature(x1, x2, 0, rng);
    c.near(exact.eigenvalues[0], 1.57286, 1e-4, "exact lambda1");
    c.near(exact.eigenvalues[1], 0.105029, 1e-4, "exact lambda2");
    PcaResult s = qpca_two_feature(x1, x2, 40960, rng);
    c.near(s.eigenvalues[0], 1.57492, 0.01, "sampled lambda1");
    c.near(s.eigenvalues[1], 0.102965, 0.01, "sampled lambda2");
    c.notes << "exact " << exact.eigenvalues[0] << "," << exact.eigenvalues[1] << " sampled " << s.eigenvalues[0]
            << "," << s.eigenvalues[1];
}

void partition(Check &c) {
    PottsModel tri{3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, 2, 0};
    for (double beta : {0.0, 0.5, 1.0}) {
        tri.beta = beta;
        double want = 2 * std::exp(3 * beta) + 6 * std::exp(beta);
        c.near(potts_partition(tri) / want, 1, 1e-9, "Z at beta " + std::to_string(beta));
    }
    auto d = potts_qft2_gamma_distribution();
    c.near(d[1], 0.5, 1e-9, "P(gamma=1)");
    c.near(d[3], 0.5, 1e-9, "P(gamma=3)");
}

void schrodinger(Check &c) {
    CVec v(4);
    v << 0, 1, 1, 0;
    std::vector<double> p = schrodinger_evolve(StateVector::normalized(2, v), {}, 0, 1).probabilities();
    std::vector<double> want = {0, 0.5, 0.5, 0};
    for (int i = 0; i < 4; i++) {
        c.near(p[(size_t)i], want[(size_t)i], 1e-9, "phi=0 probability " + std::to_string(i));
    }
    Rng rng(12);
    for (int n : {2, 3, 4}) {
        StateVector s(n, oracle::random_vector(1 << n, rng));
        std::vector<double> pot((size_t)1 << n);
        for (double &x : pot) {
            x = rng.uniform();
        }
        c.near(schrodinger_evolve(s, pot, 0.7, 100).norm(), 1, 1e-10, "norm n=" + std::to_string(n));
    }
}

void synthesis(Check &c) {
    Rng rng(13);
    double worst_f = 1;
    int worst_cx = 0;
    for (int i = 0; i < 100; i++) {
        StateVector t(4, oracle::random_vector(16, rng));
        SynthesizedCircuit s = prep_four_qubit(t);
        worst_f = std::min(worst_f, state_fidelity(s.circuit, t));
        worst_cx = std::max(worst_cx, count_cnots(s.circuit));
    }
    c.expect(worst_f >= 1 - 1e-8, "4-qubit fidelity");
    c.expect(worst_cx <= 9, "4-qubit CNOT count");
    double worst_d = 0;
    bool three = true;
    for (int i = 0; i < 100; i++) {
        CMat u = oracle::random_unitary(4, rng);
        u /= std::pow(cplx(u.determinant()), 0.25);
        SynthesizedCircuit s = synth_two_qubit_gate(u);
        worst_d = std::max(worst_d, oracle::phase_dist(circuit_unitary(s.circuit), u));
        three = three && count_cnots(s.circuit) == 3;
    }
    c.expect(worst_d < 1e-8, "SU(4) distance");
    c.expect(three, "SU(4) CNOT count != 3");
    c.notes << "prep min fidelity " << worst_f << " max cx " << worst_cx << "; synth max distance " << worst_d;
}

void tomography(Check &c) {
    Rng rng(14);
    const double r = 1 / std::sqrt(2.0);
    CVec plus(2), bell(4);
    plus << r, r;
    bell << r, 0, 0, r;
    struct Case {
        StateVector psi;
        Povm povm;
    };
    std::vector<Case> cases = {{StateVector(1, plus), Povm::pauli_bases({"z", "y", "x"})},
                               {StateVector(2, bell), Povm::all_pauli_bases(2)}};
    for (const Case &cs : cases) {
        MeasurementRecord rec = simulate_povm(cs.psi, cs.povm, 0, rng);
        MlResult ml = ml_estimate(rec, cs.povm);
        double f = fidelity(ml.rho, cs.psi);
        c.expect(f >= 0.9999, "fidelity " + std::to_string(f));
        c.expect(ml.monotone, "ML not monotone");
        for (size_t i = 1; i < ml.log_likelihood.size(); i++) {
            c.expect(ml.log_likelihood[i] >= ml.log_likelihood[i - 1], "log-likelihood decreased");
        }
        c.notes << "fidelity " << f << "; ";
    }
    // Sampled runs must also climb monotonically.
    for (int i = 0; i < 10; i++) {
        StateVector psi(2, oracle::random_vector(4, rng));
        Povm povm = Povm::all_pauli_bases(2);
        c.expect(ml_estimate(simulate_povm(psi, povm, 300, rng), povm).monotone, "sampled ML not monotone");
    }
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = 1.2;
    m(1, 1) = -0.2;
    CMat p = psd_project(m).elems();
    c.near(p(0, 0).real(), 1, 1e-12, "psd (1.2,-0.2)[0]");
    c.near(p(1, 1).real(), 0, 1e-12, "psd (1.2,-0.2)[1]");
    std::vector<double> s = project_to_simplex({0.9, 0.4, -0.3});
    c.near(s[0], 0.75, 1e-12, "simplex[0]");
    c.near(s[1], 0.25, 1e-12, "simplex[1]");
    c.near(s[2], 0, 1e-12, "simplex[2]");
}

void qec(Check &c) {
    const double p = 0.1;
    const int shots = 100000;
    QecNoise flips;
    flips.readout_flip_p = p;
    Rng rng(15);
    QecReport r = run_ghz_test(16, flips, shots, rng);
    double want = 3 * p * p - 2 * p * p * p;
    c.near(r.p_encoded, want, 3 * std::sqrt(want * (1 - want) / shots), "bit-flip encoded error");
    QecNoise rot;
    rot.correlated_sigma = 0.3;
    QecReport q = run_ghz_test(16, rot, shots, rng);
    c.expect(q.p_encoded >= 0.9 * q.p_unencoded, "correlated rotation suppressed");
    c.notes << "bit-flip " << r.p_encoded << " vs " << want << "; rotation enc " << q.p_encoded << " unenc "
            << q.p_unencoded;
}

void min_finding(Check &c) {
    std::vector<double> keys = {3, 7, 1, 9, 4, 6, 2, 8};
    double budget = 22.5 * std::sqrt(8.0) + 1.4 * 9;
    int hits = 0, worst = 0;
    for (uint64_t seed = 0; seed < 500; seed++) {
        Rng rng(seed);
        MinFindResult m = min_find(keys, rng);
        hits += m.index == 2;
        worst = std::max(worst, m.grover_iterations);
    }
    c.expect(hits >= 250, "hit rate below 50%");
    c.expect(worst <= budget, "iteration budget exceeded");
    c.notes << hits << "/500 hits, max iterations " << worst << " (budget " << budget << ")";
}

void oracle_suite(Check &c) {
    auto t0 = Clock::now();
    Rng rng(17);
    double worst = 0;
    for (int trial = 0; trial < 200; trial++) {
        int n = 1 + (int)rng.below(5);
        int k = 1 + (int)rng.below((uint64_t)std::min(n, 3));
        std::vector<int> targets;
        while ((int)targets.size() < k) {
            int t = (int)rng.below((uint64_t)n);
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
                targets.push_back(t);
            }
        }
        CMat u = oracle::random_unitary(1 << k, rng);
        StateVector s(n, oracle::random_vector(1 << n, rng));
        CVec want = oracle::embed(u, targets, n) * s.amps();
        worst = std::max(worst, oracle::max_abs(apply(s, {gate_from_matrix(u, "u"), targets}).amps() - want));
    }
    c.near(worst, 0, 1e-12, "apply vs Kronecker embedding");

    for (int trial = 0; trial < 100; trial++) {
        int n = 2 + (int)rng.below(5);
        StateVector s(n, oracle::random_vector(1 << n, rng));
        for (int cut = 1; cut < n; cut++) {
            c.near(oracle::max_abs(schmidt_decompose(s, cut).reconstruct().amps() - s.amps()), 0, 1e-10,
                   "Schmidt reconstruction");
        }
    }
    for (int trial = 0; trial < 50; trial++) {
        int n = 1 + (int)rng.below(3);
        DensityMatrix rho(n, oracle::random_density(1 << n, rng));
        StateVector p = purify(rho);
        std::vector<int> keep(n);
        for (int i = 0; i < n; i++) {
            keep[(size_t)i] = i;
        }
        c.near(oracle::max_abs(partial_trace(DensityMatrix::pure(p), keep).elems() - rho.elems()), 0, 1e-10,
               "purification round trip");
    }
    for (int trial = 0; trial < 40; trial++) {
        int n = 2 + (int)rng.below(15);
        std::vector<std::vector<bool>> adj((size_t)n, std::vector<bool>((size_t)n, false));
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                if (rng.uniform() < 0.25) {
                    adj[(size_t)i][(size_t)j] = adj[(size_t)j][(size_t)i] = true;
                }
            }
        }
        int src = (int)rng.below((uint64_t)n);
        std::vector<int> bfs = oracle::bfs(adj, src);
        c.expect(layered_partition(adj, src, rng).layers == bfs, "layers differ from BFS");
    }
    for (int trial = 0; trial < 20; trial++) {
        int n = 2 + (int)rng.below(4);
        int q = 2 + (int)rng.below(3);
        PottsModel m{n, {}, q, rng.uniform() * 2};
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                if (rng.uniform() < 0.6) {
                    m.edges.push_back({i, j, rng.normal()});
                }
            }
        }
        double z = 0;
        int total = (int)std::pow(q, n);
        for (int cfg = 0; cfg < total; cfg++) {
            std::vector<int> s((size_t)n);
            for (int i = 0, v = cfg; i < n; i++, v /= q) {
                s[(size_t)i] = v % q;
            }
            double e = 0;
            for (auto [i, j, w] : m.edges) {
                e -= w * (s[(size_t)i] == s[(size_t)j]);
            }
            z += std::exp(-m.beta * e);
        }
        c.near(potts_partition(m) / z, 1, 1e-9, "Potts enumeration");
    }
    double dt = seconds_since(t0);
    c.expect(dt < 300, "runtime >= 5 min");
    c.notes << "apply max error " << worst << ", t=" << dt << "s";
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<void(Check &)>>> criteria = {
        {"bell sampling", bell_sampling},
        {"grover", grover},
        {"bernstein-vazirani", bernstein_vazirani},
        {"qft", qft},
        {"shor", shor},
        {"hhl", hhl},
        {"qaoa tables", qaoa},
        {"quantum walk", walk},
        {"vqe", vqe},
        {"pca", pca},
        {"partition function", partition},
        {"schrodinger", schrodinger},
        {"state prep and synthesis", synthesis},
        {"tomography", tomography},
        {"qec", qec},
        {"minimum finding", min_finding},
        {"brute-force oracles", oracle_suite},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); i++) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception &e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        bool ok = c.failures.empty();
        failed += !ok;
        std::printf("%s %2zu %s: %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), c.notes.str().c_str());
        for (const auto &f : c.failures) {
            std::printf("        %s\n", f.c_str());
        }
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed ? 1 : 0;
}
