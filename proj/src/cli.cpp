#include "qtk/cli.hpp"

#include <CLI11.hpp>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>

#include "qtk/algorithms.hpp"
#include "qtk/qec.hpp"
#include "qtk/stateprep.hpp"
#include "qtk/tomography.hpp"

namespace qtk {

using json = nlohmann::ordered_json;

namespace {

// Bad user input that is not a CLI11 parse failure.
struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HelpRequested {
    std::string text;
};
struct QasmParseFailure {
    std::string message;
};

struct Common {
    uint64_t seed = 1;
    int shots = 0;
    std::string output = "json";
};

struct Report {
    json config = json::object();
    json results = json::object();
};

void add_common(CLI::App &app, Common &c, int default_shots) {
    c.shots = default_shots;
    app.set_help_flag("--help", "print this help");
    app.add_option("--seed", c.seed, "RNG seed");
    app.add_option("--shots", c.shots, "shots (0 = exact where supported)")->check(CLI::NonNegativeNumber);
    app.add_option("--output", c.output, "json or text")->check(CLI::IsMember({"json", "text"}));
}

void parse(CLI::App &app, const std::vector<std::string> &args) {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp &) {
        throw HelpRequested{app.help()};
    }
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<double> parse_angles(const std::string &s) {
    std::vector<double> v;
    for (const auto &item : split_list(s)) {
        v.push_back(parse_angle(item));
    }
    return v;
}

std::vector<double> parse_numbers(const std::string &s) {
    std::vector<double> v;
    for (const auto &item : split_list(s)) {
        size_t used = 0;
        double x = 0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != item.size()) {
            throw InvalidParams("not a number: '" + item + "'");
        }
        v.push_back(x);
    }
    return v;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMat &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            row.push_back(complex_json(m(i, j)));
        }
        rows.push_back(row);
    }
    return rows;
}

json config_json(const Common &c) { return {{"shots", c.shots}, {"output", c.output}}; }

// ---- commands ---------------------------------------------------------------

Report cmd_run(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Run an OpenQASM 2.0 file"};
    add_common(app, c, 1024);
    std::string path, mode = "sampled";
    NoiseModel noise;
    app.add_option("file", path, "QASM file")->required();
    app.add_option("--mode", mode, "statevector or sampled")->check(CLI::IsMember({"statevector", "sampled"}));
    app.add_option("--sigma", noise.over_rotation_sigma, "over-rotation sigma per gate");
    app.add_option("--bitflip", noise.bitflip_p, "bit-flip probability per gate");
    app.add_option("--idle-flip", noise.idle_flip_p, "bit-flip probability per id gate");
    parse(app, args);
    try {
        noise.validate();
    } catch (const QtkError &e) {
        throw InvalidParams(e.what());
    }
    if (mode == "sampled" && c.shots < 1) {
        throw InvalidParams("sampled mode needs --shots >= 1");
    }
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    Circuit circ;
    try {
        circ = parse_qasm(buf.str());
    } catch (const ParseError &e) {
        throw QasmParseFailure{path + ": " + e.what()};
    }
    Report r;
    r.config = config_json(c);
    r.config["file"] = path;
    r.config["mode"] = mode;
    r.config["noise"] = {{"sigma", noise.over_rotation_sigma},
                         {"bitflip", noise.bitflip_p},
                         {"idle_flip", noise.idle_flip_p}};
    CircuitMetrics m = metrics(circ);
    r.results["n_qubits"] = circ.n_qubits;
    r.results["metrics"] = {{"gate_count", m.gate_count}, {"cnot_count", m.cnot_count}, {"depth", m.depth}};
    if (mode == "statevector") {
        StateVector s = run_statevector(circ);
        json amps = json::array();
        for (uint64_t i = 0; i < s.dim(); i++) {
            if (std::abs(s[i]) > 1e-12) {
                amps.push_back({{"basis", index_to_bits(i, s.n_qubits())},
                                {"amplitude", complex_json(s[i])},
                                {"probability", std::norm(s[i])}});
            }
        }
        r.results["amplitudes"] = amps;
    } else {
        if (circ.n_clbits == 0) {
            circ.measure_all();
        }
        Rng rng(c.seed);
        ShotHistogram h = sample(circ, c.shots, noise.active() ? &noise : nullptr, rng);
        json counts = json::object();
        for (auto &[bits, k] : h.counts) {
            counts[bits] = k;
        }
        r.results["counts"] = counts;
        r.results["shots"] = h.shots;
    }
    return r;
}

Report cmd_grover(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Grover search for one marked string"};
    add_common(app, c, 0);
    int n = 2;
    uint64_t target = 0;
    bool ceil_iters = false;
    app.add_option("--n", n, "input qubits")->required()->check(CLI::Range(1, 12));
    app.add_option("--target", target, "marked index")->required();
    app.add_flag("--ceil-iterations", ceil_iters, "use ceil(pi sqrt(N) / 4) iterations");
    parse(app, args);
    if (target >= (1ULL << n)) {
        throw InvalidParams("--target out of range for --n");
    }
    Rng rng(c.seed);
    GroverResult g = grover_search([target](uint64_t x) { return x == target; }, n, rng, ceil_iters);
    Report r;
    r.config = config_json(c);
    r.config.update({{"n", n}, {"target", target}, {"ceil_iterations", ceil_iters}});
    r.results = {{"bits", g.bits}, {"iterations", g.iterations}, {"success_probability", g.success_probability}};
    return r;
}

Report cmd_bv(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Bernstein-Vazirani hidden string recovery"};
    add_common(app, c, 0);
    std::string hidden;
    app.add_option("--hidden", hidden, "hidden bit string")->required();
    parse(app, args);
    if (hidden.empty() || hidden.size() > 12 || hidden.find_first_not_of("01") != std::string::npos) {
        throw InvalidParams("--hidden must be 1 to 12 bits");
    }
    Rng rng(c.seed);
    BvResult b = bv_hidden_string(make_bv_oracle(hidden), rng);
    Report r;
    r.config = config_json(c);
    r.config["hidden"] = hidden;
    r.results = {{"bits", b.bits}, {"probability", b.probability}, {"oracle_calls", b.oracle_calls}};
    return r;
}

Report cmd_shor(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Shor factoring with simulated period finding"};
    add_common(app, c, 0);
    uint64_t n = 15, base = 0;
    app.add_option("--n", n, "number to factor")->required()->check(CLI::Range(4, 63));
    app.add_option("--base", base, "fixed base k (default random)");
    parse(app, args);
    Rng rng(c.seed);
    ShorResult s = shor_factor(n, rng, base);
    Report r;
    r.config = config_json(c);
    r.config.update({{"n", n}, {"base", base}});
    r.results = {{"factors", {s.factor1, s.factor2}},
                 {"method", s.method},
                 {"base", s.base},
                 {"period", s.period},
                 {"attempts", s.attempts},
                 {"measurements", s.measurements}};
    return r;
}

Report cmd_hhl(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"HHL on the 2x2 system A = [[1.5, 0.5], [0.5, 1.5]]"};
    add_common(app, c, 0);
    std::string b = "0", obs = "Z";
    app.add_option("--b", b, "right-hand side: 0, 1, + or -")->check(CLI::IsMember({"0", "1", "+", "-"}));
    app.add_option("--observable", obs, "X, Y or Z")->check(CLI::IsMember({"X", "Y", "Z"}));
    parse(app, args);
    const double h = 1 / std::sqrt(2.0);
    std::map<std::string, Eigen::Vector2cd> rhs = {
        {"0", {1, 0}}, {"1", {0, 1}}, {"+", {h, h}}, {"-", {h, -h}}};
    Rng rng(c.seed);
    HhlResult res = hhl_solve(HhlProblem::standard(rhs[b]), obs[0], c.shots, rng);
    Report r;
    r.config = config_json(c);
    r.config.update({{"b", b}, {"observable", obs}});
    r.results = {{"expectation", res.value},
                 {"postselect_probability", res.postselect_probability},
                 {"kept_shots", res.kept_shots},
                 {"raw_shots", res.raw_shots}};
    return r;
}

Report cmd_walk(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Discrete-time quantum walk on a cycle"};
    add_common(app, c, 0);
    int nodes = 4, steps = 1, start = 0;
    app.add_option("--nodes", nodes, "cycle length (power of two)");
    app.add_option("--steps", steps, "walk steps")->check(CLI::NonNegativeNumber);
    app.add_option("--start", start, "start node");
    parse(app, args);
    Rng rng(c.seed);
    auto dist = quantum_walk_cycle(nodes, steps, start, c.shots, rng);
    Report r;
    r.config = config_json(c);
    r.config.update({{"nodes", nodes}, {"steps", steps}, {"start", start}});
    json d = json::object();
    for (auto &[k, v] : dist) {
        d[k] = v;
    }
    r.results["distribution"] = d;
    return r;
}

Report cmd_qaoa(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"QAOA for MaxCut"};
    add_common(app, c, 0);
    std::string graph = "triangle", gammas, betas;
    int rounds = 1;
    std::string resolution;
    app.add_option("--graph", graph, "edge, triangle or paw");
    app.add_option("--r", rounds, "rounds")->check(CLI::Range(1, 8));
    app.add_option("--gamma", gammas, "comma-separated gamma angles, e.g. 0.8pi");
    app.add_option("--beta", betas, "comma-separated beta angles");
    app.add_option("--grid", resolution, "grid-search resolution instead of fixed angles, e.g. pi/8");
    parse(app, args);
    MaxCutInstance g = MaxCutInstance::named(graph);
    Rng rng(c.seed);
    Report r;
    r.config = config_json(c);
    r.config.update({{"graph", graph}, {"r", rounds}});
    QaoaParams p;
    if (!resolution.empty()) {
        GridSearchResult best = qaoa_grid_search(g, rounds, parse_angle(resolution));
        r.config["grid"] = resolution;
        r.results["grid_points"] = best.points;
        p = best.params;
    } else {
        p.gamma = parse_angles(gammas);
        p.beta = parse_angles(betas);
        if ((int)p.gamma.size() != rounds || (int)p.beta.size() != rounds) {
            throw InvalidParams("--gamma and --beta need exactly r angles each");
        }
        r.config.update({{"gamma", gammas}, {"beta", betas}});
    }
    QaoaResult q = qaoa_maxcut(g, p, c.shots, rng);
    r.results["gamma"] = p.gamma;
    r.results["beta"] = p.beta;
    r.results["expected_cut"] = q.expected_cut;
    r.results["prob_max_cut"] = q.prob_max_cut;
    r.results["max_cut"] = q.max_cut;
    json d = json::object();
    for (auto &[cut, prob] : q.cut_distribution) {
        d[std::to_string(cut)] = prob;
    }
    r.results["cut_distribution"] = d;
    return r;
}

Report cmd_vqe(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"VQE for the transverse-field Ising chain"};
    add_common(app, c, 0);
    int n = 4;
    double h = 1;
    std::string ansatz = "entangled";
    bool open = false;
    app.add_option("--n", n, "spins")->check(CLI::Range(2, 10));
    app.add_option("--h", h, "transverse field");
    app.add_option("--ansatz", ansatz, "product or entangled")->check(CLI::IsMember({"product", "entangled"}));
    app.add_flag("--open", open, "open boundary conditions");
    parse(app, args);
    IsingModel m{n, h, !open};
    VqeConfig cfg;
    cfg.shots = c.shots;
    Rng rng(c.seed);
    VqeResult v = vqe_ising(m, ansatz == "product" ? AnsatzKind::Product : AnsatzKind::Entangled, cfg, rng);
    Report r;
    r.config = config_json(c);
    r.config.update({{"n", n}, {"h", h}, {"ansatz", ansatz}, {"periodic", !open}});
    r.results = {{"energy", v.energy},
                 {"exact_energy", exact_ising_ground(m)},
                 {"magnetization_x", v.magnetization_x},
                 {"magnetization_z", v.magnetization_z},
                 {"thetas", v.params.thetas},
                 {"converged", v.converged},
                 {"iterations", v.iterations}};
    if (ansatz == "entangled") {
        r.results["theta0"] = v.params.theta0;
        r.results["phi0"] = v.params.phi0;
    }
    if (v.sampled_energy) {
        r.results["sampled_energy"] = *v.sampled_energy;
    }
    return r;
}

Report cmd_pca(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Two-feature quantum PCA via the purity test"};
    add_common(app, c, 0);
    std::string x1s = "4,3,4,4,3,3,3,3,4,4,4,5,4,3,4";
    std::string x2s = "3.028,1.365,2.726,2.538,1.318,1.693,1.412,1.632,2.875,3.564,4.412,4.444,4.278,3.064,3.857";
    app.add_option("--x1", x1s, "first feature, comma-separated");
    app.add_option("--x2", x2s, "second feature, comma-separated");
    parse(app, args);
    Rng rng(c.seed);
    PcaResult p = qpca_two_feature(parse_numbers(x1s), parse_numbers(x2s), c.shots, rng);
    Report r;
    r.config = config_json(c);
    r.config.update({{"x1", x1s}, {"x2", x2s}});
    r.results = {{"covariance",
                  {{p.covariance(0, 0), p.covariance(0, 1)}, {p.covariance(1, 0), p.covariance(1, 1)}}},
                 {"purity", p.purity},
                 {"eigenvalues", p.eigenvalues},
                 {"classical_eigenvalues", p.classical_eigenvalues}};
    return r;
}

Report cmd_partition(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Potts partition function by enumeration"};
    add_common(app, c, 0);
    std::string graph = "triangle";
    int q = 2;
    double beta = 1;
    app.add_option("--graph", graph, "edge or triangle")->check(CLI::IsMember({"edge", "triangle"}));
    app.add_option("--q", q, "states per vertex")->check(CLI::Range(2, 16));
    app.add_option("--beta", beta, "inverse temperature");
    parse(app, args);
    PottsModel m;
    m.q = q;
    m.beta = beta;
    if (graph == "edge") {
        m.n_vertices = 2;
        m.edges = {{0, 1, 1.0}};
    } else {
        m.n_vertices = 3;
        m.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
    }
    Report r;
    r.config = config_json(c);
    r.config.update({{"graph", graph}, {"q", q}, {"beta", beta}});
    r.results["partition_function"] = potts_partition(m);
    json d = json::object();
    for (auto &[g, p] : potts_qft2_gamma_distribution()) {
        d[std::to_string(g)] = p;
    }
    r.results["qft2_gamma_distribution"] = d;
    return r;
}

Report cmd_schrodinger(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Split-operator evolution of a free particle"};
    add_common(app, c, 0);
    std::string amps = "0,0.7071067811865476,0.7071067811865476,0", phi = "0";
    int steps = 1;
    app.add_option("--initial", amps, "real amplitudes, comma-separated");
    app.add_option("--phi", phi, "kinetic phase, e.g. pi");
    app.add_option("--steps", steps, "steps")->check(CLI::NonNegativeNumber);
    parse(app, args);
    std::vector<double> a = parse_numbers(amps);
    int n = 0;
    while ((1ULL << n) < a.size()) {
        n++;
    }
    if ((1ULL << n) != a.size() || n < 1) {
        throw InvalidParams("--initial needs a power-of-two number of amplitudes");
    }
    CVec v(a.size());
    for (size_t i = 0; i < a.size(); i++) {
        v[(Eigen::Index)i] = a[i];
    }
    StateVector s = schrodinger_evolve(StateVector::normalized(n, v), {}, parse_angle(phi), steps);
    Report r;
    r.config = config_json(c);
    r.config.update({{"initial", amps}, {"phi", phi}, {"steps", steps}});
    r.results["probabilities"] = s.probabilities();
    return r;
}

Report cmd_minfind(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Quantum minimum finding"};
    add_common(app, c, 0);
    std::string values = "3,7,1,9,4,6,2,8";
    app.add_option("--values", values, "keys, comma-separated");
    parse(app, args);
    std::vector<double> v = parse_numbers(values);
    if (v.empty() || v.size() > 1024) {
        throw InvalidParams("--values needs 1 to 1024 keys");
    }
    Rng rng(c.seed);
    MinFindResult m = min_find(v, rng);
    Report r;
    r.config = config_json(c);
    r.config["values"] = values;
    r.results = {{"index", m.index},
                 {"value", v[m.index]},
                 {"grover_iterations", m.grover_iterations},
                 {"budget", min_find_budget(v.size())},
                 {"searches", m.searches}};
    return r;
}

Report cmd_layers(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Layered partition of a graph by repeated Grover search"};
    add_common(app, c, 0);
    int nodes = 4, source = 0;
    std::string edges = "0-1,0-2,1-3,2-3";
    app.add_option("--nodes", nodes, "node count")->check(CLI::Range(1, 16));
    app.add_option("--edges", edges, "undirected edges like 0-1,1-2");
    app.add_option("--source", source, "source node");
    parse(app, args);
    std::vector<std::vector<bool>> adj(nodes, std::vector<bool>(nodes, false));
    for (const auto &e : split_list(edges)) {
        auto dash = e.find('-');
        if (dash == std::string::npos) {
            throw InvalidParams("edge '" + e + "' is not of the form a-b");
        }
        auto ends = parse_numbers(e.substr(0, dash) + "," + e.substr(dash + 1));
        int a = (int)ends[0], b = (int)ends[1];
        if (a < 0 || b < 0 || a >= nodes || b >= nodes || a == b) {
            throw InvalidParams("edge '" + e + "' out of range");
        }
        adj[a][b] = adj[b][a] = true;
    }
    Rng rng(c.seed);
    LayerResult l = layered_partition(adj, source, rng);
    Report r;
    r.config = config_json(c);
    r.config.update({{"nodes", nodes}, {"edges", edges}, {"source", source}});
    r.results = {{"layers", l.layers}, {"connected", l.connected}, {"searches", l.searches}};
    return r;
}

Report cmd_group(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Matrix element of a regular representation via the Hadamard test"};
    add_common(app, c, 0);
    std::string group = "A4", basis = "1,3", part = "real";
    int element = 2;
    app.add_option("--group", group, "A<n> (cyclic) or S3");
    app.add_option("--element", element, "element index");
    app.add_option("--basis", basis, "group elements in the equal superposition");
    app.add_option("--part", part, "real or imag")->check(CLI::IsMember({"real", "imag"}));
    parse(app, args);
    FiniteGroup g;
    if (group == "S3") {
        g = FiniteGroup::symmetric3();
    } else if (group.size() > 1 && group[0] == 'A') {
        g = FiniteGroup::cyclic((int)parse_numbers(group.substr(1))[0]);
    } else {
        throw InvalidParams("unknown group '" + group + "'");
    }
    Gate rep = regular_representation(g, element);
    CVec v = CVec::Zero((Eigen::Index)1 << rep.arity);
    for (double k : parse_numbers(basis)) {
        if (k < 0 || k >= g.order) {
            throw InvalidParams("basis element out of range");
        }
        v[(Eigen::Index)k] = 1;
    }
    if (v.norm() == 0) {
        throw InvalidParams("--basis is empty");
    }
    Rng rng(c.seed);
    double value = rep_matrix_element(g, element, StateVector::normalized(rep.arity, v),
                                      part == "real" ? Part::Real : Part::Imaginary, c.shots, rng);
    Report r;
    r.config = config_json(c);
    r.config.update({{"group", group}, {"element", element}, {"basis", basis}, {"part", part}});
    r.results = {{"value", value}, {"representation", rep.name}};
    return r;
}

Report cmd_prep(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"State preparation circuit for a 1-, 2- or 4-qubit state"};
    add_common(app, c, 0);
    std::string amps;
    app.add_option("--amplitudes", amps, "JSON list of numbers or [re, im] pairs")->required();
    parse(app, args);
    json parsed;
    try {
        parsed = json::parse(amps);
    } catch (const json::exception &e) {
        throw InvalidParams(std::string("--amplitudes is not JSON: ") + e.what());
    }
    if (!parsed.is_array()) {
        throw InvalidParams("--amplitudes must be a JSON list");
    }
    CVec v(parsed.size());
    for (size_t i = 0; i < parsed.size(); i++) {
        const json &a = parsed[i];
        if (a.is_number()) {
            v[(Eigen::Index)i] = a.get<double>();
        } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
            v[(Eigen::Index)i] = cplx(a[0].get<double>(), a[1].get<double>());
        } else {
            throw InvalidParams("amplitude entries must be numbers or [re, im] pairs");
        }
    }
    if (std::abs(v.norm() - 1) > 1e-6) {
        throw InvalidParams("amplitudes are not normalized");
    }
    SynthesizedCircuit s;
    if (v.size() == 2) {
        s = prep_single(v[0], v[1]);
    } else if (v.size() == 4) {
        s = prep_two_qubit(StateVector::normalized(2, v));
    } else if (v.size() == 16) {
        s = prep_four_qubit(StateVector::normalized(4, v));
    } else {
        throw InvalidParams("need 2, 4 or 16 amplitudes");
    }
    Report r;
    r.config = config_json(c);
    r.config["amplitudes"] = parsed;
    r.results = {{"qasm", emit_qasm(s.circuit)},
                 {"cnot_count", s.cnot_count},
                 {"gate_count", metrics(s.circuit).gate_count},
                 {"fidelity", s.fidelity}};
    return r;
}

Report cmd_tomography(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"State tomography of a simulated preparation"};
    add_common(app, c, 8192);
    std::string state = "plus", method = "ml";
    app.add_option("--state", state, "zero, plus, bell or mixed")
        ->check(CLI::IsMember({"zero", "plus", "bell", "mixed"}));
    app.add_option("--method", method, "ml or linear")->check(CLI::IsMember({"ml", "linear"}));
    parse(app, args);
    const double h = 1 / std::sqrt(2.0);
    DensityMatrix rho;
    int n = state == "bell" ? 2 : 1;
    if (state == "zero") {
        rho = DensityMatrix::pure(StateVector::zero(1));
    } else if (state == "plus") {
        rho = DensityMatrix::pure(StateVector(1, (CVec(2) << h, h).finished()));
    } else if (state == "bell") {
        rho = DensityMatrix::pure(StateVector(2, (CVec(4) << 0, h, h, 0).finished()));
    } else {
        rho = DensityMatrix::maximally_mixed(1);
    }
    Povm povm;
    if (n == 1) {
        povm = Povm::pauli_bases({"z", "y", "x"});
    } else if (method == "ml") {
        povm = Povm::pauli_bases({"zz", "yy", "xx", "zx", "yz"});
    } else {
        povm = Povm::all_pauli_bases(2);
    }
    Rng rng(c.seed);
    MeasurementRecord rec = simulate_povm(rho, povm, c.shots, rng);
    DensityMatrix est;
    Report r;
    r.config = config_json(c);
    r.config.update({{"state", state}, {"method", method}, {"bases", povm.group_names}});
    if (method == "ml") {
        MlResult ml = ml_estimate(rec, povm);
        est = ml.rho;
        r.results["iterations"] = ml.iterations;
        r.results["monotone"] = ml.monotone;
    } else {
        CMat li = linear_inversion(rec, povm);
        Eigen::SelfAdjointEigenSolver<CMat> es(li, Eigen::EigenvaluesOnly);
        r.results["linear_min_eigenvalue"] = es.eigenvalues().minCoeff();
        est = psd_project(li);
    }
    json record = json::object();
    for (size_t i = 0; i < povm.labels.size(); i++) {
        const std::string &label = povm.labels[i];
        auto colon = label.find(':');
        record[label.substr(0, colon)][label.substr(colon + 1)] =
            c.shots > 0 ? json(rec.counts[i]) : json(rec.frequencies[i]);
    }
    r.results["record"] = record;
    r.results["rho"] = matrix_json(est.elems());
    json spectrum = json::array();
    for (auto &[lam, vec] : spectral_report(est)) {
        json v = json::array();
        for (Eigen::Index i = 0; i < vec.size(); i++) {
            v.push_back(complex_json(vec[i]));
        }
        spectrum.push_back({{"eigenvalue", lam}, {"eigenvector", v}});
    }
    r.results["spectrum"] = spectrum;
    r.results["fidelity"] = (rho.elems() * est.elems()).trace().real();
    return r;
}

Report cmd_qec(const std::vector<std::string> &args, Common &c) {
    CLI::App app{"Repetition-code experiments under configurable noise"};
    add_common(app, c, 10000);
    std::string kind = "bitflip";
    double p = 0.1, sigma = 0.3;
    int idle = 16;
    app.add_option("--noise-kind", kind, "bitflip, rotation or both")
        ->check(CLI::IsMember({"bitflip", "rotation", "both"}));
    app.add_option("--p", p, "readout flip probability")->check(CLI::Range(0.0, 1.0));
    app.add_option("--sigma", sigma, "correlated rotation sigma")->check(CLI::NonNegativeNumber);
    app.add_option("--idle", idle, "T gates (multiple of 8)");
    parse(app, args);
    if (c.shots < 1) {
        throw InvalidParams("qec needs --shots >= 1");
    }
    QecNoise noise;
    if (kind != "rotation") {
        noise.readout_flip_p = p;
    }
    if (kind != "bitflip") {
        noise.correlated_sigma = sigma;
    }
    Rng rng(c.seed);
    QecReport q = run_ghz_test(idle, noise, c.shots, rng);
    Report r;
    r.config = config_json(c);
    r.config.update({{"noise_kind", kind}, {"p", p}, {"sigma", sigma}, {"idle", idle}});
    json breakdown = json::object();
    for (auto &[bits, f] : q.outcome_breakdown) {
        breakdown[bits] = f;
    }
    r.results = {{"p_unencoded", q.p_unencoded}, {"p_encoded", q.p_encoded}, {"outcome_breakdown", breakdown}};
    return r;
}

using CommandFn = std::function<Report(const std::vector<std::string> &, Common &)>;

const std::map<std::string, std::pair<CommandFn, std::string>> &commands() {
    static const std::map<std::string, std::pair<CommandFn, std::string>> table = {
        {"run", {cmd_run, "run an OpenQASM file"}},
        {"grover", {cmd_grover, "Grover search"}},
        {"bv", {cmd_bv, "Bernstein-Vazirani"}},
        {"shor", {cmd_shor, "Shor factoring"}},
        {"hhl", {cmd_hhl, "HHL linear solver"}},
        {"walk", {cmd_walk, "quantum walk on a cycle"}},
        {"qaoa", {cmd_qaoa, "QAOA MaxCut"}},
        {"vqe", {cmd_vqe, "VQE transverse Ising"}},
        {"pca", {cmd_pca, "quantum PCA"}},
        {"partition", {cmd_partition, "Potts partition function"}},
        {"schrodinger", {cmd_schrodinger, "split-operator evolution"}},
        {"minfind", {cmd_minfind, "minimum finding"}},
        {"layers", {cmd_layers, "layered graph partition"}},
        {"group", {cmd_group, "group representation matrix element"}},
        {"prep", {cmd_prep, "state preparation to QASM"}},
        {"tomography", {cmd_tomography, "state tomography"}},
        {"qec", {cmd_qec, "repetition-code experiments"}},
    };
    return table;
}

void print_text(const json &j, const std::string &prefix, std::ostream &out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            print_text(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        }
    } else if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s.find('\n') != std::string::npos) {
            out << prefix << ":\n" << s;
        } else {
            out << prefix << ": " << s << "\n";
        }
    } else {
        out << prefix << ": " << j.dump() << "\n";
    }
}

std::string usage() {
    std::string u = "usage: qtk <command> [options]\n\ncommands:\n";
    for (auto &[name, entry] : commands()) {
        u += "  " + name + std::string(14 - name.size(), ' ') + entry.second + "\n";
    }
    u += "\nrun 'qtk <command> --help' for command options\n";
    return u;
}

}  // namespace

double parse_angle(const std::string &text) {
    std::string s;
    for (char ch : text) {
        if (!std::isspace((unsigned char)ch)) {
            s += ch;
        }
    }
    auto number = [&](const std::string &t) {
        if (t.empty() || t == "+") {
            return 1.0;
        }
        if (t == "-") {
            return -1.0;
        }
        size_t used = 0;
        double v = 0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != t.size()) {
            throw InvalidParams("bad angle '" + text + "'");
        }
        return v;
    };
    if (s.empty()) {
        throw InvalidParams("empty angle");
    }
    double divisor = 1;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        divisor = number(s.substr(slash + 1));
        s = s.substr(0, slash);
        if (divisor == 0) {
            throw InvalidParams("bad angle '" + text + "'");
        }
    }
    auto pi = s.find("pi");
    double v;
    if (pi != std::string::npos) {
        if (pi + 2 != s.size()) {
            throw InvalidParams("bad angle '" + text + "'");
        }
        std::string coeff = s.substr(0, pi);
        if (!coeff.empty() && coeff.back() == '*') {
            coeff.pop_back();
        }
        v = number(coeff) * kPi;
    } else {
        v = number(s);
    }
    return v / divisor;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        (args.empty() ? err : out) << usage();
        return args.empty() ? kExitInvalid : kExitOk;
    }
    if (args[0] == "--version") {
        out << "qtk " << QTK_VERSION << "\n";
        return kExitOk;
    }
    auto it = commands().find(args[0]);
    if (it == commands().end()) {
        err << "qtk: unknown command '" << args[0] << "'\n" << usage();
        return kExitUnknown;
    }
    std::vector<std::string> rest(args.begin() + 1, args.end());
    Common common;
    Report report;
    try {
        report = it->second.first(rest, common);
    } catch (const HelpRequested &h) {
        out << h.text;
        return kExitOk;
    } catch (const QasmParseFailure &e) {
        err << "qtk: parse error: " << e.message << "\n";
        return kExitParse;
    } catch (const CLI::ParseError &e) {
        err << "qtk " << args[0] << ": " << e.what() << "\n";
        return kExitInvalid;
    } catch (const InvalidParams &e) {
        err << "qtk " << args[0] << ": " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ExecutionError &e) {
        err << "qtk " << args[0] << ": " << e.what() << "\n";
        return kExitExecution;
    } catch (const QtkError &e) {
        // Algorithms check their preconditions; a violation is bad input,
        // except for the QASM runner where the input has already parsed.
        err << "qtk " << args[0] << ": " << e.what() << "\n";
        return args[0] == "run" ? kExitExecution : kExitInvalid;
    } catch (const std::exception &e) {
        err << "qtk " << args[0] << ": " << e.what() << "\n";
        return kExitExecution;
    }
    json doc;
    doc["tool"] = "qtk";
    doc["version"] = QTK_VERSION;
    doc["command"] = args[0];
    doc["config"] = report.config;
    doc["seed"] = common.seed;
    doc["results"] = report.results;
    if (common.output == "text") {
        print_text(doc, "", out);
    } else {
        out << doc.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace qtk
