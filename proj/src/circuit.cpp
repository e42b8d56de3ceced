#include "qtk/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace qtk {

Circuit::Circuit(int n_qubits, int n_clbits) : n_qubits(n_qubits), n_clbits(n_clbits) {
    if (n_qubits < 0 || n_clbits < 0) {
        throw QtkError("negative register size");
    }
}

namespace {

void check_targets(const Circuit &c, const std::vector<int> &qubits) {
    for (size_t i = 0; i < qubits.size(); i++) {
        if (qubits[i] < 0 || qubits[i] >= c.n_qubits) {
            throw QtkError("qubit " + std::to_string(qubits[i]) + " outside register of " +
                           std::to_string(c.n_qubits));
        }
        for (size_t j = 0; j < i; j++) {
            if (qubits[i] == qubits[j]) {
                throw QtkError("duplicate qubit " + std::to_string(qubits[i]));
            }
        }
    }
}

}  // namespace

Circuit &Circuit::add(const std::string &name, const std::vector<int> &qubits, const std::vector<double> &params) {
    return add_gate(standard_gate(name, params), qubits);
}

Circuit &Circuit::add_gate(const Gate &g, const std::vector<int> &qubits) {
    if ((int)qubits.size() != g.arity) {
        throw QtkError("gate '" + g.name + "' needs " + std::to_string(g.arity) + " qubit(s)");
    }
    check_targets(*this, qubits);
    Op op;
    op.kind = Op::Kind::Gate;
    op.gate = g;
    op.qubits = qubits;
    ops.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::measure(int qubit, int clbit) {
    check_targets(*this, {qubit});
    if (clbit < 0 || clbit >= n_clbits) {
        throw QtkError("clbit " + std::to_string(clbit) + " outside register of " + std::to_string(n_clbits));
    }
    Op op;
    op.kind = Op::Kind::Measure;
    op.qubits = {qubit};
    op.clbit = clbit;
    ops.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::measure_all() {
    n_clbits = std::max(n_clbits, n_qubits);
    for (int q = 0; q < n_qubits; q++) {
        measure(q, q);
    }
    return *this;
}

Circuit &Circuit::barrier(const std::vector<int> &qubits) {
    std::vector<int> span = qubits;
    if (span.empty()) {
        for (int q = 0; q < n_qubits; q++) {
            span.push_back(q);
        }
    }
    check_targets(*this, span);
    Op op;
    op.kind = Op::Kind::Barrier;
    op.qubits = span;
    ops.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::reset(int qubit) {
    check_targets(*this, {qubit});
    Op op;
    op.kind = Op::Kind::Reset;
    op.qubits = {qubit};
    ops.push_back(std::move(op));
    return *this;
}

Circuit &Circuit::append(const Circuit &other, const std::vector<int> &qubit_map) {
    std::vector<int> map = qubit_map;
    if (map.empty()) {
        for (int q = 0; q < other.n_qubits; q++) {
            map.push_back(q);
        }
    }
    if ((int)map.size() != other.n_qubits) {
        throw QtkError("append: qubit map size mismatch");
    }
    for (const Op &op : other.ops) {
        Op copy = op;
        for (int &q : copy.qubits) {
            q = map[q];
        }
        check_targets(*this, copy.qubits);
        if (copy.kind == Op::Kind::Measure && copy.clbit >= n_clbits) {
            throw QtkError("append: clbit out of range");
        }
        ops.push_back(std::move(copy));
    }
    return *this;
}

Circuit Circuit::inverse() const {
    Circuit inv(n_qubits, n_clbits);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        if (it->kind != Op::Kind::Gate) {
            throw QtkError("inverse: circuit contains non-unitary operations");
        }
        const Gate &g = it->gate;
        Gate gi;
        const std::string &nm = g.name;
        if (nm == "s") {
            gi = standard_gate("sdg");
        } else if (nm == "sdg") {
            gi = standard_gate("s");
        } else if (nm == "t") {
            gi = standard_gate("tdg");
        } else if (nm == "tdg") {
            gi = standard_gate("t");
        } else if (nm == "rx" || nm == "ry" || nm == "rz" || nm == "u1" || nm == "p" || nm == "r" || nm == "cp" ||
                   nm == "cu1") {
            gi = standard_gate(nm, {-g.params[0]});
        } else if (nm == "u3") {
            gi = standard_gate("u3", {-g.params[0], -g.params[2], -g.params[1]});
        } else if (nm == "u2") {
            gi = standard_gate("u3", {-kPi / 2, -g.params[1], -g.params[0]});
        } else if (is_standard_gate(nm)) {
            gi = g;  // self-inverse: id x y z h cx cz swap ccx cswap
        } else {
            gi = {g.arity, g.matrix.adjoint(), g.name + "_dg", {}};
        }
        inv.add_gate(gi, it->qubits);
    }
    return inv;
}

bool Circuit::operator==(const Circuit &o) const {
    if (n_qubits != o.n_qubits || n_clbits != o.n_clbits || ops.size() != o.ops.size()) {
        return false;
    }
    for (size_t i = 0; i < ops.size(); i++) {
        const Op &a = ops[i], &b = o.ops[i];
        if (a.kind != b.kind || a.qubits != b.qubits || a.clbit != b.clbit) {
            return false;
        }
        if (a.kind == Op::Kind::Gate) {
            if (a.gate.name != b.gate.name || a.gate.params.size() != b.gate.params.size()) {
                return false;
            }
            for (size_t k = 0; k < a.gate.params.size(); k++) {
                if (std::abs(a.gate.params[k] - b.gate.params[k]) > 1e-12) {
                    return false;
                }
            }
            if ((a.gate.matrix - b.gate.matrix).cwiseAbs().maxCoeff() > 1e-12) {
                return false;
            }
        }
    }
    return true;
}

Topology::Topology(int n, std::set<std::pair<int, int>> edges) : n_qubits(n), cnot_edges(std::move(edges)) {
    for (auto [c, t] : cnot_edges) {
        if (c < 0 || t < 0 || c >= n || t >= n || c == t) {
            throw QtkError("invalid topology edge");
        }
    }
}

Topology Topology::ibmqx4() { return Topology(5, {{1, 0}, {2, 0}, {2, 1}, {3, 2}, {3, 4}, {4, 2}}); }

void NoiseModel::validate() const {
    auto prob = [](double p) { return p >= 0 && p <= 1; };
    if (!(over_rotation_sigma >= 0) || !prob(bitflip_p) || !prob(idle_flip_p)) {
        throw QtkError("noise parameters out of range");
    }
}

double ShotHistogram::frequency(const std::string &bits) const {
    auto it = counts.find(bits);
    return it == counts.end() || shots == 0 ? 0.0 : (double)it->second / shots;
}

ParseError::ParseError(const std::string &msg, int line, int column)
    : QtkError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line(line),
      column(column) {}

namespace {

// Exact simulation needs every measurement to be terminal and no resets.
void check_terminal_measurements(const Circuit &c) {
    std::vector<bool> measured(c.n_qubits, false);
    for (const Op &op : c.ops) {
        if (op.kind == Op::Kind::Barrier) {
            continue;
        }
        if (op.kind == Op::Kind::Reset) {
            throw QtkError("reset is not supported in statevector mode");
        }
        if (op.kind == Op::Kind::Measure) {
            measured[op.qubits[0]] = true;
            continue;
        }
        for (int q : op.qubits) {
            if (measured[q]) {
                throw QtkError("measurement before end of circuit on qubit " + std::to_string(q));
            }
        }
    }
}

bool has_mid_circuit_ops(const Circuit &c) {
    try {
        check_terminal_measurements(c);
    } catch (const QtkError &) {
        return true;
    }
    return false;
}

}  // namespace

StateVector run_statevector(const Circuit &c, const StateVector &initial) {
    if (initial.n_qubits() != c.n_qubits) {
        throw QtkError("initial state width does not match circuit");
    }
    check_terminal_measurements(c);
    CVec v = initial.amps();
    for (const Op &op : c.ops) {
        if (op.kind == Op::Kind::Gate) {
            apply_matrix(v, c.n_qubits, op.gate.matrix, op.qubits);
        }
    }
    return StateVector::unchecked(c.n_qubits, v);
}

StateVector run_statevector(const Circuit &c) { return run_statevector(c, StateVector::zero(c.n_qubits)); }

CMat circuit_unitary(const Circuit &c) {
    check_terminal_measurements(c);
    Eigen::Index d = (Eigen::Index)1 << c.n_qubits;
    CMat u = CMat::Identity(d, d);
    for (Eigen::Index col = 0; col < d; col++) {
        CVec v = u.col(col);
        for (const Op &op : c.ops) {
            if (op.kind == Op::Kind::Gate) {
                apply_matrix(v, c.n_qubits, op.gate.matrix, op.qubits);
            }
        }
        u.col(col) = v;
    }
    return u;
}

namespace {

// Generator of the over-rotation error for a gate family, acting on the
// gate's last target. Empty when the family has no natural axis.
CMat error_generator(const std::string &name) {
    static const double r2 = 1 / std::sqrt(2.0);
    CMat g(2, 2);
    if (name == "x" || name == "rx" || name == "cx" || name == "ccx") {
        g << 0, 1, 1, 0;
    } else if (name == "y" || name == "ry" || name == "u2" || name == "u3") {
        g << 0, cplx(0, -1), cplx(0, 1), 0;
    } else if (name == "z" || name == "s" || name == "sdg" || name == "t" || name == "tdg" || name == "u1" ||
               name == "p" || name == "r" || name == "rz" || name == "cz" || name == "cp" || name == "cu1" ||
               name == "id") {
        g << 1, 0, 0, -1;
    } else if (name == "h") {
        g << r2, r2, r2, -r2;
    } else {
        return CMat();
    }
    return g;
}

// exp(-i d G) for an involutory generator G.
CMat involution_rotation(const CMat &g, double d) {
    return std::cos(d) * CMat::Identity(2, 2) - cplx(0, 1) * std::sin(d) * g;
}

const CMat &pauli_x() {
    static const CMat x = standard_gate("x").matrix;
    return x;
}

void apply_noisy_gate(CVec &v, int n, const Op &op, const NoiseModel &noise, Rng &rng) {
    apply_matrix(v, n, op.gate.matrix, op.qubits);
    if (noise.over_rotation_sigma > 0) {
        CMat g = error_generator(op.gate.name);
        if (g.size() > 0) {
            double d = rng.normal(noise.over_rotation_sigma);
            apply_matrix(v, n, involution_rotation(g, d), {op.qubits.back()});
        }
    }
    double p = op.gate.name == "id" ? noise.idle_flip_p : noise.bitflip_p;
    if (p > 0) {
        for (int q : op.qubits) {
            if (rng.uniform() < p) {
                apply_matrix(v, n, pauli_x(), {q});
            }
        }
    }
}

int measure_qubit(CVec &v, int n, int q, Rng &rng) {
    uint64_t bit = (uint64_t)1 << (n - 1 - q);
    double p1 = 0;
    for (Eigen::Index i = 0; i < v.size(); i++) {
        if ((uint64_t)i & bit) {
            p1 += std::norm(v[i]);
        }
    }
    int outcome = rng.uniform() < p1 ? 1 : 0;
    double keep = outcome ? p1 : 1 - p1;
    double scale = keep > 0 ? 1 / std::sqrt(keep) : 0;
    for (Eigen::Index i = 0; i < v.size(); i++) {
        bool is1 = ((uint64_t)i & bit) != 0;
        v[i] = (is1 == (outcome == 1)) ? v[i] * scale : cplx(0);
    }
    return outcome;
}

}  // namespace

StateVector run_noisy_trajectory(const Circuit &c, const NoiseModel &noise, Rng &rng) {
    noise.validate();
    CVec v = StateVector::zero(c.n_qubits).amps();
    for (const Op &op : c.ops) {
        if (op.kind == Op::Kind::Gate) {
            apply_noisy_gate(v, c.n_qubits, op, noise, rng);
        } else if (op.kind == Op::Kind::Reset) {
            throw QtkError("run_noisy_trajectory does not support reset");
        }
    }
    return StateVector::unchecked(c.n_qubits, v);
}

ShotHistogram sample(const Circuit &c, int shots, const NoiseModel *noise, Rng &rng) {
    if (shots <= 0) {
        throw QtkError("shots must be positive");
    }
    if (noise) {
        noise->validate();
    }
    ShotHistogram h;
    h.shots = shots;
    int n = c.n_qubits;
    bool noisy = noise && noise->active();

    if (!noisy && !has_mid_circuit_ops(c)) {
        StateVector s = run_statevector(c);
        std::vector<std::pair<int, int>> meas;
        for (const Op &op : c.ops) {
            if (op.kind == Op::Kind::Measure) {
                meas.push_back({op.qubits[0], op.clbit});
            }
        }
        std::vector<double> cum(s.dim());
        double acc = 0;
        for (uint64_t i = 0; i < s.dim(); i++) {
            acc += std::norm(s[i]);
            cum[i] = acc;
        }
        std::map<uint64_t, int> raw;
        for (int k = 0; k < shots; k++) {
            double r = rng.uniform() * acc;
            uint64_t idx = (uint64_t)(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
            idx = std::min<uint64_t>(idx, s.dim() - 1);
            raw[idx]++;
        }
        for (auto [idx, cnt] : raw) {
            std::string bits(c.n_clbits, '0');
            for (auto [q, cb] : meas) {
                bits[cb] = ((idx >> (n - 1 - q)) & 1) ? '1' : '0';
            }
            h.counts[bits] += cnt;
        }
        return h;
    }

    NoiseModel none;
    const NoiseModel &nm = noise ? *noise : none;
    CVec zero = StateVector::zero(n).amps();
    for (int k = 0; k < shots; k++) {
        CVec v = zero;
        std::string bits(c.n_clbits, '0');
        for (const Op &op : c.ops) {
            switch (op.kind) {
                case Op::Kind::Gate:
                    apply_noisy_gate(v, n, op, nm, rng);
                    break;
                case Op::Kind::Measure:
                    bits[op.clbit] = measure_qubit(v, n, op.qubits[0], rng) ? '1' : '0';
                    break;
                case Op::Kind::Reset:
                    if (measure_qubit(v, n, op.qubits[0], rng)) {
                        apply_matrix(v, n, pauli_x(), op.qubits);
                    }
                    break;
                case Op::Kind::Barrier:
                    break;
            }
        }
        h.counts[bits]++;
    }
    return h;
}

// ---------------------------------------------------------------------------
// QASM subset

namespace {

struct Token {
    enum Type { Ident, Number, String, Symbol, End } type;
    std::string text;
    int line, col;
};

std::vector<Token> tokenize(const std::string &src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto adv = [&](size_t k) {
        for (size_t j = 0; j < k; j++) {
            if (src[i] == '\n') {
                line++;
                col = 1;
            } else {
                col++;
            }
            i++;
        }
    };
    while (i < src.size()) {
        char ch = src[i];
        if (std::isspace((unsigned char)ch)) {
            adv(1);
            continue;
        }
        if (ch == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') {
                adv(1);
            }
            continue;
        }
        int l0 = line, c0 = col;
        if (std::isalpha((unsigned char)ch) || ch == '_') {
            size_t j = i;
            while (j < src.size() && (std::isalnum((unsigned char)src[j]) || src[j] == '_')) {
                j++;
            }
            out.push_back({Token::Ident, src.substr(i, j - i), l0, c0});
            adv(j - i);
        } else if (std::isdigit((unsigned char)ch) || (ch == '.' && i + 1 < src.size() && std::isdigit((unsigned char)src[i + 1]))) {
            size_t j = i;
            while (j < src.size() && (std::isdigit((unsigned char)src[j]) || src[j] == '.')) {
                j++;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) {
                    k++;
                }
                if (k < src.size() && std::isdigit((unsigned char)src[k])) {
                    j = k;
                    while (j < src.size() && std::isdigit((unsigned char)src[j])) {
                        j++;
                    }
                }
            }
            out.push_back({Token::Number, src.substr(i, j - i), l0, c0});
            adv(j - i);
        } else if (ch == '"') {
            size_t j = i + 1;
            while (j < src.size() && src[j] != '"' && src[j] != '\n') {
                j++;
            }
            if (j >= src.size() || src[j] != '"') {
                throw ParseError("unterminated string", l0, c0);
            }
            out.push_back({Token::String, src.substr(i + 1, j - i - 1), l0, c0});
            adv(j - i + 1);
        } else if (ch == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            out.push_back({Token::Symbol, "->", l0, c0});
            adv(2);
        } else if (std::string(";,[](){}+-*/^").find(ch) != std::string::npos) {
            out.push_back({Token::Symbol, std::string(1, ch), l0, c0});
            adv(1);
        } else {
            throw ParseError(std::string("unexpected character '") + ch + "'", l0, c0);
        }
    }
    out.push_back({Token::End, "", line, col});
    return out;
}

struct Register {
    int offset;
    int size;
};

// A register reference: whole register (index < 0) or one element.
struct Arg {
    std::string reg;
    int index;
    Token at;
};

class QasmParser {
   public:
    explicit QasmParser(const std::string &text) : toks_(tokenize(text)) {}

    Circuit parse() {
        bool started = false;
        while (peek().type != Token::End) {
            statement(started);
        }
        Circuit c(nq_, nc_);
        for (auto &op : ops_) {
            c.ops.push_back(op);
        }
        return c;
    }

   private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    std::map<std::string, Register> qregs_, cregs_;
    int nq_ = 0, nc_ = 0;
    std::vector<Op> ops_;

    const Token &peek() const { return toks_[pos_]; }
    const Token &take() { return toks_[pos_++]; }
    [[noreturn]] void fail(const std::string &msg, const Token &t) { throw ParseError(msg, t.line, t.col); }

    const Token &expect(const std::string &sym) {
        const Token &t = peek();
        if (t.text != sym || t.type == Token::String) {
            fail("expected '" + sym + "'", t);
        }
        return take();
    }

    std::string ident() {
        const Token &t = peek();
        if (t.type != Token::Ident) {
            fail("expected identifier", t);
        }
        return take().text;
    }

    int integer() {
        const Token &t = peek();
        if (t.type != Token::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
            fail("expected integer", t);
        }
        return std::stoi(take().text);
    }

    double expr() {
        double v = term();
        while (peek().text == "+" || peek().text == "-") {
            bool plus = take().text == "+";
            double r = term();
            v = plus ? v + r : v - r;
        }
        return v;
    }

    double term() {
        double v = factor();
        while (peek().text == "*" || peek().text == "/") {
            bool mul = take().text == "*";
            double r = factor();
            v = mul ? v * r : v / r;
        }
        return v;
    }

    double factor() {
        if (peek().text == "-") {
            take();
            return -factor();
        }
        if (peek().text == "+") {
            take();
            return factor();
        }
        double v = primary();
        if (peek().text == "^") {
            take();
            v = std::pow(v, factor());
        }
        return v;
    }

    double primary() {
        const Token &t = peek();
        if (t.type == Token::Number) {
            return std::stod(take().text);
        }
        if (t.text == "(") {
            take();
            double v = expr();
            expect(")");
            return v;
        }
        if (t.type == Token::Ident) {
            std::string name = take().text;
            if (name == "pi") {
                return kPi;
            }
            static const std::map<std::string, std::function<double(double)>> fns = {
                {"sin", [](double x) { return std::sin(x); }},   {"cos", [](double x) { return std::cos(x); }},
                {"tan", [](double x) { return std::tan(x); }},   {"exp", [](double x) { return std::exp(x); }},
                {"ln", [](double x) { return std::log(x); }},    {"sqrt", [](double x) { return std::sqrt(x); }},
            };
            auto it = fns.find(name);
            if (it == fns.end()) {
                fail("unknown symbol '" + name + "' in expression", t);
            }
            expect("(");
            double v = expr();
            expect(")");
            return it->second(v);
        }
        fail("expected expression", t);
    }

    Arg argument() {
        Token at = peek();
        Arg a{ident(), -1, at};
        if (peek().text == "[") {
            take();
            a.index = integer();
            expect("]");
        }
        return a;
    }

    std::vector<int> resolve(const Arg &a, const std::map<std::string, Register> &regs, const char *kind) {
        auto it = regs.find(a.reg);
        if (it == regs.end()) {
            fail(std::string("unknown ") + kind + " register '" + a.reg + "'", a.at);
        }
        if (a.index >= it->second.size) {
            fail("index " + std::to_string(a.index) + " overflows register '" + a.reg + "' of size " +
                     std::to_string(it->second.size),
                 a.at);
        }
        std::vector<int> out;
        if (a.index >= 0) {
            out.push_back(it->second.offset + a.index);
        } else {
            for (int k = 0; k < it->second.size; k++) {
                out.push_back(it->second.offset + k);
            }
        }
        return out;
    }

    // Expands register-wide arguments elementwise.
    std::vector<std::vector<int>> broadcast(const std::vector<Arg> &args, const Token &at) {
        std::vector<std::vector<int>> lists;
        size_t width = 1;
        for (const Arg &a : args) {
            lists.push_back(resolve(a, qregs_, "quantum"));
            if (a.index < 0) {
                if (width != 1 && lists.back().size() != width) {
                    fail("register arguments differ in size", at);
                }
                width = lists.back().size();
            }
        }
        std::vector<std::vector<int>> rows(width);
        for (size_t k = 0; k < width; k++) {
            for (size_t j = 0; j < args.size(); j++) {
                rows[k].push_back(args[j].index < 0 ? lists[j][k] : lists[j][0]);
            }
        }
        return rows;
    }

    void statement(bool &started) {
        const Token t = peek();
        if (t.type != Token::Ident) {
            fail("expected statement", t);
        }
        std::string kw = take().text;
        if (kw == "OPENQASM") {
            if (started) {
                fail("OPENQASM header must come first", t);
            }
            if (peek().type != Token::Number) {
                fail("expected version number", peek());
            }
            take();
            expect(";");
        } else if (kw == "include") {
            const Token &f = peek();
            if (f.type != Token::String) {
                fail("expected file name", f);
            }
            if (f.text != "qelib1.inc") {
                fail("includes other than qelib1.inc are not supported", f);
            }
            take();
            expect(";");
        } else if (kw == "qreg" || kw == "creg") {
            Token nt = peek();
            std::string name = ident();
            expect("[");
            int size = integer();
            expect("]");
            expect(";");
            if (qregs_.count(name) || cregs_.count(name)) {
                fail("register '" + name + "' redeclared", nt);
            }
            if (kw == "qreg") {
                qregs_[name] = {nq_, size};
                nq_ += size;
            } else {
                cregs_[name] = {nc_, size};
                nc_ += size;
            }
        } else if (kw == "measure") {
            Arg q = argument();
            expect("->");
            Arg c = argument();
            expect(";");
            auto qs = resolve(q, qregs_, "quantum");
            auto cs = resolve(c, cregs_, "classical");
            if (qs.size() != cs.size()) {
                fail("measure operands differ in size", t);
            }
            for (size_t k = 0; k < qs.size(); k++) {
                Op op;
                op.kind = Op::Kind::Measure;
                op.qubits = {qs[k]};
                op.clbit = cs[k];
                ops_.push_back(op);
            }
        } else if (kw == "reset") {
            Arg q = argument();
            expect(";");
            for (int qi : resolve(q, qregs_, "quantum")) {
                Op op;
                op.kind = Op::Kind::Reset;
                op.qubits = {qi};
                ops_.push_back(op);
            }
        } else if (kw == "barrier") {
            Op op;
            op.kind = Op::Kind::Barrier;
            while (true) {
                for (int qi : resolve(argument(), qregs_, "quantum")) {
                    op.qubits.push_back(qi);
                }
                if (peek().text != ",") {
                    break;
                }
                take();
            }
            expect(";");
            ops_.push_back(op);
        } else if (kw == "gate" || kw == "opaque" || kw == "if") {
            fail("'" + kw + "' is outside the supported QASM subset", t);
        } else {
            std::string name = kw;
            if (name == "CX" || name == "cnot") {
                name = "cx";
            } else if (name == "U") {
                name = "u3";
            }
            if (!is_standard_gate(name)) {
                fail("unknown gate '" + kw + "'", t);
            }
            std::vector<double> params;
            if (peek().text == "(") {
                take();
                if (peek().text != ")") {
                    params.push_back(expr());
                    while (peek().text == ",") {
                        take();
                        params.push_back(expr());
                    }
                }
                expect(")");
            }
            if ((int)params.size() != standard_param_count(name)) {
                fail("gate '" + name + "' takes " + std::to_string(standard_param_count(name)) + " parameter(s)", t);
            }
            std::vector<Arg> args{argument()};
            while (peek().text == ",") {
                take();
                args.push_back(argument());
            }
            expect(";");
            if ((int)args.size() != standard_arity(name)) {
                fail("gate '" + name + "' acts on " + std::to_string(standard_arity(name)) + " qubit(s)", t);
            }
            Gate g = standard_gate(name, params);
            for (auto &qs : broadcast(args, t)) {
                for (size_t a = 0; a < qs.size(); a++) {
                    for (size_t b = 0; b < a; b++) {
                        if (qs[a] == qs[b]) {
                            fail("repeated qubit in gate arguments", t);
                        }
                    }
                }
                Op op;
                op.kind = Op::Kind::Gate;
                op.gate = g;
                op.qubits = qs;
                ops_.push_back(op);
            }
        }
        started = true;
    }
};

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

Circuit parse_qasm(const std::string &text) { return QasmParser(text).parse(); }

std::string emit_qasm(const Circuit &c) {
    std::ostringstream out;
    out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    if (c.n_qubits > 0) {
        out << "qreg q[" << c.n_qubits << "];\n";
    }
    if (c.n_clbits > 0) {
        out << "creg c[" << c.n_clbits << "];\n";
    }
    for (const Op &op : c.ops) {
        switch (op.kind) {
            case Op::Kind::Gate: {
                if (!is_standard_gate(op.gate.name)) {
                    throw QtkError("cannot emit custom gate '" + op.gate.name + "' as QASM");
                }
                out << op.gate.name;
                if (!op.gate.params.empty()) {
                    out << "(";
                    for (size_t k = 0; k < op.gate.params.size(); k++) {
                        out << (k ? "," : "") << fmt_double(op.gate.params[k]);
                    }
                    out << ")";
                }
                for (size_t k = 0; k < op.qubits.size(); k++) {
                    out << (k ? "," : " ") << "q[" << op.qubits[k] << "]";
                }
                out << ";\n";
                break;
            }
            case Op::Kind::Measure:
                out << "measure q[" << op.qubits[0] << "] -> c[" << op.clbit << "];\n";
                break;
            case Op::Kind::Reset:
                out << "reset q[" << op.qubits[0] << "];\n";
                break;
            case Op::Kind::Barrier:
                out << "barrier";
                for (size_t k = 0; k < op.qubits.size(); k++) {
                    out << (k ? "," : " ") << "q[" << op.qubits[k] << "]";
                }
                out << ";\n";
                break;
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Topology rewriting

namespace {

void emit_directed_cx(Circuit &out, const Topology &t, int c, int tg) {
    if (t.has(c, tg)) {
        out.add("cx", {c, tg});
    } else if (t.has(tg, c)) {
        // Conjugating by Hadamards on both wires reverses a CNOT.
        out.add("h", {c}).add("h", {tg});
        out.add("cx", {tg, c});
        out.add("h", {c}).add("h", {tg});
    } else {
        throw QtkError("no edge between " + std::to_string(c) + " and " + std::to_string(tg));
    }
}

void emit_routed_cx(Circuit &out, const Topology &t, int c, int tg) {
    if (t.linked(c, tg)) {
        emit_directed_cx(out, t, c, tg);
        return;
    }
    for (int m = 0; m < t.n_qubits; m++) {
        if (m != c && m != tg && t.linked(c, m) && t.linked(m, tg)) {
            emit_directed_cx(out, t, m, tg);
            emit_directed_cx(out, t, c, m);
            emit_directed_cx(out, t, m, tg);
            emit_directed_cx(out, t, c, m);
            return;
        }
    }
    throw QtkError("CNOT " + std::to_string(c) + "->" + std::to_string(tg) + " is more than two hops apart");
}

}  // namespace

Circuit reroute_for_topology(const Circuit &c, const Topology &t) {
    if (c.n_qubits > t.n_qubits) {
        throw QtkError("circuit is wider than the topology");
    }
    Circuit out(c.n_qubits, c.n_clbits);
    for (const Op &op : c.ops) {
        if (op.kind != Op::Kind::Gate || op.gate.arity == 1) {
            out.ops.push_back(op);
            continue;
        }
        const std::string &nm = op.gate.name;
        int a = op.qubits[0], b = op.qubits[1];
        if (nm == "cx") {
            emit_routed_cx(out, t, a, b);
        } else if (nm == "cz") {
            out.add("h", {b});
            emit_routed_cx(out, t, a, b);
            out.add("h", {b});
        } else if (nm == "swap") {
            emit_routed_cx(out, t, a, b);
            emit_routed_cx(out, t, b, a);
            emit_routed_cx(out, t, a, b);
        } else {
            throw QtkError("reroute_for_topology: cannot rewrite multi-qubit gate '" + nm + "'");
        }
    }
    return out;
}

CircuitMetrics metrics(const Circuit &c) {
    CircuitMetrics m;
    std::vector<int> frontier(c.n_qubits, 0);
    for (const Op &op : c.ops) {
        int level = 0;
        for (int q : op.qubits) {
            level = std::max(level, frontier[q]);
        }
        if (op.kind == Op::Kind::Barrier) {
            for (int q : op.qubits) {
                frontier[q] = level;
            }
            continue;
        }
        for (int q : op.qubits) {
            frontier[q] = level + 1;
        }
        if (op.kind == Op::Kind::Gate) {
            m.gate_count++;
            if (op.gate.name == "cx") {
                m.cnot_count++;
            }
        }
    }
    for (int f : frontier) {
        m.depth = std::max(m.depth, f);
    }
    return m;
}

CoherenceReport idle_decoherence_experiment(int n_qubits, int idle_steps, const NoiseModel &noise, int shots,
                                            Rng &rng) {
    if (n_qubits < 1 || idle_steps < 0) {
        throw QtkError("idle_decoherence_experiment: bad sizes");
    }
    Circuit c(n_qubits, n_qubits);
    for (int q = 0; q < n_qubits; q++) {
        c.add("x", {q});
    }
    for (int s = 0; s < idle_steps; s++) {
        for (int q = 0; q < n_qubits; q++) {
            c.add("id", {q});
        }
    }
    c.measure_all();
    ShotHistogram h = sample(c, shots, &noise, rng);
    CoherenceReport r;
    r.per_qubit.assign(n_qubits, 0.0);
    for (const auto &[bits, cnt] : h.counts) {
        bool all = true;
        for (int q = 0; q < n_qubits; q++) {
            if (bits[q] == '1') {
                r.per_qubit[q] += cnt;
            } else {
                all = false;
            }
        }
        if (all) {
            r.combined += cnt;
        }
    }
    for (double &v : r.per_qubit) {
        v /= shots;
    }
    r.combined /= shots;
    return r;
}

}  // namespace qtk
