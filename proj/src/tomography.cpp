#include "qtk/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "qtk/gates.hpp"

namespace qtk {

namespace {

// Eigenprojector for outcome bit b (0 is the +1 eigenvector) of a Pauli axis.
CMat axis_projector(char axis, int b) {
    const double r = 1 / std::sqrt(2.0);
    CVec v(2);
    switch (axis) {
        case 'z':
            v << (b ? 0.0 : 1.0), (b ? 1.0 : 0.0);
            break;
        case 'x':
            v << r, (b ? -r : r);
            break;
        case 'y':
            v << r, cplx(0, b ? -r : r);
            break;
        default:
            throw QtkError(std::string("unknown measurement axis '") + axis + "'");
    }
    return v * v.adjoint();
}

std::vector<CMat> pauli_words(int n) {
    const std::string letters = "IXYZ";
    std::vector<CMat> words;
    for (uint64_t k = 0; k < (1ULL << (2 * n)); k++) {
        std::string w;
        for (int q = n - 1; q >= 0; q--) {
            w += letters[(k >> (2 * q)) & 3];
        }
        words.push_back(Observable::pauli(w).matrix);
    }
    return words;
}

void check_record(const MeasurementRecord &rec, const Povm &povm) {
    if (rec.frequencies.size() != povm.projectors.size()) {
        throw QtkError("measurement record does not match the POVM");
    }
}

}  // namespace

std::vector<double> project_to_simplex(std::vector<double> v) {
    if (v.empty()) {
        throw QtkError("cannot project an empty vector");
    }
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0, tau = 0;
    for (size_t j = 0; j < u.size(); j++) {
        cum += u[j];
        double t = (cum - 1) / (double)(j + 1);
        if (u[j] - t > 0) {
            tau = t;
        }
    }
    for (double &x : v) {
        x = std::max(0.0, x - tau);
    }
    return v;
}

void Povm::validate() const {
    if (projectors.size() != labels.size() || projectors.size() != group.size() || projectors.empty()) {
        throw QtkError("POVM fields have inconsistent lengths");
    }
    Eigen::Index d = (Eigen::Index)1 << n_qubits;
    std::vector<CMat> sums(group_names.size(), CMat::Zero(d, d));
    for (size_t i = 0; i < projectors.size(); i++) {
        const CMat &p = projectors[i];
        if (p.rows() != d || (p - p.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
            throw QtkError("POVM element is not a Hermitian operator of the right size");
        }
        Eigen::SelfAdjointEigenSolver<CMat> es(p, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9) {
            throw QtkError("POVM element is not positive semidefinite");
        }
        if (group[i] < 0 || group[i] >= (int)group_names.size()) {
            throw QtkError("POVM group index out of range");
        }
        sums[group[i]] += p;
    }
    for (const CMat &s : sums) {
        if ((s - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9) {
            throw QtkError("POVM group does not sum to the identity");
        }
    }
}

Povm Povm::pauli_bases(const std::vector<std::string> &bases) {
    if (bases.empty()) {
        throw QtkError("need at least one measurement basis");
    }
    Povm p;
    p.n_qubits = (int)bases[0].size();
    for (const std::string &b : bases) {
        if ((int)b.size() != p.n_qubits || b.empty()) {
            throw QtkError("all bases need one axis per qubit");
        }
        int g = (int)p.group_names.size();
        p.group_names.push_back(b);
        for (uint64_t out = 0; out < (1ULL << p.n_qubits); out++) {
            std::string bits = index_to_bits(out, p.n_qubits);
            CMat proj = axis_projector(b[0], bits[0] - '0');
            for (int q = 1; q < p.n_qubits; q++) {
                proj = kron(proj, axis_projector(b[q], bits[q] - '0'));
            }
            p.projectors.push_back(proj);
            p.labels.push_back(b + ":" + bits);
            p.group.push_back(g);
        }
    }
    p.validate();
    return p;
}

Povm Povm::all_pauli_bases(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 4) {
        throw QtkError("all_pauli_bases supports 1 to 4 qubits");
    }
    std::vector<std::string> bases;
    for (uint64_t k = 0; k < (uint64_t)std::pow(3, n_qubits); k++) {
        std::string b;
        uint64_t v = k;
        for (int q = 0; q < n_qubits; q++) {
            b = "zyx"[v % 3] + b;
            v /= 3;
        }
        bases.push_back(b);
    }
    return pauli_bases(bases);
}

MeasurementRecord simulate_povm(const DensityMatrix &rho, const Povm &povm, int shots, Rng &rng) {
    if (rho.n_qubits() != povm.n_qubits) {
        throw QtkError("state and POVM dimensions differ");
    }
    if (shots < 0) {
        throw QtkError("negative shot count");
    }
    size_t n = povm.projectors.size();
    std::vector<double> probs(n);
    for (size_t i = 0; i < n; i++) {
        probs[i] = std::max(0.0, (povm.projectors[i] * rho.elems()).trace().real());
    }
    MeasurementRecord rec;
    rec.counts.assign(n, 0);
    rec.frequencies.assign(n, 0.0);
    rec.shots.assign(povm.group_names.size(), shots);
    for (size_t g = 0; g < povm.group_names.size(); g++) {
        std::vector<size_t> members;
        std::vector<double> p;
        for (size_t i = 0; i < n; i++) {
            if (povm.group[i] == (int)g) {
                members.push_back(i);
                p.push_back(probs[i]);
            }
        }
        if (shots == 0) {
            double total = std::accumulate(p.begin(), p.end(), 0.0);
            for (size_t k = 0; k < members.size(); k++) {
                rec.frequencies[members[k]] = p[k] / total;
            }
            continue;
        }
        for (int s = 0; s < shots; s++) {
            rec.counts[members[sample_index(p, rng)]]++;
        }
        for (size_t i : members) {
            rec.frequencies[i] = (double)rec.counts[i] / shots;
        }
    }
    return rec;
}

MeasurementRecord simulate_povm(const StateVector &s, const Povm &povm, int shots, Rng &rng) {
    return simulate_povm(DensityMatrix::pure(s), povm, shots, rng);
}

CMat linear_inversion(const MeasurementRecord &rec, const Povm &povm) {
    check_record(rec, povm);
    int n = povm.n_qubits;
    Eigen::Index d = (Eigen::Index)1 << n;
    auto words = pauli_words(n);
    Eigen::Index rows = (Eigen::Index)povm.projectors.size() + 1;
    Eigen::Index cols = (Eigen::Index)words.size();
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd w(rows);
    for (Eigen::Index i = 0; i + 1 < rows; i++) {
        for (Eigen::Index k = 0; k < cols; k++) {
            a(i, k) = (povm.projectors[i] * words[k]).trace().real();
        }
        w[i] = rec.frequencies[i];
    }
    // Trace row: only the identity word has nonzero trace.
    a.row(rows - 1).setZero();
    a(rows - 1, 0) = (double)d;
    w[rows - 1] = 1;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-10);
    if (cod.rank() < cols) {
        throw QtkError("measurement set is not informationally complete");
    }
    Eigen::VectorXd c = cod.solve(w);
    CMat rho = CMat::Zero(d, d);
    for (Eigen::Index k = 0; k < cols; k++) {
        rho += c[k] * words[k];
    }
    return rho;
}

DensityMatrix psd_project(const CMat &m) {
    if (m.rows() != m.cols() || m.rows() < 2 || (m.rows() & (m.rows() - 1)) != 0) {
        throw QtkError("psd_project expects a square matrix of power-of-two size");
    }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-8) {
        throw QtkError("psd_project expects a Hermitian matrix");
    }
    if (std::abs(m.trace() - cplx(1)) > 1e-6) {
        throw QtkError("psd_project expects trace one");
    }
    CMat h = (m + m.adjoint()) / 2;
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::vector<double> proj = project_to_simplex(ev);
    Eigen::VectorXd lam = Eigen::Map<Eigen::VectorXd>(proj.data(), (Eigen::Index)proj.size());
    CMat out = es.eigenvectors() * lam.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    out = (out + out.adjoint()) / 2;
    int n = 0;
    while ((1 << n) < m.rows()) {
        n++;
    }
    return DensityMatrix(n, out);
}

double log_likelihood(const MeasurementRecord &rec, const Povm &povm, const CMat &rho) {
    check_record(rec, povm);
    double l = 0;
    for (size_t i = 0; i < povm.projectors.size(); i++) {
        double w = rec.frequencies[i];
        if (w == 0) {
            continue;
        }
        double p = (povm.projectors[i] * rho).trace().real();
        if (p <= 0) {
            return -INFINITY;
        }
        l += w * std::log(p);
    }
    return l;
}

MlResult ml_estimate(const MeasurementRecord &rec, const Povm &povm, const MlConfig &cfg) {
    check_record(rec, povm);
    int n = povm.n_qubits;
    Eigen::Index d = (Eigen::Index)1 << n;
    double groups = (double)povm.group_names.size();
    // Projectors have unit operator norm, so the gradient's scale grows with
    // the number of settings.
    const double step0 = 0.5 / groups;

    // Traceless directions: every Pauli word except the identity.
    auto words = pauli_words(n);
    words.erase(words.begin());
    Eigen::Index np = (Eigen::Index)povm.projectors.size(), nw = (Eigen::Index)words.size();
    Eigen::MatrixXd overlap(np, nw);
    for (Eigen::Index i = 0; i < np; i++) {
        for (Eigen::Index a = 0; a < nw; a++) {
            overlap(i, a) = (povm.projectors[i] * words[a]).trace().real();
        }
    }

    CMat rho = CMat::Identity(d, d) / (double)d;
    double l = log_likelihood(rec, povm, rho);
    MlResult r;
    r.log_likelihood.push_back(l);
    double step = step0 / 2;

    // Accepts the first non-decreasing point along rho + t dir, halving t.
    auto line_search = [&](const CMat &dir, double t, double t_min) -> std::optional<double> {
        for (; t > t_min; t /= 2) {
            CMat trial = psd_project(rho + t * dir).elems();
            double lt = log_likelihood(rec, povm, trial);
            if (lt >= l) {
                double gain = lt - l;
                rho = trial;
                l = lt;
                r.log_likelihood.push_back(l);
                step = t;
                return gain;
            }
        }
        return std::nullopt;
    };

    for (r.iterations = 0; r.iterations < cfg.max_iterations; r.iterations++) {
        CMat grad = CMat::Zero(d, d);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(nw);
        Eigen::MatrixXd curv = Eigen::MatrixXd::Zero(nw, nw);
        for (Eigen::Index i = 0; i < np; i++) {
            double w = rec.frequencies[(size_t)i];
            if (w == 0) {
                continue;
            }
            double p = (povm.projectors[(size_t)i] * rho).trace().real();
            grad += (w / p) * povm.projectors[(size_t)i];
            g += (w / p) * overlap.row(i).transpose();
            curv += (w / (p * p)) * overlap.row(i).transpose() * overlap.row(i);
        }
        grad -= (grad.trace() / (double)d) * CMat::Identity(d, d);
        grad = (grad + grad.adjoint()) / 2;

        // Newton direction in the Pauli coordinates; least squares covers
        // settings that do not pin every coordinate.
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(curv);
        cod.setThreshold(1e-12);
        Eigen::VectorXd c = cod.solve(g);
        CMat newton = CMat::Zero(d, d);
        for (Eigen::Index a = 0; a < nw; a++) {
            newton += c[a] * words[(size_t)a];
        }

        std::optional<double> gain = line_search(newton, 1.0, 1e-3);
        if (!gain) {
            // Grow the gradient step after each success so the stopping
            // rule is not hit just because the step got small.
            gain = line_search(grad, std::min(2 * step, 1e6 * step0), 1e-14);
        }
        if (!gain || *gain < cfg.gain_tol) {
            break;
        }
    }
    for (size_t i = 1; i < r.log_likelihood.size(); i++) {
        r.monotone &= r.log_likelihood[i] >= r.log_likelihood[i - 1];
    }
    r.rho = DensityMatrix(n, rho);
    return r;
}

std::vector<std::pair<double, CVec>> spectral_report(const DensityMatrix &rho) {
    Eigen::SelfAdjointEigenSolver<CMat> es(rho.elems());
    std::vector<std::pair<double, CVec>> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); k++) {
        out.push_back({es.eigenvalues()[k], fix_phase(es.eigenvectors().col(k))});
    }
    auto lead = [](const CVec &v) {
        Eigen::Index i = 0;
        while (i < v.size() && std::abs(v[i]) < 1e-9) {
            i++;
        }
        return i;
    };
    std::stable_sort(out.begin(), out.end(), [&](const auto &a, const auto &b) {
        if (std::abs(a.first - b.first) > 1e-12) {
            return a.first > b.first;
        }
        return lead(a.second) < lead(b.second);
    });
    return out;
}

}  // namespace qtk
