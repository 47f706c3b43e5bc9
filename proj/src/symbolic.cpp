// Copyright 2026 The qnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qnet/symbolic.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "qnet/error.hpp"
#include "qnet/gf2.hpp"

namespace qnet {

struct SymState::Node {
    Kind kind = Kind::basis;
    bool pure = true;
    Axis axis = Axis::Z;
    int index = 1;
    std::vector<PauliString> gens;
    std::vector<int> dims;
    std::vector<SymState> children;
    std::vector<Complex> coeffs;
};

namespace {

using NodePtr = std::shared_ptr<SymState::Node>;

NodePtr make_node(SymState::Kind k) {
    auto n = std::make_shared<SymState::Node>();
    n->kind = k;
    return n;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

Eigen::VectorXcd kron(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
    Eigen::VectorXcd out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); i++) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

Eigen::MatrixXcd stabilizer_projector(const std::vector<PauliString> &gens) {
    const std::size_t n = gens.empty() ? 0 : gens[0].size();
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto &g : gens) {
        p = p * (Eigen::MatrixXcd::Identity(dim, dim) + g.matrix()) * 0.5;
    }
    return p;
}

}  // namespace

SymState SymState::basis(Axis axis, int index) {
    if (index != 1 && index != 2) {
        throw Error("invalid-expression", "basis index must be 1 or 2");
    }
    auto n = make_node(Kind::basis);
    n->axis = axis;
    n->index = index;
    n->dims = {2};
    return SymState(n);
}

SymState SymState::stabilizer(std::vector<PauliString> generators) {
    Tableau::from_stabilizers(generators);  // validates
    auto n = make_node(Kind::stabilizer);
    n->dims.assign(generators.empty() ? 0 : generators[0].size(), 2);
    n->gens = std::move(generators);
    return SymState(n);
}

SymState SymState::mixed(std::vector<int> dims) {
    for (int d : dims) {
        if (d < 1) {
            throw Error("invalid-expression", "dimension must be positive");
        }
    }
    auto n = make_node(Kind::mixed);
    n->pure = false;
    n->dims = std::move(dims);
    return SymState(n);
}

SymState SymState::projector(const SymState &pure) {
    if (!pure.is_pure()) {
        throw Error("invalid-expression", "projector of a mixed expression");
    }
    auto n = make_node(Kind::projector);
    n->pure = false;
    n->dims = pure.dims();
    n->children = {pure};
    return SymState(n);
}

SymState tensor(const SymState &a, const SymState &b) {
    auto n = make_node(SymState::Kind::tensor);
    n->pure = a.is_pure() && b.is_pure();
    for (const SymState *s : {&a, &b}) {
        if (s->kind() == SymState::Kind::tensor) {
            n->children.insert(n->children.end(), s->node().children.begin(), s->node().children.end());
        } else {
            n->children.push_back(*s);
        }
    }
    n->dims = a.dims();
    auto bd = b.dims();
    n->dims.insert(n->dims.end(), bd.begin(), bd.end());
    return SymState(n);
}

SymState tensor(const std::vector<SymState> &parts) {
    if (parts.empty()) {
        throw Error("invalid-expression", "empty tensor product");
    }
    SymState acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); i++) {
        acc = tensor(acc, parts[i]);
    }
    return acc;
}

SymState operator+(const SymState &a, const SymState &b) {
    if (a.is_pure() != b.is_pure()) {
        throw Error("invalid-expression", "sum of a pure and a mixed expression");
    }
    if (a.dims() != b.dims()) {
        throw Error("dim-mismatch", "sum of expressions on different spaces");
    }
    auto n = make_node(SymState::Kind::sum);
    n->pure = a.is_pure();
    n->dims = a.dims();
    for (const SymState *s : {&a, &b}) {
        if (s->kind() == SymState::Kind::sum) {
            n->children.insert(n->children.end(), s->node().children.begin(), s->node().children.end());
            n->coeffs.insert(n->coeffs.end(), s->node().coeffs.begin(), s->node().coeffs.end());
        } else {
            n->children.push_back(*s);
            n->coeffs.push_back(1.0);
        }
    }
    return SymState(n);
}

SymState operator*(Complex c, const SymState &s) {
    auto n = make_node(SymState::Kind::sum);
    n->pure = s.is_pure();
    n->dims = s.dims();
    if (s.kind() == SymState::Kind::sum) {
        n->children = s.node().children;
        for (Complex k : s.node().coeffs) {
            n->coeffs.push_back(c * k);
        }
    } else {
        n->children = {s};
        n->coeffs = {c};
    }
    return SymState(n);
}

SymState::Kind SymState::kind() const {
    return node_->kind;
}

bool SymState::is_pure() const {
    return node_->pure;
}

std::vector<int> SymState::dims() const {
    return node_->dims;
}

const std::vector<PauliString> &SymState::generators() const {
    return node_->gens;
}

std::string SymState::str() const {
    const Node &n = *node_;
    std::ostringstream out;
    switch (n.kind) {
        case Kind::basis:
            out << axis_char(n.axis) << n.index;
            break;
        case Kind::stabilizer:
            out << "StabilizerState(" << render_stabilizer(*this) << ")";
            break;
        case Kind::mixed:
            out << "MixedState(";
            for (std::size_t i = 0; i < n.dims.size(); i++) {
                out << (i ? "," : "") << n.dims[i];
            }
            out << ")";
            break;
        case Kind::projector:
            out << "Projector(" << n.children[0].str() << ")";
            break;
        case Kind::tensor:
            for (std::size_t i = 0; i < n.children.size(); i++) {
                out << (i ? " (x) " : "") << n.children[i].str();
            }
            break;
        case Kind::sum:
            out << "(";
            for (std::size_t i = 0; i < n.children.size(); i++) {
                out << (i ? " + " : "") << n.coeffs[i].real();
                if (n.coeffs[i].imag() != 0) {
                    out << (n.coeffs[i].imag() > 0 ? "+" : "") << n.coeffs[i].imag() << "i";
                }
                out << "*" << n.children[i].str();
            }
            out << ")";
            break;
    }
    return out.str();
}

Eigen::VectorXcd SymState::ket() const {
    const Node &n = *node_;
    if (!n.pure) {
        throw Error("invalid-expression", "ket of a mixed expression " + str());
    }
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd v;
    switch (n.kind) {
        case Kind::basis: {
            v = Eigen::VectorXcd::Zero(2);
            Complex sgn = n.index == 1 ? 1.0 : -1.0;
            switch (n.axis) {
                case Axis::Z:
                    v(n.index - 1) = 1;
                    break;
                case Axis::X:
                    v << r, sgn * r;
                    break;
                case Axis::Y:
                    v << r, sgn * Complex(0, r);
                    break;
            }
            return v;
        }
        case Kind::stabilizer: {
            Eigen::MatrixXcd p = stabilizer_projector(n.gens);
            Eigen::Index best = 0;
            double best_norm = -1;
            for (Eigen::Index c = 0; c < p.cols(); c++) {
                double nc = p.col(c).norm();
                if (nc > best_norm + 1e-12) {
                    best_norm = nc;
                    best = c;
                }
            }
            v = p.col(best) / best_norm;
            break;
        }
        case Kind::tensor:
            v = n.children[0].ket();
            for (std::size_t i = 1; i < n.children.size(); i++) {
                v = kron(v, n.children[i].ket());
            }
            break;
        case Kind::sum: {
            v = n.coeffs[0] * n.children[0].ket();
            for (std::size_t i = 1; i < n.children.size(); i++) {
                v += n.coeffs[i] * n.children[i].ket();
            }
            break;
        }
        default:
            break;
    }
    double norm = v.norm();
    if (norm < 1e-12) {
        throw Error("invalid-expression", "zero-norm state " + str());
    }
    v /= norm;
    // Fix the global phase: first significant amplitude real and positive.
    for (Eigen::Index i = 0; i < v.size(); i++) {
        if (std::abs(v(i)) > 1e-9) {
            v *= std::conj(v(i)) / std::abs(v(i));
            break;
        }
    }
    return v;
}

Eigen::MatrixXcd SymState::density() const {
    const Node &n = *node_;
    if (n.pure) {
        Eigen::VectorXcd v = ket();
        return v * v.adjoint();
    }
    Eigen::MatrixXcd rho;
    switch (n.kind) {
        case Kind::mixed: {
            Eigen::Index d = 1;
            for (int k : n.dims) {
                d *= k;
            }
            return Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
        }
        case Kind::projector: {
            Eigen::VectorXcd v = n.children[0].ket();
            return v * v.adjoint();
        }
        case Kind::tensor:
            rho = n.children[0].density();
            for (std::size_t i = 1; i < n.children.size(); i++) {
                rho = kron(rho, n.children[i].density());
            }
            return rho;
        case Kind::sum: {
            for (std::size_t i = 0; i < n.children.size(); i++) {
                if (std::abs(n.coeffs[i].imag()) > 1e-12 || n.coeffs[i].real() < 0) {
                    throw Error("invalid-expression", "mixture weights must be nonnegative reals");
                }
                Eigen::MatrixXcd term = n.coeffs[i].real() * n.children[i].density();
                rho = i == 0 ? term : Eigen::MatrixXcd(rho + term);
            }
            Complex tr = rho.trace();
            if (std::abs(tr) < 1e-12) {
                throw Error("invalid-expression", "zero-trace mixture");
            }
            return rho / tr.real();
        }
        default:
            break;
    }
    throw Error("invalid-expression", str());
}

SymState parse_stabilizer(std::string_view text) {
    std::string s(text);
    // Accept the typographic minus sign as well as '-'.
    for (std::size_t pos; (pos = s.find("\xE2\x88\x92")) != std::string::npos;) {
        s.replace(pos, 3, "-");
    }
    std::istringstream in(s);
    std::vector<PauliString> gens;
    std::string word;
    while (in >> word) {
        gens.push_back(PauliString::parse(word));
    }
    if (gens.empty()) {
        throw Error("rank-mismatch", "no generators");
    }
    for (const auto &g : gens) {
        if (g.size() != gens[0].size()) {
            throw Error("invalid-stabilizer-group", "words have different lengths");
        }
    }
    return SymState::stabilizer(std::move(gens));
}

std::string render_stabilizer(const SymState &s) {
    std::string out;
    for (const auto &g : s.generators()) {
        if (!out.empty()) {
            out += ' ';
        }
        std::string w = g.str();
        out += w[0] == '+' ? w.substr(1) : w;
    }
    return out;
}

SymState perfect_pair() {
    SymState z1 = SymState::basis(Axis::Z, 1);
    SymState z2 = SymState::basis(Axis::Z, 2);
    return (tensor(z1, z1) + tensor(z2, z2)) / std::sqrt(2.0);
}

SymState depolarized_pair(double f) {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw Error("invalid-weight", "pair weight must lie in [0,1]");
    }
    return f * SymState::projector(perfect_pair()) + (1.0 - f) * SymState::mixed_qubits(2);
}

SymState noisy_pair_surrogate(double efficiency) {
    return depolarized_pair(efficiency);
}

// ---------------------------------------------------------------------------
// Operators

std::string gate_name(Gate g) {
    switch (g) {
        case Gate::I:
            return "I";
        case Gate::X:
            return "X";
        case Gate::Y:
            return "Y";
        case Gate::Z:
            return "Z";
        case Gate::H:
            return "H";
        case Gate::S:
            return "S";
        case Gate::Sdag:
            return "Sdag";
        case Gate::T:
            return "T";
        case Gate::CNOT:
            return "CNOT";
        case Gate::CZ:
            return "CZ";
    }
    return "?";
}

std::size_t gate_arity(Gate g) {
    return g == Gate::CNOT || g == Gate::CZ ? 2 : 1;
}

struct SymOperator::Node {
    enum class Kind { named, product, tensor } kind = Kind::named;
    Gate gate = Gate::I;
    std::vector<SymOperator> parts;
    std::size_t arity = 1;
};

SymOperator::SymOperator(Gate g) {
    auto n = std::make_shared<Node>();
    n->gate = g;
    n->arity = gate_arity(g);
    node_ = n;
}

SymOperator operator*(const SymOperator &a, const SymOperator &b) {
    if (a.arity() != b.arity()) {
        throw Error("dim-mismatch", "operator product of different arities");
    }
    auto n = std::make_shared<SymOperator::Node>();
    n->kind = SymOperator::Node::Kind::product;
    n->parts = {a, b};
    n->arity = a.arity();
    return SymOperator(n);
}

SymOperator tensor(const SymOperator &a, const SymOperator &b) {
    auto n = std::make_shared<SymOperator::Node>();
    n->kind = SymOperator::Node::Kind::tensor;
    n->parts = {a, b};
    n->arity = a.arity() + b.arity();
    return SymOperator(n);
}

std::size_t SymOperator::arity() const {
    return node_->arity;
}

std::string SymOperator::str() const {
    switch (node_->kind) {
        case Node::Kind::named:
            return gate_name(node_->gate);
        case Node::Kind::product:
            return node_->parts[0].str() + "*" + node_->parts[1].str();
        case Node::Kind::tensor:
            return "(" + node_->parts[0].str() + " (x) " + node_->parts[1].str() + ")";
    }
    return "?";
}

Eigen::MatrixXcd SymOperator::matrix() const {
    using C = Complex;
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd m;
    switch (node_->kind) {
        case Node::Kind::product:
            return node_->parts[0].matrix() * node_->parts[1].matrix();
        case Node::Kind::tensor:
            return kron(node_->parts[0].matrix(), node_->parts[1].matrix());
        case Node::Kind::named:
            break;
    }
    switch (node_->gate) {
        case Gate::I:
            return Eigen::MatrixXcd::Identity(2, 2);
        case Gate::X:
            m.resize(2, 2);
            m << 0, 1, 1, 0;
            return m;
        case Gate::Y:
            m.resize(2, 2);
            m << 0, C(0, -1), C(0, 1), 0;
            return m;
        case Gate::Z:
            m.resize(2, 2);
            m << 1, 0, 0, -1;
            return m;
        case Gate::H:
            m.resize(2, 2);
            m << r, r, r, -r;
            return m;
        case Gate::S:
            m.resize(2, 2);
            m << 1, 0, 0, C(0, 1);
            return m;
        case Gate::Sdag:
            m.resize(2, 2);
            m << 1, 0, 0, C(0, -1);
            return m;
        case Gate::T:
            m.resize(2, 2);
            m << 1, 0, 0, std::polar(1.0, M_PI / 4);
            return m;
        case Gate::CNOT:
            m = Eigen::MatrixXcd::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
            return m;
        case Gate::CZ:
            m = Eigen::MatrixXcd::Identity(4, 4);
            m(3, 3) = -1;
            return m;
    }
    return m;
}

namespace {

void collect_steps(const SymOperator::Node &n, std::size_t offset, std::vector<SymOperator::Step> &out);

}  // namespace

std::vector<SymOperator::Step> SymOperator::clifford_steps() const {
    std::vector<Step> out;
    collect_steps(*node_, 0, out);
    return out;
}

namespace {

void collect_steps(const SymOperator::Node &n, std::size_t offset, std::vector<SymOperator::Step> &out) {
    using K = SymOperator::Node::Kind;
    switch (n.kind) {
        case K::named:
            if (n.gate == Gate::T) {
                throw Error("unsupported-on-backend", "T is not a Clifford gate");
            }
            if (n.gate != Gate::I) {
                out.push_back(SymOperator::Step{n.gate, {offset, offset + 1}});
            }
            return;
        case K::product: {
            // parts[1] acts first.
            std::vector<SymOperator::Step> tmp;
            collect_steps(n.parts[1].node(), offset, tmp);
            collect_steps(n.parts[0].node(), offset, tmp);
            out.insert(out.end(), tmp.begin(), tmp.end());
            return;
        }
        case K::tensor:
            collect_steps(n.parts[0].node(), offset, out);
            collect_steps(n.parts[1].node(), offset + n.parts[0].arity(), out);
            return;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Channels

namespace {

void check_weight(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error("invalid-weight", std::string(what) + " must lie in [0,1]");
    }
}

std::vector<PauliString> all_paulis(std::size_t n) {
    std::vector<PauliString> out;
    std::size_t total = std::size_t{1} << (2 * n);
    static constexpr char letters[4] = {'I', 'X', 'Y', 'Z'};
    for (std::size_t k = 0; k < total; k++) {
        PauliString p(n);
        for (std::size_t q = 0; q < n; q++) {
            p.set(q, letters[(k >> (2 * (n - 1 - q))) & 3]);
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

SymChannel SymChannel::depolarize(double p, std::size_t arity) {
    check_weight(p, "depolarizing probability");
    SymChannel c;
    c.kind_ = Kind::depolarize;
    c.param_ = p;
    c.arity_ = arity;
    return c;
}

SymChannel SymChannel::dephase(double p) {
    check_weight(p, "dephasing probability");
    SymChannel c;
    c.kind_ = Kind::dephase;
    c.param_ = p;
    return c;
}

SymChannel SymChannel::amplitude_damp(double gamma) {
    check_weight(gamma, "damping gamma");
    SymChannel c;
    c.kind_ = Kind::amplitude_damp;
    c.param_ = gamma;
    return c;
}

SymChannel SymChannel::pauli_mixture(std::vector<std::pair<PauliString, double>> terms) {
    if (terms.empty()) {
        throw Error("invalid-weight", "empty Pauli mixture");
    }
    double total = 0;
    for (auto &[p, w] : terms) {
        check_weight(w, "Pauli mixture weight");
        if (p.size() != terms[0].first.size()) {
            throw Error("dim-mismatch", "Pauli mixture terms of different lengths");
        }
        p.phase = 0;
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error("invalid-weight", "Pauli mixture weights must sum to 1");
    }
    SymChannel c;
    c.kind_ = Kind::pauli_mixture;
    c.arity_ = terms[0].first.size();
    c.terms_ = std::move(terms);
    return c;
}

std::string SymChannel::str() const {
    std::ostringstream out;
    switch (kind_) {
        case Kind::depolarize:
            out << "Depolarize(" << param_ << ")";
            break;
        case Kind::dephase:
            out << "Dephase(" << param_ << ")";
            break;
        case Kind::amplitude_damp:
            out << "AmplitudeDamp(" << param_ << ")";
            break;
        case Kind::pauli_mixture:
            out << "PauliMixture(";
            for (std::size_t i = 0; i < terms_.size(); i++) {
                out << (i ? ", " : "") << terms_[i].first.str().substr(1) << ":" << terms_[i].second;
            }
            out << ")";
            break;
    }
    return out.str();
}

std::vector<Eigen::MatrixXcd> SymChannel::kraus(int dim) const {
    std::vector<Eigen::MatrixXcd> ks;
    if (dim != 2) {
        if (kind_ != Kind::depolarize || arity_ != 1) {
            throw Error("dim-mismatch", str() + " is defined on qubits only");
        }
        ks.push_back(std::sqrt(1 - param_) * Eigen::MatrixXcd::Identity(dim, dim));
        if (param_ > 0) {
            double w = std::sqrt(param_ / dim);
            for (int i = 0; i < dim; i++) {
                for (int j = 0; j < dim; j++) {
                    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(dim, dim);
                    k(i, j) = w;
                    ks.push_back(k);
                }
            }
        }
        return ks;
    }
    if (kind_ == Kind::amplitude_damp) {
        Eigen::MatrixXcd k0 = Eigen::MatrixXcd::Zero(2, 2);
        Eigen::MatrixXcd k1 = Eigen::MatrixXcd::Zero(2, 2);
        k0(0, 0) = 1;
        k0(1, 1) = std::sqrt(1 - param_);
        k1(0, 1) = std::sqrt(param_);
        ks.push_back(k0);
        if (param_ > 0) {
            ks.push_back(k1);
        }
        return ks;
    }
    for (const auto &[p, w] : pauli_form().terms) {
        if (w > 0) {
            ks.push_back(std::sqrt(w) * p.matrix());
        }
    }
    return ks;
}

SymChannel::PauliForm SymChannel::pauli_form() const {
    PauliForm f;
    switch (kind_) {
        case Kind::depolarize: {
            double each = param_ / static_cast<double>(std::size_t{1} << (2 * arity_));
            for (auto &p : all_paulis(arity_)) {
                double w = p.is_identity() ? 1 - param_ + each : each;
                f.terms.emplace_back(std::move(p), w);
            }
            break;
        }
        case Kind::dephase:
            f.terms.emplace_back(PauliString::parse("I"), 1 - param_);
            f.terms.emplace_back(PauliString::parse("Z"), param_);
            break;
        case Kind::amplitude_damp: {
            double s = std::sqrt(1 - param_);
            f.terms.emplace_back(PauliString::parse("I"), (1 + s) * (1 + s) / 4);
            f.terms.emplace_back(PauliString::parse("X"), param_ / 4);
            f.terms.emplace_back(PauliString::parse("Y"), param_ / 4);
            f.terms.emplace_back(PauliString::parse("Z"), (1 - s) * (1 - s) / 4);
            f.approximate = param_ > 0;
            break;
        }
        case Kind::pauli_mixture:
            f.terms = terms_;
            break;
    }
    return f;
}

bool SymChannel::is_identity() const {
    for (const auto &[p, w] : pauli_form().terms) {
        if (!p.is_identity() && w > 0) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Stabilizer translation

namespace {

Tableau pure_tableau(const SymState &s);

Tableau tableau_from_ket(const SymState &s) {
    for (int d : s.dims()) {
        if (d != 2) {
            throw Error("unsupported-on-backend", "stabilizer backend needs qubits: " + s.str());
        }
    }
    const std::size_t n = s.num_subsystems();
    if (n > 8) {
        throw Error("unsupported-on-backend", "linear combination on more than 8 qubits: " + s.str());
    }
    Eigen::VectorXcd v = s.ket();
    std::vector<PauliString> gens;
    std::vector<gf2::Row> sym;
    for (auto &p : all_paulis(n)) {
        if (p.is_identity()) {
            continue;
        }
        Complex e = v.dot(p.matrix() * v);
        int sign = 0;
        if (std::abs(e - 1.0) < 1e-9) {
            sign = 1;
        } else if (std::abs(e + 1.0) < 1e-9) {
            sign = -1;
        }
        if (sign == 0) {
            continue;
        }
        gf2::Row r(p.xs.begin(), p.xs.end());
        r.insert(r.end(), p.zs.begin(), p.zs.end());
        auto trial = sym;
        trial.push_back(r);
        if (gf2::rank(trial) == trial.size()) {
            sym = std::move(trial);
            p.phase = sign > 0 ? 0 : 2;
            gens.push_back(p);
            if (gens.size() == n) {
                break;
            }
        }
    }
    if (gens.size() != n) {
        throw Error("unsupported-on-backend", "not a stabilizer state: " + s.str());
    }
    return Tableau::from_stabilizers(gens);
}

Tableau pure_tableau(const SymState &s) {
    const auto &n = s.node();
    switch (s.kind()) {
        case SymState::Kind::basis: {
            PauliString p(1);
            p.set(0, axis_char(n.axis));
            p.phase = n.index == 1 ? 0 : 2;
            return Tableau::from_stabilizers({p});
        }
        case SymState::Kind::stabilizer:
            return Tableau::from_stabilizers(n.gens);
        case SymState::Kind::tensor: {
            Tableau t = pure_tableau(n.children[0]);
            for (std::size_t i = 1; i < n.children.size(); i++) {
                t = Tableau::direct_sum(t, pure_tableau(n.children[i]));
            }
            return t;
        }
        case SymState::Kind::sum:
            return tableau_from_ket(s);
        default:
            break;
    }
    throw Error("unsupported-on-backend", s.str());
}

void add_term(std::vector<std::pair<double, PauliString>> &mix, double w, PauliString p) {
    p.phase = 0;
    for (auto &[wt, q] : mix) {
        if (q.xs == p.xs && q.zs == p.zs) {
            wt += w;
            return;
        }
    }
    mix.emplace_back(w, std::move(p));
}

/// Pauli S with S base S = other (same group up to signs), if any.
std::optional<PauliString> sign_shift(const Tableau &base, const Tableau &other) {
    auto a = base.canonical_stabilizers();
    auto b = other.canonical_stabilizers();
    const std::size_t n = base.num_qubits();
    std::vector<gf2::Row> rows;
    gf2::Row rhs;
    for (std::size_t k = 0; k < a.size(); k++) {
        if (a[k].xs != b[k].xs || a[k].zs != b[k].zs) {
            return std::nullopt;
        }
        gf2::Row r(a[k].zs.begin(), a[k].zs.end());
        r.insert(r.end(), a[k].xs.begin(), a[k].xs.end());
        rows.push_back(std::move(r));
        rhs.push_back(a[k].phase != b[k].phase);
    }
    auto sol = gf2::solve(rows, rhs, 2 * n);
    if (!sol) {
        return std::nullopt;
    }
    PauliString s(n);
    for (std::size_t q = 0; q < n; q++) {
        s.xs[q] = (*sol)[q];
        s.zs[q] = (*sol)[n + q];
    }
    return s;
}

void uniform_over_destabilizers(const Tableau &base, double w, std::vector<std::pair<double, PauliString>> &mix) {
    const std::size_t n = base.num_qubits();
    const std::size_t total = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < total; mask++) {
        PauliString p(n);
        for (std::size_t k = 0; k < n; k++) {
            if (mask >> k & 1) {
                p *= base.destabilizer(k);
            }
        }
        add_term(mix, w / static_cast<double>(total), p);
    }
}

StabilizerPrep prep(const SymState &s) {
    const auto &n = s.node();
    if (s.is_pure()) {
        return StabilizerPrep{pure_tableau(s), {{1.0, PauliString(s.num_subsystems())}}};
    }
    switch (s.kind()) {
        case SymState::Kind::projector:
            return prep(n.children[0]);
        case SymState::Kind::mixed: {
            for (int d : n.dims) {
                if (d != 2) {
                    throw Error("unsupported-on-backend", "stabilizer backend needs qubits: " + s.str());
                }
            }
            StabilizerPrep out{Tableau(n.dims.size()), {}};
            uniform_over_destabilizers(out.base, 1.0, out.mixture);
            return out;
        }
        case SymState::Kind::tensor: {
            StabilizerPrep acc = prep(n.children[0]);
            for (std::size_t i = 1; i < n.children.size(); i++) {
                StabilizerPrep next = prep(n.children[i]);
                StabilizerPrep joined{Tableau::direct_sum(acc.base, next.base), {}};
                for (const auto &[wa, pa] : acc.mixture) {
                    for (const auto &[wb, pb] : next.mixture) {
                        PauliString p(pa.size() + pb.size());
                        std::copy(pa.xs.begin(), pa.xs.end(), p.xs.begin());
                        std::copy(pa.zs.begin(), pa.zs.end(), p.zs.begin());
                        std::copy(pb.xs.begin(), pb.xs.end(), p.xs.begin() + pa.size());
                        std::copy(pb.zs.begin(), pb.zs.end(), p.zs.begin() + pa.size());
                        add_term(joined.mixture, wa * wb, p);
                    }
                }
                acc = std::move(joined);
            }
            return acc;
        }
        case SymState::Kind::sum: {
            double total = 0;
            for (std::size_t i = 0; i < n.children.size(); i++) {
                if (std::abs(n.coeffs[i].imag()) > 1e-12 || n.coeffs[i].real() < 0) {
                    throw Error("invalid-expression", "mixture weights must be nonnegative reals");
                }
                total += n.coeffs[i].real();
            }
            std::optional<Tableau> base;
            for (const auto &c : n.children) {
                if (c.kind() != SymState::Kind::mixed) {
                    base = prep(c).base;
                    break;
                }
            }
            if (!base) {
                return prep(n.children[0]);
            }
            StabilizerPrep out{*base, {}};
            for (std::size_t i = 0; i < n.children.size(); i++) {
                double w = n.coeffs[i].real() / total;
                const SymState &c = n.children[i];
                if (c.kind() == SymState::Kind::mixed) {
                    uniform_over_destabilizers(out.base, w, out.mixture);
                    continue;
                }
                StabilizerPrep cp = prep(c);
                auto shift = sign_shift(out.base, cp.base);
                if (!shift) {
                    throw Error("unsupported-on-backend", "mixture of unrelated stabilizer states: " + s.str());
                }
                for (const auto &[wt, q] : cp.mixture) {
                    add_term(out.mixture, w * wt, q * *shift);
                }
            }
            return out;
        }
        default:
            break;
    }
    throw Error("unsupported-on-backend", s.str());
}

}  // namespace

StabilizerPrep express_stabilizer(const SymState &s) {
    StabilizerPrep p = prep(s);
    std::vector<std::pair<double, PauliString>> kept;
    for (auto &t : p.mixture) {
        if (t.first > 0) {
            kept.push_back(std::move(t));
        }
    }
    p.mixture = std::move(kept);
    return p;
}

Tableau StabilizerPrep::sample(Rng &rng) const {
    Tableau t = base;
    if (mixture.size() == 1) {
        if (!mixture[0].second.is_identity()) {
            t.apply_pauli(mixture[0].second);
        }
        return t;
    }
    double u = rng.uniform();
    double acc = 0;
    const PauliString *pick = &mixture.back().second;
    for (const auto &[w, p] : mixture) {
        acc += w;
        if (u < acc) {
            pick = &p;
            break;
        }
    }
    if (!pick->is_identity()) {
        t.apply_pauli(*pick);
    }
    return t;
}

}  // namespace qnet
