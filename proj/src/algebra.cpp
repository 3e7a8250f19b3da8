#include "bimodconn/algebra.hpp"

namespace bimodconn {

std::string to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::absent: return "absent";
        case Status::unavailable: return "unavailable";
    }
    return "unknown";
}

nlohmann::json to_json(const Vector& v) {
    auto out = nlohmann::json::array();
    for (const auto& x : v) out.push_back(to_string(x));
    return out;
}

nlohmann::json to_json(const Matrix& m) {
    auto out = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(to_json(m.row(i)));
    return out;
}

Algebra::Algebra(std::string name, std::vector<std::string> basis_names, std::vector<std::vector<Vector>> structure,
                 Vector unit)
    : name_(std::move(name)), basis_names_(std::move(basis_names)), structure_(std::move(structure)),
      unit_(std::move(unit)) {
    const std::size_t n = basis_names_.size();
    if (n == 0) throw DimensionError("algebra must have positive dimension");
    if (structure_.size() != n || unit_.size() != n) throw DimensionError("algebra structure/unit shape mismatch");
    for (const auto& row : structure_) {
        if (row.size() != n) throw DimensionError("algebra structure table is not n x n");
        for (const auto& v : row) {
            if (v.size() != n) throw DimensionError("algebra structure constant vector has wrong length");
        }
    }
    unit_pivot_ = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (sgn(unit_[i]) != 0) {
            unit_pivot_ = i;
            break;
        }
    }
    if (unit_pivot_ == n) throw DimensionError("algebra unit is zero");
}

Vector Algebra::multiply(const Vector& a, const Vector& b) const {
    Vector r(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        if (sgn(a[i]) == 0) continue;
        for (std::size_t j = 0; j < dim(); ++j) {
            if (sgn(b[j]) == 0) continue;
            add_scaled(r, a[i] * b[j], structure_[i][j]);
        }
    }
    return r;
}

Matrix Algebra::left_multiplication(const Vector& f) const {
    Matrix m(dim(), dim());
    for (std::size_t j = 0; j < dim(); ++j) m.set_column(j, multiply(f, basis(j)));
    return m;
}

Matrix Algebra::right_multiplication(const Vector& f) const {
    Matrix m(dim(), dim());
    for (std::size_t j = 0; j < dim(); ++j) m.set_column(j, multiply(basis(j), f));
    return m;
}

Matrix Algebra::multiplication_map() const {
    Matrix m(dim(), dim() * dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        for (std::size_t j = 0; j < dim(); ++j) m.set_column(i * dim() + j, structure_[i][j]);
    }
    return m;
}

Module::Module(std::string name, AlgebraPtr algebra, std::size_t dim, std::vector<Matrix> left,
               std::vector<Matrix> right, bool is_bimodule)
    : name_(std::move(name)), algebra_(std::move(algebra)), dim_(dim), left_(std::move(left)),
      right_(std::move(right)), is_bimodule_(is_bimodule) {
    const std::size_t n = algebra_->dim();
    auto check = [&](const std::vector<Matrix>& actions, const char* side) {
        if (actions.size() != n) {
            throw DimensionError(std::string(side) + " action needs one matrix per algebra basis element");
        }
        for (const auto& a : actions) {
            if (a.rows() != dim_ || a.cols() != dim_) {
                throw DimensionError(std::string(side) + " action matrix is not " + std::to_string(dim_) + " x " +
                                     std::to_string(dim_));
            }
        }
    };
    check(right_, "right");
    if (is_bimodule_) check(left_, "left");
}

Module Module::bimodule(std::string name, AlgebraPtr algebra, std::size_t dim, std::vector<Matrix> left,
                        std::vector<Matrix> right) {
    return {std::move(name), std::move(algebra), dim, std::move(left), std::move(right), true};
}

Module Module::right_module(std::string name, AlgebraPtr algebra, std::size_t dim, std::vector<Matrix> right) {
    return {std::move(name), std::move(algebra), dim, {}, std::move(right), false};
}

Module Module::regular(AlgebraPtr algebra) { return free(std::move(algebra), 1); }

Module Module::free(AlgebraPtr algebra, std::size_t rank) {
    const Algebra& a = *algebra;
    std::vector<Matrix> left;
    std::vector<Matrix> right;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        left.push_back(kron(Matrix::identity(rank), a.left_multiplication(a.basis(i))));
        right.push_back(kron(Matrix::identity(rank), a.right_multiplication(a.basis(i))));
    }
    const std::string name = rank == 1 ? a.name() : a.name() + "^" + std::to_string(rank);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < rank; ++k) {
        for (const auto& b : a.basis_names()) names.push_back(rank == 1 ? b : b + "_" + std::to_string(k + 1));
    }
    return bimodule(name, std::move(algebra), rank * a.dim(), std::move(left), std::move(right))
        .with_basis_names(std::move(names));
}

const Matrix& Module::left(std::size_t i) const {
    if (!is_bimodule_) throw PreconditionError("module '" + name_ + "' has no left action");
    return left_[i];
}

namespace {

Matrix combine(const std::vector<Matrix>& actions, const Vector& f, std::size_t dim) {
    Matrix m(dim, dim);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (sgn(f[i]) != 0) m += f[i] * actions[i];
    }
    return m;
}

}  // namespace

Matrix Module::right_action(const Vector& f) const { return combine(right_, f, dim_); }

Matrix Module::left_action(const Vector& f) const {
    if (!is_bimodule_) throw PreconditionError("module '" + name_ + "' has no left action");
    return combine(left_, f, dim_);
}

Module Module::as_right_module() const {
    Module m = right_module(name_, algebra_, dim_, right_);
    m.basis_names_ = basis_names_;
    return m;
}

std::string Module::basis_name(std::size_t i) const {
    if (i < basis_names_.size()) return basis_names_[i];
    return "b" + std::to_string(i + 1);
}

Module Module::with_basis_names(std::vector<std::string> names) const {
    if (names.size() != dim_) throw DimensionError("with_basis_names: need one name per basis element");
    Module m = *this;
    m.basis_names_ = std::move(names);
    return m;
}

Module Module::renamed(std::string name) const {
    Module m = *this;
    m.name_ = std::move(name);
    return m;
}

Verdict check_algebra(const Algebra& a) {
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i) {
        const Vector e = a.basis(i);
        if (a.multiply(a.unit(), e) != e || a.multiply(e, a.unit()) != e) {
            return Verdict::fail("unit axiom fails", {{"basis", a.basis_name(i)}});
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                const Vector lhs = a.multiply(a.product(i, j), a.basis(k));
                const Vector rhs = a.multiply(a.basis(i), a.product(j, k));
                if (lhs != rhs) {
                    return Verdict::fail("associativity fails",
                                         {{"triple", {a.basis_name(i), a.basis_name(j), a.basis_name(k)}},
                                          {"left", to_json(lhs)},
                                          {"right", to_json(rhs)}});
                }
            }
        }
    }
    return Verdict::pass();
}

Verdict check_module(const Module& m) {
    const Algebra& a = m.algebra();
    const Matrix id = Matrix::identity(m.dim());
    if (m.right_action(a.unit()) != id) return Verdict::fail("right action of 1 is not the identity");
    if (m.has_left() && m.left_action(a.unit()) != id) {
        return Verdict::fail("left action of 1 is not the identity");
    }
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            const Vector& eij = a.product(i, j);
            // (x e_i) e_j = x (e_i e_j)
            if (m.right(j) * m.right(i) != m.right_action(eij)) {
                return Verdict::fail("right action is not associative",
                                     {{"pair", {a.basis_name(i), a.basis_name(j)}}});
            }
            if (!m.has_left()) continue;
            // e_i (e_j x) = (e_i e_j) x
            if (m.left(i) * m.left(j) != m.left_action(eij)) {
                return Verdict::fail("left action is not associative", {{"pair", {a.basis_name(i), a.basis_name(j)}}});
            }
            // (e_i x) e_j = e_i (x e_j)
            if (m.right(j) * m.left(i) != m.left(i) * m.right(j)) {
                return Verdict::fail("left and right actions do not commute",
                                     {{"pair", {a.basis_name(i), a.basis_name(j)}}});
            }
        }
    }
    return Verdict::pass();
}

Vector BalancedTensor::project(const Vector& x, const Vector& y) const { return space.project(kron(x, y)); }

BalancedTensor tensor_over(const Module& x, const Module& y, std::string name) {
    if (!(x.algebra() == y.algebra())) throw PreconditionError("tensor_over: modules over different algebras");
    if (!y.has_left()) throw PreconditionError("tensor_over: right factor '" + y.name() + "' needs a left action");
    const Algebra& a = x.algebra();
    const std::size_t p = x.dim();
    const std::size_t q = y.dim();

    SpanBuilder relations(p * q);
    for (std::size_t f = 0; f < a.dim(); ++f) {
        // (x f) (x) y - x (x) (f y) = (R_f (x) I - I (x) L_f) applied to x (x) y
        const Matrix rel = kron(x.right(f), Matrix::identity(q)) - kron(Matrix::identity(p), y.left(f));
        for (std::size_t j = 0; j < rel.cols(); ++j) relations.add(rel.column(j));
    }

    BalancedTensor t;
    t.left_dim = p;
    t.right_dim = q;
    t.space = quotient(p * q, relations.subspace());

    auto induced = [&](const Matrix& plain) { return t.space.projection * plain * t.space.section; };
    std::vector<Matrix> right;
    std::vector<Matrix> left;
    for (std::size_t f = 0; f < a.dim(); ++f) {
        right.push_back(induced(kron(Matrix::identity(p), y.right(f))));
        if (x.has_left()) left.push_back(induced(kron(x.left(f), Matrix::identity(q))));
    }
    if (name.empty()) name = x.name() + " (x)_A " + y.name();
    t.module = x.has_left() ? Module::bimodule(name, x.algebra_ptr(), t.dim(), std::move(left), std::move(right))
                            : Module::right_module(name, x.algebra_ptr(), t.dim(), std::move(right));
    return t;
}

Factorization induced_tensor_map(const BalancedTensor& from, const BalancedTensor& to, const Matrix& left,
                                 const Matrix& right) {
    return factor_through(from.space.projection, to.space.projection * kron(left, right));
}

Matrix HomSpace::element(std::size_t i) const { return Matrix::unflatten(target_dim, source_dim, space.basis()[i]); }

bool HomSpace::contains(const Matrix& phi) const {
    return phi.rows() == target_dim && phi.cols() == source_dim && space.contains(phi.flatten());
}

HomSpace right_hom_space(const Module& x, const Module& y) {
    if (!(x.algebra() == y.algebra())) throw PreconditionError("right_hom_space: modules over different algebras");
    const std::size_t s = x.dim();
    const std::size_t t = y.dim();
    // phi R^X_f - R^Y_f phi = 0, with vec(phi) row-major:
    // vec(phi B) = (I (x) B^T) vec(phi), vec(A phi) = (A (x) I) vec(phi).
    std::vector<Matrix> blocks;
    for (std::size_t f = 0; f < x.algebra().dim(); ++f) {
        blocks.push_back(kron(Matrix::identity(t), x.right(f).transpose()) - kron(y.right(f), Matrix::identity(s)));
    }
    HomSpace h;
    h.source_dim = s;
    h.target_dim = t;
    h.space = blocks.empty() ? Subspace::whole(s * t) : kernel(vstack(blocks));
    return h;
}

Kappa0 kappa0(const Module& m) {
    if (!m.has_left()) throw PreconditionError("kappa0 needs a bimodule");
    const Algebra& a = m.algebra();
    Kappa0 k;
    k.endomorphisms = right_hom_space(m, m);
    k.map = Matrix(k.endomorphisms.dim(), a.dim());
    k.right_linear = Verdict::pass();
    k.multiplicative = Verdict::pass();
    for (std::size_t f = 0; f < a.dim(); ++f) {
        k.operators.push_back(m.left(f));
        if (!k.endomorphisms.contains(m.left(f))) {
            if (k.right_linear.passed()) {
                k.right_linear = Verdict::fail("left multiplication is not right A-linear", {{"f", a.basis_name(f)}});
            }
            continue;
        }
        k.map.set_column(f, k.endomorphisms.coords(m.left(f)));
    }
    for (std::size_t f = 0; f < a.dim() && k.multiplicative.passed(); ++f) {
        for (std::size_t g = 0; g < a.dim(); ++g) {
            if (m.left_action(a.product(f, g)) != m.left(f) * m.left(g)) {
                k.multiplicative =
                    Verdict::fail("kappa0(f g) != kappa0(f) kappa0(g)", {{"pair", {a.basis_name(f), a.basis_name(g)}}});
                break;
            }
        }
    }
    std::vector<Vector> flat;
    for (const auto& op : k.operators) flat.push_back(op.flatten());
    k.image_dim = Subspace::span(m.dim() * m.dim(), flat).dim();
    k.injective = k.image_dim == a.dim();
    return k;
}

}  // namespace bimodconn
