#include "bimodconn/tensor.hpp"

namespace bimodconn {

namespace {

// Subspace of X (x)_A Omega1 spanned by x . omega, x in sub, omega in Omega1.
Subspace tensored_with_omega1(const FormSpace& forms, const Subspace& sub) {
    SpanBuilder span(forms.dim(1));
    for (const auto& x : sub.basis()) {
        for (std::size_t j = 0; j < forms.calculus().dim(1); ++j) {
            span.add(forms.multiply(x, 0, unit_vector(forms.calculus().dim(1), j), 1));
        }
    }
    return span.subspace();
}

Verdict compatible(const Connection& c, const Subspace& sub, const std::string& side) {
    const Subspace target = tensored_with_omega1(c.forms(), sub);
    for (std::size_t i = 0; i < sub.dim(); ++i) {
        const Vector image = c.nabla() * sub.basis()[i];
        if (!target.contains(image)) {
            return Verdict::fail("connection on " + side + " leaks out of " + side + "0 (x) Omega1",
                                 {{"side", side}, {"element", to_json(sub.basis()[i])}, {"image", to_json(image)}});
        }
    }
    return Verdict::pass();
}

// The pieces shared by every route.
struct Setup {
    const Connection& n_conn;
    const Connection& m_conn;
    BalancedTensor tensor;
    FormSpace t_forms;

    Setup(const Connection& n, const Connection& m)
        : n_conn(n), m_conn(m), tensor(tensor_over(n.module(), m.module(), n.module().name() + " (x) " + m.module().name())),
          t_forms(tensor.module, m.forms().calculus_ptr()) {}

    // b (x) xi for xi in M (x) Omega1 (class coordinates), as a class of
    // (N (x)_A M) (x)_A Omega1
    [[nodiscard]] Vector theta(std::size_t b, const Vector& xi) const {
        const std::size_t n = m_conn.calculus().algebra().dim();
        const std::size_t us = n - 1;
        const std::size_t nd = n_conn.module().dim();
        const std::size_t md = m_conn.module().dim();
        const Vector u = m_conn.forms().quotient(1).lift(xi);
        Vector v = zero_vector(tensor.dim() * us);
        for (std::size_t a = 0; a < md; ++a) {
            const Vector t = tensor.project(unit_vector(nd, b), unit_vector(md, a));
            for (std::size_t w = 0; w < us; ++w) {
                const Rational& c = u[a * us + w];
                if (sgn(c) == 0) continue;
                for (std::size_t k = 0; k < t.size(); ++k) {
                    if (sgn(t[k]) != 0) v[k * us + w] += c * t[k];
                }
            }
        }
        return t_forms.quotient(1).projection * v;
    }

    // plain formula on N (x) M, index b * dim M + a; first_part[b] is nabla' b in
    // the u-coordinates of N (x)_A Omega_u^1 and letters[i] acts on M
    TensorConnection build(Route route, const std::vector<Vector>& first_part, const std::vector<Matrix>& letters) const {
        const std::size_t n = m_conn.calculus().algebra().dim();
        const std::size_t us = n - 1;
        const std::size_t nd = n_conn.module().dim();
        const std::size_t md = m_conn.module().dim();
        Matrix plain(t_forms.dim(1), nd * md);
        for (std::size_t b = 0; b < nd; ++b) {
            for (std::size_t a = 0; a < md; ++a) {
                Vector col = theta(b, m_conn.nabla().column(a));
                for (std::size_t b2 = 0; b2 < nd; ++b2) {
                    for (std::size_t i = 0; i < us; ++i) {
                        const Rational& c = first_part[b][b2 * us + i];
                        if (sgn(c) != 0) add_scaled(col, c, theta(b2, letters[i].column(a)));
                    }
                }
                plain.set_column(b * md + a, col);
            }
        }
        TensorConnection out;
        out.route = route;
        out.tensor = tensor;
        out.balanced = Verdict::pass();
        for (const auto& rel : tensor.space.sub.basis()) {
            if (!is_zero(plain * rel)) {
                out.balanced = Verdict::fail("tensor connection is not balanced over A", {{"relation", to_json(rel)}});
                out.right_leibniz = {Status::unavailable, "not well defined on N (x)_A M", nullptr};
                return out;
            }
        }
        out.connection.emplace("tensor", t_forms, plain * tensor.space.section);
        out.right_leibniz = check_right_leibniz(*out.connection);
        return out;
    }

    [[nodiscard]] std::vector<Vector> lifted_first_part(const Connection& conn) const {
        std::vector<Vector> out;
        for (std::size_t b = 0; b < conn.module().dim(); ++b) out.push_back(conn.forms().quotient(1).lift(conn.nabla().column(b)));
        return out;
    }

    [[nodiscard]] std::vector<Matrix> induced_letters() const {
        const UniversalForms& uf = m_conn.calculus().forms();
        std::vector<Matrix> out;
        for (std::size_t i = 0; i + 1 < uf.n(); ++i) out.push_back(nabla_hat(m_conn, m_conn.module().left(uf.letter(i)), 0));
        return out;
    }
};

void require_same_universal(const Connection& n_conn, const Connection& m_conn) {
    if (n_conn.calculus().forms_ptr() != m_conn.calculus().forms_ptr()) {
        throw PreconditionError("tensor connection: calculi do not share universal forms");
    }
}

}  // namespace

std::string to_string(Route r) {
    switch (r) {
        case Route::induced: return "induced";
        case Route::nu_hat: return "nu_hat";
        case Route::sigma: return "sigma";
    }
    return "?";
}

DegeneracyPair degeneracy_submodules(const Module& n, const Module& m) {
    const BalancedTensor t = tensor_over(n, m);
    const std::size_t nd = n.dim();
    const std::size_t md = m.dim();
    std::vector<Matrix> n_blocks{Matrix(0, nd)};
    std::vector<Matrix> m_blocks{Matrix(0, md)};
    for (std::size_t a = 0; a < md; ++a) {
        Matrix col(nd * md, nd);
        for (std::size_t b = 0; b < nd; ++b) col(b * md + a, b) = 1;
        n_blocks.push_back(t.space.projection * col);
    }
    for (std::size_t b = 0; b < nd; ++b) {
        Matrix col(nd * md, md);
        for (std::size_t a = 0; a < md; ++a) col(b * md + a, a) = 1;
        m_blocks.push_back(t.space.projection * col);
    }
    DegeneracyPair out{kernel(vstack(n_blocks)), kernel(vstack(m_blocks)), Verdict::pass()};

    const Algebra& alg = n.algebra();
    for (std::size_t f = 0; f < alg.dim() && out.submodules.passed(); ++f) {
        for (const auto& x : out.n0.basis()) {
            if (!out.n0.contains(n.right(f) * x)) {
                out.submodules = Verdict::fail("N0 is not a right submodule", {{"f", alg.basis_name(f)}});
                break;
            }
        }
        for (const auto& x : out.m0.basis()) {
            if (!out.m0.contains(m.right(f) * x) || !out.m0.contains(m.left(f) * x)) {
                out.submodules = Verdict::fail("M0 is not a sub-bimodule", {{"f", alg.basis_name(f)}});
                break;
            }
        }
    }
    return out;
}

Verdict check_compatibility(const Connection& on_m, const Connection& on_n, const DegeneracyPair& pair) {
    Verdict v = compatible(on_m, pair.m0, "M");
    if (!v.passed()) return v;
    return compatible(on_n, pair.n0, "N");
}

NuHat nu_hat(const FormSpace& n_forms, const CalculusPtr& induced) {
    const GradedCalculus& calc = n_forms.calculus();
    const std::size_t D = calc.truncation();
    if (calc.forms_ptr() != induced->forms_ptr() || induced->truncation() != D) {
        throw PreconditionError("nu-hat: calculi do not share universal forms and truncation");
    }
    NuHat out;
    const Comparison order = preceq(*induced, calc, OrderMode::all_degrees);
    if (!order.rho) {
        out.exists = {Status::absent, "kappa-hat does not exist", order.verdict.witness};
        out.right_linear = {Status::unavailable, "kappa-hat does not exist", nullptr};
        return out;
    }
    const FormSpace target(n_forms.module(), induced);
    for (std::size_t r = 0; r <= D; ++r) {
        const Factorization f = factor_through(n_forms.quotient(r).projection, target.quotient(r).projection);
        if (!f.map) {
            out.maps.clear();
            out.exists = {Status::absent, "nu-hat is not well defined", {{"degree", r}, {"element", to_json(*f.witness)}}};
            out.right_linear = {Status::unavailable, "nu-hat does not exist", nullptr};
            return out;
        }
        out.maps.push_back(*f.map);
    }
    out.exists = Verdict::pass();
    out.right_linear = Verdict::pass();
    for (std::size_t r = 0; r <= D && out.right_linear.passed(); ++r) {
        for (std::size_t s = 0; r + s <= D && out.right_linear.passed(); ++s) {
            for (std::size_t i = 0; i < n_forms.dim(r) && out.right_linear.passed(); ++i) {
                const Vector xi = unit_vector(n_forms.dim(r), i);
                for (std::size_t j = 0; j < calc.dim(s); ++j) {
                    const Vector w = unit_vector(calc.dim(s), j);
                    const Vector lhs = out.maps[r + s] * n_forms.multiply(xi, r, w, s);
                    const Vector rhs = target.multiply(out.maps[r] * xi, r, order.rho->maps[s] * w, s);
                    if (lhs != rhs) {
                        out.right_linear = Verdict::fail("nu-hat is not right linear", {{"degrees", {r, s}}, {"basis", {i, j}}});
                        break;
                    }
                }
            }
        }
    }
    return out;
}

AssociatedConnection associated_connection(const Connection& n_conn, const NuHat& nu, const CalculusPtr& induced) {
    AssociatedConnection out;
    if (!nu.exists.passed()) {
        out.exists = {Status::unavailable, "nu-hat does not exist", nullptr};
        out.square = out.right_leibniz = out.unique = out.exists;
        return out;
    }
    const std::size_t D = n_conn.truncation();
    out.connection.emplace("associated", FormSpace(n_conn.module(), induced), nu.maps[1] * n_conn.nabla());
    out.exists = Verdict::pass();
    out.factored.emplace_back(nu.maps[1] * n_conn.nabla());
    for (std::size_t r = 1; r < D; ++r) {
        const Factorization f = factor_through(nu.maps[r], nu.maps[r + 1] * n_conn.extension(r));
        if (!f.map) {
            out.exists = {Status::absent, "nu-hat nabla' does not preserve ker nu-hat",
                          {{"degree", r}, {"element", to_json(*f.witness)}}};
            out.connection.reset();
            out.square = out.right_leibniz = out.unique = Verdict{Status::unavailable, "no associated connection", nullptr};
            return out;
        }
        out.factored.push_back(*f.map);
    }
    out.square = Verdict::pass();
    for (std::size_t r = 0; r < D; ++r) {
        const Matrix lhs = r == 0 ? out.factored[0] : out.factored[r] * nu.maps[r];
        if (lhs != nu.maps[r + 1] * n_conn.extension(r) || out.factored[r] != out.connection->extension(r)) {
            out.square = Verdict::fail("nu-hat nabla' differs from nabla'_M nu-hat", {{"degree", r}});
            break;
        }
    }
    out.right_leibniz = check_right_leibniz(*out.connection);
    bool surjective = true;
    for (const auto& map : nu.maps) surjective = surjective && rank(map) == map.rows();
    out.unique = surjective ? Verdict::pass("nu-hat is surjective")
                            : Verdict{Status::unavailable, "nu-hat is not surjective; uniqueness not decided", nullptr};
    return out;
}

TensorConnection tensor_connection_induced(const Connection& n_conn, const Connection& m_conn) {
    require_same_universal(n_conn, m_conn);
    const Kappa1 k = kappa1(m_conn);
    if (kernel(k.map).first_outside(n_conn.calculus().ideal(1))) {
        throw PreconditionError("tensor connection: the calculus of nabla' is not Omega_nabla of nabla");
    }
    const Setup s(n_conn, m_conn);
    return s.build(Route::induced, s.lifted_first_part(n_conn), s.induced_letters());
}

TensorConnection tensor_connection_original(const Connection& n_conn, const Connection& m_conn, const NuHat& nu,
                                            const CalculusPtr& induced) {
    require_same_universal(n_conn, m_conn);
    TensorConnection out;
    out.route = Route::nu_hat;
    if (!nu.exists.passed()) {
        out.balanced = out.right_leibniz = Verdict{Status::unavailable, "nu-hat does not exist", nullptr};
        return out;
    }
    const Setup s(n_conn, m_conn);
    const FormSpace target(n_conn.module(), induced);
    std::vector<Vector> first;
    for (std::size_t b = 0; b < n_conn.module().dim(); ++b) {
        first.push_back(target.quotient(1).lift(nu.maps[1] * n_conn.nabla().column(b)));
    }
    return s.build(Route::nu_hat, first, s.induced_letters());
}

TensorConnection tensor_connection_sigma(const Connection& n_conn, const Connection& m_conn, const Sigma& sigma) {
    require_same_universal(n_conn, m_conn);
    TensorConnection out;
    out.route = Route::sigma;
    if (!sigma.map) {
        out.balanced = out.right_leibniz = Verdict{Status::unavailable, "sigma does not exist", nullptr};
        return out;
    }
    const Setup s(n_conn, m_conn);
    const GradedCalculus& calc = m_conn.calculus();
    const UniversalForms& uf = calc.forms();
    const std::size_t md = m_conn.module().dim();
    std::vector<Matrix> letters;
    for (std::size_t i = 0; i + 1 < uf.n(); ++i) {
        const Vector de = calc.d(uf.algebra().basis(uf.letter(i)));
        Matrix op(m_conn.forms().dim(1), md);
        for (std::size_t a = 0; a < md; ++a) op.set_column(a, *sigma.map * sigma.domain.project(de, unit_vector(md, a)));
        letters.push_back(std::move(op));
    }
    return s.build(Route::sigma, s.lifted_first_part(n_conn), letters);
}

Verdict routes_agree(const TensorConnection& a, const TensorConnection& b) {
    if (!a.connection || !b.connection) return {Status::unavailable, "a route is not available", nullptr};
    const Matrix& x = a.connection->nabla();
    const Matrix& y = b.connection->nabla();
    if (x == y) return Verdict::pass();
    for (std::size_t j = 0; j < x.cols(); ++j) {
        if (x.column(j) != y.column(j)) {
            return Verdict::fail("routes " + to_string(a.route) + " and " + to_string(b.route) + " differ",
                                 {{"basis", j}, {to_string(a.route), to_json(x.column(j))}, {to_string(b.route), to_json(y.column(j))}});
        }
    }
    return Verdict::fail("routes differ in shape");
}

}  // namespace bimodconn
