#include "bimodconn/connection.hpp"

namespace bimodconn {

namespace {

Rational parity(std::size_t r) { return r % 2 == 0 ? Rational(1) : Rational(-1); }

void require_bimodule(const Connection& c, const char* what) {
    if (!c.module().has_left()) {
        throw PreconditionError(std::string(what) + ": module '" + c.module().name() + "' has no left action");
    }
}

std::vector<Matrix> right_actions(const FormSpace& forms, std::size_t r) {
    std::vector<Matrix> out;
    const Algebra& a = forms.module().algebra();
    for (std::size_t f = 0; f < a.dim(); ++f) out.push_back(forms.right_action(r, a.basis(f)));
    return out;
}

Verdict left_linear_on(const Connection& c, const Matrix& map, std::size_t from, std::size_t to, const std::string& what) {
    const Algebra& a = c.module().algebra();
    for (std::size_t f = 0; f < a.dim(); ++f) {
        const Matrix lhs = map * c.left(from, f);
        const Matrix rhs = c.left(to, f) * map;
        if (lhs == rhs) continue;
        for (std::size_t j = 0; j < lhs.cols(); ++j) {
            if (lhs.column(j) == rhs.column(j)) continue;
            return Verdict::fail(what + " is not left A-linear",
                                 {{"f", a.basis_name(f)},
                                  {"degree", from},
                                  {"basis", j},
                                  {"lhs", to_json(lhs.column(j))},
                                  {"rhs", to_json(rhs.column(j))}});
        }
    }
    return Verdict::pass();
}

}  // namespace

Connection::Connection(std::string name, FormSpace forms, Matrix nabla)
    : name_(std::move(name)), forms_(std::move(forms)), nabla_(std::move(nabla)) {
    const std::size_t D = forms_.truncation();
    const std::size_t m = forms_.module().dim();
    if (nabla_.rows() != forms_.dim(1) || nabla_.cols() != m) {
        throw DimensionError("connection '" + name_ + "' must be a " + std::to_string(forms_.dim(1)) + " x " +
                             std::to_string(m) + " matrix");
    }
    extensions_.push_back(nabla_);
    for (std::size_t s = 1; s < D; ++s) extensions_.push_back(forms_.extend(nabla_, 1, s));
    if (forms_.module().has_left()) {
        const Algebra& a = forms_.module().algebra();
        left_.resize(D + 1);
        for (std::size_t r = 0; r <= D; ++r) {
            for (std::size_t f = 0; f < a.dim(); ++f) left_[r].push_back(forms_.left_action(r, a.basis(f)));
        }
    }
}

Matrix Connection::curvature_on_module() const {
    if (truncation() < 2) throw PreconditionError("curvature needs truncation at least 2");
    return extensions_[1] * nabla_;
}

ConnectionSpace connection_space(const FormSpace& forms) {
    const Module& mod = forms.module();
    const Algebra& a = mod.algebra();
    const GradedCalculus& calc = forms.calculus();
    const std::size_t m = mod.dim();
    const std::size_t d1 = forms.dim(1);
    // X R_f - R1_f X = (a -> a (x) df) on row-major vec(X)
    std::vector<Matrix> blocks;
    Vector rhs;
    for (std::size_t f = 0; f < a.dim(); ++f) {
        blocks.push_back(kron(Matrix::identity(d1), mod.right(f).transpose()) -
                         kron(forms.right_action(1, a.basis(f)), Matrix::identity(m)));
        const Vector df = calc.d(a.basis(f));
        Matrix target(d1, m);
        for (std::size_t j = 0; j < m; ++j) target.set_column(j, forms.multiply(unit_vector(m, j), 0, df, 1));
        const Vector flat = target.flatten();
        rhs.insert(rhs.end(), flat.begin(), flat.end());
    }
    ConnectionSpace out;
    if (auto x = solve(vstack(blocks), rhs)) out.particular = Matrix::unflatten(d1, m, *x);
    out.translations = right_hom_space(mod, forms.as_module(1));
    return out;
}

Connection differential_connection(CalculusPtr calculus) {
    Module reg = Module::regular(calculus->algebra_ptr());
    Matrix d = calculus->differential(0);
    return {"d", FormSpace(std::move(reg), std::move(calculus)), std::move(d)};
}

Matrix trivial_connection_matrix(const FormSpace& forms, std::size_t rank) {
    const std::size_t n = forms.module().algebra().dim();
    if (forms.module().dim() != rank * n) throw DimensionError("trivial connection: module is not free of this rank");
    Matrix out(forms.dim(1), rank * n);
    for (std::size_t k = 0; k < rank; ++k) {
        const Vector g = kron(unit_vector(rank, k), forms.module().algebra().unit());
        for (std::size_t j = 0; j < n; ++j) out.set_column(k * n + j, forms.project(kron(g, unit_vector(n, j)), 1));
    }
    return out;
}

Verdict check_right_leibniz(const Connection& c) {
    const FormSpace& forms = c.forms();
    const Module& mod = c.module();
    const Algebra& a = mod.algebra();
    const std::size_t m = mod.dim();
    const std::vector<Matrix> r1 = right_actions(forms, 1);
    nlohmann::json failing = nlohmann::json::array();
    nlohmann::json first;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t f = 0; f < a.dim(); ++f) {
            const Vector x = unit_vector(m, i);
            const Vector lhs = c.nabla() * (mod.right(f) * x);
            const Vector rhs = r1[f] * (c.nabla() * x) + forms.multiply(x, 0, forms.calculus().d(a.basis(f)), 1);
            if (lhs == rhs) continue;
            const nlohmann::json pair = {mod.basis_name(i), a.basis_name(f)};
            if (failing.empty()) {
                first = {{"pair", pair}, {"lhs", to_json(lhs)}, {"rhs", to_json(rhs)}};
            }
            failing.push_back(pair);
        }
    }
    if (failing.empty()) return Verdict::pass();
    first["failing_pairs"] = failing;
    return Verdict::fail("right Leibniz rule fails", first);
}

bool is_right_linear(const FormSpace& forms, const Matrix& psi, std::size_t r) {
    const Module& mod = forms.module();
    const Algebra& a = mod.algebra();
    for (std::size_t f = 0; f < a.dim(); ++f) {
        if (psi * mod.right(f) != forms.right_action(r, a.basis(f)) * psi) return false;
    }
    return true;
}

Matrix compose(const Connection& c, const Matrix& phi, std::size_t k, const Matrix& psi, std::size_t l) {
    if (k + l > c.truncation()) throw PreconditionError("compose: degree exceeds truncation");
    if (k == 0 && l == 0) return phi * psi;
    return c.forms().apply_columns(phi, k, psi, l);
}

Matrix nabla_hat(const Connection& c, const Matrix& phi, std::size_t r) {
    if (r >= c.truncation()) throw PreconditionError("nabla-hat: degree exceeds truncation");
    return c.extension(r) * phi - parity(r) * compose(c, phi, r, c.nabla(), 1);
}

Matrix hat(const Connection& c, const Vector& f) { return c.module().left_action(f); }

InducedFirstOrder induced_first_order(const Connection& c) {
    require_bimodule(c, "induced_first_order");
    const Module& mod = c.module();
    const Algebra& a = mod.algebra();
    const std::size_t n = a.dim();
    const std::size_t m = mod.dim();
    const std::size_t d1 = c.forms().dim(1);

    InducedFirstOrder out;
    for (std::size_t i = 0; i < n; ++i) out.d.push_back(nabla_hat(c, mod.left(i), 0));

    SpanBuilder span(d1 * m);
    for (std::size_t f = 0; f < n; ++f) {
        for (std::size_t g = 0; g < n; ++g) {
            const Matrix fd = c.left(1, f) * out.d[g];
            for (std::size_t h = 0; h < n; ++h) span.add((fd * mod.left(h)).flatten());
        }
    }
    out.omega1 = span.subspace();

    std::vector<Matrix> left;
    std::vector<Matrix> right;
    for (std::size_t f = 0; f < n; ++f) {
        Matrix lf(out.omega1.dim(), out.omega1.dim());
        Matrix rf(out.omega1.dim(), out.omega1.dim());
        for (std::size_t j = 0; j < out.omega1.dim(); ++j) {
            const Matrix phi = Matrix::unflatten(d1, m, out.omega1.basis()[j]);
            lf.set_column(j, out.omega1.coords((c.left(1, f) * phi).flatten()));
            rf.set_column(j, out.omega1.coords((phi * mod.left(f)).flatten()));
        }
        left.push_back(std::move(lf));
        right.push_back(std::move(rf));
    }
    out.bimodule = Module::bimodule("Omega1_nabla", mod.algebra_ptr(), out.omega1.dim(), std::move(left), std::move(right));

    out.right_linear = Verdict::pass();
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_right_linear(c.forms(), out.d[i], 1)) {
            out.right_linear = Verdict::fail("d_nabla of a basis element is not right A-linear", {{"f", a.basis_name(i)}});
            break;
        }
    }

    out.derivation = Verdict::pass();
    for (std::size_t f = 0; f < n && out.derivation.passed(); ++f) {
        for (std::size_t g = 0; g < n; ++g) {
            const Matrix lhs = nabla_hat(c, mod.left(f) * mod.left(g), 0);
            const Matrix rhs = out.d[f] * mod.left(g) + c.left(1, f) * out.d[g];
            if (lhs != rhs) {
                out.derivation = Verdict::fail("nabla-hat is not a derivation on kappa0(A)",
                                               {{"pair", {a.basis_name(f), a.basis_name(g)}}});
                break;
            }
        }
    }

    out.left_leibniz = Verdict::pass();
    for (std::size_t f = 0; f < n && out.left_leibniz.passed(); ++f) {
        const Matrix lhs = c.nabla() * mod.left(f);
        const Matrix rhs = out.d[f] + c.left(1, f) * c.nabla();
        for (std::size_t j = 0; j < m; ++j) {
            if (lhs.column(j) != rhs.column(j)) {
                out.left_leibniz = Verdict::fail("nabla(f a) differs from (d_nabla f)(a) + f nabla a",
                                                 {{"pair", {a.basis_name(f), mod.basis_name(j)}}});
                break;
            }
        }
    }
    return out;
}

Kappa1 kappa1(const Connection& c) {
    require_bimodule(c, "kappa1");
    const Module& mod = c.module();
    const Algebra& a = mod.algebra();
    const UniversalForms& uf = c.calculus().forms();
    const std::size_t n = a.dim();
    const std::size_t m = mod.dim();
    const std::size_t d1 = c.forms().dim(1);
    const std::size_t ud = uf.udim(n, 1);

    std::vector<Matrix> dn;
    for (std::size_t i = 0; i < n; ++i) dn.push_back(nabla_hat(c, mod.left(i), 0));
    auto image = [&](const Vector& u) {
        Matrix acc(d1, m);
        for (std::size_t a0 = 0; a0 < n; ++a0) {
            for (std::size_t k = 0; k + 1 < n; ++k) {
                const Rational& coeff = u[a0 * (n - 1) + k];
                if (sgn(coeff) == 0) continue;
                acc += coeff * (c.left(1, a0) * dn[uf.letter(k)]);
            }
        }
        return acc;
    };

    Kappa1 out;
    out.map = Matrix(d1 * m, ud);
    for (std::size_t j = 0; j < ud; ++j) out.map.set_column(j, image(unit_vector(ud, j)).flatten());
    out.rank = rank(out.map);

    out.bimodule_linear = Verdict::pass();
    for (std::size_t f = 0; f < n && out.bimodule_linear.passed(); ++f) {
        const Matrix lf = uf.left_ucoords(a.left_multiplication(a.basis(f)), 1);
        for (std::size_t g = 0; g < n && out.bimodule_linear.passed(); ++g) {
            const Matrix rg = uf.right_ucoords(a.basis(g), 1);
            for (std::size_t j = 0; j < ud; ++j) {
                const Matrix lhs = Matrix::unflatten(d1, m, out.map * (lf * (rg * unit_vector(ud, j))));
                const Matrix rhs = c.left(1, f) * Matrix::unflatten(d1, m, out.map.column(j)) * mod.left(g);
                if (lhs != rhs) {
                    out.bimodule_linear = Verdict::fail("kappa1 is not A-bilinear",
                                                        {{"f", a.basis_name(f)}, {"g", a.basis_name(g)}, {"basis", j}});
                    break;
                }
            }
        }
    }

    out.diagram = Verdict::pass();
    const Matrix du = uf.d_ucoords(0);
    for (std::size_t i = 0; i < n; ++i) {
        if (out.map * du.column(i) != dn[i].flatten()) {
            out.diagram = Verdict::fail("kappa1 d_u differs from d_nabla", {{"f", a.basis_name(i)}});
            break;
        }
    }
    return out;
}

Sigma sigma_exists(const Connection& c, const Kappa1& k) {
    const GradedCalculus& calc = c.calculus();
    const Module& mod = c.module();
    const Algebra& a = mod.algebra();
    const UniversalForms& uf = calc.forms();
    const std::size_t m = mod.dim();
    const std::size_t d1 = c.forms().dim(1);
    const std::vector<Matrix> reg = Module::regular(calc.algebra_ptr()).right_matrices();

    Sigma out;
    out.domain = tensor_over(calc.bimodule(1), mod, "Omega1 (x) M");
    const Factorization fac = factor_through(calc.quotient(1).projection, k.map);
    if (!fac.map) {
        const Vector t = uf.from_ucoords(*fac.witness, reg, 1);
        out.exists = {Status::absent, "kappa1 does not vanish on the kernel of the calculus",
                      {{"tensor", to_json(t)},
                       {"text", format_tensor(a, t, 2)},
                       {"image", to_json(Matrix::unflatten(d1, m, k.map * *fac.witness))}}};
        out.left_leibniz = {Status::unavailable, "sigma does not exist", nullptr};
        out.agrees_with_universal = {Status::unavailable, "sigma does not exist", nullptr};
        return out;
    }
    out.kappa1_hat = fac.map;

    // plain index i * m + j holds class omega_i (x) basis a_j
    const std::size_t dom = calc.dim(1);
    Matrix plain(d1, dom * m);
    for (std::size_t i = 0; i < dom; ++i) {
        const Matrix op = Matrix::unflatten(d1, m, *out.kappa1_hat * unit_vector(dom, i));
        for (std::size_t j = 0; j < m; ++j) plain.set_column(i * m + j, op.column(j));
    }
    const Factorization balanced = factor_through(out.domain.space.projection, plain);
    if (!balanced.map) {
        out.exists = Verdict::fail("kappa1-hat is not balanced over A", {{"plain", to_json(*balanced.witness)}});
        out.left_leibniz = {Status::unavailable, "sigma does not exist", nullptr};
        out.agrees_with_universal = {Status::unavailable, "sigma does not exist", nullptr};
        return out;
    }
    out.map = balanced.map;
    out.exists = Verdict::pass();

    out.left_leibniz = Verdict::pass();
    for (std::size_t f = 0; f < a.dim() && out.left_leibniz.passed(); ++f) {
        const Vector df = calc.d(a.basis(f));
        for (std::size_t j = 0; j < m; ++j) {
            const Vector x = unit_vector(m, j);
            const Vector lhs = c.nabla() * (mod.left(f) * x);
            const Vector rhs = *out.map * out.domain.project(df, x) + c.left(1, f) * (c.nabla() * x);
            if (lhs != rhs) {
                out.left_leibniz = Verdict::fail("nabla(f a) differs from sigma(df (x) a) + f nabla a",
                                                 {{"pair", {a.basis_name(f), mod.basis_name(j)}}});
                break;
            }
        }
    }

    out.agrees_with_universal = Verdict::pass();
    const std::size_t ud = calc.udim(1);
    for (std::size_t u = 0; u < ud && out.agrees_with_universal.passed(); ++u) {
        const Vector cls = calc.quotient(1).projection * unit_vector(ud, u);
        const Matrix op = Matrix::unflatten(d1, m, k.map.column(u));
        for (std::size_t j = 0; j < m; ++j) {
            if (*out.map * out.domain.project(cls, unit_vector(m, j)) != op.column(j)) {
                out.agrees_with_universal =
                    Verdict::fail("sigma differs from kappa1 on a universal form", {{"basis", u}, {"element", j}});
                break;
            }
        }
    }
    return out;
}

Verdict check_extension(const Connection& c) {
    const FormSpace& forms = c.forms();
    const GradedCalculus& calc = c.calculus();
    const std::size_t D = c.truncation();
    for (std::size_t s = 0; s < D; ++s) {
        // the extension must kill M (x)_A I^s before projection
        const Subspace& killed = forms.quotient(s).sub;
        if (killed.dim() > 0) {
            const Matrix ext = forms.extend_ucoords(c.nabla(), 1, s);
            for (const auto& v : killed.basis()) {
                if (!is_zero(ext * v)) {
                    return Verdict::fail("extension of nabla does not kill M (x) I", {{"degree", s}});
                }
            }
        }
        for (std::size_t t = 0; s + t + 1 <= D; ++t) {
            for (std::size_t i = 0; i < forms.dim(s); ++i) {
                const Vector xi = unit_vector(forms.dim(s), i);
                const Vector nxi = c.extension(s) * xi;
                for (std::size_t j = 0; j < calc.dim(t); ++j) {
                    const Vector w = unit_vector(calc.dim(t), j);
                    const Vector lhs = c.extension(s + t) * forms.multiply(xi, s, w, t);
                    Vector rhs = forms.multiply(nxi, s + 1, w, t);
                    if (t < D) add_scaled(rhs, parity(s), forms.multiply(xi, s, calc.differential(t) * w, t + 1));
                    if (lhs != rhs) {
                        return Verdict::fail("graded right Leibniz rule fails for the extension",
                                             {{"degrees", {s, t}}, {"basis", {i, j}}});
                    }
                }
            }
        }
    }
    return Verdict::pass();
}

CurvatureReport curvature(const Connection& c) {
    const FormSpace& forms = c.forms();
    const GradedCalculus& calc = c.calculus();
    const std::size_t D = c.truncation();
    CurvatureReport out;
    for (std::size_t r = 0; r + 2 <= D; ++r) out.maps.push_back(c.extension(r + 1) * c.extension(r));
    out.flat = true;
    for (const auto& f : out.maps) out.flat = out.flat && f.is_zero();

    out.right_linear = Verdict::pass();
    for (std::size_t r = 0; r < out.maps.size() && out.right_linear.passed(); ++r) {
        for (std::size_t t = 0; r + t + 2 <= D && out.right_linear.passed(); ++t) {
            for (std::size_t i = 0; i < forms.dim(r) && out.right_linear.passed(); ++i) {
                const Vector xi = unit_vector(forms.dim(r), i);
                const Vector fxi = out.maps[r] * xi;
                for (std::size_t j = 0; j < calc.dim(t); ++j) {
                    const Vector w = unit_vector(calc.dim(t), j);
                    if (out.maps[r + t] * forms.multiply(xi, r, w, t) != forms.multiply(fxi, r + 2, w, t)) {
                        out.right_linear = Verdict::fail("curvature is not right Omega-linear",
                                                         {{"degrees", {r, t}}, {"basis", {i, j}}});
                        break;
                    }
                }
            }
        }
    }

    if (out.maps.empty()) {
        out.left_linear = {Status::unavailable, "truncation below 2", nullptr};
    } else if (!c.module().has_left()) {
        out.left_linear = {Status::unavailable, "module has no left action", nullptr};
    } else {
        out.left_linear = left_linear_on(c, out.maps[0], 0, 2, "curvature");
    }
    return out;
}

Matrix OmegaHat::element(const Connection& c, std::size_t r, std::size_t i) const {
    return Matrix::unflatten(c.forms().dim(r), c.module().dim(), spans[r].basis()[i]);
}

OmegaHat omega_hat_generate(const Connection& c, std::size_t max_degree) {
    require_bimodule(c, "omega_hat_generate");
    const std::size_t D = c.truncation();
    if (max_degree > D) throw PreconditionError("omega-hat: degree exceeds truncation");
    const Module& mod = c.module();
    const std::size_t n = mod.algebra().dim();
    const std::size_t m = mod.dim();

    std::vector<SpanBuilder> spans;
    std::vector<std::vector<Matrix>> gens(max_degree + 1);
    for (std::size_t r = 0; r <= max_degree; ++r) spans.emplace_back(c.forms().dim(r) * m);
    auto offer = [&](std::size_t r, Matrix x) {
        if (!spans[r].add(x.flatten())) return false;
        gens[r].push_back(std::move(x));
        return true;
    };

    OmegaHat out;
    out.max_degree = max_degree;
    bool grew = true;
    while (grew) {
        grew = false;
        ++out.rounds;
        for (std::size_t r = 0; r <= max_degree; ++r) {
            std::vector<Matrix> seeds;
            if (r == 0) {
                for (std::size_t f = 0; f < n; ++f) seeds.push_back(mod.left(f));
            } else {
                for (const auto& x : gens[r - 1]) seeds.push_back(nabla_hat(c, x, r - 1));
            }
            for (std::size_t k = 1; k < r; ++k) {
                for (const auto& phi : gens[k]) {
                    for (const auto& psi : gens[r - k]) seeds.push_back(compose(c, phi, k, psi, r - k));
                }
            }
            const std::size_t old = gens[r].size();
            for (auto& s : seeds) grew = offer(r, std::move(s)) || grew;
            // closure under composition with f-hat on both sides
            for (std::size_t i = 0; i < gens[r].size(); ++i) {
                if (i < old && out.rounds > 1) continue;
                for (std::size_t f = 0; f < n; ++f) {
                    grew = offer(r, c.left(r, f) * gens[r][i]) || grew;
                    grew = offer(r, gens[r][i] * mod.left(f)) || grew;
                }
            }
        }
    }
    for (auto& s : spans) out.spans.push_back(s.subspace());

    out.derivation = Verdict::pass();
    for (std::size_t k = 0; k <= max_degree && out.derivation.passed(); ++k) {
        for (std::size_t l = 0; k + l + 1 <= max_degree && out.derivation.passed(); ++l) {
            for (std::size_t i = 0; i < gens[k].size() && out.derivation.passed(); ++i) {
                for (std::size_t j = 0; j < gens[l].size(); ++j) {
                    const Matrix& phi = gens[k][i];
                    const Matrix& psi = gens[l][j];
                    const Matrix lhs = nabla_hat(c, compose(c, phi, k, psi, l), k + l);
                    const Matrix rhs = compose(c, nabla_hat(c, phi, k), k + 1, psi, l) +
                                       parity(k) * compose(c, phi, k, nabla_hat(c, psi, l), l + 1);
                    if (lhs != rhs) {
                        out.derivation = Verdict::fail("nabla-hat is not a graded derivation",
                                                       {{"degrees", {k, l}}, {"basis", {i, j}}});
                        break;
                    }
                }
            }
        }
    }

    if (D < 2) {
        out.second_power = {Status::unavailable, "truncation below 2", nullptr};
        return out;
    }
    out.second_power = Verdict::pass();
    const Matrix curv = c.curvature_on_module();
    for (std::size_t r = 0; r + 2 <= D && r <= max_degree && out.second_power.passed(); ++r) {
        const Matrix ext2 = c.extension(r + 1) * c.extension(r);
        for (std::size_t i = 0; i < gens[r].size(); ++i) {
            const Matrix& phi = gens[r][i];
            const Matrix lhs = nabla_hat(c, nabla_hat(c, phi, r), r + 1);
            const Matrix rhs = ext2 * phi - compose(c, phi, r, curv, 2);
            if (lhs != rhs) {
                out.second_power = Verdict::fail("nabla-hat^2 differs from the curvature commutator",
                                                 {{"degree", r}, {"basis", i}});
                break;
            }
        }
    }
    return out;
}

std::vector<std::size_t> JQuotient::dims() const {
    std::vector<std::size_t> out;
    for (const auto& s : j) out.push_back(s.dim());
    return out;
}

JQuotient j_ideal(const Connection& c, const OmegaHat& oh) {
    const std::size_t D = c.truncation();
    if (D < 2) throw PreconditionError("J needs truncation at least 2");
    if (oh.max_degree + 2 < D) throw PreconditionError("J needs omega-hat up to degree D - 2");
    const FormSpace& forms = c.forms();
    const GradedCalculus& calc = c.calculus();
    const UniversalForms& uf = calc.forms();
    const std::size_t n = uf.n();
    const std::size_t m = c.module().dim();

    std::vector<SpanBuilder> spans;
    for (std::size_t r = 0; r <= D; ++r) spans.emplace_back(forms.dim(r));
    // J^r is spanned by (nabla-hat^2 Phi)(a) . da1 ... das: products with f in A
    // are already covered because nabla-hat^2 Phi is right A-linear.
    for (std::size_t k = 0; k + 2 <= D; ++k) {
        for (std::size_t i = 0; i < oh.dim(k); ++i) {
            const Matrix g = nabla_hat(c, nabla_hat(c, oh.element(c, k, i), k), k + 1);
            for (std::size_t a = 0; a < m; ++a) {
                const Vector v = g.column(a);
                spans[k + 2].add(v);
                for (std::size_t s = 1; k + 2 + s <= D; ++s) {
                    const std::size_t words = power(n - 1, s);
                    for (std::size_t w = 0; w < words; ++w) {
                        const Vector omega = calc.project(uf.dword(s, uf.word_index(uf.reduced_word(w, s))), s);
                        spans[k + 2 + s].add(forms.multiply(v, k + 2, omega, s));
                    }
                }
            }
        }
    }

    JQuotient out;
    for (const auto& s : spans) out.j.push_back(s.subspace());

    out.low_degrees = out.j[0].dim() == 0 && out.j[1].dim() == 0
                          ? Verdict::pass()
                          : Verdict::fail("J is nonzero below degree 2", {{"dims", {out.j[0].dim(), out.j[1].dim()}}});

    out.nabla_closed = Verdict::pass();
    for (std::size_t r = 0; r < D && out.nabla_closed.passed(); ++r) {
        for (std::size_t i = 0; i < out.j[r].dim(); ++i) {
            if (!out.j[r + 1].contains(c.extension(r) * out.j[r].basis()[i])) {
                out.nabla_closed = Verdict::fail("nabla does not preserve J", {{"degree", r}, {"basis", i}});
                break;
            }
        }
    }

    out.omega_hat_closed = Verdict::pass();
    for (std::size_t k = 0; k <= oh.max_degree && out.omega_hat_closed.passed(); ++k) {
        for (std::size_t i = 0; i < oh.dim(k) && out.omega_hat_closed.passed(); ++i) {
            const Matrix phi = oh.element(c, k, i);
            for (std::size_t r = 2; r + k <= D; ++r) {
                if (out.j[r].dim() == 0) continue;
                const Matrix img = compose(c, phi, k, out.j[r].basis_matrix(), r);
                std::optional<std::size_t> bad;
                for (std::size_t b = 0; b < img.cols() && !bad; ++b) {
                    if (!out.j[r + k].contains(img.column(b))) bad = b;
                }
                if (bad) {
                    out.omega_hat_closed = Verdict::fail("omega-hat does not preserve J",
                                                         {{"operator_degree", k}, {"operator", i}, {"degree", r}, {"basis", *bad}});
                    break;
                }
            }
        }
    }

    const Matrix curv = c.curvature_on_module();
    SpanBuilder comm(forms.dim(2));
    for (std::size_t f = 0; f < n; ++f) {
        const Matrix diff = curv * c.module().left(f) - c.left(2, f) * curv;
        for (std::size_t a = 0; a < m; ++a) comm.add(diff.column(a));
    }
    const Subspace comm_space = comm.subspace();
    out.curvature_commutator_dim = comm_space.dim();
    if (auto v = comm_space.first_outside(out.j[2])) {
        out.commutators_in_j = Verdict::fail("a curvature commutator lies outside J^2", {{"element", to_json(*v)}});
    } else {
        out.commutators_in_j = Verdict::pass();
    }
    return out;
}

std::vector<std::size_t> OmegaM::dims() const {
    std::vector<std::size_t> out;
    for (const auto& s : spaces) out.push_back(s.dim());
    return out;
}

OmegaM quotient_omega_m(const Connection& c, const OmegaHat& oh, const JQuotient& jq) {
    const std::size_t D = c.truncation();
    const FormSpace& forms = c.forms();
    const GradedCalculus& calc = c.calculus();
    const Module& mod = c.module();
    const Algebra& a = mod.algebra();

    OmegaM out;
    for (std::size_t r = 0; r <= D; ++r) out.spaces.push_back(bimodconn::quotient(forms.dim(r), jq.j[r]));
    auto p = [&](std::size_t r) -> const Matrix& { return out.spaces[r].projection; };
    auto lift = [&](std::size_t r) -> const Matrix& { return out.spaces[r].section; };

    out.factored = Verdict::pass();
    for (std::size_t r = 0; r < D; ++r) {
        const Factorization f = factor_through(p(r), p(r + 1) * c.extension(r));
        if (!f.map) {
            out.factored = Verdict::fail("nabla does not pass to the quotient by J", {{"degree", r}, {"element", to_json(*f.witness)}});
            out.right_leibniz = out.left_linear = out.right_linear = out.coherence =
                Verdict{Status::unavailable, "nabla does not pass to the quotient", nullptr};
            return out;
        }
        out.nabla.push_back(*f.map);
    }
    for (std::size_t r = 0; r + 2 <= D; ++r) out.curvature.push_back(out.nabla[r + 1] * out.nabla[r]);

    out.right_leibniz = Verdict::pass();
    for (std::size_t f = 0; f < a.dim() && out.right_leibniz.passed(); ++f) {
        const Matrix r1 = forms.right_action(1, a.basis(f));
        const Vector df = calc.d(a.basis(f));
        for (std::size_t j = 0; j < out.spaces[0].dim(); ++j) {
            const Vector x = lift(0) * unit_vector(out.spaces[0].dim(), j);
            const Vector lhs = out.nabla[0] * (p(0) * (mod.right(f) * x));
            const Vector rhs = p(1) * (r1 * (c.nabla() * x) + forms.multiply(x, 0, df, 1));
            if (lhs != rhs) {
                out.right_leibniz = Verdict::fail("right Leibniz rule fails on Omega(M)",
                                                  {{"pair", {mod.basis_name(j), a.basis_name(f)}}});
                break;
            }
        }
    }

    out.right_linear = Verdict::pass();
    for (std::size_t r = 0; r < out.curvature.size() && out.right_linear.passed(); ++r) {
        for (std::size_t t = 0; r + t + 2 <= D && out.right_linear.passed(); ++t) {
            for (std::size_t i = 0; i < out.spaces[r].dim() && out.right_linear.passed(); ++i) {
                const Vector xi = lift(r) * unit_vector(out.spaces[r].dim(), i);
                const Vector fxi = lift(r + 2) * (out.curvature[r] * unit_vector(out.spaces[r].dim(), i));
                for (std::size_t j = 0; j < calc.dim(t); ++j) {
                    const Vector w = unit_vector(calc.dim(t), j);
                    const Vector lhs = out.curvature[r + t] * (p(r + t) * forms.multiply(xi, r, w, t));
                    const Vector rhs = p(r + t + 2) * forms.multiply(fxi, r + 2, w, t);
                    if (lhs != rhs) {
                        out.right_linear = Verdict::fail("curvature on Omega(M) is not right Omega-linear",
                                                         {{"degrees", {r, t}}, {"basis", {i, j}}});
                        break;
                    }
                }
            }
        }
    }

    out.left_linear = Verdict::pass();
    for (std::size_t r = 0; r < out.curvature.size() && out.left_linear.passed(); ++r) {
        for (std::size_t f = 0; f < a.dim(); ++f) {
            const Factorization lr = factor_through(p(r), p(r) * c.left(r, f));
            const Factorization lr2 = factor_through(p(r + 2), p(r + 2) * c.left(r + 2, f));
            if (!lr.map || !lr2.map) {
                out.left_linear = Verdict::fail("left action does not pass to Omega(M)", {{"degree", r}, {"f", a.basis_name(f)}});
                break;
            }
            const Matrix lhs = out.curvature[r] * *lr.map;
            const Matrix rhs = *lr2.map * out.curvature[r];
            if (lhs != rhs) {
                std::size_t j = 0;
                while (lhs.column(j) == rhs.column(j)) ++j;
                out.left_linear = Verdict::fail("curvature on Omega(M) is not left A-linear",
                                                {{"degree", r}, {"f", a.basis_name(f)}, {"basis", j},
                                                 {"lhs", to_json(lhs.column(j))}, {"rhs", to_json(rhs.column(j))}});
                break;
            }
        }
    }

    out.coherence = Verdict::pass();
    for (std::size_t r = 0; r < D && out.coherence.passed(); ++r) {
        if (out.nabla[r] * p(r) != p(r + 1) * c.extension(r)) {
            out.coherence = Verdict::fail("p nabla differs from nabla p", {{"degree", r}});
        }
    }
    for (std::size_t k = 0; k <= oh.max_degree && out.coherence.passed(); ++k) {
        for (std::size_t i = 0; i < oh.dim(k) && out.coherence.passed(); ++i) {
            const Matrix phi = oh.element(c, k, i);
            for (std::size_t r = 0; r + k + 1 <= D; ++r) {
                const Matrix up = forms.extend(phi, k, r);
                if (!factor_through(p(r), p(r + k) * up).map) {
                    out.coherence = Verdict::fail("an omega-hat operator does not pass to Omega(M)",
                                                  {{"operator_degree", k}, {"operator", i}, {"degree", r}});
                    break;
                }
            }
        }
    }
    return out;
}

InducedCalculus induced_full_calculus(const Connection& c, const OmegaM& om) {
    require_bimodule(c, "induced_full_calculus");
    if (!om.factored.passed()) throw PreconditionError("induced calculus: nabla does not pass to Omega(M)");
    const std::size_t D = c.truncation();
    const FormSpace& forms = c.forms();
    const Module& mod = c.module();
    const Algebra& a = mod.algebra();
    const GradedCalculus& calc = c.calculus();
    const UniversalFormsPtr& ufp = calc.forms_ptr();
    const UniversalForms& uf = *ufp;
    const std::size_t n = a.dim();
    const std::size_t m = mod.dim();

    // E_s[i]: the extension of nabla-hat(e_i^) to M (x) Omega^s
    std::vector<std::vector<Matrix>> ext(D);
    for (std::size_t s = 0; s < D; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            ext[s].push_back(c.extension(s) * c.left(s, i) - c.left(s + 1, i) * c.extension(s));
        }
    }

    InducedCalculus out;
    out.well_defined = Verdict::pass();
    for (std::size_t s = 0; s < D; ++s) {
        Matrix acc(forms.dim(s + 1), forms.dim(s));
        for (std::size_t i = 0; i < n; ++i) acc += a.unit()[i] * ext[s][i];
        if (!acc.is_zero()) {
            out.well_defined = Verdict::fail("nabla-hat(1^) is not zero", {{"degree", s}});
            break;
        }
    }

    // suffix products T_r[w] = E_{r-1}[w1] ... E_0[wr], restricted to M
    std::vector<std::vector<Matrix>> words(D + 1);
    words[0].push_back(Matrix::identity(m));
    for (std::size_t r = 1; r <= D; ++r) {
        const std::size_t tail = power(n - 1, r - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            for (std::size_t w = 0; w < tail; ++w) words[r].push_back(ext[r - 1][uf.letter(k)] * words[r - 1][w]);
        }
    }
    // upstairs operator for u-basis element (a0; w)
    auto upstairs = [&](std::size_t r, std::size_t u) {
        const std::size_t count = power(n - 1, r);
        return c.left(r, u / count) * words[r][u % count];
    };
    auto p = [&](std::size_t r) -> const Matrix& { return om.spaces[r].projection; };

    std::vector<Subspace> ideal;
    for (std::size_t r = 0; r <= D; ++r) {
        const std::size_t ud = uf.udim(n, r);
        Matrix k(om.spaces[r].dim() * m, ud);
        for (std::size_t u = 0; u < ud; ++u) k.set_column(u, (p(r) * upstairs(r, u)).flatten());
        out.kappa.push_back(k);
        ideal.push_back(r == 0 ? Subspace(ud) : kernel(k));
    }

    const std::vector<Subspace> saturated = [&] {
        std::vector<std::vector<Vector>> seed;
        for (const auto& s : ideal) seed.push_back(s.basis());
        return saturate(uf, D, seed);
    }();
    out.ideal_closed = Verdict::pass();
    for (std::size_t r = 0; r <= D; ++r) {
        if (!(saturated[r] == ideal[r])) {
            out.ideal_closed = Verdict::fail("ker kappa is not a differential ideal", {{"degree", r}});
            break;
        }
    }
    out.calculus = std::make_shared<const GradedCalculus>(ufp, D, saturated, "induced");

    const bool injective0 = kernel(out.kappa[0]).dim() == 0;
    out.degree0 = out.calculus->dim(0) == n ? Verdict::pass(injective0 ? "kappa0 is injective" : "kappa0 is not injective")
                                            : Verdict::fail("degree 0 of the induced calculus is not A");

    out.d_squared = Verdict::pass();
    for (std::size_t r = 0; r + 2 <= D; ++r) {
        for (std::size_t u = 0; u < uf.udim(n, r); ++u) {
            const Matrix g = nabla_hat(c, nabla_hat(c, upstairs(r, u), r), r + 1);
            if (!g.is_zero()) ++out.upstairs_nonzero;
            if (out.d_squared.passed() && !(p(r + 2) * g).is_zero()) {
                out.d_squared = Verdict::fail("p nabla-hat^2 is not zero", {{"degree", r}, {"basis", u}});
            }
        }
    }

    out.diagram = Verdict::pass();
    for (std::size_t r = 0; r < D && out.diagram.passed(); ++r) {
        const Matrix du = uf.d_ucoords(r);
        for (std::size_t u = 0; u < uf.udim(n, r); ++u) {
            const Vector lhs = out.kappa[r + 1] * du.column(u);
            const Vector rhs = (p(r + 1) * nabla_hat(c, upstairs(r, u), r)).flatten();
            if (lhs != rhs) {
                out.diagram = Verdict::fail("kappa d_u differs from d_nabla kappa", {{"degree", r}, {"basis", u}});
                break;
            }
        }
    }

    out.derivation = check_graded_calculus(*out.calculus);
    return out;
}

SigmaFull sigma_full(const Connection& c, const OmegaM& om, const InducedCalculus& ic) {
    const std::size_t D = c.truncation();
    const FormSpace& forms = c.forms();
    const GradedCalculus& calc = c.calculus();
    const UniversalForms& uf = calc.forms();
    const std::size_t n = uf.n();
    const std::size_t m = c.module().dim();

    SigmaFull out;
    out.order = preceq(*ic.calculus, calc, OrderMode::all_degrees);
    if (!out.order.rho) {
        out.exists = {Status::absent, "kappa does not vanish on the ideal of the calculus", out.order.verdict.witness};
        out.degree0 = out.multiplicative = out.compatibility =
            Verdict{Status::unavailable, "sigma does not exist", nullptr};
        return out;
    }
    out.exists = Verdict::pass();

    auto p = [&](std::size_t r) -> const Matrix& { return om.spaces[r].projection; };
    auto lift = [&](std::size_t r) -> const Matrix& { return om.spaces[r].section; };
    // sigma_u(omega (x) xi) for omega in u-coordinates of degree r, xi in Omega(M)^s
    auto sigma = [&](const Vector& omega, std::size_t r, const Vector& xi, std::size_t s) {
        const Matrix op = Matrix::unflatten(om.spaces[r].dim(), m, ic.kappa[r] * omega);
        const Matrix up = om.spaces[r].section * op;
        return p(r + s) * forms.apply(up, r, lift(s) * xi, s);
    };

    out.degree0 = Verdict::pass();
    for (std::size_t f = 0; f < n && out.degree0.passed(); ++f) {
        for (std::size_t s = 0; s <= D && out.degree0.passed(); ++s) {
            const Factorization lf = factor_through(p(s), p(s) * c.left(s, f));
            for (std::size_t j = 0; j < om.spaces[s].dim(); ++j) {
                const Vector xi = unit_vector(om.spaces[s].dim(), j);
                if (!lf.map || sigma(unit_vector(n, f), 0, xi, s) != *lf.map * xi) {
                    out.degree0 = Verdict::fail("sigma_u(f (x) xi) differs from f xi", {{"f", f}, {"degree", s}, {"basis", j}});
                    break;
                }
            }
        }
    }

    // generators 1 . de_i times the full u-basis cover all products
    const CalculusPtr universal = std::make_shared<const GradedCalculus>(
        calc.forms_ptr(), D, [&] {
            std::vector<Subspace> zero;
            for (std::size_t r = 0; r <= D; ++r) zero.emplace_back(uf.udim(n, r));
            return zero;
        }(),
        "universal");
    out.multiplicative = Verdict::pass();
    for (std::size_t k = 0; k + 1 < n && out.multiplicative.passed(); ++k) {
        const Vector w1 = universal->d(uf.algebra().basis(uf.letter(k)));
        for (std::size_t r2 = 0; r2 + 1 <= D && out.multiplicative.passed(); ++r2) {
            for (std::size_t u = 0; u < uf.udim(n, r2) && out.multiplicative.passed(); ++u) {
                const Vector w2 = unit_vector(uf.udim(n, r2), u);
                const Vector w12 = universal->multiply(w1, 1, w2, r2);
                for (std::size_t s = 0; 1 + r2 + s <= D && out.multiplicative.passed(); ++s) {
                    for (std::size_t j = 0; j < om.spaces[s].dim(); ++j) {
                        const Vector xi = unit_vector(om.spaces[s].dim(), j);
                        if (sigma(w12, r2 + 1, xi, s) != sigma(w1, 1, sigma(w2, r2, xi, s), r2 + s)) {
                            out.multiplicative = Verdict::fail("sigma_u is not multiplicative",
                                                               {{"letter", k}, {"degree", r2}, {"basis", u}, {"module_degree", s}, {"element", j}});
                            break;
                        }
                    }
                }
            }
        }
    }

    out.compatibility = Verdict::pass();
    for (std::size_t r = 0; r < D && out.compatibility.passed(); ++r) {
        const Matrix du = uf.d_ucoords(r);
        for (std::size_t u = 0; u < uf.udim(n, r) && out.compatibility.passed(); ++u) {
            const Vector w = unit_vector(uf.udim(n, r), u);
            for (std::size_t s = 0; r + s + 1 <= D && out.compatibility.passed(); ++s) {
                for (std::size_t j = 0; j < om.spaces[s].dim(); ++j) {
                    const Vector xi = unit_vector(om.spaces[s].dim(), j);
                    const Vector lhs = om.nabla[r + s] * sigma(w, r, xi, s);
                    Vector rhs = sigma(du * w, r + 1, xi, s);
                    add_scaled(rhs, parity(r), sigma(w, r, om.nabla[s] * xi, s + 1));
                    if (lhs != rhs) {
                        out.compatibility = Verdict::fail("sigma_u is not compatible with nabla",
                                                          {{"degree", r}, {"basis", u}, {"module_degree", s}, {"element", j}});
                        break;
                    }
                }
            }
        }
    }
    return out;
}

TwistSearch search_sigma_failure(const FormSpace& forms, const Matrix& base, const std::vector<Rational>& grid) {
    if (grid.empty()) throw PreconditionError("twist search: empty grid");
    const HomSpace hom = right_hom_space(forms.module(), forms.as_module(1));
    const std::size_t h = hom.dim();
    std::vector<Matrix> elements;
    for (std::size_t i = 0; i < h; ++i) elements.push_back(hom.element(i));
    std::vector<std::size_t> digits(h, 0);
    TwistSearch out;
    while (true) {
        Matrix nabla = base;
        std::vector<Rational> coeffs;
        for (std::size_t i = 0; i < h; ++i) {
            coeffs.push_back(grid[digits[i]]);
            if (sgn(grid[digits[i]]) != 0) nabla += grid[digits[i]] * elements[i];
        }
        ++out.tried;
        Connection conn("twist", forms, nabla);
        const Kappa1 k = kappa1(conn);
        if (!factor_through(forms.calculus().quotient(1).projection, k.map).map) {
            out.found.emplace(std::move(conn));
            out.coefficients = std::move(coeffs);
            return out;
        }
        std::size_t pos = h;
        while (pos > 0 && digits[pos - 1] + 1 == grid.size()) digits[--pos] = 0;
        if (pos == 0) return out;
        ++digits[pos - 1];
    }
}

}  // namespace bimodconn
