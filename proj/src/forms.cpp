#include "bimodconn/forms.hpp"

namespace bimodconn {

std::size_t power(std::size_t base, std::size_t exp) {
    std::size_t p = 1;
    for (std::size_t i = 0; i < exp; ++i) p *= base;
    return p;
}

namespace {

std::vector<Matrix> regular_right(const Algebra& a) {
    std::vector<Matrix> right;
    for (std::size_t f = 0; f < a.dim(); ++f) right.push_back(a.right_multiplication(a.basis(f)));
    return right;
}

}  // namespace

UniversalForms::UniversalForms(AlgebraPtr algebra, std::size_t max_degree)
    : algebra_(std::move(algebra)), max_degree_(max_degree) {
    const std::size_t n = algebra_->dim();
    if (n == 0) throw PreconditionError("UniversalForms: zero algebra");
    const std::size_t j0 = algebra_->unit_pivot();
    const Vector& u = algebra_->unit();
    for (std::size_t k = 0; k + 1 < n; ++k) pivot_expansion_.push_back(-u[letter(k)] / u[j0]);

    const std::vector<Matrix> right = regular_right(*algebra_);
    dwords_.resize(max_degree + 1);
    dwords_[0].push_back(u);
    for (std::size_t s = 1; s <= max_degree; ++s) {
        dwords_[s].reserve(power(n, s));
        for (std::size_t prev = 0; prev < power(n, s - 1); ++prev) {
            for (std::size_t a = 0; a < n; ++a) {
                // da = 1 (x) a - a (x) 1
                Vector da = kron(u, algebra_->basis(a)) - kron(algebra_->basis(a), u);
                dwords_[s].push_back(multiply(dwords_[s - 1][prev], right, s - 1, da, 1));
            }
        }
    }
}

std::vector<std::size_t> UniversalForms::reduced_word(std::size_t index, std::size_t r) const {
    std::vector<std::size_t> letters(r);
    for (std::size_t k = r; k-- > 0;) {
        letters[k] = letter(index % (n() - 1));
        index /= n() - 1;
    }
    return letters;
}

std::size_t UniversalForms::word_index(const std::vector<std::size_t>& letters) const {
    std::size_t w = 0;
    for (auto a : letters) w = w * n() + a;
    return w;
}

Vector UniversalForms::multiply(const Vector& x, const std::vector<Matrix>& right, std::size_t r, const Vector& w,
                                std::size_t s) const {
    const std::size_t n = this->n();
    const std::size_t nr = power(n, r);
    const std::size_t ns = power(n, s);
    if (x.size() % nr != 0 || w.size() != n * ns) throw DimensionError("UniversalForms::multiply: bad lengths");
    const std::size_t base = x.size() / nr;
    Vector out = zero_vector(base * nr * ns);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (sgn(x[i]) == 0) continue;
        const std::size_t b = i / nr;
        const std::size_t word = i % nr;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (sgn(w[j]) == 0) continue;
            const std::size_t b0 = j / ns;
            const std::size_t rest = j % ns;
            const Rational c = x[i] * w[j];
            if (r == 0) {
                const Matrix& act = right[b0];
                for (std::size_t t = 0; t < base; ++t) {
                    if (sgn(act(t, b)) != 0) out[t * ns + rest] += c * act(t, b);
                }
            } else {
                const std::size_t pre = word / n;
                const Vector& prod = algebra_->product(word % n, b0);
                for (std::size_t t = 0; t < n; ++t) {
                    if (sgn(prod[t]) != 0) out[b * nr * ns + ((pre * n + t) * ns + rest)] += c * prod[t];
                }
            }
        }
    }
    return out;
}

Vector UniversalForms::to_ucoords(const Vector& x, std::size_t base, std::size_t r) const {
    const std::size_t n = this->n();
    const std::size_t nr = power(n, r);
    if (x.size() != base * nr) throw DimensionError("UniversalForms::to_ucoords: bad length");
    const std::size_t j0 = algebra_->unit_pivot();
    Vector out = zero_vector(udim(base, r));
    std::vector<std::pair<std::size_t, Rational>> terms;
    std::vector<std::pair<std::size_t, Rational>> next;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (sgn(x[i]) == 0) continue;
        terms.assign(1, {i / nr, x[i]});
        std::size_t word = i % nr;
        for (std::size_t k = r; k-- > 0;) {
            const std::size_t a = (word / power(n, k)) % n;
            next.clear();
            for (const auto& [idx, c] : terms) {
                if (a != j0) {
                    next.emplace_back(idx * (n - 1) + (a < j0 ? a : a - 1), c);
                } else {
                    for (std::size_t q = 0; q + 1 < n; ++q) {
                        if (sgn(pivot_expansion_[q]) != 0) next.emplace_back(idx * (n - 1) + q, c * pivot_expansion_[q]);
                    }
                }
            }
            terms.swap(next);
        }
        for (const auto& [idx, c] : terms) out[idx] += c;
    }
    return out;
}

Vector UniversalForms::from_ucoords(const Vector& u, const std::vector<Matrix>& right, std::size_t r) const {
    const std::size_t ur = power(n() - 1, r);
    if (u.size() % ur != 0) throw DimensionError("UniversalForms::from_ucoords: bad length");
    const std::size_t base = u.size() / ur;
    Vector out = zero_vector(ambient_dim(base, r));
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (sgn(u[i]) == 0) continue;
        const Vector& w = dword(r, word_index(reduced_word(i % ur, r)));
        add_scaled(out, u[i], multiply(unit_vector(base, i / ur), right, 0, w, r));
    }
    return out;
}

Vector UniversalForms::d_ambient(const Vector& x, std::size_t r) const {
    const std::size_t n = this->n();
    const std::size_t len = power(n, r + 1);
    if (x.size() != len) throw DimensionError("UniversalForms::d_ambient: bad length");
    const Vector& u = algebra_->unit();
    Vector out = zero_vector(len * n);
    for (std::size_t i = 0; i < len; ++i) {
        if (sgn(x[i]) == 0) continue;
        // insert 1 at position k with sign (-1)^k
        for (std::size_t k = 0; k <= r + 1; ++k) {
            const std::size_t tail = power(n, r + 1 - k);
            const std::size_t head = i / tail;
            const std::size_t rest = i % tail;
            for (std::size_t t = 0; t < n; ++t) {
                if (sgn(u[t]) == 0) continue;
                const Rational c = (k % 2 == 0 ? x[i] : -x[i]) * u[t];
                out[(head * n + t) * tail + rest] += c;
            }
        }
    }
    return out;
}

Matrix UniversalForms::d_ucoords(std::size_t r) const {
    const std::size_t n = this->n();
    const std::size_t ur = power(n - 1, r);
    const std::size_t j0 = algebra_->unit_pivot();
    const Vector& u = algebra_->unit();
    Matrix out(udim(n, r + 1), udim(n, r));
    for (std::size_t a0 = 0; a0 < n; ++a0) {
        for (std::size_t w = 0; w < ur; ++w) {
            const std::size_t col = a0 * ur + w;
            for (std::size_t b = 0; b < n; ++b) {
                if (sgn(u[b]) == 0) continue;
                if (a0 != j0) {
                    out(b * ur * (n - 1) + (a0 < j0 ? a0 : a0 - 1) * ur + w, col) += u[b];
                } else {
                    for (std::size_t q = 0; q + 1 < n; ++q) out(b * ur * (n - 1) + q * ur + w, col) += u[b] * pivot_expansion_[q];
                }
            }
        }
    }
    return out;
}

Matrix UniversalForms::left_ucoords(const Matrix& left_on_base, std::size_t r) const {
    return kron(left_on_base, Matrix::identity(power(n() - 1, r)));
}

Matrix UniversalForms::right_ucoords(const Vector& f, std::size_t r) const {
    const std::vector<Matrix> reg = regular_right(*algebra_);
    const std::size_t ud = udim(n(), r);
    Matrix out(ud, ud);
    for (std::size_t j = 0; j < ud; ++j) {
        const Vector amb = from_ucoords(unit_vector(ud, j), reg, r);
        out.set_column(j, to_ucoords(multiply(amb, reg, r, f, 0), n(), r));
    }
    return out;
}

GradedCalculus::GradedCalculus(UniversalFormsPtr forms, std::size_t truncation, std::vector<Subspace> ideal,
                               std::string name)
    : forms_(std::move(forms)), truncation_(truncation), ideal_(std::move(ideal)), name_(std::move(name)) {
    if (truncation_ > forms_->max_degree()) throw PreconditionError("GradedCalculus: truncation exceeds precomputed degree");
    if (ideal_.size() != truncation_ + 1) throw DimensionError("GradedCalculus: need one ideal component per degree");
    const std::size_t n = forms_->n();
    for (std::size_t r = 0; r <= truncation_; ++r) {
        if (ideal_[r].ambient() != forms_->udim(n, r)) throw DimensionError("GradedCalculus: ideal component has wrong ambient");
        quotients_.push_back(bimodconn::quotient(forms_->udim(n, r), ideal_[r]));
    }
    if (ideal_[0].dim() != 0) throw PreconditionError("GradedCalculus: the ideal must vanish in degree 0");
    regular_right_ = regular_right(forms_->algebra());
    for (std::size_t r = 0; r < truncation_; ++r) {
        const Matrix du = forms_->d_ucoords(r);
        for (const auto& v : ideal_[r].basis()) {
            if (!ideal_[r + 1].contains(du * v)) {
                throw PreconditionError("GradedCalculus: ideal is not closed under d in degree " + std::to_string(r));
            }
        }
        differentials_.push_back(quotients_[r + 1].projection * du * quotients_[r].section);
    }
}

std::vector<std::size_t> GradedCalculus::dims() const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r <= truncation_; ++r) out.push_back(dim(r));
    return out;
}

Vector GradedCalculus::project(const Vector& ambient, std::size_t r) const {
    return quotients_[r].project(forms_->to_ucoords(ambient, forms_->n(), r));
}

Vector GradedCalculus::lift(const Vector& cls, std::size_t r) const {
    return forms_->from_ucoords(quotients_[r].lift(cls), regular_right_, r);
}

Vector GradedCalculus::multiply(const Vector& x, std::size_t r, const Vector& y, std::size_t s) const {
    if (r + s > truncation_) throw PreconditionError("GradedCalculus::multiply: degree exceeds truncation");
    return project(forms_->multiply(lift(x, r), regular_right_, r, lift(y, s), s), r + s);
}

Module GradedCalculus::bimodule(std::size_t r) const {
    const Algebra& a = algebra();
    std::vector<Matrix> left;
    std::vector<Matrix> right;
    for (std::size_t f = 0; f < a.dim(); ++f) {
        left.push_back(quotients_[r].projection * forms_->left_ucoords(a.left_multiplication(a.basis(f)), r) *
                       quotients_[r].section);
        Matrix rf(dim(r), dim(r));
        for (std::size_t j = 0; j < dim(r); ++j) rf.set_column(j, multiply(unit_vector(dim(r), j), r, a.basis(f), 0));
        right.push_back(std::move(rf));
    }
    return Module::bimodule("Omega" + std::to_string(r), algebra_ptr(), dim(r), std::move(left), std::move(right));
}

FormSpace::FormSpace(Module module, CalculusPtr calculus) : module_(std::move(module)), calculus_(std::move(calculus)) {
    if (!(module_.algebra() == calculus_->algebra())) throw PreconditionError("FormSpace: algebra mismatch");
    const UniversalForms& forms = calculus_->forms();
    const std::size_t m = module_.dim();
    const std::vector<Matrix> reg = regular_right(calculus_->algebra());
    for (std::size_t r = 0; r <= calculus_->truncation(); ++r) {
        // image of M (x)_A I^r
        SpanBuilder span(forms.udim(m, r));
        for (const auto& iota_u : calculus_->ideal(r).basis()) {
            const Vector iota = forms.from_ucoords(iota_u, reg, r);
            for (std::size_t b = 0; b < m; ++b) {
                span.add(forms.to_ucoords(forms.multiply(unit_vector(m, b), module_.right_matrices(), 0, iota, r), m, r));
            }
        }
        quotients_.push_back(bimodconn::quotient(forms.udim(m, r), span.subspace()));
    }
}

std::size_t FormSpace::ambient_dim(std::size_t r) const { return calculus_->forms().ambient_dim(module_.dim(), r); }

Vector FormSpace::project(const Vector& ambient, std::size_t r) const {
    return quotients_[r].project(calculus_->forms().to_ucoords(ambient, module_.dim(), r));
}

Vector FormSpace::lift(const Vector& cls, std::size_t r) const {
    return calculus_->forms().from_ucoords(quotients_[r].lift(cls), module_.right_matrices(), r);
}

Vector FormSpace::multiply(const Vector& xi, std::size_t r, const Vector& omega, std::size_t s) const {
    if (r + s > truncation()) throw PreconditionError("FormSpace::multiply: degree exceeds truncation");
    const Vector prod =
        calculus_->forms().multiply(lift(xi, r), module_.right_matrices(), r, calculus_->lift(omega, s), s);
    return project(prod, r + s);
}

Matrix FormSpace::right_multiplication(std::size_t r, const Vector& omega, std::size_t s) const {
    Matrix out(dim(r + s), dim(r));
    for (std::size_t j = 0; j < dim(r); ++j) out.set_column(j, multiply(unit_vector(dim(r), j), r, omega, s));
    return out;
}

Matrix FormSpace::right_action(std::size_t r, const Vector& f) const { return right_multiplication(r, f, 0); }

Matrix FormSpace::left_action(std::size_t r, const Vector& f) const {
    return quotients_[r].projection * calculus_->forms().left_ucoords(module_.left_action(f), r) * quotients_[r].section;
}

Module FormSpace::as_module(std::size_t r) const {
    const Algebra& a = module_.algebra();
    std::vector<Matrix> right;
    std::vector<Matrix> left;
    for (std::size_t f = 0; f < a.dim(); ++f) {
        right.push_back(right_action(r, a.basis(f)));
        if (module_.has_left()) left.push_back(left_action(r, a.basis(f)));
    }
    const std::string name = module_.name() + "(x)Omega" + std::to_string(r);
    if (module_.has_left()) return Module::bimodule(name, module_.algebra_ptr(), dim(r), std::move(left), std::move(right));
    return Module::right_module(name, module_.algebra_ptr(), dim(r), std::move(right));
}

std::vector<Vector> FormSpace::lift_columns(const Matrix& restriction, std::size_t k, std::size_t s) const {
    if (s + k > truncation()) throw PreconditionError("FormSpace: extension degree exceeds truncation");
    if (restriction.rows() != dim(k) || restriction.cols() != module_.dim()) {
        throw DimensionError("FormSpace: map on M has the wrong shape");
    }
    std::vector<Vector> lifted;
    for (std::size_t b = 0; b < module_.dim(); ++b) lifted.push_back(lift(restriction.column(b), k));
    return lifted;
}

Vector FormSpace::apply_ucoords(const std::vector<Vector>& lifted, std::size_t k, const Vector& u,
                                std::size_t s) const {
    const UniversalForms& forms = calculus_->forms();
    const std::size_t us = power(forms.n() - 1, s);
    Vector amb = zero_vector(ambient_dim(s + k));
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (sgn(u[i]) == 0) continue;
        const Vector& w = forms.dword(s, forms.word_index(forms.reduced_word(i % us, s)));
        add_scaled(amb, u[i], forms.multiply(lifted[i / us], module_.right_matrices(), k, w, s));
    }
    return project(amb, s + k);
}

Matrix FormSpace::extend(const Matrix& restriction, std::size_t k, std::size_t s) const {
    const std::vector<Vector> lifted = lift_columns(restriction, k, s);
    Matrix out(dim(s + k), dim(s));
    for (std::size_t j = 0; j < dim(s); ++j) {
        out.set_column(j, apply_ucoords(lifted, k, quotients_[s].section.column(j), s));
    }
    return out;
}

Vector FormSpace::apply(const Matrix& restriction, std::size_t k, const Vector& xi, std::size_t s) const {
    return apply_ucoords(lift_columns(restriction, k, s), k, quotients_[s].lift(xi), s);
}

Matrix FormSpace::apply_columns(const Matrix& restriction, std::size_t k, const Matrix& xs, std::size_t s) const {
    const std::vector<Vector> lifted = lift_columns(restriction, k, s);
    Matrix out(dim(s + k), xs.cols());
    for (std::size_t j = 0; j < xs.cols(); ++j) {
        out.set_column(j, apply_ucoords(lifted, k, quotients_[s].lift(xs.column(j)), s));
    }
    return out;
}

Matrix FormSpace::extend_ucoords(const Matrix& restriction, std::size_t k, std::size_t s) const {
    const std::vector<Vector> lifted = lift_columns(restriction, k, s);
    Matrix out(dim(s + k), udim(s));
    for (std::size_t j = 0; j < udim(s); ++j) out.set_column(j, apply_ucoords(lifted, k, unit_vector(udim(s), j), s));
    return out;
}

}  // namespace bimodconn
