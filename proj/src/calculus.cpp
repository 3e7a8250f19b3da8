#include "bimodconn/calculus.hpp"

#include <deque>
#include <sstream>

namespace bimodconn {

CalculusPtr universal_graded(AlgebraPtr algebra, std::size_t truncation) {
    if (truncation == 0) throw PreconditionError("universal_graded: truncation must be at least 1");
    auto forms = std::make_shared<const UniversalForms>(std::move(algebra), truncation);
    std::vector<Subspace> ideal;
    for (std::size_t r = 0; r <= truncation; ++r) ideal.emplace_back(forms->udim(forms->n(), r));
    return std::make_shared<const GradedCalculus>(forms, truncation, std::move(ideal), "universal");
}

FirstOrderCalculus first_order_part(const GradedCalculus& c) {
    if (c.truncation() < 1) throw PreconditionError("first_order_part: calculus has no degree 1");
    return {c.algebra_ptr(), c.ideal(1), c.quotient(1), c.bimodule(1), c.differential(0)};
}

FirstOrderCalculus universal_first_order(AlgebraPtr algebra) {
    return first_order_part(*universal_graded(std::move(algebra), 1));
}

Vector generator_ucoords(const UniversalForms& forms, const Generator& g) {
    const std::size_t n = forms.n();
    if (g.degree == 0) throw PreconditionError("generator of degree 0: the ideal must vanish in degree 0");
    if (g.degree > forms.max_degree()) throw PreconditionError("generator degree exceeds truncation");
    if (g.tensor.size() != power(n, g.degree + 1)) {
        throw DimensionError("generator of degree " + std::to_string(g.degree) + " needs " +
                             std::to_string(power(n, g.degree + 1)) + " coordinates");
    }
    const Vector u = forms.to_ucoords(g.tensor, n, g.degree);
    const std::vector<Matrix> reg = Module::regular(forms.algebra_ptr()).right_matrices();
    if (forms.from_ucoords(u, reg, g.degree) != g.tensor) {
        throw PreconditionError("generator is not a universal form: " + format_tensor(forms.algebra(), g.tensor, g.degree + 1));
    }
    return u;
}

std::vector<Subspace> saturate(const UniversalForms& forms, std::size_t truncation,
                               const std::vector<std::vector<Vector>>& seed) {
    const Algebra& a = forms.algebra();
    const std::size_t n = a.dim();
    std::vector<SpanBuilder> spans;
    std::vector<std::deque<Vector>> queue(truncation + 1);
    for (std::size_t r = 0; r <= truncation; ++r) spans.emplace_back(forms.udim(n, r));
    for (std::size_t r = 0; r < seed.size() && r <= truncation; ++r) {
        for (const auto& v : seed[r]) {
            if (spans[r].add(v)) queue[r].push_back(v);
        }
    }
    // multiplication operators in u-coordinates, built on first use
    std::vector<std::vector<Matrix>> left(truncation + 1);
    std::vector<std::vector<Matrix>> right(truncation + 1);
    std::vector<Matrix> d(truncation + 1);
    auto prepare = [&](std::size_t r) {
        if (!left[r].empty()) return;
        for (std::size_t f = 0; f < n; ++f) {
            left[r].push_back(forms.left_ucoords(a.left_multiplication(a.basis(f)), r));
            right[r].push_back(forms.right_ucoords(a.basis(f), r));
        }
        if (r < truncation) d[r] = forms.d_ucoords(r);
    };
    bool busy = true;
    while (busy) {
        busy = false;
        for (std::size_t r = 0; r <= truncation; ++r) {
            while (!queue[r].empty()) {
                busy = true;
                prepare(r);
                const Vector v = std::move(queue[r].front());
                queue[r].pop_front();
                for (std::size_t f = 0; f < n; ++f) {
                    for (const Matrix* op : {&left[r][f], &right[r][f]}) {
                        Vector w = *op * v;
                        if (spans[r].add(w)) queue[r].push_back(std::move(w));
                    }
                }
                if (r < truncation) {
                    Vector w = d[r] * v;
                    if (spans[r + 1].add(w)) queue[r + 1].push_back(std::move(w));
                }
            }
        }
    }
    std::vector<Subspace> out;
    for (const auto& s : spans) out.push_back(s.subspace());
    return out;
}

CalculusPtr quotient_calculus(const GradedCalculus& base, const std::vector<Generator>& generators, std::string name) {
    const std::size_t D = base.truncation();
    std::vector<std::vector<Vector>> seed(D + 1);
    for (std::size_t r = 0; r <= D; ++r) seed[r] = base.ideal(r).basis();
    for (const auto& g : generators) {
        if (g.degree > D) throw PreconditionError("generator degree exceeds truncation");
        seed[g.degree].push_back(generator_ucoords(base.forms(), g));
    }
    return std::make_shared<const GradedCalculus>(base.forms_ptr(), D, saturate(base.forms(), D, seed),
                                                  std::move(name));
}

CalculusPtr calculus_from_ideal(UniversalFormsPtr forms, std::size_t truncation, std::vector<Subspace> ideal,
                                std::string name) {
    std::vector<std::vector<Vector>> seed;
    for (const auto& s : ideal) seed.push_back(s.basis());
    auto saturated = saturate(*forms, truncation, seed);
    return std::make_shared<const GradedCalculus>(std::move(forms), truncation, std::move(saturated), std::move(name));
}

Comparison preceq(const GradedCalculus& c1, const GradedCalculus& c2, OrderMode mode) {
    if (!(c1.algebra() == c2.algebra())) throw PreconditionError("preceq: calculi over different algebras");
    if (c1.truncation() != c2.truncation()) throw PreconditionError("preceq: truncation mismatch");
    const std::size_t top = mode == OrderMode::first_order ? 1 : c1.truncation();
    const std::vector<Matrix> reg = Module::regular(c1.algebra_ptr()).right_matrices();
    CalculusMorphism rho;
    for (std::size_t r = 0; r <= top; ++r) {
        if (auto v = c1.ideal(r).first_outside(c2.ideal(r))) {
            const Vector t = c1.forms().from_ucoords(*v, reg, r);
            return {std::nullopt,
                    Verdict::fail("ideal of the second calculus is not contained in the first",
                                  {{"degree", r}, {"tensor", to_json(t)}, {"text", format_tensor(c1.algebra(), t, r + 1)}})};
        }
        rho.maps.push_back(*factor_through(c2.quotient(r).projection, c1.quotient(r).projection).map);
    }
    return {std::move(rho), Verdict::pass()};
}

Verdict check_morphism(const GradedCalculus& source, const GradedCalculus& target, const CalculusMorphism& rho) {
    const std::size_t top = rho.maps.size() - 1;
    for (std::size_t r = 0; r < top; ++r) {
        if (rho.maps[r + 1] * source.differential(r) != target.differential(r) * rho.maps[r]) {
            return Verdict::fail("morphism does not intertwine the differentials", {{"degree", r}});
        }
    }
    for (std::size_t r = 0; r <= top; ++r) {
        for (std::size_t s = 0; r + s <= top; ++s) {
            for (std::size_t i = 0; i < source.dim(r); ++i) {
                for (std::size_t j = 0; j < source.dim(s); ++j) {
                    const Vector x = unit_vector(source.dim(r), i);
                    const Vector y = unit_vector(source.dim(s), j);
                    const Vector lhs = rho.maps[r + s] * source.multiply(x, r, y, s);
                    const Vector rhs = target.multiply(rho.maps[r] * x, r, rho.maps[s] * y, s);
                    if (lhs != rhs) {
                        return Verdict::fail("morphism is not multiplicative",
                                             {{"degrees", {r, s}}, {"basis", {i, j}}});
                    }
                }
            }
        }
    }
    return Verdict::pass();
}

Verdict check_graded_calculus(const GradedCalculus& c) {
    const std::size_t D = c.truncation();
    for (std::size_t r = 0; r + 2 <= D; ++r) {
        if (!(c.differential(r + 1) * c.differential(r)).is_zero()) {
            return Verdict::fail("d d is not zero", {{"degree", r}});
        }
    }
    for (std::size_t r = 0; r < D; ++r) {
        for (std::size_t s = 0; r + s + 1 <= D; ++s) {
            for (std::size_t i = 0; i < c.dim(r); ++i) {
                const Vector x = unit_vector(c.dim(r), i);
                const Vector dx = c.differential(r) * x;
                for (std::size_t j = 0; j < c.dim(s); ++j) {
                    const Vector y = unit_vector(c.dim(s), j);
                    const Vector lhs = c.differential(r + s) * c.multiply(x, r, y, s);
                    Vector rhs = c.multiply(dx, r + 1, y, s);
                    add_scaled(rhs, r % 2 == 0 ? Rational(1) : Rational(-1), c.multiply(x, r, c.differential(s) * y, s + 1));
                    if (lhs != rhs) {
                        return Verdict::fail("graded Leibniz rule fails", {{"degrees", {r, s}}, {"basis", {i, j}}});
                    }
                }
            }
        }
    }
    return Verdict::pass();
}

Verdict check_universal_property(const GradedCalculus& c) {
    const Algebra& a = c.algebra();
    const std::size_t n = a.dim();
    const Subspace ker_mu = kernel(a.multiplication_map());
    SpanBuilder image(c.dim(1));
    for (const auto& k : ker_mu.basis()) {
        Vector phi = zero_vector(c.dim(1));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (sgn(k[i * n + j]) == 0) continue;
                add_scaled(phi, k[i * n + j], c.multiply(a.basis(i), 0, c.d(a.basis(j)), 1));
            }
        }
        if (phi != c.project(k, 1)) {
            return Verdict::fail("f (x) g -> f dg differs from the projection",
                                 {{"tensor", to_json(k)}, {"text", format_tensor(a, k, 2)}});
        }
        image.add(phi);
    }
    if (image.dim() != c.dim(1)) {
        return Verdict::fail("f dg does not span Omega1", {{"rank", image.dim()}, {"dim", c.dim(1)}});
    }
    for (std::size_t j = 0; j < n; ++j) {
        const Vector du = kron(a.unit(), a.basis(j)) - kron(a.basis(j), a.unit());
        if (c.project(du, 1) != c.d(a.basis(j))) {
            return Verdict::fail("projection of d_u differs from d", {{"basis", a.basis_name(j)}});
        }
    }
    return Verdict::pass();
}

std::string format_tensor(const Algebra& a, const Vector& t, std::size_t factors) {
    const std::size_t n = a.dim();
    std::ostringstream out;
    bool first = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (sgn(t[i]) == 0) continue;
        Rational c = t[i];
        if (first) {
            if (sgn(c) < 0) out << "-";
        } else {
            out << (sgn(c) < 0 ? " - " : " + ");
        }
        c = abs(c);
        if (c != 1) out << to_string(c) << " ";
        for (std::size_t k = 0; k < factors; ++k) {
            if (k > 0) out << "(x)";
            out << a.basis_name((i / power(n, factors - 1 - k)) % n);
        }
        first = false;
    }
    return first ? "0" : out.str();
}

}  // namespace bimodconn
