#include "bimodconn/fixtures.hpp"

namespace bimodconn::fixtures {

AlgebraPtr two_point_algebra() {
    std::vector<std::vector<Vector>> table(2, std::vector<Vector>(2, zero_vector(2)));
    table[0][0] = unit_vector(2, 0);
    table[1][1] = unit_vector(2, 1);
    return std::make_shared<const Algebra>("A2", std::vector<std::string>{"e1", "e2"}, std::move(table),
                                           Vector{1, 1});
}

AlgebraPtr matrix_algebra() {
    // e_ij with index 2 * i + j; e_ij e_kl = delta_jk e_il
    std::vector<std::vector<Vector>> table(4, std::vector<Vector>(4, zero_vector(4)));
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t l = 0; l < 2; ++l) table[2 * i + j][2 * j + l] = unit_vector(4, 2 * i + l);
        }
    }
    return std::make_shared<const Algebra>("M2", std::vector<std::string>{"e11", "e12", "e21", "e22"},
                                           std::move(table), Vector{1, 0, 0, 1});
}

Module swapped_two_point_bimodule(const AlgebraPtr& a2) {
    const Algebra& a = *a2;
    std::vector<Matrix> left{a.left_multiplication(a.basis(0)), a.left_multiplication(a.basis(1))};
    std::vector<Matrix> right{a.right_multiplication(a.basis(1)), a.right_multiplication(a.basis(0))};
    return Module::bimodule("A2_swap", a2, 2, std::move(left), std::move(right)).with_basis_names({"e1", "e2"});
}

Connection flat_connection(std::size_t truncation) {
    return differential_connection(universal_graded(two_point_algebra(), truncation));
}

CalculusPtr e1e2_quotient(std::size_t truncation) {
    const CalculusPtr u = universal_graded(two_point_algebra(), truncation);
    return quotient_calculus(*u, {{1, Vector{0, 1, 0, 0}}}, "A2/<e1(x)e2>");
}

Connection twist_connection(std::size_t truncation) {
    const CalculusPtr calc = e1e2_quotient(truncation);
    FormSpace forms(swapped_two_point_bimodule(calc->algebra_ptr()), calc);
    const ConnectionSpace space = connection_space(forms);
    if (!space.particular) throw PreconditionError("twist fixture: the swapped bimodule has no connection");
    TwistSearch search = search_sigma_failure(forms, *space.particular, {Rational(0), Rational(1), Rational(-1)});
    if (!search.found) throw PreconditionError("twist fixture: no connection with kappa1(K) != 0 on the grid");
    return std::move(*search.found);
}

Matrix gauge_term(const FormSpace& forms, const Vector& theta) {
    const GradedCalculus& calc = forms.calculus();
    const Algebra& a = calc.algebra();
    const std::size_t n = a.dim();
    Matrix out(forms.dim(1), 2 * n);
    const Vector g1 = kron(unit_vector(2, 0), a.unit());
    for (std::size_t j = 0; j < n; ++j) {
        out.set_column(j, forms.multiply(g1, 0, calc.multiply(theta, 1, a.basis(j), 0), 1));
    }
    return out;
}

Connection grass_connection(std::size_t truncation) {
    const CalculusPtr calc = universal_graded(matrix_algebra(), truncation);
    FormSpace forms(Module::free(calc->algebra_ptr(), 2), calc);
    const Matrix trivial = trivial_connection_matrix(forms, 2);
    for (std::size_t t = 0; t < calc->dim(1); ++t) {
        Connection c("grass", forms, trivial + gauge_term(forms, unit_vector(calc->dim(1), t)));
        const Matrix f = c.curvature_on_module();
        for (std::size_t g = 0; g < calc->algebra().dim(); ++g) {
            if (f * c.module().left(g) != c.left(2, g) * f) return c;
        }
    }
    throw PreconditionError("grass fixture: every gauge on the u-basis has left-linear curvature");
}

}  // namespace bimodconn::fixtures
