#include "bimodconn/calculus.hpp"
#include "bimodconn/fixtures.hpp"

#include "doctest.h"

#include <random>

using namespace bimodconn;

namespace {

Vector tensor2(std::size_t n, std::size_t i, std::size_t j) { return kron(unit_vector(n, i), unit_vector(n, j)); }

// ker(mu) with its inherited actions, straight from the definition.
Module kernel_of_mu(const AlgebraPtr& a) {
    const std::size_t n = a->dim();
    const Subspace k = kernel(a->multiplication_map());
    auto restrict = [&](const Matrix& plain) {
        Matrix r(k.dim(), k.dim());
        for (std::size_t j = 0; j < k.dim(); ++j) r.set_column(j, k.coords(plain * k.basis()[j]));
        return r;
    };
    std::vector<Matrix> left;
    std::vector<Matrix> right;
    for (std::size_t f = 0; f < n; ++f) {
        left.push_back(restrict(kron(a->left_multiplication(a->basis(f)), Matrix::identity(n))));
        right.push_back(restrict(kron(Matrix::identity(n), a->right_multiplication(a->basis(f)))));
    }
    return Module::bimodule("ker_mu", a, k.dim(), std::move(left), std::move(right));
}

}  // namespace

TEST_CASE("universal first order calculus") {
    const auto a2 = fixtures::two_point_algebra();
    const FirstOrderCalculus c = universal_first_order(a2);
    CHECK(c.omega1.dim() == 2);
    CHECK(c.kernel.dim() == 0);
    CHECK(check_module(c.bimodule).passed());

    const CalculusPtr u = universal_graded(a2, 1);
    // d_u e1 = 1 (x) e1 - e1 (x) 1 = e2 (x) e1 - e1 (x) e2
    CHECK(u->lift(u->d(a2->basis(0)), 1) == tensor2(2, 1, 0) - tensor2(2, 0, 1));
    CHECK(is_zero(u->d(a2->unit())));

    const auto m2 = fixtures::matrix_algebra();
    CHECK(universal_first_order(m2).omega1.dim() == 12);
    CHECK(universal_first_order(m2).omega1.dim() == kernel(m2->multiplication_map()).dim());
}

TEST_CASE("universal graded calculus dimensions against pairwise tensor products") {
    for (const auto& a : {fixtures::two_point_algebra(), fixtures::matrix_algebra()}) {
        const std::size_t n = a->dim();
        const CalculusPtr u = universal_graded(a, 3);
        const Module omega1 = kernel_of_mu(a);
        const BalancedTensor t2 = tensor_over(omega1, omega1);
        const BalancedTensor t3 = tensor_over(t2.module, omega1);
        CHECK(u->dim(0) == n);
        CHECK(u->dim(1) == omega1.dim());
        CHECK(u->dim(2) == t2.dim());
        CHECK(u->dim(3) == t3.dim());
        CHECK(check_graded_calculus(*u).passed());
        CHECK(check_universal_property(*u).passed());
    }
    CHECK(universal_graded(fixtures::two_point_algebra(), 3)->dims() == std::vector<std::size_t>{2, 2, 2, 2});
}

TEST_CASE("d in word coordinates matches the ambient differential") {
    for (const auto& a : {fixtures::two_point_algebra(), fixtures::matrix_algebra()}) {
        const auto u = universal_graded(a, 3);
        const UniversalForms& forms = u->forms();
        const auto reg = Module::regular(a).right_matrices();
        for (std::size_t r = 0; r < 3; ++r) {
            const Matrix d = forms.d_ucoords(r);
            for (std::size_t j = 0; j < u->udim(r); ++j) {
                const Vector x = forms.from_ucoords(unit_vector(u->udim(r), j), reg, r);
                CHECK(forms.from_ucoords(d * unit_vector(u->udim(r), j), reg, r + 1) == forms.d_ambient(x, r));
                // the ambient d squares to zero on the whole tensor algebra
                if (r < 2) CHECK(is_zero(forms.d_ambient(forms.d_ambient(x, r), r + 1)));
            }
        }
    }
    const auto a2 = fixtures::two_point_algebra();
    const auto u = universal_graded(a2, 3);
    CHECK(is_zero(u->differential(1) * u->d(a2->basis(0))));
}

TEST_CASE("word projection is idempotent onto universal forms") {
    const auto m2 = fixtures::matrix_algebra();
    const auto u = universal_graded(m2, 2);
    const UniversalForms& forms = u->forms();
    const auto reg = Module::regular(m2).right_matrices();
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> entry(-3, 3);
    const Matrix mu = m2->multiplication_map();
    for (int trial = 0; trial < 20; ++trial) {
        Vector x(16);
        for (auto& v : x) v = entry(rng);
        const Vector q = forms.from_ucoords(forms.to_ucoords(x, 4, 1), reg, 1);
        CHECK(is_zero(mu * q));
        CHECK(forms.from_ucoords(forms.to_ucoords(q, 4, 1), reg, 1) == q);
        if (is_zero(mu * x)) CHECK(q == x);
    }
    const Subspace ker_mu = kernel(mu);
    for (const auto& k : ker_mu.basis()) CHECK(forms.from_ucoords(forms.to_ucoords(k, 4, 1), reg, 1) == k);
}

TEST_CASE("products are associative and unital") {
    const auto m2 = fixtures::matrix_algebra();
    const auto u = universal_graded(m2, 3);
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> entry(-2, 2);
    auto random = [&](std::size_t r) {
        Vector v(u->dim(r));
        for (auto& x : v) x = entry(rng);
        return v;
    };
    for (int trial = 0; trial < 5; ++trial) {
        const Vector x = random(1);
        const Vector y = random(1);
        const Vector z = random(1);
        CHECK(u->multiply(u->multiply(x, 1, y, 1), 2, z, 1) == u->multiply(x, 1, u->multiply(y, 1, z, 1), 2));
        CHECK(u->multiply(m2->unit(), 0, x, 1) == x);
        CHECK(u->multiply(x, 1, m2->unit(), 0) == x);
    }
    CHECK(check_module(u->bimodule(2)).passed());
}

TEST_CASE("quotient calculus") {
    const auto a2 = fixtures::two_point_algebra();
    const auto u = universal_graded(a2, 3);

    const auto same = quotient_calculus(*u, {});
    CHECK(same->dims() == u->dims());

    const auto q = quotient_calculus(*u, {{1, tensor2(2, 0, 1)}}, "e1e2");
    CHECK(q->dim(1) == 1);
    CHECK(q->ideal(1) == Subspace::span(2, {u->forms().to_ucoords(tensor2(2, 0, 1), 2, 1)}));
    // d(e1 (x) e2) = de1 de2 lies in the ideal
    CHECK(q->ideal(2).contains(u->forms().d_ucoords(1) * u->forms().to_ucoords(tensor2(2, 0, 1), 2, 1)));
    CHECK(check_graded_calculus(*q).passed());
    CHECK(check_universal_property(*q).passed());
    CHECK(check_module(q->bimodule(1)).passed());

    const auto twice = quotient_calculus(*q, {{1, tensor2(2, 0, 1)}});
    CHECK(twice->dims() == q->dims());

    const auto zero = quotient_calculus(*u, {{1, tensor2(2, 0, 1)}, {1, tensor2(2, 1, 0)}}, "zero");
    CHECK(zero->dims() == std::vector<std::size_t>{2, 0, 0, 0});

    CHECK_THROWS_AS(quotient_calculus(*u, {{1, tensor2(2, 0, 0)}}), PreconditionError);
    CHECK_THROWS_AS(quotient_calculus(*u, {{1, Vector(3)}}), DimensionError);
}

TEST_CASE("quotient calculus on the matrix algebra") {
    const auto m2 = fixtures::matrix_algebra();
    const auto u = universal_graded(m2, 2);
    // e12 de12 = e12 (x) e12 since e12 e12 = 0. Bimodules over M2 are modules
    // over M2 (x) M2^op = M4, whose simple module has dimension 4, so one
    // element generates a 4-dimensional sub-bimodule of Omega1_u.
    const auto q = quotient_calculus(*u, {{1, tensor2(4, 1, 1)}});
    CHECK(q->ideal(1).dim() == 4);
    CHECK(q->dim(1) == 8);
    CHECK(check_graded_calculus(*q).passed());
}

TEST_CASE("preceq") {
    const auto a2 = fixtures::two_point_algebra();
    const auto u = universal_graded(a2, 3);
    const auto q12 = quotient_calculus(*u, {{1, tensor2(2, 0, 1)}}, "e1e2");
    const auto q21 = quotient_calculus(*u, {{1, tensor2(2, 1, 0)}}, "e2e1");
    const auto zero = quotient_calculus(*u, {{1, tensor2(2, 0, 1)}, {1, tensor2(2, 1, 0)}}, "zero");

    const Comparison refl = preceq(*u, *u);
    REQUIRE(refl.rho);
    for (std::size_t r = 0; r <= 3; ++r) CHECK(refl.rho->maps[r] == Matrix::identity(u->dim(r)));

    for (const auto& c : {u, q12, q21}) {
        const Comparison z = preceq(*zero, *c);
        REQUIRE(z.rho);
        CHECK(check_morphism(*c, *zero, *z.rho).passed());
    }

    const Comparison down = preceq(*q12, *u);
    REQUIRE(down.rho);
    CHECK(check_morphism(*u, *q12, *down.rho).passed());
    CHECK(down.rho->maps[1] * u->d(a2->basis(0)) == q12->d(a2->basis(0)));

    const Comparison up = preceq(*u, *q12);
    CHECK_FALSE(up.rho);
    CHECK(up.verdict.status == Status::fail);
    CHECK(up.verdict.witness["degree"] == 1);
    CHECK(up.verdict.witness["text"] == "e1(x)e2");

    CHECK_FALSE(preceq(*q12, *q21).rho);
    CHECK(preceq(*q12, *q21, OrderMode::first_order).verdict.status == Status::fail);
    CHECK(preceq(*u, *q12, OrderMode::first_order).verdict.witness["text"] == "e1(x)e2");

    // reflexive, transitive, antisymmetric up to dimensions
    const std::vector<CalculusPtr> all{u, q12, q21, zero};
    for (const auto& x : all) {
        CHECK(preceq(*x, *x).rho.has_value());
        for (const auto& y : all) {
            const bool xy = preceq(*x, *y).rho.has_value();
            const bool yx = preceq(*y, *x).rho.has_value();
            if (xy && yx) CHECK(x->dims() == y->dims());
            for (const auto& z : all) {
                if (xy && preceq(*y, *z).rho.has_value()) CHECK(preceq(*x, *z).rho.has_value());
            }
        }
    }

    CHECK_THROWS_AS(preceq(*u, *universal_graded(a2, 2)), PreconditionError);
}

TEST_CASE("forms with values in a module") {
    const auto m2 = fixtures::matrix_algebra();
    const auto u = universal_graded(m2, 2);
    const Module free2 = Module::free(m2, 2);
    const FormSpace fs(free2, u);
    for (std::size_t r = 0; r <= 2; ++r) CHECK(fs.dim(r) == 8 * power(3, r));
    CHECK(check_module(fs.as_module(1)).passed());
    // M (x)_A Omega1 agrees with the generic balanced tensor product
    CHECK(tensor_over(free2, u->bimodule(1)).dim() == fs.dim(1));

    const auto a2 = fixtures::two_point_algebra();
    const auto ua2 = universal_graded(a2, 3);
    const auto q = quotient_calculus(*ua2, {{1, tensor2(2, 0, 1)}});
    const Module swap = fixtures::swapped_two_point_bimodule(a2);
    for (const auto& c : {ua2, q}) {
        const FormSpace s(swap, c);
        CHECK(tensor_over(swap, c->bimodule(1)).dim() == s.dim(1));
        CHECK(tensor_over(swap, c->bimodule(2)).dim() == s.dim(2));
        CHECK(check_module(s.as_module(1)).passed());
        CHECK(check_module(s.as_module(2)).passed());

        // for M = A the extension of d is d itself
        const FormSpace reg(Module::regular(a2), c);
        for (std::size_t r = 0; r < 3; ++r) {
            CHECK(reg.dim(r) == c->dim(r));
            CHECK(reg.extend(c->differential(0), 1, r) == c->differential(r));
        }
    }
}

TEST_CASE("format_tensor") {
    const auto a2 = fixtures::two_point_algebra();
    CHECK(format_tensor(*a2, tensor2(2, 1, 0) - tensor2(2, 0, 1), 2) == "-e1(x)e2 + e2(x)e1");
    CHECK(format_tensor(*a2, frac(3, 2) * tensor2(2, 0, 0), 2) == "3/2 e1(x)e1");
    CHECK(format_tensor(*a2, Vector(4), 2) == "0");
}
