#include "bimodconn/algebra.hpp"
#include "bimodconn/fixtures.hpp"

#include "doctest.h"

#include <random>

using namespace bimodconn;

namespace {

// ker(mu) inside A (x) A with the inherited outer actions, built directly from
// the definitions rather than through the calculus code.
Module universal_one_forms(const AlgebraPtr& a) {
    const std::size_t n = a->dim();
    const Subspace k = kernel(a->multiplication_map());
    const Matrix basis = k.basis_matrix();
    std::vector<Matrix> left;
    std::vector<Matrix> right;
    auto restrict = [&](const Matrix& plain) {
        Matrix r(k.dim(), k.dim());
        for (std::size_t j = 0; j < k.dim(); ++j) {
            const Vector image = plain * k.basis()[j];
            REQUIRE(k.contains(image));
            r.set_column(j, k.coords(image));
        }
        return r;
    };
    for (std::size_t f = 0; f < n; ++f) {
        left.push_back(restrict(kron(a->left_multiplication(a->basis(f)), Matrix::identity(n))));
        right.push_back(restrict(kron(Matrix::identity(n), a->right_multiplication(a->basis(f)))));
    }
    return Module::bimodule("Omega1_u", a, k.dim(), std::move(left), std::move(right));
}

}  // namespace

TEST_CASE("check_algebra") {
    CHECK(check_algebra(*fixtures::two_point_algebra()).passed());

    // Matrix units multiply as e_ij e_kl = delta_jk e_il; enumerate all pairs.
    const auto m2 = fixtures::matrix_algebra();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    Vector expected = zero_vector(4);
                    if (j == k) expected[2 * i + l] = 1;
                    CHECK(m2->product(2 * i + j, 2 * k + l) == expected);
                }
            }
        }
    }
    CHECK(check_algebra(*m2).passed());

    const Algebra bad("bad", {"e1"}, {{Vector{2}}}, Vector{1});
    const Verdict v = check_algebra(bad);
    CHECK(v.status == Status::fail);
    CHECK(v.message.find("unit") != std::string::npos);
    CHECK(v.witness["basis"] == "e1");

    // basis 1, x, y with x y = x and all other products of x, y zero:
    // (x y) y = x but x (y y) = 0.
    std::vector<std::vector<Vector>> table(3, std::vector<Vector>(3, zero_vector(3)));
    for (std::size_t i = 0; i < 3; ++i) {
        table[0][i] = unit_vector(3, i);
        table[i][0] = unit_vector(3, i);
    }
    table[1][2] = unit_vector(3, 1);
    const Verdict na = check_algebra(Algebra("nonassoc", {"1", "x", "y"}, table, unit_vector(3, 0)));
    CHECK(na.status == Status::fail);
    CHECK(na.witness["triple"] == nlohmann::json{"x", "y", "y"});
}

TEST_CASE("check_module") {
    const auto a2 = fixtures::two_point_algebra();
    CHECK(check_module(Module::regular(a2)).passed());
    CHECK(check_module(universal_one_forms(a2)).passed());
    CHECK(check_module(fixtures::swapped_two_point_bimodule(a2)).passed());
    CHECK(check_module(Module::free(fixtures::matrix_algebra(), 2)).passed());

    const Module reg = Module::regular(a2);
    const Module zero_left =
        Module::bimodule("bad", a2, 2, {Matrix(2, 2), Matrix(2, 2)}, reg.right_matrices());
    const Verdict v = check_module(zero_left);
    CHECK(v.status == Status::fail);
    CHECK(v.message.find("left action of 1") != std::string::npos);
}

TEST_CASE("tensor_over") {
    const auto a2 = fixtures::two_point_algebra();
    const Module reg = Module::regular(a2);
    CHECK(tensor_over(reg, reg).dim() == 2);

    const Module omega = universal_one_forms(a2);
    REQUIRE(omega.dim() == 2);
    const BalancedTensor t = tensor_over(omega, omega);
    CHECK(t.dim() == 2);
    CHECK(t.space.sub.dim() == 2);
    // ker(mu) basis is (e1 (x) e2, e2 (x) e1). The surviving classes are the
    // composable ones, (e1 e2) (x) (e2 e1) and (e2 e1) (x) (e1 e2).
    const Vector c12 = unit_vector(2, 0);
    const Vector c21 = unit_vector(2, 1);
    CHECK_FALSE(is_zero(t.project(c12, c21)));
    CHECK_FALSE(is_zero(t.project(c21, c12)));
    CHECK(is_zero(t.project(c12, c12)));
    CHECK(is_zero(t.project(c21, c21)));
    CHECK(Subspace::span(2, {t.project(c12, c21), t.project(c21, c12)}).dim() == 2);
    CHECK(check_module(t.module).passed());

    const Module zero = Module::bimodule("0", a2, 0, {Matrix(0, 0), Matrix(0, 0)}, {Matrix(0, 0), Matrix(0, 0)});
    CHECK(tensor_over(reg, zero).dim() == 0);

    CHECK_THROWS_AS(tensor_over(reg, Module::regular(fixtures::matrix_algebra())), PreconditionError);
    CHECK_THROWS_AS(tensor_over(reg, reg.as_right_module()), PreconditionError);
}

TEST_CASE("tensor_over balancing holds on all basis triples") {
    const auto m2 = fixtures::matrix_algebra();
    const Module x = Module::free(m2, 2);
    const Module y = universal_one_forms(m2);
    const BalancedTensor t = tensor_over(x, y);
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (std::size_t f = 0; f < m2->dim(); ++f) {
            for (std::size_t j = 0; j < y.dim(); ++j) {
                const Vector xi = unit_vector(x.dim(), i);
                const Vector yj = unit_vector(y.dim(), j);
                CHECK(t.project(x.right(f) * xi, yj) == t.project(xi, y.left(f) * yj));
            }
        }
    }
    // A^2 (x)_A Omega1_u is two copies of Omega1_u.
    CHECK(t.dim() == 2 * y.dim());
}

TEST_CASE("right_hom_space") {
    const auto a2 = fixtures::two_point_algebra();
    const Module reg = Module::regular(a2);
    const HomSpace end = right_hom_space(reg, reg);
    CHECK(end.dim() == 2);
    CHECK(end.contains(Matrix::identity(2)));
    CHECK(end.contains(a2->left_multiplication(a2->basis(0))));
    CHECK(end.contains(a2->left_multiplication(a2->basis(1))));

    // A right-linear map out of A is fixed by the image of 1, so
    // dim Hom^A(A, X) = dim X.
    CHECK(right_hom_space(reg, universal_one_forms(a2)).dim() == 2);
    const auto m2 = fixtures::matrix_algebra();
    CHECK(right_hom_space(Module::regular(m2), universal_one_forms(m2)).dim() == 12);
}

TEST_CASE("right_hom_space membership agrees with the defining equations") {
    const auto m2 = fixtures::matrix_algebra();
    const Module x = Module::regular(m2);
    const Module y = Module::free(m2, 2);
    const HomSpace hom = right_hom_space(x, y);
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> entry(-2, 2);
    for (int trial = 0; trial < 40; ++trial) {
        Matrix phi(y.dim(), x.dim());
        if (trial % 2 == 0) {
            // random element of the space
            for (std::size_t i = 0; i < hom.dim(); ++i) phi += Rational(entry(rng)) * hom.element(i);
        } else {
            for (std::size_t i = 0; i < phi.rows(); ++i) {
                for (std::size_t j = 0; j < phi.cols(); ++j) phi(i, j) = entry(rng);
            }
        }
        bool satisfies = true;
        for (std::size_t f = 0; f < m2->dim(); ++f) satisfies = satisfies && (phi * x.right(f) == y.right(f) * phi);
        CHECK(hom.contains(phi) == satisfies);
    }
}

TEST_CASE("kappa0") {
    const auto a2 = fixtures::two_point_algebra();
    const Kappa0 k = kappa0(Module::regular(a2));
    Matrix proj1(2, 2);
    proj1(0, 0) = 1;
    CHECK(k.operators[0] == proj1);
    CHECK(k.operators[0] + k.operators[1] == Matrix::identity(2));
    CHECK(k.right_linear.passed());
    CHECK(k.multiplicative.passed());

    const Kappa0 km = kappa0(Module::regular(fixtures::matrix_algebra()));
    CHECK(km.image_dim == 4);
    CHECK(km.injective);
    CHECK(km.right_linear.passed());

    CHECK_THROWS_AS(kappa0(Module::regular(a2).as_right_module()), PreconditionError);
}
