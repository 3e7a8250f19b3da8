#include "bimodconn/linalg.hpp"

#include "doctest.h"

#include <random>

using namespace bimodconn;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<int>> entries) {
    std::vector<Vector> r;
    std::size_t cols = 0;
    for (const auto& row : entries) {
        Vector v;
        for (int x : row) v.emplace_back(x);
        cols = v.size();
        r.push_back(std::move(v));
    }
    return Matrix::from_rows(cols, r);
}

// Small-entry random matrices with deliberate rank deficiency.
Matrix random_matrix(std::mt19937& rng, std::size_t m, std::size_t n) {
    std::uniform_int_distribution<int> entry(-3, 3);
    std::uniform_int_distribution<int> coin(0, 3);
    Matrix a(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = frac(entry(rng), coin(rng) == 0 ? 2 : 1);
    }
    if (m > 1 && coin(rng) < 2) {
        for (std::size_t j = 0; j < n; ++j) a(m - 1, j) = a(0, j) * 2 - a(m - 2, j);
    }
    return a;
}

}  // namespace

TEST_CASE("rationals print and parse canonically") {
    CHECK(to_string(frac(6, 4)) == "3/2");
    CHECK(to_string(frac(-4, 2)) == "-2");
    CHECK(parse_rational("-6/4") == frac(-3, 2));
    CHECK(to_string(parse_rational("0/5")) == "0");
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1/-2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
}

TEST_CASE("row_reduce") {
    CHECK(row_reduce(Matrix::identity(3)).rank == 3);
    CHECK(row_reduce(Matrix(2, 4)).rank == 0);

    const RowEchelon e = row_reduce(rows({{1, 2}, {2, 4}}));
    CHECK(e.rank == 1);
    REQUIRE(e.pivots.size() == 1);
    CHECK(e.pivots[0] == 0);
    CHECK(e.reduced == rows({{1, 2}, {0, 0}}));
}

TEST_CASE("kernel") {
    CHECK(kernel(Matrix::identity(3)).dim() == 0);
    CHECK(kernel(Matrix(2, 2)).dim() == 2);

    // Multiplication of the two-point function algebra, columns ordered
    // e1e1, e1e2, e2e1, e2e2 (products e1, 0, 0, e2).
    const Matrix mu = rows({{1, 0, 0, 0}, {0, 0, 0, 1}});
    const Subspace k = kernel(mu);
    REQUIRE(k.dim() == 2);
    CHECK(k.basis()[0] == unit_vector(4, 1));
    CHECK(k.basis()[1] == unit_vector(4, 2));
}

TEST_CASE("quotient") {
    const Subspace line = Subspace::span(3, {unit_vector(3, 0)});
    const QuotientSpace q = quotient(3, line);
    CHECK(q.dim() == 2);
    CHECK(q.projection * q.section == Matrix::identity(2));
    CHECK(is_zero(q.project(unit_vector(3, 0))));

    const QuotientSpace trivial = quotient(3, Subspace(3));
    CHECK(inverse(trivial.projection).has_value());

    CHECK(quotient(3, Subspace::whole(3)).dim() == 0);
    CHECK_THROWS_AS(quotient(2, line), DimensionError);
}

TEST_CASE("factor_through") {
    const Matrix id = Matrix::identity(2);
    auto r = factor_through(id, id);
    REQUIRE(r.map);
    CHECK(*r.map == id);

    const Matrix sum_map = rows({{1, 1}});
    r = factor_through(sum_map, Matrix(1, 2));
    REQUIRE(r.map);
    CHECK(r.map->is_zero());

    r = factor_through(sum_map, rows({{1, -1}}));
    CHECK_FALSE(r.map);
    REQUIRE(r.witness);
    // ker(sum) is spanned by (1, -1) up to scale; difference maps it to 2.
    const Vector& w = *r.witness;
    CHECK(w[0] == -w[1]);
    CHECK(w[0] != 0);
    CHECK(is_zero(sum_map * w));

    CHECK_THROWS_AS(factor_through(Matrix(1, 2), Matrix(1, 2)), PreconditionError);
}

TEST_CASE("rank-nullity, quotient and factorization properties on random matrices") {
    std::mt19937 rng(20240607);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t m = 1 + rng() % 5;
        const std::size_t n = 1 + rng() % 6;
        const Matrix f = random_matrix(rng, m, n);
        const Subspace k = kernel(f);
        CHECK(k.dim() + rank(f) == n);
        for (const auto& v : k.basis()) CHECK(is_zero(f * v));

        const QuotientSpace q = quotient(n, k);
        CHECK(q.projection * q.section == Matrix::identity(q.dim()));
        for (const auto& v : k.basis()) CHECK(is_zero(q.project(v)));

        // Make f surjective by restricting to its row space, then factor g.
        const Subspace rowspace = image(f.transpose());
        Matrix surj = Matrix::from_rows(n, rowspace.basis());
        const Matrix g = random_matrix(rng, 2, n);
        const Factorization fac = factor_through(surj, g);
        if (fac.map) {
            CHECK(*fac.map * surj == g);
        } else {
            REQUIRE(fac.witness);
            CHECK(is_zero(surj * *fac.witness));
            CHECK_FALSE(is_zero(g * *fac.witness));
        }
        // g' = h * surj always factors.
        const Matrix h = random_matrix(rng, 2, surj.rows());
        const Factorization fac2 = factor_through(surj, h * surj);
        REQUIRE(fac2.map);
        CHECK(*fac2.map == h);
    }
}

TEST_CASE("subspace operations") {
    const Subspace a = Subspace::span(3, {unit_vector(3, 0), unit_vector(3, 1)});
    const Subspace b = Subspace::span(3, {unit_vector(3, 1), unit_vector(3, 2)});
    CHECK(intersect(a, b) == Subspace::span(3, {unit_vector(3, 1)}));
    CHECK(sum(a, b).dim() == 3);
    CHECK(a.contains(Vector{Rational(2), frac(-1, 3), Rational(0)}));
    CHECK_FALSE(a.contains(b));
    REQUIRE(a.first_outside(b));
    CHECK(*a.first_outside(b) == unit_vector(3, 2));

    SpanBuilder builder(3);
    CHECK(builder.add(Vector{1, 1, 0}));
    CHECK_FALSE(builder.add(Vector{2, 2, 0}));
    CHECK(builder.add(Vector{0, 1, 1}));
    CHECK(builder.contains(Vector{1, 2, 1}));
    CHECK(builder.subspace() == Subspace::span(3, {Vector{1, 0, -1}, Vector{0, 1, 1}}));
}

TEST_CASE("empty dimensions") {
    CHECK(inverse(Matrix(0, 0)).has_value());
    // onto the zero space: only the zero map factors
    const Factorization zero = factor_through(Matrix(0, 2), Matrix(1, 2));
    CHECK(zero.map.has_value());
    Matrix g(1, 2);
    g(0, 0) = 1;
    const Factorization none = factor_through(Matrix(0, 2), g);
    CHECK_FALSE(none.map.has_value());
    REQUIRE(none.witness.has_value());
    CHECK(!is_zero(g * *none.witness));
}
