#include "bimodconn/connection.hpp"
#include "bimodconn/fixtures.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace bimodconn;

namespace {

Vector tensor2(std::size_t n, std::size_t i, std::size_t j) { return kron(unit_vector(n, i), unit_vector(n, j)); }

// d_u f = 1 (x) f - f (x) 1 as a plain tensor.
Vector du(const Algebra& a, const Vector& f) { return kron(a.unit(), f) - kron(f, a.unit()); }

Connection random_translate(const Connection& base, std::mt19937& rng) {
    const HomSpace hom = right_hom_space(base.module(), base.forms().as_module(1));
    std::uniform_int_distribution<int> coeff(-2, 2);
    Matrix nabla = base.nabla();
    for (std::size_t i = 0; i < hom.dim(); ++i) nabla += Rational(coeff(rng)) * hom.element(i);
    return {"random", base.forms(), nabla};
}

bool contains_pair(const nlohmann::json& pairs, const std::string& a, const std::string& f) {
    for (const auto& p : pairs) {
        if (p[0] == a && p[1] == f) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("right Leibniz rule") {
    const Connection c = fixtures::flat_connection();
    CHECK(check_right_leibniz(c).passed());
    CHECK(check_extension(c).passed());

    const Connection zero("zero", c.forms(), Matrix(c.forms().dim(1), 2));
    const Verdict v = check_right_leibniz(zero);
    REQUIRE(v.status == Status::fail);
    CHECK(contains_pair(v.witness["failing_pairs"], "e1", "e2"));
    CHECK(v.witness["pair"].size() == 2);

    CHECK_THROWS_AS(Connection("bad", c.forms(), Matrix(1, 2)), DimensionError);
}

TEST_CASE("connection space") {
    const Connection c = fixtures::flat_connection();
    const ConnectionSpace space = connection_space(c.forms());
    REQUIRE(space.particular);
    CHECK(check_right_leibniz(Connection("p", c.forms(), *space.particular)).passed());
    CHECK(space.translations.dim() == 2);
    CHECK(space.translations.contains(*space.particular - c.nabla()));

    // free module: the trivial connection is one
    const CalculusPtr m2 = universal_graded(fixtures::matrix_algebra(), 1);
    FormSpace forms(Module::free(m2->algebra_ptr(), 2), m2);
    CHECK(check_right_leibniz(Connection("t", forms, trivial_connection_matrix(forms, 2))).passed());
}

TEST_CASE("nabla-hat of f-hat for nabla = d") {
    const Connection c = fixtures::flat_connection();
    const Algebra& a = c.module().algebra();
    const Matrix d1 = nabla_hat(c, hat(c, a.basis(0)), 0);
    // ambient words of M = A coincide with plain tensors of universal forms
    CHECK(d1.column(1) == c.forms().project(-1 * tensor2(2, 0, 1), 1));
    for (std::size_t j = 0; j < 2; ++j) {
        const Vector expected = kron(Matrix::identity(2), a.right_multiplication(a.basis(j))) * du(a, a.basis(0));
        CHECK(d1.column(j) == c.forms().project(expected, 1));
    }
    CHECK(is_right_linear(c.forms(), d1, 1));
}

TEST_CASE("induced first order calculus and kappa1") {
    const Connection c = fixtures::flat_connection();
    const InducedFirstOrder ifo = induced_first_order(c);
    CHECK(ifo.omega1.dim() == 2);
    CHECK(ifo.right_linear.passed());
    CHECK(ifo.derivation.passed());
    CHECK(ifo.left_leibniz.passed());
    CHECK(check_module(ifo.bimodule).passed());

    const Kappa1 k = kappa1(c);
    CHECK(k.rank == 2);
    CHECK(k.bimodule_linear.passed());
    CHECK(k.diagram.passed());
    const Vector u = generator_ucoords(c.calculus().forms(), {1, tensor2(2, 0, 1)});
    const Matrix op = Matrix::unflatten(c.forms().dim(1), 2, k.map * u);
    CHECK(is_zero(op.column(0)));
    CHECK(op.column(1) == c.forms().project(tensor2(2, 0, 1), 1));

    const Connection twist = fixtures::twist_connection();
    CHECK(check_right_leibniz(twist).passed());
    CHECK(induced_first_order(twist).derivation.passed());

    const CalculusPtr u1 = universal_graded(fixtures::two_point_algebra(), 1);
    FormSpace right_only(Module::regular(u1->algebra_ptr()).as_right_module(), u1);
    const Connection rc("r", right_only, u1->differential(0));
    CHECK_THROWS_AS(kappa1(rc), PreconditionError);
    CHECK_THROWS_AS(induced_first_order(rc), PreconditionError);
}

TEST_CASE("generalized permutation in degree 1") {
    const Connection flat = fixtures::flat_connection();
    const Sigma s = sigma_exists(flat, kappa1(flat));
    CHECK(s.exists.passed());
    REQUIRE(s.map);
    CHECK(s.domain.dim() == 2);
    CHECK(s.left_leibniz.passed());
    CHECK(s.agrees_with_universal.passed());

    const Connection quot = differential_connection(fixtures::e1e2_quotient());
    const Sigma sq = sigma_exists(quot, kappa1(quot));
    CHECK(sq.exists.passed());
    CHECK(sq.left_leibniz.passed());

    const Connection twist = fixtures::twist_connection();
    const Kappa1 kt = kappa1(twist);
    const Sigma st = sigma_exists(twist, kt);
    REQUIRE(st.exists.status == Status::absent);
    CHECK(st.exists.witness["text"] == "e1(x)e2");
    const Vector w = generator_ucoords(twist.calculus().forms(), {1, tensor2(2, 0, 1)});
    CHECK(twist.calculus().ideal(1).contains(w));
    CHECK(!is_zero(kt.map * w));
    CHECK(st.left_leibniz.status == Status::unavailable);
}

TEST_CASE("no sigma failure on the regular module") {
    const CalculusPtr q = fixtures::e1e2_quotient();
    FormSpace forms(Module::regular(q->algebra_ptr()), q);
    const ConnectionSpace space = connection_space(forms);
    REQUIRE(space.particular);
    const TwistSearch s = search_sigma_failure(forms, *space.particular, {Rational(0), Rational(1), Rational(-1)});
    CHECK(!s.found);
    CHECK(s.tried == static_cast<std::size_t>(std::pow(3, space.translations.dim())));

    FormSpace swapped(fixtures::swapped_two_point_bimodule(q->algebra_ptr()), q);
    const TwistSearch t = search_sigma_failure(swapped, *connection_space(swapped).particular, {Rational(0), Rational(1)});
    REQUIRE(t.found);
    CHECK(t.coefficients.size() == connection_space(swapped).translations.dim());
}

TEST_CASE("flat connection: curvature, omega-hat, J and the induced calculus") {
    const Connection c = fixtures::flat_connection();
    const CurvatureReport cr = curvature(c);
    CHECK(cr.flat);
    CHECK(cr.right_linear.passed());
    CHECK(cr.left_linear.passed());

    const OmegaHat oh = omega_hat_generate(c, 1);
    CHECK(oh.dim(0) == 2);
    CHECK(oh.dim(1) == 2);
    CHECK(oh.derivation.passed());
    CHECK(oh.second_power.passed());
    for (std::size_t f = 0; f < 2; ++f) {
        CHECK(nabla_hat(c, nabla_hat(c, hat(c, unit_vector(2, f)), 0), 1).is_zero());
    }

    const JQuotient jq = j_ideal(c, oh);
    CHECK(jq.dims() == std::vector<std::size_t>{0, 0, 0, 0});
    const OmegaM om = quotient_omega_m(c, oh, jq);
    CHECK(om.dims() == c.calculus().dims());
    for (std::size_t r = 0; r < 3; ++r) CHECK(om.nabla[r] == c.extension(r));
    CHECK(om.coherence.passed());

    const InducedCalculus ic = induced_full_calculus(c, om);
    CHECK(ic.dims() == std::vector<std::size_t>{2, 2, 2, 2});
    CHECK(ic.d_squared.passed());
    CHECK(ic.upstairs_nonzero == 0);
    CHECK(ic.diagram.passed());
    CHECK(ic.derivation.passed());
    CHECK(ic.calculus->d(unit_vector(2, 0)) != zero_vector(2));
    CHECK((ic.calculus->differential(1) * ic.calculus->d(unit_vector(2, 0))) == zero_vector(2));

    const SigmaFull sf = sigma_full(c, om, ic);
    CHECK(sf.exists.passed());
    CHECK(sf.degree0.passed());
    CHECK(sf.multiplicative.passed());
    CHECK(sf.compatibility.passed());
}

TEST_CASE("twist: sigma absent in every degree") {
    const Connection c = fixtures::twist_connection();
    const OmegaHat oh = omega_hat_generate(c, 1);
    const JQuotient jq = j_ideal(c, oh);
    const OmegaM om = quotient_omega_m(c, oh, jq);
    const InducedCalculus ic = induced_full_calculus(c, om);
    const SigmaFull sf = sigma_full(c, om, ic);
    REQUIRE(sf.exists.status == Status::absent);
    CHECK(sf.exists.witness["degree"] == 1);
    CHECK(sf.exists.witness["text"] == "e1(x)e2");
    CHECK(sf.compatibility.status == Status::unavailable);
}

TEST_CASE("curved connection on a free module over M2") {
    const Connection c = fixtures::grass_connection();
    CHECK(check_right_leibniz(c).passed());
    CHECK(check_extension(c).passed());

    const CurvatureReport cr = curvature(c);
    CHECK(!cr.flat);
    CHECK(cr.right_linear.passed());
    REQUIRE(cr.left_linear.status == Status::fail);
    CHECK(cr.left_linear.witness.contains("f"));

    const OmegaHat oh = omega_hat_generate(c, 1);
    CHECK(oh.second_power.passed());
    const JQuotient jq = j_ideal(c, oh);
    CHECK(jq.j[2].dim() > 0);
    CHECK(jq.low_degrees.passed());
    CHECK(jq.nabla_closed.passed());
    CHECK(jq.omega_hat_closed.passed());
    CHECK(jq.curvature_commutator_dim > 0);
    CHECK(jq.commutators_in_j.passed());

    const OmegaM om = quotient_omega_m(c, oh, jq);
    CHECK(om.factored.passed());
    CHECK(om.left_linear.passed());
    CHECK(om.right_linear.passed());
    CHECK(om.right_leibniz.passed());

    const InducedCalculus ic = induced_full_calculus(c, om);
    CHECK(ic.ideal_closed.passed());
    CHECK(ic.d_squared.passed());
    CHECK(ic.upstairs_nonzero > 0);
    // degree 0 spanning operators: f-hat with nabla-hat^2 f-hat != 0 upstairs
    const Matrix f11 = hat(c, unit_vector(4, 0));
    const Matrix sq = nabla_hat(c, nabla_hat(c, f11, 0), 1);
    CHECK(!sq.is_zero());
    CHECK((om.spaces[2].projection * sq).is_zero());
}

TEST_CASE("random connections satisfy the structural identities") {
    std::mt19937 rng(20261018);
    const Connection flat = fixtures::flat_connection();
    const CalculusPtr m2 = universal_graded(fixtures::matrix_algebra(), 2);
    const Connection m2flat = differential_connection(m2);
    for (int trial = 0; trial < 6; ++trial) {
        const Connection c = random_translate(trial % 2 == 0 ? flat : m2flat, rng);
        CAPTURE(trial);
        CHECK(check_right_leibniz(c).passed());
        CHECK(check_extension(c).passed());
        CHECK(curvature(c).right_linear.passed());
        const Kappa1 k = kappa1(c);
        CHECK(k.bimodule_linear.passed());
        CHECK(k.diagram.passed());
        const OmegaHat oh = omega_hat_generate(c, c.truncation() - 2);
        CHECK(oh.derivation.passed());
        CHECK(oh.second_power.passed());
        const JQuotient jq = j_ideal(c, oh);
        CHECK(jq.nabla_closed.passed());
        CHECK(jq.omega_hat_closed.passed());
        CHECK(jq.commutators_in_j.passed());
        const OmegaM om = quotient_omega_m(c, oh, jq);
        CHECK(om.left_linear.passed());
        CHECK(om.right_linear.passed());
        const InducedCalculus ic = induced_full_calculus(c, om);
        CHECK(ic.well_defined.passed());
        CHECK(ic.d_squared.passed());
        CHECK(ic.diagram.passed());
        CHECK(ic.derivation.passed());
    }
}
