#pragma once

// Connections on bimodules, the induced calculus, generalized permutations,
// curvature and the quotient on which curvature becomes bilinear.
//
// A degree-r right-linear operator Phi is always stored by its restriction to
// M, a matrix dim(M (x) Omega^r) x dim M, and extended by
// Phi(m . omega) = Phi(m) . omega when needed.

#include "bimodconn/calculus.hpp"

#include <optional>

namespace bimodconn {

class Connection {
public:
    Connection(std::string name, FormSpace forms, Matrix nabla);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const FormSpace& forms() const { return forms_; }
    [[nodiscard]] const Module& module() const { return forms_.module(); }
    [[nodiscard]] const GradedCalculus& calculus() const { return forms_.calculus(); }
    [[nodiscard]] std::size_t truncation() const { return forms_.truncation(); }
    [[nodiscard]] const Matrix& nabla() const { return nabla_; }
    /// nabla on M (x) Omega^s -> M (x) Omega^{s+1}, s < D, extended by
    /// nabla(m . omega) = (nabla m) . omega + m . d omega.
    [[nodiscard]] const Matrix& extension(std::size_t s) const { return extensions_[s]; }
    /// Left multiplication by basis element f on M (x) Omega^r (bimodules only).
    [[nodiscard]] const Matrix& left(std::size_t r, std::size_t f) const { return left_[r][f]; }
    /// nabla^2 restricted to M, a map M -> M (x) Omega^2 (D >= 2).
    [[nodiscard]] Matrix curvature_on_module() const;

private:
    std::string name_;
    FormSpace forms_;
    Matrix nabla_;
    std::vector<Matrix> extensions_;
    std::vector<std::vector<Matrix>> left_;
};

/// All connections on M: a particular solution of the right Leibniz rule
/// plus Hom^A(M, M (x) Omega1).
struct ConnectionSpace {
    std::optional<Matrix> particular;
    HomSpace translations;
};

ConnectionSpace connection_space(const FormSpace& forms);
/// nabla = d on M = A.
Connection differential_connection(CalculusPtr calculus);
/// nabla(sum_k g_k f_k) = sum_k g_k (x) d f_k on the free module A^rank with
/// generators g_k.
Matrix trivial_connection_matrix(const FormSpace& forms, std::size_t rank);

Verdict check_right_leibniz(const Connection& c);
/// Psi R_f = R_f Psi for a map M -> M (x) Omega^r.
bool is_right_linear(const FormSpace& forms, const Matrix& psi, std::size_t r);

/// (nabla-hat Phi)(a) = nabla(Phi(a)) - (-1)^r Phi(nabla a) for Phi of degree r.
Matrix nabla_hat(const Connection& c, const Matrix& phi, std::size_t r);
/// Composition Phi o Psi of degrees k and l.
Matrix compose(const Connection& c, const Matrix& phi, std::size_t k, const Matrix& psi, std::size_t l);
/// f-hat as an operator on M.
Matrix hat(const Connection& c, const Vector& f);

struct InducedFirstOrder {
    Subspace omega1;            ///< span of f^ o nabla-hat(g^) o h^, flattened
    std::vector<Matrix> d;      ///< d_nabla e_i = nabla-hat(e_i^)
    Module bimodule;            ///< actions f . Phi . g = f^ o Phi o g^
    Verdict right_linear;
    Verdict derivation;         ///< nabla-hat(f^ g^) = nabla-hat(f^) g^ + f^ nabla-hat(g^)
    Verdict left_leibniz;       ///< nabla(f a) = (d_nabla f)(a) + f nabla a
};

/// Requires M to be a bimodule.
InducedFirstOrder induced_first_order(const Connection& c);

struct Kappa1 {
    Matrix map;  ///< u-coordinates of Omega1_u -> flattened Hom(M, M (x) Omega1)
    std::size_t rank = 0;
    Verdict bimodule_linear;
    Verdict diagram;  ///< kappa1 d_u = d_nabla
};

Kappa1 kappa1(const Connection& c);

struct Sigma {
    std::optional<Matrix> kappa1_hat;  ///< Omega1 classes -> flattened operators
    BalancedTensor domain;             ///< Omega1 (x)_A M
    std::optional<Matrix> map;         ///< domain -> M (x)_A Omega1
    Verdict exists;                    ///< absent carries an element of K with nonzero image
    Verdict left_leibniz;              ///< nabla(f a) = sigma(df (x) a) + f nabla a
    Verdict agrees_with_universal;     ///< sigma(pi alpha (x) a) = kappa1(alpha)(a)
};

Sigma sigma_exists(const Connection& c, const Kappa1& k);

/// Graded right Leibniz rule of the extension on basis pairs, and that the
/// extension annihilates M (x)_A I^s.
Verdict check_extension(const Connection& c);

struct CurvatureReport {
    std::vector<Matrix> maps;  ///< nabla^2 on M (x) Omega^r, r <= D - 2
    bool flat = false;
    Verdict right_linear;  ///< nabla^2(xi omega) = nabla^2(xi) omega
    Verdict left_linear;   ///< nabla^2(f a) = f nabla^2(a) on M
};

CurvatureReport curvature(const Connection& c);

struct OmegaHat {
    std::size_t max_degree = 0;
    std::vector<Subspace> spans;  ///< flattened restrictions, per degree
    std::size_t rounds = 0;       ///< fixpoint iterations until all degrees were stable
    Verdict derivation;           ///< graded derivation law on spanning pairs
    Verdict second_power;         ///< nabla-hat^2 Phi = nabla^2 Phi - Phi nabla^2

    [[nodiscard]] std::size_t dim(std::size_t r) const { return spans[r].dim(); }
    [[nodiscard]] Matrix element(const Connection& c, std::size_t r, std::size_t i) const;
};

/// Fixpoint generation from kappa0(A) under nabla-hat and composition, up to
/// max_degree (at most D - 1).
OmegaHat omega_hat_generate(const Connection& c, std::size_t max_degree);

struct JQuotient {
    std::vector<Subspace> j;  ///< J^r inside M (x) Omega^r, class coordinates
    Verdict low_degrees;      ///< J^0 = J^1 = 0
    Verdict nabla_closed;     ///< nabla J^r in J^{r+1}
    Verdict omega_hat_closed; ///< Phi J^r in J^{r+k}
    /// span of nabla^2(f a) - f nabla^2(a), compared with J^2
    std::size_t curvature_commutator_dim = 0;
    Verdict commutators_in_j;

    [[nodiscard]] std::vector<std::size_t> dims() const;
};

/// Needs Omega-hat up to degree D - 2.
JQuotient j_ideal(const Connection& c, const OmegaHat& oh);

struct OmegaM {
    std::vector<QuotientSpace> spaces;  ///< Omega(M)^r = (M (x) Omega^r) / J^r
    std::vector<Matrix> nabla;          ///< factored nabla, r < D
    std::vector<Matrix> curvature;      ///< factored nabla^2, r <= D - 2
    Verdict factored;                   ///< nabla J in J, so nabla passes to the quotient
    Verdict right_leibniz;
    Verdict left_linear;   ///< factored nabla^2 is left A-linear
    Verdict right_linear;  ///< factored nabla^2 is right Omega-linear
    Verdict coherence;     ///< p Phi = Phi^ p for spanning Phi

    [[nodiscard]] std::vector<std::size_t> dims() const;
};

OmegaM quotient_omega_m(const Connection& c, const OmegaHat& oh, const JQuotient& jq);

struct InducedCalculus {
    /// kappa(a0 da1 ... dar) = p a0^ nabla-hat(a1^) ... nabla-hat(ar^) on M,
    /// flattened, one matrix per degree with u-coordinates as columns.
    std::vector<Matrix> kappa;
    CalculusPtr calculus;  ///< Omega_u / ker kappa
    Verdict well_defined;  ///< kappa kills words containing 1
    Verdict ideal_closed;  ///< ker kappa is a differential ideal
    Verdict degree0;       ///< Omega^0_nabla = A
    Verdict d_squared;     ///< p nabla-hat^2 Phi = 0 on spanning Phi
    Verdict diagram;       ///< kappa d_u = d_nabla kappa
    Verdict derivation;    ///< graded Leibniz rule of d_nabla
    std::size_t upstairs_nonzero = 0;  ///< spanning Phi with nabla-hat^2 Phi != 0 before p

    [[nodiscard]] std::vector<std::size_t> dims() const { return calculus->dims(); }
};

InducedCalculus induced_full_calculus(const Connection& c, const OmegaM& om);

struct SigmaFull {
    Comparison order;       ///< (Omega_nabla, d_nabla) <= (Omega, d)
    Verdict exists;         ///< kappa kills the ideal of the calculus in every degree
    Verdict degree0;        ///< sigma_u(f (x) xi) = f xi
    Verdict multiplicative; ///< sigma_u(w1 w2 (x) xi) = sigma_u(w1 (x) sigma_u(w2 (x) xi))
    Verdict compatibility;  ///< nabla sigma_u(w (x) xi) = sigma_u(d w (x) xi) + (-1)^r sigma_u(w (x) nabla xi)
};

SigmaFull sigma_full(const Connection& c, const OmegaM& om, const InducedCalculus& ic);

/// Search over translations of `base` by combinations of Hom^A(M, M (x) Omega1)
/// basis elements with coefficients from `grid`, in lexicographic order, for
/// the first connection whose kappa1 does not kill K.
struct TwistSearch {
    std::optional<Connection> found;
    std::vector<Rational> coefficients;
    std::size_t tried = 0;
};

TwistSearch search_sigma_failure(const FormSpace& forms, const Matrix& base, const std::vector<Rational>& grid);

}  // namespace bimodconn
