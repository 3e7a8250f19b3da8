#pragma once

// Connections on N (x)_A M built from a connection on the right module N and
// one on the bimodule M.

#include "bimodconn/connection.hpp"

namespace bimodconn {

struct DegeneracyPair {
    Subspace n0;  ///< b with b (x) a = 0 for all a
    Subspace m0;  ///< a with b (x) a = 0 for all b
    Verdict submodules;
};

DegeneracyPair degeneracy_submodules(const Module& n, const Module& m);

/// nabla_m M0 in M0 (x) Omega1 and nabla_n N0 in N0 (x) Omega1, each against
/// the calculus its connection uses.
Verdict check_compatibility(const Connection& on_m, const Connection& on_n, const DegeneracyPair& pair);

/// nu-hat(b (x) omega) = b (x) kappa-hat(omega), N (x) Omega^r -> N (x) Omega_nabla^r.
struct NuHat {
    std::vector<Matrix> maps;
    Verdict exists;
    Verdict right_linear;  ///< nu-hat(xi omega) = nu-hat(xi) kappa-hat(omega)
};

NuHat nu_hat(const FormSpace& n_forms, const CalculusPtr& induced);

/// nabla'_M with nu-hat nabla' = nabla'_M nu-hat.
struct AssociatedConnection {
    std::optional<Connection> connection;  ///< on N over the induced calculus
    std::vector<Matrix> factored;          ///< degree r >= 1 maps through nu-hat
    Verdict exists;                        ///< ker nu-hat is preserved
    Verdict square;                        ///< the square commutes and matches the extension
    Verdict right_leibniz;
    Verdict unique;
};

AssociatedConnection associated_connection(const Connection& n_conn, const NuHat& nu, const CalculusPtr& induced);

enum class Route { induced, nu_hat, sigma };
std::string to_string(Route r);

struct TensorConnection {
    Route route = Route::induced;
    BalancedTensor tensor;             ///< N (x)_A M
    std::optional<Connection> connection;
    Verdict balanced;                  ///< the plain formula respects the balancing relations
    Verdict right_leibniz;
};

/// nabla(b (x) a) = (nabla'_M b) a + b (x) nabla a, where nabla'_M is a
/// connection on N over Omega_nabla of m_conn and (b (x) Phi) a = b (x) Phi(a).
TensorConnection tensor_connection_induced(const Connection& n_conn, const Connection& m_conn);
/// nabla(b (x) a) = nu-hat(nabla' b) a + b (x) nabla a.
TensorConnection tensor_connection_original(const Connection& n_conn, const Connection& m_conn, const NuHat& nu,
                                            const CalculusPtr& induced);
/// nabla(b (x) a) = (id (x) sigma)(nabla' b (x) a) + b (x) nabla a.
TensorConnection tensor_connection_sigma(const Connection& n_conn, const Connection& m_conn, const Sigma& sigma);

Verdict routes_agree(const TensorConnection& a, const TensorConnection& b);

}  // namespace bimodconn
