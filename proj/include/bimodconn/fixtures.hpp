#pragma once

// Named example algebras, modules and connections used by the tests, the
// shipped model files and the acceptance suite.

#include "bimodconn/connection.hpp"

namespace bimodconn::fixtures {

/// Functions on two points: e_i e_j = delta_ij e_i, unit e1 + e2.
AlgebraPtr two_point_algebra();

/// 2x2 rational matrices, basis e11, e12, e21, e22.
AlgebraPtr matrix_algebra();

/// A with its right action twisted by the swap e1 <-> e2 of the two-point
/// algebra: a . f = a swap(f). Left action is ordinary multiplication.
Module swapped_two_point_bimodule(const AlgebraPtr& a2);

/// M = A over the two-point algebra with nabla = d.
Connection flat_connection(std::size_t truncation = default_truncation);

/// The quotient of the universal calculus of the two-point algebra by the
/// ideal generated by e1 (x) e2.
CalculusPtr e1e2_quotient(std::size_t truncation = default_truncation);

/// A connection on the swapped bimodule over e1e2_quotient() whose kappa1
/// does not kill K, found by search_sigma_failure over {0, 1, -1}. Throws
/// PreconditionError when the search comes back empty.
Connection twist_connection(std::size_t truncation = default_truncation);

/// The gauge term g_1 . theta in slot (1, 1): a right-linear map
/// M -> M (x) Omega1 on the free module of rank 2.
Matrix gauge_term(const FormSpace& forms, const Vector& theta);

/// Free rank-2 module over the matrix algebra with the universal calculus and
/// nabla = trivial + gauge_term(theta), for the first u-basis theta whose
/// curvature is not left A-linear.
Connection grass_connection(std::size_t truncation = default_truncation);

}  // namespace bimodconn::fixtures
