#pragma once

// Universal calculi, quotient calculi by differential ideals, and the
// partial order between calculi.

#include "bimodconn/forms.hpp"

#include <optional>

namespace bimodconn {

constexpr std::size_t default_truncation = 3;

struct FirstOrderCalculus {
    AlgebraPtr algebra;
    Subspace kernel;  ///< K inside Omega1_u, u-coordinates
    QuotientSpace omega1;
    Module bimodule;
    Matrix d;  ///< A -> Omega1, class coordinates
};

CalculusPtr universal_graded(AlgebraPtr algebra, std::size_t truncation = default_truncation);
FirstOrderCalculus first_order_part(const GradedCalculus& c);
FirstOrderCalculus universal_first_order(AlgebraPtr algebra);

/// A homogeneous element given by its coordinates in A^{(x)(degree+1)}.
struct Generator {
    std::size_t degree = 1;
    Vector tensor;
};

/// u-coordinates of a generator. Throws PreconditionError when the tensor is
/// not a universal form (e.g. a degree-1 tensor with nonzero product).
Vector generator_ucoords(const UniversalForms& forms, const Generator& g);

/// Smallest graded two-sided ideal containing `seed` (u-coordinates, one
/// list per degree 0..D) that is closed under d, degree-wise up to D.
std::vector<Subspace> saturate(const UniversalForms& forms, std::size_t truncation,
                               const std::vector<std::vector<Vector>>& seed);

/// base modulo the ideal generated by `generators` together with base's own
/// ideal.
CalculusPtr quotient_calculus(const GradedCalculus& base, const std::vector<Generator>& generators,
                              std::string name = "quotient");
/// The calculus with exactly this ideal, saturated first.
CalculusPtr calculus_from_ideal(UniversalFormsPtr forms, std::size_t truncation, std::vector<Subspace> ideal,
                                std::string name);

/// Degree-wise maps between class coordinates of two calculi.
struct CalculusMorphism {
    std::vector<Matrix> maps;
};

enum class OrderMode { first_order, all_degrees };

struct Comparison {
    std::optional<CalculusMorphism> rho;  ///< c2 -> c1 when c1 precedes c2
    Verdict verdict;
};

/// c1 <= c2: a morphism rho: c2 -> c1 with d1 = rho d2 exists iff the ideal
/// of c2 is contained in the ideal of c1. The failure witness is an element of
/// I2 outside I1, as a tensor. Throws PreconditionError on algebra or
/// truncation mismatch.
Comparison preceq(const GradedCalculus& c1, const GradedCalculus& c2, OrderMode mode = OrderMode::all_degrees);

/// rho d_source = d_target rho and rho(x y) = rho(x) rho(y) on basis pairs.
Verdict check_morphism(const GradedCalculus& source, const GradedCalculus& target, const CalculusMorphism& rho);

/// Graded Leibniz rule on basis pairs with r + s + 1 <= D and d d = 0.
Verdict check_graded_calculus(const GradedCalculus& c);

/// f (x) g -> f dg on ker(mu) is well defined, onto Omega1 and agrees with
/// the projection of the universal d.
Verdict check_universal_property(const GradedCalculus& c);

/// Human-readable form of a tensor, e.g. "e1(x)e2 - e2(x)e1".
std::string format_tensor(const Algebra& a, const Vector& t, std::size_t factors);

}  // namespace bimodconn
