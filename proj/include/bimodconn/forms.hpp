#pragma once

// Universal forms, graded calculi and module-valued forms.
//
// Elements of M (x)_A Omega_u^r are stored inside the ambient space
// M (x) A^{(x)r}: the word (m; a1, ..., ar) stands for m (x)_A da1 ... dar.
// Because 1 = sum_i u_i e_i and d1 = 0, the words whose letters avoid the
// unit pivot j0 give a basis ("u-coordinates"), so M (x)_A Omega_u^r has
// dimension dim M * (n - 1)^r. A calculus is the universal one modulo a
// graded ideal I, and M (x)_A Omega^r is the quotient of the u-coordinates by
// the span of all m . iota, iota in I^r.

#include "bimodconn/algebra.hpp"

#include <memory>
#include <string>
#include <vector>

namespace bimodconn {

std::size_t power(std::size_t base, std::size_t exp);

/// Tensor-power bookkeeping for one algebra, with the words
/// 1 . da1 ... das precomputed up to a maximum degree.
class UniversalForms {
public:
    UniversalForms(AlgebraPtr algebra, std::size_t max_degree);

    [[nodiscard]] const Algebra& algebra() const { return *algebra_; }
    [[nodiscard]] const AlgebraPtr& algebra_ptr() const { return algebra_; }
    [[nodiscard]] std::size_t n() const { return algebra_->dim(); }
    [[nodiscard]] std::size_t max_degree() const { return max_degree_; }
    [[nodiscard]] std::size_t ambient_dim(std::size_t base, std::size_t r) const { return base * power(n(), r); }
    [[nodiscard]] std::size_t udim(std::size_t base, std::size_t r) const { return base * power(n() - 1, r); }
    /// Basis index of reduced letter k (letters skip the unit pivot).
    [[nodiscard]] std::size_t letter(std::size_t k) const { return k < algebra_->unit_pivot() ? k : k + 1; }
    /// Letters of a reduced word index of length r.
    [[nodiscard]] std::vector<std::size_t> reduced_word(std::size_t index, std::size_t r) const;
    /// Full word index of a list of basis letters.
    [[nodiscard]] std::size_t word_index(const std::vector<std::size_t>& letters) const;

    /// 1 . da1 ... das in A^{(x)(s+1)}, for the word with full index `word`.
    [[nodiscard]] const Vector& dword(std::size_t s, std::size_t word) const { return dwords_[s][word]; }

    /// x . w for x in X (x) A^{(x)r} and w in A^{(x)(s+1)}; `right` is the
    /// right action of A on X (only used when r = 0).
    [[nodiscard]] Vector multiply(const Vector& x, const std::vector<Matrix>& right, std::size_t r, const Vector& w,
                                  std::size_t s) const;
    /// Coordinates in the word basis of the element represented by x. On
    /// vectors outside the image this first applies the projection
    /// (m; a..) -> m . da...
    [[nodiscard]] Vector to_ucoords(const Vector& x, std::size_t base, std::size_t r) const;
    /// Ambient representative of u-coordinates.
    [[nodiscard]] Vector from_ucoords(const Vector& u, const std::vector<Matrix>& right, std::size_t r) const;
    /// d(a0 da1 ... dar) = da0 da1 ... dar on ambient A^{(x)(r+1)}.
    [[nodiscard]] Vector d_ambient(const Vector& x, std::size_t r) const;
    /// d in u-coordinates of Omega_u, degree r -> r + 1.
    [[nodiscard]] Matrix d_ucoords(std::size_t r) const;
    /// Left multiplication by f on u-coordinates of X (x)_A Omega_u^r.
    [[nodiscard]] Matrix left_ucoords(const Matrix& left_on_base, std::size_t r) const;
    /// Right multiplication by f on u-coordinates of Omega_u^r.
    [[nodiscard]] Matrix right_ucoords(const Vector& f, std::size_t r) const;

private:
    AlgebraPtr algebra_;
    std::size_t max_degree_;
    std::vector<Rational> pivot_expansion_;  // de_{j0} = sum_k c_k de_{letter(k)}
    std::vector<std::vector<Vector>> dwords_;
};

using UniversalFormsPtr = std::shared_ptr<const UniversalForms>;

/// The universal calculus modulo a graded two-sided differential ideal,
/// truncated at degree D. Degree-r elements are held in quotient ("class")
/// coordinates of Omega_u^r / I^r.
class GradedCalculus {
public:
    GradedCalculus(UniversalFormsPtr forms, std::size_t truncation, std::vector<Subspace> ideal, std::string name);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const Algebra& algebra() const { return forms_->algebra(); }
    [[nodiscard]] const AlgebraPtr& algebra_ptr() const { return forms_->algebra_ptr(); }
    [[nodiscard]] const UniversalForms& forms() const { return *forms_; }
    [[nodiscard]] const UniversalFormsPtr& forms_ptr() const { return forms_; }
    [[nodiscard]] std::size_t truncation() const { return truncation_; }
    [[nodiscard]] const Subspace& ideal(std::size_t r) const { return ideal_[r]; }
    [[nodiscard]] const QuotientSpace& quotient(std::size_t r) const { return quotients_[r]; }
    [[nodiscard]] std::size_t udim(std::size_t r) const { return quotients_[r].total; }
    [[nodiscard]] std::size_t dim(std::size_t r) const { return quotients_[r].dim(); }
    [[nodiscard]] std::vector<std::size_t> dims() const;

    [[nodiscard]] Vector project(const Vector& ambient, std::size_t r) const;
    [[nodiscard]] Vector lift(const Vector& cls, std::size_t r) const;
    /// d: Omega^r -> Omega^{r+1} in class coordinates, r < D.
    [[nodiscard]] const Matrix& differential(std::size_t r) const { return differentials_[r]; }
    /// Class of d f for f in A.
    [[nodiscard]] Vector d(const Vector& f) const { return differentials_[0] * f; }
    /// Product Omega^r x Omega^s -> Omega^{r+s}, r + s <= D.
    [[nodiscard]] Vector multiply(const Vector& x, std::size_t r, const Vector& y, std::size_t s) const;
    /// Omega^r as an A-bimodule.
    [[nodiscard]] Module bimodule(std::size_t r) const;

private:
    UniversalFormsPtr forms_;
    std::size_t truncation_;
    std::vector<Subspace> ideal_;
    std::vector<QuotientSpace> quotients_;
    std::vector<Matrix> differentials_;
    std::vector<Matrix> regular_right_;
    std::string name_;
};

using CalculusPtr = std::shared_ptr<const GradedCalculus>;

/// M (x)_A Omega^r for r <= D, for a right module or bimodule M.
class FormSpace {
public:
    FormSpace() = default;
    FormSpace(Module module, CalculusPtr calculus);

    [[nodiscard]] const Module& module() const { return module_; }
    [[nodiscard]] const GradedCalculus& calculus() const { return *calculus_; }
    [[nodiscard]] const CalculusPtr& calculus_ptr() const { return calculus_; }
    [[nodiscard]] std::size_t truncation() const { return calculus_->truncation(); }
    [[nodiscard]] std::size_t dim(std::size_t r) const { return quotients_[r].dim(); }
    [[nodiscard]] std::size_t udim(std::size_t r) const { return quotients_[r].total; }
    [[nodiscard]] std::size_t ambient_dim(std::size_t r) const;
    [[nodiscard]] const QuotientSpace& quotient(std::size_t r) const { return quotients_[r]; }

    [[nodiscard]] Vector project(const Vector& ambient, std::size_t r) const;
    [[nodiscard]] Vector lift(const Vector& cls, std::size_t r) const;
    /// xi . omega with xi in M (x) Omega^r and omega in Omega^s (class coordinates).
    [[nodiscard]] Vector multiply(const Vector& xi, std::size_t r, const Vector& omega, std::size_t s) const;
    [[nodiscard]] Matrix right_multiplication(std::size_t r, const Vector& omega, std::size_t s) const;
    [[nodiscard]] Matrix right_action(std::size_t r, const Vector& f) const;
    /// Requires M to be a bimodule.
    [[nodiscard]] Matrix left_action(std::size_t r, const Vector& f) const;
    [[nodiscard]] Module as_module(std::size_t r) const;

    /// The right-Omega-linear extension of F: M -> M (x) Omega^k (matrix
    /// dim(k) x dim M) to M (x) Omega^s -> M (x) Omega^{s+k}, namely
    /// m . omega -> F(m) . omega.
    [[nodiscard]] Matrix extend(const Matrix& restriction, std::size_t k, std::size_t s) const;
    /// The same extension applied to a single element of M (x) Omega^s.
    [[nodiscard]] Vector apply(const Matrix& restriction, std::size_t k, const Vector& xi, std::size_t s) const;
    /// apply() on every column of xs.
    [[nodiscard]] Matrix apply_columns(const Matrix& restriction, std::size_t k, const Matrix& xs, std::size_t s) const;
    /// The extension on u-coordinates, before passing to the quotient by
    /// M (x)_A I^s. It is well defined iff it kills that subspace.
    [[nodiscard]] Matrix extend_ucoords(const Matrix& restriction, std::size_t k, std::size_t s) const;

private:
    [[nodiscard]] std::vector<Vector> lift_columns(const Matrix& restriction, std::size_t k, std::size_t s) const;
    [[nodiscard]] Vector apply_ucoords(const std::vector<Vector>& lifted, std::size_t k, const Vector& u,
                                       std::size_t s) const;

    Module module_;
    CalculusPtr calculus_;
    std::vector<QuotientSpace> quotients_;
};

}  // namespace bimodconn
