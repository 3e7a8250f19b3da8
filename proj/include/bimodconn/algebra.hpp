#pragma once

// Finite-dimensional algebras given by structure constants, modules given by
// dense action matrices, balanced tensor products and right-linear Hom spaces.

#include "bimodconn/linalg.hpp"
#include "bimodconn/verdict.hpp"

#include <memory>
#include <string>
#include <vector>

namespace bimodconn {

class Algebra {
public:
    /// structure[i][j] = coordinates of e_i * e_j.
    Algebra(std::string name, std::vector<std::string> basis_names, std::vector<std::vector<Vector>> structure,
            Vector unit);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] std::size_t dim() const { return basis_names_.size(); }
    [[nodiscard]] const std::string& basis_name(std::size_t i) const { return basis_names_[i]; }
    [[nodiscard]] const std::vector<std::string>& basis_names() const { return basis_names_; }
    [[nodiscard]] const Vector& product(std::size_t i, std::size_t j) const { return structure_[i][j]; }
    [[nodiscard]] const Vector& unit() const { return unit_; }
    [[nodiscard]] Vector basis(std::size_t i) const { return unit_vector(dim(), i); }
    /// First basis index with a nonzero coefficient in the unit. The other
    /// basis elements together with 1 form a basis of A.
    [[nodiscard]] std::size_t unit_pivot() const { return unit_pivot_; }

    [[nodiscard]] Vector multiply(const Vector& a, const Vector& b) const;
    /// Matrix of x -> f x.
    [[nodiscard]] Matrix left_multiplication(const Vector& f) const;
    /// Matrix of x -> x f.
    [[nodiscard]] Matrix right_multiplication(const Vector& f) const;
    /// Matrix of the product A (x) A -> A, plain tensor index i * n + j.
    [[nodiscard]] Matrix multiplication_map() const;

    bool operator==(const Algebra& other) const {
        return structure_ == other.structure_ && unit_ == other.unit_;
    }

private:
    std::string name_;
    std::vector<std::string> basis_names_;
    std::vector<std::vector<Vector>> structure_;
    Vector unit_;
    std::size_t unit_pivot_ = 0;
};

using AlgebraPtr = std::shared_ptr<const Algebra>;

/// A right module, or a bimodule when left actions are present.
/// right(i) is the matrix of a -> a e_i, left(i) the matrix of a -> e_i a.
class Module {
public:
    Module() = default;
    static Module bimodule(std::string name, AlgebraPtr algebra, std::size_t dim, std::vector<Matrix> left,
                           std::vector<Matrix> right);
    static Module right_module(std::string name, AlgebraPtr algebra, std::size_t dim, std::vector<Matrix> right);
    /// A as a bimodule over itself.
    static Module regular(AlgebraPtr algebra);
    /// A^k with diagonal left and right multiplication.
    static Module free(AlgebraPtr algebra, std::size_t rank);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const Algebra& algebra() const { return *algebra_; }
    [[nodiscard]] const AlgebraPtr& algebra_ptr() const { return algebra_; }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] bool has_left() const { return is_bimodule_; }
    [[nodiscard]] const Matrix& right(std::size_t i) const { return right_[i]; }
    [[nodiscard]] const Matrix& left(std::size_t i) const;
    [[nodiscard]] const std::vector<Matrix>& right_matrices() const { return right_; }
    [[nodiscard]] const std::vector<Matrix>& left_matrices() const { return left_; }

    [[nodiscard]] Matrix right_action(const Vector& f) const;
    [[nodiscard]] Matrix left_action(const Vector& f) const;
    [[nodiscard]] Module as_right_module() const;
    [[nodiscard]] Module renamed(std::string name) const;
    /// Names used in witnesses; b1, b2, ... unless set.
    [[nodiscard]] std::string basis_name(std::size_t i) const;
    [[nodiscard]] Module with_basis_names(std::vector<std::string> names) const;

private:
    Module(std::string name, AlgebraPtr algebra, std::size_t dim, std::vector<Matrix> left, std::vector<Matrix> right,
           bool is_bimodule);

    std::string name_;
    AlgebraPtr algebra_;
    std::size_t dim_ = 0;
    std::vector<Matrix> left_;
    std::vector<Matrix> right_;
    bool is_bimodule_ = false;
    std::vector<std::string> basis_names_;
};

Verdict check_algebra(const Algebra& a);
/// Unitality and associativity of the actions, plus (f a) g = f (a g) for
/// bimodules.
Verdict check_module(const Module& m);

/// X (x)_A Y as the quotient of the plain tensor product by the balancing
/// relations (x f) (x) y - x (x) (f y). Plain index is i * dim Y + j.
struct BalancedTensor {
    std::size_t left_dim = 0;
    std::size_t right_dim = 0;
    QuotientSpace space;
    /// Residual actions on class coordinates: right from Y, left from X when X
    /// is a bimodule.
    Module module;

    [[nodiscard]] std::size_t dim() const { return space.dim(); }
    /// Class of x (x) y.
    [[nodiscard]] Vector project(const Vector& x, const Vector& y) const;
    [[nodiscard]] Vector project_plain(const Vector& v) const { return space.project(v); }
    /// Plain-tensor representative of a class.
    [[nodiscard]] Vector lift(const Vector& cls) const { return space.lift(cls); }
};

/// Requires X to have a right action and Y to be a bimodule over the same
/// algebra. Throws PreconditionError otherwise.
BalancedTensor tensor_over(const Module& x, const Module& y, std::string name = {});

/// The map X (x)_A Y -> X' (x)_A Y' induced by linear maps L: X -> X' and
/// R: Y -> Y' on plain tensors. Absent (with a plain-tensor witness) when L (x) R
/// does not respect the balancing relations.
Factorization induced_tensor_map(const BalancedTensor& from, const BalancedTensor& to, const Matrix& left,
                                 const Matrix& right);

/// Right A-linear maps X -> Y, as a subspace of row-major flattened
/// (dim Y x dim X) matrices.
struct HomSpace {
    std::size_t source_dim = 0;
    std::size_t target_dim = 0;
    Subspace space;

    [[nodiscard]] std::size_t dim() const { return space.dim(); }
    [[nodiscard]] Matrix element(std::size_t i) const;
    [[nodiscard]] bool contains(const Matrix& phi) const;
    [[nodiscard]] Vector coords(const Matrix& phi) const { return space.coords(phi.flatten()); }
};

HomSpace right_hom_space(const Module& x, const Module& y);

/// The left-multiplication embedding A -> End^A(M), f -> (a -> f a).
struct Kappa0 {
    std::vector<Matrix> operators;  ///< one per algebra basis element
    HomSpace endomorphisms;         ///< End^A(M)
    Matrix map;                     ///< A -> End^A(M) coordinates
    std::size_t image_dim = 0;
    bool injective = false;
    Verdict right_linear;
    Verdict multiplicative;
};

/// Requires M to be a bimodule.
Kappa0 kappa0(const Module& m);

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);

}  // namespace bimodconn
