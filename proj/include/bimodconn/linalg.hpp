#pragma once

// Exact linear algebra over the rationals.
//
// Everything downstream (modules, calculi, connections) reduces to kernels,
// images and quotients of explicit matrices, so this is the only place that
// does elimination. Scalars are GMP rationals; there is no floating point.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bimodconn {

using Rational = mpq_class;
using Vector = std::vector<Rational>;

class DimensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical p/q. Always use this instead of the two-argument mpq_class
/// constructor, which does not reduce.
Rational frac(long num, long den);

/// "p/q", or "p" when q = 1. Sign sits on the numerator.
std::string to_string(const Rational& q);

/// Parses "p", "-p", "p/q". Throws std::invalid_argument on malformed input
/// or a zero denominator. The result is canonical (lowest terms, q > 0).
Rational parse_rational(const std::string& text);

Vector zero_vector(std::size_t n);
Vector unit_vector(std::size_t n, std::size_t i);
bool is_zero(const Vector& v);
/// v += c * w
void add_scaled(Vector& v, const Rational& c, const Vector& w);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(const Rational& c, const Vector& v);
/// Kronecker product, index (i, j) -> i * b.size() + j.
Vector kron(const Vector& a, const Vector& b);

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n);
    static Matrix from_columns(std::size_t rows, const std::vector<Vector>& columns);
    static Matrix from_rows(std::size_t cols, const std::vector<Vector>& rows);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] Vector row(std::size_t i) const;
    [[nodiscard]] Vector column(std::size_t j) const;
    void set_column(std::size_t j, const Vector& v);
    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] bool is_zero() const;

    Matrix operator*(const Matrix& other) const;
    Vector operator*(const Vector& v) const;
    Matrix operator+(const Matrix& other) const;
    Matrix operator-(const Matrix& other) const;
    Matrix& operator+=(const Matrix& other);
    friend Matrix operator*(const Rational& c, const Matrix& m);
    bool operator==(const Matrix& other) const = default;

    /// Row-major flattening, index (i, j) -> i * cols + j.
    [[nodiscard]] Vector flatten() const { return data_; }
    static Matrix unflatten(std::size_t rows, std::size_t cols, const Vector& v);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

/// Kronecker product of matrices, consistent with kron on vectors.
Matrix kron(const Matrix& a, const Matrix& b);

/// Block-stack matrices with equal column counts.
Matrix vstack(const std::vector<Matrix>& blocks);

struct RowEchelon {
    std::size_t rank = 0;
    Matrix reduced;
    std::vector<std::size_t> pivots;
};

/// Reduced row echelon form, exact.
RowEchelon row_reduce(Matrix m);
std::size_t rank(const Matrix& m);
std::optional<Matrix> inverse(const Matrix& m);
/// Some x with a * x = b, if one exists.
std::optional<Vector> solve(const Matrix& a, const Vector& b);

/// A subspace of Q^n, held by the reduced row echelon basis of its span.
/// The basis is therefore canonical: equal subspaces have equal bases.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(std::size_t ambient) : ambient_(ambient) {}
    /// Span of arbitrary (possibly dependent) vectors.
    static Subspace span(std::size_t ambient, const std::vector<Vector>& vectors);
    static Subspace whole(std::size_t ambient);
    /// Wraps rows already in reduced row echelon form (pivots ascending).
    static Subspace from_reduced(std::size_t ambient, std::vector<Vector> rows, std::vector<std::size_t> pivots);

    [[nodiscard]] std::size_t ambient() const { return ambient_; }
    [[nodiscard]] std::size_t dim() const { return basis_.size(); }
    [[nodiscard]] const std::vector<Vector>& basis() const { return basis_; }
    [[nodiscard]] const std::vector<std::size_t>& pivots() const { return pivots_; }
    /// Basis vectors as columns (ambient x dim).
    [[nodiscard]] Matrix basis_matrix() const;

    /// Coordinates of v in basis(); only meaningful when contains(v).
    [[nodiscard]] Vector coords(const Vector& v) const;
    [[nodiscard]] bool contains(const Vector& v) const;
    [[nodiscard]] bool contains(const Subspace& other) const;
    /// First basis vector of `other` not contained here, if any.
    [[nodiscard]] std::optional<Vector> first_outside(const Subspace& other) const;

    bool operator==(const Subspace& other) const = default;

private:
    std::size_t ambient_ = 0;
    std::vector<Vector> basis_;
    std::vector<std::size_t> pivots_;
};

Subspace kernel(const Matrix& f);
Subspace image(const Matrix& f);
Subspace intersect(const Subspace& a, const Subspace& b);
Subspace sum(const Subspace& a, const Subspace& b);

/// total / sub, with the complement of the pivot coordinates of `sub` as the
/// quotient basis. projection * section = identity and ker(projection) = sub.
struct QuotientSpace {
    std::size_t total = 0;
    Subspace sub;
    std::vector<std::size_t> complement;
    Matrix projection;
    Matrix section;

    [[nodiscard]] std::size_t dim() const { return complement.size(); }
    [[nodiscard]] Vector project(const Vector& v) const;
    [[nodiscard]] Vector lift(const Vector& q) const;
};

QuotientSpace quotient(std::size_t total, const Subspace& sub);

struct Factorization {
    std::optional<Matrix> map;      ///< h with h * f = g
    std::optional<Vector> witness;  ///< v with f v = 0, g v != 0, when no h exists
};

/// Solves h * f = g for h. f must be surjective (full row rank).
Factorization factor_through(const Matrix& f, const Matrix& g);

/// Incremental echelon basis, for fixpoint generation of spans.
class SpanBuilder {
public:
    explicit SpanBuilder(std::size_t ambient) : ambient_(ambient) {}
    /// Adds v; returns true when v was not already in the span.
    bool add(Vector v);
    [[nodiscard]] bool contains(Vector v) const;
    [[nodiscard]] std::size_t dim() const { return rows_.size(); }
    [[nodiscard]] std::size_t ambient() const { return ambient_; }
    [[nodiscard]] Subspace subspace() const;

private:
    void reduce(Vector& v) const;

    std::size_t ambient_;
    std::vector<Vector> rows_;
    std::vector<std::size_t> pivots_;
};

}  // namespace bimodconn
