#include "bimodconn/linalg.hpp"

#include <algorithm>
#include <cctype>

namespace bimodconn {

Rational frac(long num, long den) {
    if (den == 0) throw std::invalid_argument("frac: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
    auto valid_integer = [](const std::string& s, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i == s.size()) return false;
        return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                           [](unsigned char c) { return std::isdigit(c) != 0; });
    };
    const auto slash = text.find('/');
    const std::string num = text.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (!valid_integer(num, true) || !valid_integer(den, false)) {
        throw std::invalid_argument("malformed rational '" + text + "'");
    }
    mpz_class n(num[0] == '+' ? num.substr(1) : num, 10);
    mpz_class d(den, 10);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

Vector zero_vector(std::size_t n) { return Vector(n); }

Vector unit_vector(std::size_t n, std::size_t i) {
    Vector v(n);
    v[i] = 1;
    return v;
}

bool is_zero(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
}

void add_scaled(Vector& v, const Rational& c, const Vector& w) {
    if (v.size() != w.size()) throw DimensionError("add_scaled: length mismatch");
    if (sgn(c) == 0) return;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (sgn(w[i]) != 0) v[i] += c * w[i];
    }
}

Vector operator+(const Vector& a, const Vector& b) {
    Vector r = a;
    add_scaled(r, 1, b);
    return r;
}

Vector operator-(const Vector& a, const Vector& b) {
    Vector r = a;
    add_scaled(r, -1, b);
    return r;
}

Vector operator*(const Rational& c, const Vector& v) {
    Vector r(v.size());
    if (sgn(c) == 0) return r;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (sgn(v[i]) != 0) r[i] = c * v[i];
    }
    return r;
}

Vector kron(const Vector& a, const Vector& b) {
    Vector r(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (sgn(b[j]) != 0) r[i * b.size() + j] = a[i] * b[j];
        }
    }
    return r;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Matrix Matrix::from_columns(std::size_t rows, const std::vector<Vector>& columns) {
    Matrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) m.set_column(j, columns[j]);
    return m;
}

Matrix Matrix::from_rows(std::size_t cols, const std::vector<Vector>& rows) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw DimensionError("from_rows: row length mismatch");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Matrix Matrix::unflatten(std::size_t rows, std::size_t cols, const Vector& v) {
    if (v.size() != rows * cols) throw DimensionError("unflatten: size mismatch");
    Matrix m(rows, cols);
    m.data_ = v;
    return m;
}

Vector Matrix::row(std::size_t i) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

Vector Matrix::column(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void Matrix::set_column(std::size_t j, const Vector& v) {
    if (v.size() != rows_) throw DimensionError("set_column: length mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
}

bool Matrix::is_zero() const { return bimodconn::is_zero(data_); }

Matrix Matrix::operator*(const Matrix& other) const {
    if (cols_ != other.rows_) throw DimensionError("matrix product: inner dimension mismatch");
    Matrix r(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const Rational& a = (*this)(i, k);
            if (sgn(a) == 0) continue;
            for (std::size_t j = 0; j < other.cols_; ++j) {
                const Rational& b = other(k, j);
                if (sgn(b) != 0) r(i, j) += a * b;
            }
        }
    }
    return r;
}

Vector Matrix::operator*(const Vector& v) const {
    if (cols_ != v.size()) throw DimensionError("matrix-vector product: dimension mismatch");
    Vector r(rows_);
    for (std::size_t k = 0; k < cols_; ++k) {
        if (sgn(v[k]) == 0) continue;
        for (std::size_t i = 0; i < rows_; ++i) {
            const Rational& a = (*this)(i, k);
            if (sgn(a) != 0) r[i] += a * v[k];
        }
    }
    return r;
}

Matrix Matrix::operator+(const Matrix& other) const {
    Matrix r = *this;
    r += other;
    return r;
}

Matrix Matrix::operator-(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("matrix difference: shape mismatch");
    Matrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= other.data_[i];
    return r;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("matrix sum: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix operator*(const Rational& c, const Matrix& m) {
    Matrix r = m;
    for (auto& x : r.data_) x *= c;
    return r;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Rational& x = a(i, j);
            if (sgn(x) == 0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    if (sgn(b(k, l)) != 0) r(i * b.rows() + k, j * b.cols() + l) = x * b(k, l);
                }
            }
        }
    }
    return r;
}

Matrix vstack(const std::vector<Matrix>& blocks) {
    if (blocks.empty()) return {};
    std::size_t rows = 0;
    const std::size_t cols = blocks.front().cols();
    for (const auto& b : blocks) {
        if (b.cols() != cols) throw DimensionError("vstack: column mismatch");
        rows += b.rows();
    }
    Matrix r(rows, cols);
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i) {
            for (std::size_t j = 0; j < cols; ++j) r(offset + i, j) = b(i, j);
        }
        offset += b.rows();
    }
    return r;
}

RowEchelon row_reduce(Matrix m) {
    RowEchelon result;
    std::size_t lead_row = 0;
    for (std::size_t col = 0; col < m.cols() && lead_row < m.rows(); ++col) {
        std::size_t pivot = lead_row;
        while (pivot < m.rows() && sgn(m(pivot, col)) == 0) ++pivot;
        if (pivot == m.rows()) continue;
        if (pivot != lead_row) {
            for (std::size_t j = col; j < m.cols(); ++j) swap(m(pivot, j), m(lead_row, j));
        }
        const Rational inv = 1 / m(lead_row, col);
        for (std::size_t j = col; j < m.cols(); ++j) m(lead_row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == lead_row || sgn(m(i, col)) == 0) continue;
            const Rational factor = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j) {
                if (sgn(m(lead_row, j)) != 0) m(i, j) -= factor * m(lead_row, j);
            }
        }
        result.pivots.push_back(col);
        ++lead_row;
    }
    result.rank = result.pivots.size();
    result.reduced = std::move(m);
    return result;
}

std::size_t rank(const Matrix& m) {
    SpanBuilder builder(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) builder.add(m.row(i));
    return builder.dim();
}

std::optional<Matrix> inverse(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("inverse: matrix not square");
    const std::size_t n = m.rows();
    if (n == 0) return Matrix();
    Matrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    const RowEchelon e = row_reduce(std::move(aug));
    if (e.rank < n || e.pivots[n - 1] != n - 1) return std::nullopt;
    Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
    }
    return inv;
}

std::optional<Vector> solve(const Matrix& a, const Vector& b) {
    if (a.rows() != b.size()) throw DimensionError("solve: right-hand side length mismatch");
    Matrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    const RowEchelon e = row_reduce(std::move(aug));
    Vector x(a.cols());
    for (std::size_t r = 0; r < e.rank; ++r) {
        if (e.pivots[r] == a.cols()) return std::nullopt;
        x[e.pivots[r]] = e.reduced(r, a.cols());
    }
    return x;
}

Subspace Subspace::span(std::size_t ambient, const std::vector<Vector>& vectors) {
    SpanBuilder builder(ambient);
    for (const auto& v : vectors) builder.add(v);
    return builder.subspace();
}

Subspace Subspace::whole(std::size_t ambient) {
    Subspace s(ambient);
    for (std::size_t i = 0; i < ambient; ++i) {
        s.basis_.push_back(unit_vector(ambient, i));
        s.pivots_.push_back(i);
    }
    return s;
}

Subspace Subspace::from_reduced(std::size_t ambient, std::vector<Vector> rows, std::vector<std::size_t> pivots) {
    if (rows.size() != pivots.size()) throw DimensionError("from_reduced: pivot count mismatch");
    Subspace s(ambient);
    s.basis_ = std::move(rows);
    s.pivots_ = std::move(pivots);
    return s;
}

Matrix Subspace::basis_matrix() const { return Matrix::from_columns(ambient_, basis_); }

Vector Subspace::coords(const Vector& v) const {
    if (v.size() != ambient_) throw DimensionError("Subspace::coords: length mismatch");
    Vector c(basis_.size());
    for (std::size_t i = 0; i < pivots_.size(); ++i) c[i] = v[pivots_[i]];
    return c;
}

bool Subspace::contains(const Vector& v) const {
    if (v.size() != ambient_) throw DimensionError("Subspace::contains: length mismatch");
    Vector r = v;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        const Rational c = r[pivots_[i]];
        add_scaled(r, -c, basis_[i]);
    }
    return bimodconn::is_zero(r);
}

bool Subspace::contains(const Subspace& other) const { return !first_outside(other).has_value(); }

std::optional<Vector> Subspace::first_outside(const Subspace& other) const {
    for (const auto& v : other.basis_) {
        if (!contains(v)) return v;
    }
    return std::nullopt;
}

Subspace kernel(const Matrix& f) {
    const RowEchelon e = row_reduce(f);
    std::vector<bool> is_pivot(f.cols(), false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<Vector> basis;
    for (std::size_t free = 0; free < f.cols(); ++free) {
        if (is_pivot[free]) continue;
        Vector v(f.cols());
        v[free] = 1;
        for (std::size_t r = 0; r < e.rank; ++r) v[e.pivots[r]] = -e.reduced(r, free);
        basis.push_back(std::move(v));
    }
    return Subspace::span(f.cols(), basis);
}

Subspace image(const Matrix& f) {
    std::vector<Vector> cols;
    cols.reserve(f.cols());
    for (std::size_t j = 0; j < f.cols(); ++j) cols.push_back(f.column(j));
    return Subspace::span(f.rows(), cols);
}

Subspace intersect(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient()) throw DimensionError("intersect: ambient mismatch");
    // x = A s = B t  <=>  [A | -B] (s, t) = 0
    Matrix stacked(a.ambient(), a.dim() + b.dim());
    for (std::size_t j = 0; j < a.dim(); ++j) {
        for (std::size_t i = 0; i < a.ambient(); ++i) stacked(i, j) = a.basis()[j][i];
    }
    for (std::size_t j = 0; j < b.dim(); ++j) {
        for (std::size_t i = 0; i < b.ambient(); ++i) stacked(i, a.dim() + j) = -b.basis()[j][i];
    }
    std::vector<Vector> vectors;
    const Subspace solutions = kernel(stacked);
    for (const auto& st : solutions.basis()) {
        Vector x(a.ambient());
        for (std::size_t j = 0; j < a.dim(); ++j) add_scaled(x, st[j], a.basis()[j]);
        vectors.push_back(std::move(x));
    }
    return Subspace::span(a.ambient(), vectors);
}

Subspace sum(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient()) throw DimensionError("sum: ambient mismatch");
    std::vector<Vector> all = a.basis();
    all.insert(all.end(), b.basis().begin(), b.basis().end());
    return Subspace::span(a.ambient(), all);
}

Vector QuotientSpace::project(const Vector& v) const { return projection * v; }
Vector QuotientSpace::lift(const Vector& q) const { return section * q; }

QuotientSpace quotient(std::size_t total, const Subspace& sub) {
    if (sub.ambient() != total) {
        throw DimensionError("quotient: subspace lives in dimension " + std::to_string(sub.ambient()) +
                             ", total space has dimension " + std::to_string(total));
    }
    QuotientSpace q;
    q.total = total;
    q.sub = sub;
    std::vector<bool> is_pivot(total, false);
    for (auto p : sub.pivots()) is_pivot[p] = true;
    for (std::size_t i = 0; i < total; ++i) {
        if (!is_pivot[i]) q.complement.push_back(i);
    }
    // projection(v)[j] = v[c_j] - sum_i basis_i[c_j] * v[p_i]
    q.projection = Matrix(q.complement.size(), total);
    q.section = Matrix(total, q.complement.size());
    for (std::size_t j = 0; j < q.complement.size(); ++j) {
        const std::size_t c = q.complement[j];
        q.projection(j, c) = 1;
        for (std::size_t i = 0; i < sub.dim(); ++i) {
            q.projection(j, sub.pivots()[i]) -= sub.basis()[i][c];
        }
        q.section(c, j) = 1;
    }
    return q;
}

Factorization factor_through(const Matrix& f, const Matrix& g) {
    if (f.cols() != g.cols()) throw DimensionError("factor_through: f and g must share a domain");
    const RowEchelon e = row_reduce(f);
    if (e.rank != f.rows()) {
        throw PreconditionError("factor_through: f is not surjective (rank " + std::to_string(e.rank) + " < " +
                                std::to_string(f.rows()) + ")");
    }
    // Right inverse of f supported on its pivot columns.
    Matrix square(f.rows(), f.rows());
    for (std::size_t i = 0; i < f.rows(); ++i) {
        for (std::size_t k = 0; k < f.rows(); ++k) square(i, k) = f(i, e.pivots[k]);
    }
    const Matrix inv = *inverse(square);
    Matrix section(f.cols(), f.rows());
    for (std::size_t k = 0; k < f.rows(); ++k) {
        for (std::size_t j = 0; j < f.rows(); ++j) section(e.pivots[k], j) = inv(k, j);
    }
    Matrix h = g * section;
    if (h * f == g) return {std::move(h), std::nullopt};
    const Subspace ker_f = kernel(f);
    for (const auto& v : ker_f.basis()) {
        if (!is_zero(g * v)) return {std::nullopt, v};
    }
    throw std::logic_error("factor_through: no factorization yet ker f is inside ker g");
}

void SpanBuilder::reduce(Vector& v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (sgn(v[pivots_[i]]) == 0) continue;
        const Rational c = v[pivots_[i]];
        add_scaled(v, -c, rows_[i]);
    }
}

bool SpanBuilder::add(Vector v) {
    if (v.size() != ambient_) throw DimensionError("SpanBuilder::add: length mismatch");
    if (rows_.size() == ambient_) return false;
    reduce(v);
    auto it = std::find_if(v.begin(), v.end(), [](const Rational& x) { return sgn(x) != 0; });
    if (it == v.end()) return false;
    const auto pivot = static_cast<std::size_t>(it - v.begin());
    const Rational inv = 1 / v[pivot];
    for (auto& x : v) {
        if (sgn(x) != 0) x *= inv;
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
}

bool SpanBuilder::contains(Vector v) const {
    reduce(v);
    return is_zero(v);
}

Subspace SpanBuilder::subspace() const {
    Matrix m = Matrix::from_rows(ambient_, rows_);
    const RowEchelon e = row_reduce(std::move(m));
    std::vector<Vector> rows;
    rows.reserve(e.rank);
    for (std::size_t i = 0; i < e.rank; ++i) rows.push_back(e.reduced.row(i));
    return Subspace::from_reduced(ambient_, std::move(rows), e.pivots);
}

}  // namespace bimodconn
