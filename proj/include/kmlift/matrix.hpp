#pragma once

#include <cstddef>
#include <vector>

#include "kmlift/errors.hpp"
#include "kmlift/rational.hpp"

namespace kmlift {

/// Small dense row-major matrix over a field (Rational, QSqrt2 or double).
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, FieldTraits<T>::zero()) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = FieldTraits<T>::one();
        return m;
    }

    static Matrix from_columns(const std::vector<std::vector<T>>& columns, std::size_t rows) {
        Matrix m(rows, columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].size() != rows) throw Error(ErrorKind::DimensionMismatch, "column length");
            for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<T> column(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_column(std::size_t j, const std::vector<T>& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw Error(ErrorKind::DimensionMismatch, "matrix product");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (FieldTraits<T>::is_zero(a(i, k))) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }

    friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v) {
        if (a.cols_ != v.size()) throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
        std::vector<T> out(a.rows_, FieldTraits<T>::zero());
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) out[i] += a(i, k) * v[k];
        return out;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
        return a;
    }
    friend Matrix operator-(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
        return a;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    template <class U, class F>
    Matrix<U> map(F f) const {
        Matrix<U> out(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

namespace detail {
template <class T>
std::size_t choose_pivot(const Matrix<T>& m, std::size_t col, std::size_t start) {
    std::size_t best = m.rows();
    if constexpr (FieldTraits<T>::exact) {
        for (std::size_t r = start; r < m.rows(); ++r)
            if (!FieldTraits<T>::is_zero(m(r, col))) return r;
    } else {
        double best_abs = 0.0;
        for (std::size_t r = start; r < m.rows(); ++r) {
            const double a = m(r, col) < 0 ? -m(r, col) : m(r, col);
            if (a > best_abs) {
                best_abs = a;
                best = r;
            }
        }
    }
    return best;
}
}  // namespace detail

/// Gauss-Jordan reduction of [a | b]; returns the solution x of a x = b for square invertible a.
template <class T>
Matrix<T> solve(Matrix<T> a, Matrix<T> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.rows() != n) throw Error(ErrorKind::DimensionMismatch, "solve");
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t p = detail::choose_pivot(a, c, c);
        if (p == n) throw Error(ErrorKind::Degenerate, "singular matrix");
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(p, j), b(c, j));
        }
        const T inv = FieldTraits<T>::one() / a(c, c);
        for (std::size_t j = 0; j < n; ++j) a(c, j) = a(c, j) * inv;
        for (std::size_t j = 0; j < b.cols(); ++j) b(c, j) = b(c, j) * inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || FieldTraits<T>::is_zero(a(r, c))) continue;
            const T f = a(r, c);
            for (std::size_t j = 0; j < n; ++j) a(r, j) -= f * a(c, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(r, j) -= f * b(c, j);
        }
    }
    return b;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
    return solve(a, Matrix<T>::identity(a.rows()));
}

template <class T>
T determinant(Matrix<T> a) {
    const std::size_t n = a.rows();
    T det = FieldTraits<T>::one();
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t p = detail::choose_pivot(a, c, c);
        if (p == n) return FieldTraits<T>::zero();
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
            det = -det;
        }
        det *= a(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            if (FieldTraits<T>::is_zero(a(r, c))) continue;
            const T f = a(r, c) / a(c, c);
            for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
        }
    }
    return det;
}

/// Rank of a matrix (exact fields only make this reliable).
template <class T>
std::size_t rank(Matrix<T> a) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        const std::size_t p = detail::choose_pivot(a, c, r);
        if (p == a.rows()) continue;
        if constexpr (!FieldTraits<T>::exact) {
            if (FieldTraits<T>::abs(a(p, c)) < 1e-12) continue;
        }
        for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(r, j));
        for (std::size_t i = r + 1; i < a.rows(); ++i) {
            if (FieldTraits<T>::is_zero(a(i, c))) continue;
            const T f = a(i, c) / a(r, c);
            for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
        }
        ++r;
    }
    return r;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
    T s = FieldTraits<T>::zero();
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// (a, b) = a^T G b.
template <class T>
T bilinear(const Matrix<T>& gram, const std::vector<T>& a, const std::vector<T>& b) {
    return dot(a, gram * b);
}

template <class T>
std::vector<T> axpy(const std::vector<T>& x, const T& alpha, const std::vector<T>& y) {
    std::vector<T> out(x);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * y[i];
    return out;
}

template <class T>
std::vector<T> scaled(const std::vector<T>& x, const T& alpha) {
    std::vector<T> out(x);
    for (auto& v : out) v *= alpha;
    return out;
}

template <class U, class T, class F>
std::vector<U> map_vector(const std::vector<T>& v, F f) {
    std::vector<U> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(f(x));
    return out;
}

Matrix<double> to_double(const Matrix<Rational>& m);
Matrix<double> to_double(const Matrix<QSqrt2>& m);
std::vector<double> to_double(const RationalVector& v);
std::vector<double> to_double(const std::vector<QSqrt2>& v);

}  // namespace kmlift
