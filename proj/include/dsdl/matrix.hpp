#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <vector>

#include "dsdl/error.hpp"

namespace dsdl {

/// Dense row-major matrix of 64-bit reals. Values are immutable once a
/// matrix has been handed out by an operation; all public operations
/// guarantee finite entries and throw NumericError otherwise.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    /// Takes ownership of row-major data; length must equal rows*cols.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    /// Throws NumericError naming `op` if any entry is NaN/Inf.
    void check_finite(const char* op) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
Matrix hadamard(const Matrix& a, const Matrix& b);
double sum(const Matrix& a);
double frobenius_norm_sq(const Matrix& a);

/// Cholesky factorization of a symmetric positive-definite matrix,
/// reusable across many right-hand sides. There is deliberately no
/// inverse() anywhere: systems are always solved through this.
class SpdFactor {
public:
    /// Requires a square matrix, symmetric within 1e-9 relative to its
    /// largest entry. Throws NumericError with the failing pivot index
    /// when the matrix is not positive definite.
    explicit SpdFactor(const Matrix& m);

    std::size_t dim() const { return lower_.rows(); }

    /// Solves m * X = rhs column by column.
    Matrix solve(const Matrix& rhs) const;

private:
    Matrix lower_;
};

/// One-shot factorize-and-solve of m * X = rhs.
Matrix solve_spd(const Matrix& m, const Matrix& rhs);

}  // namespace dsdl
