#include "dsdl/matrix.hpp"

#include <cmath>
#include <string>

namespace dsdl {

namespace {

std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": shape mismatch (" + shape_str(a) +
                             " vs " + shape_str(b) + ")");
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("Matrix: dimensions must be positive");
    }
    if (!std::isfinite(fill)) {
        throw NumericError("Matrix: non-finite fill value");
    }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("Matrix: dimensions must be positive");
    }
    if (data_.size() != rows * cols) {
        throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    check_finite("Matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    if (r == 0) throw DimensionError("Matrix::from_rows: no rows");
    const std::size_t c = rows.begin()->size();
    Matrix m(r, c, 0.0);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw DimensionError("Matrix::from_rows: ragged rows");
        }
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    m.check_finite("Matrix::from_rows");
    return m;
}

void Matrix::check_finite(const char* op) const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw NumericError(std::string(op) + ": non-finite value at (" +
                               std::to_string(i / cols_) + "," +
                               std::to_string(i % cols_) + ")");
        }
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions disagree (" + shape_str(a) +
                             " * " + shape_str(b) + ")");
    }
    Matrix out(a.rows(), b.cols(), 0.0);
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    const double* ad = a.data();
    const double* bd = b.data();
    double* od = out.data();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ad[i * k + p];
            if (aip == 0.0) continue;
            const double* brow = bd + p * m;
            double* orow = od + i * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
        }
    }
    out.check_finite("matmul");
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out(a.rows(), a.cols(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
    out.check_finite("add");
    return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "sub");
    Matrix out(a.rows(), a.cols(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
    out.check_finite("sub");
    return out;
}

Matrix scale(const Matrix& a, double s) {
    Matrix out(a.rows(), a.cols(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * s;
    out.check_finite("scale");
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out(a.rows(), a.cols(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    out.check_finite("hadamard");
    return out;
}

double sum(const Matrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i];
    if (!std::isfinite(acc)) throw NumericError("sum: non-finite result");
    return acc;
}

double frobenius_norm_sq(const Matrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * a.data()[i];
    if (!std::isfinite(acc)) throw NumericError("frobenius_norm_sq: non-finite result");
    return acc;
}

SpdFactor::SpdFactor(const Matrix& m) : lower_(m.rows(), m.rows(), 0.0) {
    if (m.rows() != m.cols()) {
        throw DimensionError("solve_spd: matrix is not square (" + shape_str(m) + ")");
    }
    const std::size_t n = m.rows();
    double max_abs = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        max_abs = std::max(max_abs, std::abs(m.data()[i]));
    }
    const double sym_tol = 1e-9 * std::max(1.0, max_abs);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > sym_tol) {
                throw NumericError("solve_spd: matrix not symmetric at (" +
                                   std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= lower_(j, k) * lower_(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            throw NumericError("solve_spd: matrix not positive definite at pivot " +
                               std::to_string(j));
        }
        const double ljj = std::sqrt(diag);
        lower_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = m(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= lower_(i, k) * lower_(j, k);
            lower_(i, j) = v / ljj;
        }
    }
}

Matrix SpdFactor::solve(const Matrix& rhs) const {
    const std::size_t n = lower_.rows();
    if (rhs.rows() != n) {
        throw DimensionError("solve_spd: rhs has " + std::to_string(rhs.rows()) +
                             " rows, expected " + std::to_string(n));
    }
    Matrix x(rhs.rows(), rhs.cols(), 0.0);
    std::vector<double> y(n);
    for (std::size_t col = 0; col < rhs.cols(); ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = rhs(i, col);
            for (std::size_t k = 0; k < i; ++k) v -= lower_(i, k) * y[k];
            y[i] = v / lower_(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double v = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) v -= lower_(k, ii) * x(k, col);
            x(ii, col) = v / lower_(ii, ii);
        }
    }
    x.check_finite("solve_spd");
    return x;
}

Matrix solve_spd(const Matrix& m, const Matrix& rhs) {
    return SpdFactor(m).solve(rhs);
}

}  // namespace dsdl
