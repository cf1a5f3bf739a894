#include <doctest.h>

#include <cmath>
#include <cstring>

#include "dsdl/matrix.hpp"
#include "dsdl/rng.hpp"

using namespace dsdl;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scl = 1.0) {
    Matrix m(rows, cols, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = scl * rng.normal();
    return m;
}

// Independent product oracle, plain triple loop over (i, j, k).
Matrix naive_product(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    return out;
}

Matrix random_spd(std::size_t n, Rng& rng) {
    // A^T A + n I is comfortably positive definite
    Matrix a = random_matrix(n, n, rng);
    Matrix m = matmul(transpose(a), a);
    for (std::size_t i = 0; i < n; ++i) m(i, i) += static_cast<double>(n);
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    REQUIRE(a.same_shape(b));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

}  // namespace

TEST_SUITE_BEGIN("matrix");

TEST_CASE("matmul identity and hand arithmetic") {
    Rng rng(1);
    Matrix a = random_matrix(3, 3, rng);
    CHECK(max_abs_diff(matmul(Matrix::identity(3), a), a) == 0.0);

    Matrix l = Matrix::from_rows({{1, 2}, {3, 4}});
    Matrix r = Matrix::from_rows({{1}, {1}});
    Matrix p = matmul(l, r);
    CHECK(p(0, 0) == 3.0);
    CHECK(p(1, 0) == 7.0);
}

TEST_CASE("matmul matches the triple-loop oracle") {
    Rng rng(2);
    Matrix a = random_matrix(5, 4, rng);
    Matrix b = random_matrix(4, 3, rng);
    CHECK(max_abs_diff(matmul(a, b), naive_product(a, b)) == 0.0);
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
    Rng rng(3);
    Matrix a = random_matrix(2, 3, rng);
    Matrix b = random_matrix(4, 2, rng);
    CHECK_THROWS_AS(matmul(a, b), DimensionError);
}

TEST_CASE("matmul associativity within 1e-10 relative") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a = random_matrix(6, 5, rng);
        Matrix b = random_matrix(5, 7, rng);
        Matrix c = random_matrix(7, 4, rng);
        Matrix left = matmul(matmul(a, b), c);
        Matrix right = matmul(a, matmul(b, c));
        const double rel = std::sqrt(frobenius_norm_sq(sub(left, right)) /
                                     (1e-300 + frobenius_norm_sq(left)));
        CHECK(rel < 1e-10);
    }
}

TEST_CASE("transpose basics") {
    Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
    Matrix t = transpose(m);
    CHECK(t(0, 1) == 3.0);
    CHECK(t(1, 0) == 2.0);

    Rng rng(5);
    Matrix a = random_matrix(4, 7, rng);
    CHECK(max_abs_diff(transpose(transpose(a)), a) == 0.0);

    Matrix row(1, 5, 2.0);
    Matrix col = transpose(row);
    CHECK(col.rows() == 5);
    CHECK(col.cols() == 1);
}

TEST_CASE("elementwise suite") {
    CHECK(frobenius_norm_sq(Matrix(2, 3, 0.0)) == 0.0);
    CHECK(frobenius_norm_sq(Matrix::from_rows({{3, 4}})) == 25.0);

    Rng rng(6);
    Matrix a = random_matrix(3, 3, rng);
    CHECK(frobenius_norm_sq(add(a, scale(a, -1.0))) == 0.0);
    CHECK(sum(sub(a, a)) == 0.0);

    Matrix h = hadamard(a, a);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(h.data()[i] == a.data()[i] * a.data()[i]);
    }

    Matrix b = random_matrix(3, 4, rng);
    CHECK_THROWS_AS(add(a, b), DimensionError);
    CHECK_THROWS_AS(hadamard(a, b), DimensionError);
}

TEST_CASE("non-finite results are rejected") {
    Matrix big(1, 1, 1e308);
    CHECK_THROWS_AS(scale(big, 1e10), NumericError);
    CHECK_THROWS_AS(add(big, big), NumericError);
    CHECK_THROWS_AS(Matrix(1, 1, std::nan("")), NumericError);
    CHECK_THROWS_AS(Matrix(1, 2, std::vector<double>{1.0, std::nan("")}), NumericError);
}

TEST_CASE("solve_spd identity and scalar systems") {
    Rng rng(7);
    Matrix b = random_matrix(4, 2, rng);
    CHECK(max_abs_diff(solve_spd(Matrix::identity(4), b), b) == 0.0);

    Matrix two = scale(Matrix::identity(4), 2.0);
    CHECK(max_abs_diff(solve_spd(two, b), scale(b, 0.5)) < 1e-15);
}

TEST_CASE("solve_spd 2x2 against the Cramer's-rule oracle") {
    Matrix m = Matrix::from_rows({{2.5, 1.0}, {1.0, 2.5}});
    Matrix rhs = Matrix::from_rows({{4.0}, {5.0}});
    // Cramer: det = 2.5*2.5 - 1, x0 = (4*2.5 - 1*5)/det, x1 = (2.5*5 - 1*4)/det
    const double det = 2.5 * 2.5 - 1.0;
    const double x0 = (4.0 * 2.5 - 5.0) / det;
    const double x1 = (2.5 * 5.0 - 4.0) / det;
    Matrix x = solve_spd(m, rhs);
    CHECK(x(0, 0) == doctest::Approx(x0).epsilon(1e-12));
    CHECK(x(1, 0) == doctest::Approx(x1).epsilon(1e-12));
    CHECK(x(0, 0) == doctest::Approx(0.952381).epsilon(1e-6));
    CHECK(x(1, 0) == doctest::Approx(1.619048).epsilon(1e-6));
}

TEST_CASE("solve_spd error reporting") {
    Rng rng(8);
    CHECK_THROWS_AS(solve_spd(random_matrix(3, 4, rng), random_matrix(3, 1, rng)),
                    DimensionError);

    Matrix asym = Matrix::from_rows({{1.0, 2.0}, {0.0, 1.0}});
    CHECK_THROWS_AS(SpdFactor{asym}, NumericError);

    Matrix not_pd = Matrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
    try {
        SpdFactor f(not_pd);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("pivot 1") != std::string::npos);
    }

    Matrix rhs_bad(3, 1, 1.0);
    CHECK_THROWS_AS(SpdFactor(Matrix::identity(2)).solve(rhs_bad), DimensionError);
}

TEST_CASE("solve_spd residual bound on random well-conditioned systems") {
    Rng rng(9);
    for (std::size_t n : {2u, 8u, 33u, 128u, 256u}) {
        Matrix m = random_spd(n, rng);
        Matrix rhs = random_matrix(n, 3, rng);
        Matrix x = solve_spd(m, rhs);
        const double resid = std::sqrt(frobenius_norm_sq(sub(matmul(m, x), rhs)));
        CHECK(resid <= 1e-8 * (1.0 + std::sqrt(frobenius_norm_sq(rhs))));
    }
}

TEST_CASE("operations are deterministic") {
    Rng rng1(10), rng2(10);
    Matrix a1 = random_matrix(9, 9, rng1), a2 = random_matrix(9, 9, rng2);
    Matrix b1 = random_matrix(9, 9, rng1), b2 = random_matrix(9, 9, rng2);
    CHECK(std::memcmp(a1.data(), a2.data(), a1.size() * sizeof(double)) == 0);
    Matrix p1 = matmul(a1, b1), p2 = matmul(a2, b2);
    CHECK(std::memcmp(p1.data(), p2.data(), p1.size() * sizeof(double)) == 0);
    Matrix s1 = solve_spd(random_spd(16, rng1), Matrix(16, 1, 1.0));
    Matrix s2 = solve_spd(random_spd(16, rng2), Matrix(16, 1, 1.0));
    CHECK(std::memcmp(s1.data(), s2.data(), s1.size() * sizeof(double)) == 0);
}

TEST_SUITE_END();
