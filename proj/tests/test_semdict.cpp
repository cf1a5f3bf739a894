#include <doctest.h>

#include <cmath>

#include "dsdl/semantic.hpp"

using namespace dsdl;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

std::vector<std::string> class_names(std::size_t c) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < c; ++j) names.push_back("class" + std::to_string(j));
    return names;
}

SemanticSpace random_space(std::size_t k, std::size_t c, Rng& rng) {
    return SemanticSpace(random_matrix(k, c, rng), class_names(c));
}

double leaky(double v) { return v >= 0.0 ? v : 0.2 * v; }

double max_abs_diff(const Matrix& a, const Matrix& b) {
    REQUIRE(a.same_shape(b));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

}  // namespace

TEST_SUITE_BEGIN("semdict");

TEST_CASE("semantic space invariants") {
    Rng rng(21);
    CHECK_THROWS_AS(SemanticSpace(random_matrix(4, 1, rng), class_names(1)), DimensionError);
    Matrix with_zero = random_matrix(4, 3, rng);
    for (std::size_t i = 0; i < 4; ++i) with_zero(i, 1) = 0.0;
    CHECK_THROWS_AS(SemanticSpace(with_zero, class_names(3)), NumericError);
    CHECK_THROWS_AS(SemanticSpace(random_matrix(4, 3, rng), class_names(2)), DimensionError);
}

TEST_CASE("dictionary must be undercomplete") {
    Rng rng(22);
    CHECK_THROWS_AS(SemanticDictionary(random_matrix(3, 3, rng)), DimensionError);
    CHECK_THROWS_AS(SemanticDictionary(random_matrix(3, 5, rng)), DimensionError);
    SemanticDictionary d(random_matrix(8, 3, rng));
    CHECK(d.feature_dim() == 8);
    CHECK(d.atom_count() == 3);
}

TEST_CASE("autoencoder admits paper-scale and desk-scale dims") {
    ParamStore store;
    Rng rng(23);
    SemanticAutoencoder paper_scale(300, 1024, 2048, store, rng, "big");
    CHECK(store.at("big.fc1.w").value.rows() == 1024);
    CHECK(store.at("big.fc1.w").value.cols() == 300);
    CHECK(store.at("big.fc2.w").value.rows() == 2048);
    CHECK(store.at("big.fc2.b").value.rows() == 2048);

    SemanticAutoencoder desk(16, 32, 64, store, rng, "small");
    CHECK(store.at("small.fc2.w").value.rows() == 64);
}

TEST_CASE("decoder storage is the encoder's") {
    ParamStore store;
    Rng rng(24);
    SemanticAutoencoder ae(4, 5, 8, store, rng);
    Matrix s = random_matrix(4, 3, rng);
    Matrix d = ae.encode(s);
    Matrix rec1 = ae.decode(d);

    // mutating the shared weight changes the decoder output too
    store.at("psi.fc1.w").value(0, 0) += 1.0;
    Matrix rec2 = ae.decode(d);
    CHECK(max_abs_diff(rec1, rec2) > 0.0);
}

TEST_CASE("tied weights survive an update (value equality, not aliasing)") {
    ParamStore store;
    Rng rng(25);
    SemanticAutoencoder ae(4, 5, 8, store, rng);
    SemanticSpace space = random_space(4, 3, rng);

    // one full training-style step through both passes
    store.zero_grads();
    Matrix d = ae.encode(space.embeddings);
    Matrix rec = ae.decode(d);
    SimilarityLoss sim = similarity_loss(space, rec);
    ae.encode_backward(ae.decode_backward(sim.d_reconstructed));
    sgd_step(store, 0.05, 0.9, 1e-4);

    // decoder must now apply exactly the transposed updated encoder weights
    Matrix d2 = ae.encode(space.embeddings);
    Matrix got = ae.decode(d2);
    const Matrix& w1 = store.at("psi.fc1.w").value;
    const Matrix& w2 = store.at("psi.fc2.w").value;
    Matrix mid = matmul(transpose(w2), d2);
    for (std::size_t i = 0; i < mid.size(); ++i) mid.data()[i] = leaky(mid.data()[i]);
    Matrix want = matmul(transpose(w1), mid);
    CHECK(max_abs_diff(got, want) == 0.0);
}

TEST_CASE("generate_dictionary maps columns independently") {
    ParamStore store;
    Rng rng(26);
    SemanticAutoencoder ae(6, 4, 16, store, rng);
    SemanticSpace space = random_space(6, 3, rng);
    SemanticDictionary dict = ae.generate_dictionary(space);
    CHECK(dict.feature_dim() == 16);
    CHECK(dict.atom_count() == 3);

    // permuting embedding columns permutes atoms identically
    Matrix permuted(6, 3, 0.0);
    const std::size_t perm[3] = {2, 0, 1};
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 6; ++i) permuted(i, j) = space.embeddings(i, perm[j]);
    Matrix d_perm = ae.encode(permuted);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 16; ++i)
            CHECK(d_perm(i, j) == dict.atoms()(i, perm[j]));
}

TEST_CASE("zero weights produce the zero dictionary") {
    ParamStore store;
    Rng rng(27);
    SemanticAutoencoder ae(4, 3, 8, store, rng);
    for (const char* name : {"psi.fc1.w", "psi.fc1.b", "psi.fc2.w", "psi.fc2.b"}) {
        Matrix& v = store.at(name).value;
        for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] = 0.0;
    }
    Matrix d = ae.encode(random_matrix(4, 3, rng));
    CHECK(frobenius_norm_sq(d) == 0.0);
}

TEST_CASE("encode matches a straight-line re-evaluation") {
    ParamStore store;
    Rng rng(28);
    SemanticAutoencoder ae(8, 12, 32, store, rng);
    Matrix s = random_matrix(8, 4, rng);
    Matrix got = ae.encode(s);

    const Matrix& w1 = store.at("psi.fc1.w").value;
    const Matrix& b1 = store.at("psi.fc1.b").value;
    const Matrix& w2 = store.at("psi.fc2.w").value;
    const Matrix& b2 = store.at("psi.fc2.b").value;
    Matrix h = matmul(w1, s);
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) = leaky(h(i, j) + b1(i, 0));
    Matrix out = matmul(w2, h);
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = leaky(out(i, j) + b2(i, 0));
    CHECK(max_abs_diff(got, out) == 0.0);
}

TEST_CASE("generate_dictionary enforces undercompleteness") {
    ParamStore store;
    Rng rng(29);
    SemanticAutoencoder ae(4, 3, 3, store, rng);
    CHECK_THROWS_AS(ae.generate_dictionary(random_space(4, 3, rng)), DimensionError);
}

TEST_CASE("similarity of perfect and antipodal reconstructions") {
    Rng rng(30);
    SemanticSpace space = random_space(5, 4, rng);
    CHECK(similarity_value(space, space.embeddings) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(similarity_value(space, scale(space.embeddings, -1.0)) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(similarity_value(space, scale(space.embeddings, 3.5)) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hand cosine for a single class") {
    Matrix s = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    SemanticSpace space(s, {"a", "b"});
    Matrix rec = Matrix::from_rows({{1.0, 0.0}, {1.0, 1.0}});
    // class a: cos((1,0),(1,1)) = 1/sqrt(2); class b: identical -> 1
    const double expected = (1.0 / std::sqrt(2.0) + 1.0) / 2.0;
    CHECK(similarity_value(space, rec) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero reconstructed column names the class") {
    Rng rng(31);
    SemanticSpace space = random_space(4, 3, rng);
    Matrix rec = random_matrix(4, 3, rng);
    for (std::size_t i = 0; i < 4; ++i) rec(i, 2) = 0.0;
    try {
        similarity_value(space, rec);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("class2") != std::string::npos);
    }
}

TEST_CASE("similarity is invariant to positive column rescaling") {
    Rng rng(32);
    SemanticSpace space = random_space(6, 4, rng);
    Matrix rec = random_matrix(6, 4, rng);
    const double base = similarity_value(space, rec);
    Matrix scaled = rec;
    for (std::size_t i = 0; i < 6; ++i) scaled(i, 2) *= 41.7;
    CHECK(similarity_value(space, scaled) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("similarity stays within [-1, 1] on random reconstructions") {
    Rng rng(33);
    SemanticSpace space = random_space(7, 5, rng);
    for (int trial = 0; trial < 50; ++trial) {
        const double v = similarity_value(space, random_matrix(7, 5, rng));
        CHECK(v >= -1.0 - 1e-12);
        CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("similarity gradient through the tied autoencoder passes grad_check") {
    ParamStore store;
    Rng rng(34);
    SemanticAutoencoder ae(5, 6, 12, store, rng);
    SemanticSpace space = random_space(5, 4, rng);
    const auto closure = [&]() {
        Matrix d = ae.encode(space.embeddings);
        Matrix rec = ae.decode(d);
        SimilarityLoss sim = similarity_loss(space, rec);
        ae.encode_backward(ae.decode_backward(sim.d_reconstructed));
        return sim.value;
    };
    GradCheckReport report = grad_check(closure, store, 1e-4, 1e-5);
    CHECK(report.passed());
}

TEST_SUITE_END();
