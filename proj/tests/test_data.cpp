#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "dsdl/coding.hpp"
#include "dsdl/dataio.hpp"

using namespace dsdl;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() /
                   ("dsdl_data_test_" + std::to_string(++counter));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_bytes(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

void put_u32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& s, float f) {
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(f));
    std::memcpy(&bits, &f, sizeof(bits));
    put_u32(s, bits);
}

}  // namespace

TEST_SUITE_BEGIN("data");

TEST_CASE("fmat round-trip is exact at f32 precision") {
    const fs::path dir = temp_dir();
    Rng rng(61);
    Matrix m(5, 7, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m.data()[i] = static_cast<double>(static_cast<float>(rng.normal() * 12.3));
    }
    const std::string path = (dir / "m.fmat").string();
    save_fmat(m, path);
    Matrix back = load_fmat(path);
    REQUIRE(back.same_shape(m));
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(back.data()[i] == m.data()[i]);
}

TEST_CASE("fmat widening truncates doubles to f32") {
    const fs::path dir = temp_dir();
    Matrix m(1, 1, 0.1);  // 0.1 is not f32-representable
    const std::string path = (dir / "w.fmat").string();
    save_fmat(m, path);
    Matrix back = load_fmat(path);
    CHECK(back(0, 0) == static_cast<double>(static_cast<float>(0.1)));
    CHECK(back(0, 0) != 0.1);
}

TEST_CASE("hand-encoded fmat fixture decodes to the expected values") {
    const fs::path dir = temp_dir();
    std::string bytes = "FMAT";
    put_u32(bytes, 1);
    put_u32(bytes, 2);
    put_u32(bytes, 3);
    const float values[6] = {1.0f, -2.5f, 3.25f, 0.0f, 7.5f, -0.125f};
    for (float v : values) put_f32(bytes, v);
    const fs::path path = dir / "fixture.fmat";
    write_bytes(path, bytes);
    Matrix m = load_fmat(path.string());
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(m.data()[i] == static_cast<double>(values[i]));
    }
}

TEST_CASE("fmat loader rejects malformed files") {
    const fs::path dir = temp_dir();

    std::string good = "FMAT";
    put_u32(good, 1);
    put_u32(good, 2);
    put_u32(good, 2);
    for (int i = 0; i < 4; ++i) put_f32(good, 1.0f);

    SUBCASE("bad magic") {
        std::string bytes = good;
        bytes[0] = 'X';
        write_bytes(dir / "bad.fmat", bytes);
        CHECK_THROWS_AS(load_fmat((dir / "bad.fmat").string()), IoError);
    }
    SUBCASE("truncated payload") {
        write_bytes(dir / "trunc.fmat", good.substr(0, good.size() - 4));
        CHECK_THROWS_AS(load_fmat((dir / "trunc.fmat").string()), IoError);
    }
    SUBCASE("trailing bytes") {
        write_bytes(dir / "trail.fmat", good + "zz");
        CHECK_THROWS_AS(load_fmat((dir / "trail.fmat").string()), IoError);
    }
    SUBCASE("unsupported version") {
        std::string bytes = good;
        bytes[4] = 2;
        write_bytes(dir / "ver.fmat", bytes);
        CHECK_THROWS_AS(load_fmat((dir / "ver.fmat").string()), IoError);
    }
    SUBCASE("non-finite payload") {
        std::string bytes = "FMAT";
        put_u32(bytes, 1);
        put_u32(bytes, 1);
        put_u32(bytes, 1);
        put_f32(bytes, std::numeric_limits<float>::infinity());
        write_bytes(dir / "inf.fmat", bytes);
        CHECK_THROWS_AS(load_fmat((dir / "inf.fmat").string()), IoError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_fmat((dir / "nope.fmat").string()), IoError);
    }
}

TEST_CASE("glove loader resolves single and multi-word classes") {
    const fs::path dir = temp_dir();
    const fs::path path = dir / "glove.txt";
    {
        std::ofstream out(path);
        out << "traffic 1.0 2.0 3.0\n";
        out << "dog -1.0 0.5 2.5\n";
        out << "light 3.0 4.0 5.0\n";
        out << "cat 0.0 0.0 1.0\n";
    }
    SemanticSpace space =
        load_glove(path.string(), {"dog", "traffic light", "cat"});
    CHECK(space.embedding_dim() == 3);
    CHECK(space.embeddings(0, 0) == -1.0);
    CHECK(space.embeddings(2, 0) == 2.5);
    // averaged pair
    CHECK(space.embeddings(0, 1) == doctest::Approx(2.0));
    CHECK(space.embeddings(1, 1) == doctest::Approx(3.0));
    CHECK(space.embeddings(2, 1) == doctest::Approx(4.0));

    try {
        load_glove(path.string(), {"dog", "unicorn"});
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("unicorn") != std::string::npos);
    }
}

TEST_CASE("glove loader enforces a consistent dimension") {
    const fs::path dir = temp_dir();
    const fs::path path = dir / "ragged.txt";
    {
        std::ofstream out(path);
        out << "dog 1.0 2.0\n";
        out << "cat 1.0 2.0 3.0\n";
    }
    CHECK_THROWS_AS(load_glove(path.string(), {"dog", "cat"}), IoError);
}

TEST_CASE("glove save/load round-trip") {
    const fs::path dir = temp_dir();
    Rng rng(62);
    Matrix emb(4, 3, 0.0);
    for (std::size_t i = 0; i < emb.size(); ++i) emb.data()[i] = rng.normal();
    SemanticSpace space(emb, {"a", "b", "c"});
    const std::string path = (dir / "emb.txt").string();
    save_glove(space, path);
    SemanticSpace back = load_glove(path, space.class_names);
    for (std::size_t i = 0; i < emb.size(); ++i) {
        CHECK(back.embeddings.data()[i] == emb.data()[i]);
    }
}

TEST_CASE("label csv parses, validates and round-trips") {
    const fs::path dir = temp_dir();
    const fs::path path = dir / "labels.csv";
    {
        std::ofstream out(path);
        out << "id,cat,dog\n";
        out << "a,1,0\n";
        out << "b,0,1\n";
    }
    LabelFile lf = load_labels(path.string());
    CHECK(lf.class_names == std::vector<std::string>{"cat", "dog"});
    CHECK(lf.ids == std::vector<std::string>{"a", "b"});
    CHECK(lf.labels(0, 0) == 1.0);
    CHECK(lf.labels(1, 0) == 0.0);
    CHECK(lf.labels(0, 1) == 0.0);
    CHECK(lf.labels(1, 1) == 1.0);

    // expected-order enforcement names both orders
    try {
        load_labels(path.string(), {"dog", "cat"});
        FAIL("expected IoError");
    } catch (const IoError& e) {
        const std::string what = e.what();
        CHECK(what.find("cat,dog") != std::string::npos);
        CHECK(what.find("dog,cat") != std::string::npos);
    }

    const std::string copy = (dir / "copy.csv").string();
    save_labels(lf, copy);
    LabelFile back = load_labels(copy, lf.class_names);
    CHECK(back.ids == lf.ids);
    for (std::size_t i = 0; i < lf.labels.size(); ++i) {
        CHECK(back.labels.data()[i] == lf.labels.data()[i]);
    }
}

TEST_CASE("label csv rejects malformed rows") {
    const fs::path dir = temp_dir();

    SUBCASE("non-binary cell with row number") {
        const fs::path path = dir / "bad.csv";
        {
            std::ofstream out(path);
            out << "id,cat,dog\n";
            out << "a,1,0\n";
            out << "b,2,1\n";
        }
        try {
            load_labels(path.string());
            FAIL("expected IoError");
        } catch (const IoError& e) {
            const std::string what = e.what();
            CHECK(what.find("row 3") != std::string::npos);
            CHECK(what.find("'2'") != std::string::npos);
        }
    }
    SUBCASE("column count mismatch") {
        const fs::path path = dir / "cols.csv";
        {
            std::ofstream out(path);
            out << "id,cat,dog\n";
            out << "a,1\n";
        }
        CHECK_THROWS_AS(load_labels(path.string()), IoError);
    }
    SUBCASE("bad header") {
        const fs::path path = dir / "hdr.csv";
        {
            std::ofstream out(path);
            out << "cat,dog\n";
        }
        CHECK_THROWS_AS(load_labels(path.string()), IoError);
    }
}

TEST_CASE("noise-free planted model inverts exactly") {
    SynthSpec spec;
    spec.feature_dim = 24;
    spec.class_count = 6;
    spec.sample_count = 40;
    spec.seed = 63;
    spec.noise_sigma = 0.0;
    SynthOutput out = synth_generate(spec);

    // planted dictionary columns are orthonormal
    Matrix gram = matmul(transpose(out.planted_dictionary), out.planted_dictionary);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(gram(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
        }

    CodeBatch codes = solve_codes(out.planted_dictionary, out.train.inputs, 1e-12);
    for (std::size_t i = 0; i < codes.alpha.size(); ++i) {
        CHECK(std::abs(codes.alpha.data()[i] - out.train_codes.data()[i]) < 1e-6);
    }
    // thresholding the recovered codes at 1.0 reproduces the labels
    for (std::size_t i = 0; i < codes.alpha.size(); ++i) {
        CHECK((codes.alpha.data()[i] > 1.0 ? 1.0 : 0.0) == out.train.labels.data()[i]);
    }
    // every sample has at least one positive
    CHECK(out.train.empty_label_samples() == 0);
}

TEST_CASE("synth output is byte-identical for a fixed seed") {
    const fs::path dir_a = temp_dir();
    const fs::path dir_b = temp_dir();
    SynthSpec spec;
    spec.feature_dim = 16;
    spec.class_count = 4;
    spec.sample_count = 20;
    spec.test_count = 8;
    spec.seed = 64;
    spec.noise_sigma = 0.05;
    synth_write(synth_generate(spec), dir_a.string());
    synth_write(synth_generate(spec), dir_b.string());
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const auto name = entry.path().filename();
        CHECK(read_bytes(entry.path()) == read_bytes(dir_b / name));
    }
    CHECK(fs::exists(dir_a / "features_test.fmat"));
}

TEST_CASE("synth label marginals track the positive rate") {
    SynthSpec spec;
    spec.feature_dim = 12;
    spec.class_count = 8;
    spec.sample_count = 1500;
    spec.seed = 65;
    SynthOutput out = synth_generate(spec);
    const double rate = sum(out.train.labels) /
                        static_cast<double>(out.train.labels.size());
    CHECK(rate == doctest::Approx(0.3).epsilon(0.17));
    CHECK(std::abs(rate - 0.3) < 0.05);
}

TEST_CASE("synth rejects impossible shapes") {
    SynthSpec spec;
    spec.feature_dim = 4;
    spec.class_count = 4;
    CHECK_THROWS_AS(synth_generate(spec), DimensionError);
}

TEST_SUITE_END();
