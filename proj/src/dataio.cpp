#include "dsdl/dataio.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace dsdl {

namespace {

void require_binary_labels(const Matrix& labels, const char* who) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double v = labels.data()[i];
        if (v != 0.0 && v != 1.0) {
            throw Error(std::string(who) + ": label entries must be 0 or 1");
        }
    }
}

void append_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> words;
    std::istringstream is(s);
    std::string w;
    while (is >> w) words.push_back(w);
    return words;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

LabeledFeatureSet::LabeledFeatureSet(Matrix inputs_in, Matrix labels_in,
                                     std::vector<std::string> ids_in, SemanticSpace sem)
    : inputs(std::move(inputs_in)),
      labels(std::move(labels_in)),
      ids(std::move(ids_in)),
      semantic(std::move(sem)) {
    if (labels.cols() != inputs.cols()) {
        throw DimensionError("LabeledFeatureSet: " + std::to_string(inputs.cols()) +
                             " inputs vs " + std::to_string(labels.cols()) + " label columns");
    }
    if (ids.size() != inputs.cols()) {
        throw DimensionError("LabeledFeatureSet: id count mismatch");
    }
    if (labels.rows() != semantic.class_count()) {
        throw DimensionError("LabeledFeatureSet: " + std::to_string(labels.rows()) +
                             " label rows vs " + std::to_string(semantic.class_count()) +
                             " classes");
    }
    require_binary_labels(labels, "LabeledFeatureSet");
}

std::size_t LabeledFeatureSet::empty_label_samples() const {
    std::size_t n = 0;
    for (std::size_t j = 0; j < labels.cols(); ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < labels.rows(); ++i) col += labels(i, j);
        if (col == 0.0) ++n;
    }
    return n;
}

void save_fmat(const Matrix& m, const std::string& path) {
    m.check_finite("save_fmat");
    std::string bytes;
    bytes.reserve(16 + 4 * m.size());
    bytes += "FMAT";
    append_u32_le(bytes, 1);
    append_u32_le(bytes, static_cast<std::uint32_t>(m.rows()));
    append_u32_le(bytes, static_cast<std::uint32_t>(m.cols()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        const float f = static_cast<float>(m.data()[i]);
        if (!std::isfinite(f)) {
            throw NumericError("save_fmat: value at index " + std::to_string(i) +
                               " does not fit in f32");
        }
        append_u32_le(bytes, std::bit_cast<std::uint32_t>(f));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("save_fmat: cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("save_fmat: write failed for '" + path + "'");
}

Matrix load_fmat(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_fmat: cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 16) throw IoError("load_fmat: '" + path + "' is truncated");
    if (bytes.compare(0, 4, "FMAT") != 0) {
        throw IoError("load_fmat: '" + path + "' has bad magic");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t version = read_u32_le(p + 4);
    if (version != 1) {
        throw IoError("load_fmat: '" + path + "' has unsupported version " +
                      std::to_string(version));
    }
    const std::uint32_t rows = read_u32_le(p + 8);
    const std::uint32_t cols = read_u32_le(p + 12);
    if (rows == 0 || cols == 0) {
        throw IoError("load_fmat: '" + path + "' declares empty dimensions");
    }
    const std::size_t expected = 16 + 4ull * rows * cols;
    if (bytes.size() != expected) {
        throw IoError("load_fmat: '" + path + "' payload is " +
                      std::to_string(bytes.size() - 16) + " bytes, expected " +
                      std::to_string(expected - 16));
    }
    std::vector<double> data(static_cast<std::size_t>(rows) * cols);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const float f = std::bit_cast<float>(read_u32_le(p + 16 + 4 * i));
        if (!std::isfinite(f)) {
            throw IoError("load_fmat: '" + path + "' has non-finite value at index " +
                          std::to_string(i));
        }
        data[i] = static_cast<double>(f);
    }
    return Matrix(rows, cols, std::move(data));
}

SemanticSpace load_glove(const std::string& path, const std::vector<std::string>& class_names) {
    if (class_names.size() < 2) throw ConfigError("load_glove: need at least 2 classes");
    std::unordered_set<std::string> wanted;
    for (const auto& name : class_names) {
        for (const auto& w : split_words(name)) wanted.insert(w);
    }
    std::ifstream in(path);
    if (!in) throw IoError("load_glove: cannot open '" + path + "'");
    std::unordered_map<std::string, std::vector<double>> found;
    std::size_t dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string token;
        is >> token;
        std::vector<double> vec;
        double v;
        while (is >> v) vec.push_back(v);
        if (!is.eof()) {
            throw IoError("load_glove: '" + path + "' line " + std::to_string(lineno) +
                          " has a non-numeric value");
        }
        if (vec.empty()) {
            throw IoError("load_glove: '" + path + "' line " + std::to_string(lineno) +
                          " has no values");
        }
        if (dim == 0) {
            dim = vec.size();
        } else if (vec.size() != dim) {
            throw IoError("load_glove: '" + path + "' line " + std::to_string(lineno) +
                          " has " + std::to_string(vec.size()) + " values, expected " +
                          std::to_string(dim));
        }
        if (wanted.count(token)) found.emplace(token, std::move(vec));
    }
    if (dim == 0) throw IoError("load_glove: '" + path + "' is empty");

    Matrix embeddings(dim, class_names.size(), 0.0);
    std::vector<std::string> missing;
    for (std::size_t j = 0; j < class_names.size(); ++j) {
        const auto words = split_words(class_names[j]);
        if (words.empty()) throw ConfigError("load_glove: empty class name at index " +
                                             std::to_string(j));
        bool ok = true;
        for (const auto& w : words) {
            auto it = found.find(w);
            if (it == found.end()) {
                ok = false;
                break;
            }
            for (std::size_t i = 0; i < dim; ++i) embeddings(i, j) += it->second[i];
        }
        if (!ok) {
            missing.push_back(class_names[j]);
            continue;
        }
        for (std::size_t i = 0; i < dim; ++i) {
            embeddings(i, j) /= static_cast<double>(words.size());
        }
    }
    if (!missing.empty()) {
        std::string msg = "load_glove: no embedding for class";
        msg += missing.size() > 1 ? "es:" : ":";
        for (const auto& name : missing) msg += " '" + name + "'";
        throw IoError(msg);
    }
    return SemanticSpace(std::move(embeddings), class_names);
}

void save_glove(const SemanticSpace& space, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("save_glove: cannot open '" + path + "' for writing");
    out.precision(17);
    for (std::size_t j = 0; j < space.class_count(); ++j) {
        const std::string& name = space.class_names[j];
        if (name.find(' ') != std::string::npos) {
            throw ConfigError("save_glove: class name '" + name + "' contains spaces");
        }
        out << name;
        for (std::size_t i = 0; i < space.embedding_dim(); ++i) {
            out << ' ' << space.embeddings(i, j);
        }
        out << '\n';
    }
    if (!out) throw IoError("save_glove: write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

LabelFile load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_labels: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("load_labels: '" + path + "' is empty");
    auto header = split_csv(strip_cr(line));
    if (header.size() < 3 || header[0] != "id") {
        throw IoError("load_labels: '" + path + "' header must be 'id,<class>,...'");
    }
    LabelFile file;
    file.class_names.assign(header.begin() + 1, header.end());
    std::vector<double> cells;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto row = split_csv(line);
        if (row.size() != header.size()) {
            throw IoError("load_labels: '" + path + "' row " + std::to_string(lineno) +
                          " has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(header.size()));
        }
        file.ids.push_back(row[0]);
        for (std::size_t j = 1; j < row.size(); ++j) {
            if (row[j] == "0") {
                cells.push_back(0.0);
            } else if (row[j] == "1") {
                cells.push_back(1.0);
            } else {
                throw IoError("load_labels: '" + path + "' row " + std::to_string(lineno) +
                              " has non-binary cell '" + row[j] + "'");
            }
        }
    }
    if (file.ids.empty()) throw IoError("load_labels: '" + path + "' has no rows");
    const std::size_t c = file.class_names.size();
    const std::size_t n = file.ids.size();
    // cells are row-per-sample; transpose into class-per-row storage
    std::vector<double> data(c * n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t j = 0; j < c; ++j) data[j * n + s] = cells[s * c + j];
    file.labels = Matrix(c, n, std::move(data));
    return file;
}

LabelFile load_labels(const std::string& path,
                      const std::vector<std::string>& expected_classes) {
    LabelFile file = load_labels(path);
    if (file.class_names != expected_classes) {
        std::string msg = "load_labels: '" + path + "' class order [";
        for (std::size_t i = 0; i < file.class_names.size(); ++i) {
            msg += (i ? "," : "") + file.class_names[i];
        }
        msg += "] does not match expected [";
        for (std::size_t i = 0; i < expected_classes.size(); ++i) {
            msg += (i ? "," : "") + expected_classes[i];
        }
        msg += "]";
        throw IoError(msg);
    }
    return file;
}

void save_labels(const LabelFile& file, const std::string& path) {
    if (file.labels.rows() != file.class_names.size() ||
        file.labels.cols() != file.ids.size()) {
        throw DimensionError("save_labels: inconsistent label file");
    }
    require_binary_labels(file.labels, "save_labels");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("save_labels: cannot open '" + path + "' for writing");
    out << "id";
    for (const auto& name : file.class_names) out << ',' << name;
    out << '\n';
    for (std::size_t s = 0; s < file.ids.size(); ++s) {
        out << file.ids[s];
        for (std::size_t j = 0; j < file.class_names.size(); ++j) {
            out << ',' << (file.labels(j, s) != 0.0 ? '1' : '0');
        }
        out << '\n';
    }
    if (!out) throw IoError("save_labels: write failed for '" + path + "'");
}

namespace {

// Orthonormal columns via modified Gram-Schmidt with one
// reorthogonalization pass.
Matrix orthonormal_columns(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    for (std::size_t j = 0; j < cols; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                double dot = 0.0;
                for (std::size_t i = 0; i < rows; ++i) dot += m(i, k) * m(i, j);
                for (std::size_t i = 0; i < rows; ++i) m(i, j) -= dot * m(i, k);
            }
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < rows; ++i) norm += m(i, j) * m(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-12) throw NumericError("synth_generate: degenerate random dictionary");
        for (std::size_t i = 0; i < rows; ++i) m(i, j) /= norm;
    }
    return m;
}

struct SampledSplit {
    Matrix inputs;
    Matrix labels;
    Matrix codes;
    std::vector<std::string> ids;
};

SampledSplit sample_split(const Matrix& dict, const SynthSpec& spec, std::size_t n,
                          const std::string& id_prefix, Rng& rng) {
    const std::size_t d = spec.feature_dim, c = spec.class_count;
    SampledSplit out;
    out.labels = Matrix(c, n, 0.0);
    out.codes = Matrix(c, n, 0.0);
    out.inputs = Matrix(d, n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        bool any = false;
        while (!any) {
            for (std::size_t j = 0; j < c; ++j) {
                const double y = rng.bernoulli(spec.positive_rate) ? 1.0 : 0.0;
                out.labels(j, s) = y;
                any = any || y > 0.0;
            }
        }
        for (std::size_t j = 0; j < c; ++j) {
            out.codes(j, s) = out.labels(j, s) > 0.0 ? rng.uniform(2.0, 4.0)
                                                     : rng.uniform(-0.3, 0.3);
        }
        for (std::size_t i = 0; i < d; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < c; ++j) v += dict(i, j) * out.codes(j, s);
            if (spec.noise_sigma > 0.0) v += rng.normal(0.0, spec.noise_sigma);
            out.inputs(i, s) = v;
        }
        out.ids.push_back(id_prefix + std::to_string(s));
    }
    return out;
}

}  // namespace

SynthOutput synth_generate(const SynthSpec& spec) {
    if (spec.class_count >= spec.feature_dim) {
        throw DimensionError("synth_generate: need class_count < feature_dim, got " +
                             std::to_string(spec.class_count) + " >= " +
                             std::to_string(spec.feature_dim));
    }
    if (spec.sample_count == 0) throw ConfigError("synth_generate: sample_count must be > 0");
    if (spec.class_count < 2) throw ConfigError("synth_generate: need at least 2 classes");

    Rng dict_rng = Rng(spec.seed).fork(11);
    Rng embed_rng = Rng(spec.seed).fork(12);
    Rng train_rng = Rng(spec.seed).fork(13);
    Rng test_rng = Rng(spec.seed).fork(14);

    SynthOutput out;
    out.planted_dictionary = orthonormal_columns(spec.feature_dim, spec.class_count, dict_rng);

    Matrix embeddings(spec.embed_dim, spec.class_count, 0.0);
    for (std::size_t i = 0; i < embeddings.size(); ++i) embeddings.data()[i] = embed_rng.normal();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < spec.class_count; ++j) names.push_back("class" + std::to_string(j));
    SemanticSpace space(std::move(embeddings), names);

    SampledSplit train = sample_split(out.planted_dictionary, spec, spec.sample_count, "tr", train_rng);
    out.train_codes = std::move(train.codes);
    out.train = LabeledFeatureSet(std::move(train.inputs), std::move(train.labels),
                                  std::move(train.ids), space);
    if (spec.test_count > 0) {
        SampledSplit test = sample_split(out.planted_dictionary, spec, spec.test_count, "te", test_rng);
        out.test_codes = std::move(test.codes);
        out.test = LabeledFeatureSet(std::move(test.inputs), std::move(test.labels),
                                     std::move(test.ids), space);
    }
    return out;
}

void synth_write(const SynthOutput& out, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("synth_write: cannot create directory '" + dir + "'");
    const auto p = [&dir](const char* name) { return dir + "/" + name; };
    save_fmat(out.train.inputs, p("features_train.fmat"));
    save_labels({out.train.semantic.class_names, out.train.ids, out.train.labels},
                p("labels_train.csv"));
    save_glove(out.train.semantic, p("embeddings.txt"));
    save_fmat(out.planted_dictionary, p("planted_dictionary.fmat"));
    save_fmat(out.train_codes, p("planted_codes_train.fmat"));
    if (out.test.sample_count() > 0) {
        save_fmat(out.test.inputs, p("features_test.fmat"));
        save_labels({out.test.semantic.class_names, out.test.ids, out.test.labels},
                    p("labels_test.csv"));
        save_fmat(out.test_codes, p("planted_codes_test.fmat"));
    }
}

}  // namespace dsdl
