#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsdl/matrix.hpp"
#include "dsdl/rng.hpp"
#include "dsdl/semantic.hpp"

namespace dsdl {

/// Training/evaluation samples: input column i, label column i and ids[i]
/// describe one sample. Labels are strictly 0/1; samples with no positive
/// label are permitted but counted.
struct LabeledFeatureSet {
    Matrix inputs;  // n_in x N
    Matrix labels;  // c x N
    std::vector<std::string> ids;
    SemanticSpace semantic;

    LabeledFeatureSet() = default;
    LabeledFeatureSet(Matrix inputs, Matrix labels, std::vector<std::string> ids,
                      SemanticSpace semantic);

    std::size_t sample_count() const { return inputs.cols(); }
    std::size_t input_dim() const { return inputs.rows(); }
    std::size_t class_count() const { return labels.rows(); }
    std::size_t empty_label_samples() const;
};

/// Binary dense-matrix file: magic "FMAT", u32 version=1, u32 rows,
/// u32 cols, then rows*cols little-endian f32 values, row-major.
/// Values are widened to f64 in memory.
void save_fmat(const Matrix& m, const std::string& path);
Matrix load_fmat(const std::string& path);

/// Reads a GloVe-style text file (token followed by k reals per line) and
/// assembles the embedding column for every class name. Multi-word class
/// names average their word vectors.
SemanticSpace load_glove(const std::string& path, const std::vector<std::string>& class_names);

/// Writes embeddings in the same text format (one token per class).
/// Only valid for single-word class names.
void save_glove(const SemanticSpace& space, const std::string& path);

struct LabelFile {
    std::vector<std::string> class_names;
    std::vector<std::string> ids;
    Matrix labels;  // c x N
};

/// CSV with header "id,<class1>,...,<classc>" and 0/1 cells.
LabelFile load_labels(const std::string& path);
/// Same, but enforces the expected class order.
LabelFile load_labels(const std::string& path, const std::vector<std::string>& expected_classes);
void save_labels(const LabelFile& file, const std::string& path);

struct SynthSpec {
    std::size_t feature_dim = 64;
    std::size_t class_count = 8;
    std::size_t sample_count = 512;
    std::size_t test_count = 0;
    std::size_t embed_dim = 32;
    std::uint64_t seed = 0;
    double noise_sigma = 0.0;
    double positive_rate = 0.3;
};

/// Planted-model dataset: orthonormal dictionary D*, labels Bernoulli(p)
/// resampled to guarantee one positive, codes uniform(2,4) on positives
/// and uniform(-0.3,0.3) on negatives, features D* alpha* + noise, random
/// Gaussian embeddings S*. The test split shares the planted model.
struct SynthOutput {
    LabeledFeatureSet train;
    Matrix train_codes;  // planted alpha*, c x N
    LabeledFeatureSet test;
    Matrix test_codes;
    Matrix planted_dictionary;  // d x c
};

SynthOutput synth_generate(const SynthSpec& spec);

/// Writes a generated dataset in the on-disk formats:
///   features_train.fmat, labels_train.csv, embeddings.txt,
///   planted_dictionary.fmat, planted_codes_train.fmat and, when a test
///   split is present, the matching *_test files.
void synth_write(const SynthOutput& out, const std::string& dir);

}  // namespace dsdl
