#include "dsdl/semantic.hpp"

#include <cmath>

namespace dsdl {

SemanticSpace::SemanticSpace(Matrix embeddings_in, std::vector<std::string> names)
    : embeddings(std::move(embeddings_in)), class_names(std::move(names)) {
    if (embeddings.cols() < 2) {
        throw DimensionError("SemanticSpace: need at least 2 classes");
    }
    if (class_names.size() != embeddings.cols()) {
        throw DimensionError("SemanticSpace: " + std::to_string(class_names.size()) +
                             " names for " + std::to_string(embeddings.cols()) + " columns");
    }
    for (std::size_t j = 0; j < embeddings.cols(); ++j) {
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < embeddings.rows(); ++i) {
            norm_sq += embeddings(i, j) * embeddings(i, j);
        }
        if (norm_sq == 0.0) {
            throw NumericError("SemanticSpace: all-zero embedding for class '" +
                               class_names[j] + "'");
        }
    }
    embeddings.check_finite("SemanticSpace");
}

SemanticDictionary::SemanticDictionary(Matrix atoms) : atoms_(std::move(atoms)) {
    if (atoms_.cols() >= atoms_.rows()) {
        throw DimensionError("SemanticDictionary: must be undercomplete, got " +
                             std::to_string(atoms_.cols()) + " atoms in " +
                             std::to_string(atoms_.rows()) + " dimensions");
    }
    atoms_.check_finite("SemanticDictionary");
}

SemanticAutoencoder::SemanticAutoencoder(std::size_t embed_dim, std::size_t hidden_dim,
                                         std::size_t feature_dim, ParamStore& params,
                                         Rng& rng, const std::string& prefix)
    : embed_dim_(embed_dim),
      hidden_dim_(hidden_dim),
      feature_dim_(feature_dim),
      fc1_(params, prefix + ".fc1", embed_dim, hidden_dim, /*with_bias=*/true, rng),
      fc2_(params, prefix + ".fc2", hidden_dim, feature_dim, /*with_bias=*/true, rng),
      enc_act1_(0.2),
      enc_act2_(0.2),
      dec2_(params, prefix + ".fc2.w"),
      dec1_(params, prefix + ".fc1.w"),
      dec_act_(0.2) {}

Matrix SemanticAutoencoder::encode(const Matrix& embeddings) {
    return enc_act2_.forward(fc2_.forward(enc_act1_.forward(fc1_.forward(embeddings))));
}

Matrix SemanticAutoencoder::encode_backward(const Matrix& upstream) {
    return fc1_.backward(enc_act1_.backward(fc2_.backward(enc_act2_.backward(upstream))));
}

Matrix SemanticAutoencoder::decode(const Matrix& dictionary) {
    return dec1_.forward(dec_act_.forward(dec2_.forward(dictionary)));
}

Matrix SemanticAutoencoder::decode_backward(const Matrix& upstream) {
    return dec2_.backward(dec_act_.backward(dec1_.backward(upstream)));
}

SemanticDictionary SemanticAutoencoder::generate_dictionary(const SemanticSpace& space) {
    if (space.embedding_dim() != embed_dim_) {
        throw DimensionError("generate_dictionary: embeddings have dimension " +
                             std::to_string(space.embedding_dim()) + ", expected " +
                             std::to_string(embed_dim_));
    }
    if (space.class_count() >= feature_dim_) {
        throw DimensionError("generate_dictionary: undercompleteness violated (" +
                             std::to_string(space.class_count()) + " classes, feature dim " +
                             std::to_string(feature_dim_) + ")");
    }
    return SemanticDictionary(encode(space.embeddings));
}

namespace {

double column_norm(const Matrix& m, std::size_t j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, j) * m(i, j);
    return std::sqrt(acc);
}

}  // namespace

SimilarityLoss similarity_loss(const SemanticSpace& space, const Matrix& reconstructed) {
    const Matrix& s = space.embeddings;
    if (!s.same_shape(reconstructed)) {
        throw DimensionError("similarity_loss: reconstruction shape mismatch");
    }
    const std::size_t c = s.cols();
    SimilarityLoss out;
    out.d_reconstructed = Matrix(s.rows(), c, 0.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        const double sn = column_norm(s, j);
        const double rn = column_norm(reconstructed, j);
        if (rn == 0.0) {
            throw NumericError("similarity_loss: reconstructed embedding for class '" +
                               space.class_names[j] + "' has zero norm");
        }
        double dot = 0.0;
        for (std::size_t i = 0; i < s.rows(); ++i) dot += s(i, j) * reconstructed(i, j);
        const double cosv = dot / (sn * rn);
        acc += cosv;
        // d cos/d s_hat = s/(|s||s_hat|) - cos * s_hat/|s_hat|^2, averaged over classes
        for (std::size_t i = 0; i < s.rows(); ++i) {
            out.d_reconstructed(i, j) =
                (s(i, j) / (sn * rn) - cosv * reconstructed(i, j) / (rn * rn)) /
                static_cast<double>(c);
        }
    }
    out.value = acc / static_cast<double>(c);
    return out;
}

double similarity_value(const SemanticSpace& space, const Matrix& reconstructed) {
    return similarity_loss(space, reconstructed).value;
}

}  // namespace dsdl
