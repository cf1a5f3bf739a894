#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dsdl/diffcore.hpp"
#include "dsdl/matrix.hpp"

namespace dsdl {

/// Class word embeddings: one k-dimensional column per class, columns
/// aligned with label-vector positions.
struct SemanticSpace {
    Matrix embeddings;  // k x c
    std::vector<std::string> class_names;

    SemanticSpace() = default;
    SemanticSpace(Matrix embeddings, std::vector<std::string> class_names);

    std::size_t embedding_dim() const { return embeddings.rows(); }
    std::size_t class_count() const { return embeddings.cols(); }
};

/// The learned dictionary D, one atom (column) per class, living in
/// visual-feature space. Must be undercomplete: fewer atoms than rows.
class SemanticDictionary {
public:
    explicit SemanticDictionary(Matrix atoms);

    const Matrix& atoms() const { return atoms_; }
    std::size_t feature_dim() const { return atoms_.rows(); }
    std::size_t atom_count() const { return atoms_.cols(); }

private:
    Matrix atoms_;
};

/// Two fully connected encoder layers with LeakyReLU(0.2) after each;
/// the decoder reuses the same weight matrices transposed in reverse
/// order (no decoder biases), LeakyReLU between them, linear output.
class SemanticAutoencoder {
public:
    SemanticAutoencoder(std::size_t embed_dim, std::size_t hidden_dim,
                        std::size_t feature_dim, ParamStore& params, Rng& rng,
                        const std::string& prefix = "psi");

    std::size_t embed_dim() const { return embed_dim_; }
    std::size_t hidden_dim() const { return hidden_dim_; }
    std::size_t feature_dim() const { return feature_dim_; }

    /// D = f_en(S); caches activations for encode_backward.
    Matrix encode(const Matrix& embeddings);
    /// Accumulates parameter gradients; returns dL/dS (rarely needed).
    Matrix encode_backward(const Matrix& upstream);

    /// S_hat = f_de(D); caches activations for decode_backward.
    Matrix decode(const Matrix& dictionary);
    /// Accumulates gradients into the shared weights; returns dL/dD.
    Matrix decode_backward(const Matrix& upstream);

    /// encode() wrapped in the undercompleteness check (c < d).
    SemanticDictionary generate_dictionary(const SemanticSpace& space);

private:
    std::size_t embed_dim_, hidden_dim_, feature_dim_;
    FullyConnected fc1_, fc2_;
    LeakyRelu enc_act1_, enc_act2_;
    TransposedLinear dec2_, dec1_;
    LeakyRelu dec_act_;
};

/// Mean column-wise cosine similarity between the original embeddings and
/// their reconstruction; always in [-1, 1].
/// Throws NumericError naming the class when a reconstructed column has
/// zero norm.
double similarity_value(const SemanticSpace& space, const Matrix& reconstructed);

struct SimilarityLoss {
    double value = 0.0;
    Matrix d_reconstructed;  // dL_sim / dS_hat
};

/// Value plus analytic gradient with respect to the reconstruction.
SimilarityLoss similarity_loss(const SemanticSpace& space, const Matrix& reconstructed);

}  // namespace dsdl
