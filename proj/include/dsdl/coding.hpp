#pragma once

#include <memory>
#include <string>

#include "dsdl/matrix.hpp"

namespace dsdl {

/// How gradients are allowed to flow through the closed-form code solve
/// during backpropagation. `full` differentiates through the solve;
/// `dic_detached` treats the codes as constant inside the dictionary
/// loss only; `all_detached` blocks every path through the codes.
enum class GradMode { full, dic_detached, all_detached };

std::string to_string(GradMode mode);
GradMode grad_mode_from_string(const std::string& name);

/// Ridge-regularized representation coefficients for one feature batch,
/// with their sigmoid probabilities and the Gram factorization kept for
/// the backward pass.
struct CodeBatch {
    Matrix alpha;  // c x B, solves (D^T D + lambda I) alpha = D^T F
    Matrix probs;  // sigmoid(alpha), strictly inside (0, 1)
    std::shared_ptr<const SpdFactor> gram_factor;
    double lambda = 0.0;
};

/// alpha = (D^T D + lambda I)^{-1} D^T F via one factorization reused
/// across the batch. lambda > 0 keeps the system positive definite.
CodeBatch solve_codes(const Matrix& dictionary, const Matrix& features, double lambda);

/// Mean over the batch of ||f_b - D alpha_b||^2 + lambda ||alpha_b||^2.
double dictionary_loss(const Matrix& dictionary, const Matrix& features,
                       const CodeBatch& codes, double lambda);

/// d(dictionary_loss)/d(alpha) = 2((D^T D + lambda I) alpha - D^T F)/B.
/// Vanishes analytically because alpha solves the normal equations.
Matrix dictionary_loss_alpha_grad(const Matrix& dictionary, const Matrix& features,
                                  const CodeBatch& codes, double lambda);

struct CodeGrads {
    Matrix dictionary;  // d x c
    Matrix features;    // d x B
};

/// Backpropagates `upstream` (dL/dalpha) through the closed-form solve
/// using the cached factorization: with r = (D^T D + lambda I)^{-1} g,
/// dL/dF = D r and dL/dD = (F - D alpha) r^T - D r alpha^T.
/// In all_detached mode both outputs are zero.
CodeGrads backward_codes(const Matrix& upstream, GradMode mode, const Matrix& dictionary,
                         const Matrix& features, const CodeBatch& codes);

/// Gradients of dictionary_loss holding alpha constant:
/// dL/dD = -(2/B)(F - D alpha) alpha^T, dL/dF = (2/B)(F - D alpha).
CodeGrads dictionary_loss_direct_grads(const Matrix& dictionary, const Matrix& features,
                                       const CodeBatch& codes);

/// Inference: sigmoid((D^T D + lambda I)^{-1} D^T F), the same numerical
/// path as the training forward.
Matrix predict_probs(const Matrix& dictionary, const Matrix& features, double lambda);

}  // namespace dsdl
