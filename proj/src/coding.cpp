#include "dsdl/coding.hpp"

#include "dsdl/diffcore.hpp"

namespace dsdl {

std::string to_string(GradMode mode) {
    switch (mode) {
        case GradMode::full: return "full";
        case GradMode::dic_detached: return "dic_detached";
        case GradMode::all_detached: return "all_detached";
    }
    throw ConfigError("unknown GradMode");
}

GradMode grad_mode_from_string(const std::string& name) {
    if (name == "full") return GradMode::full;
    if (name == "dic_detached") return GradMode::dic_detached;
    if (name == "all_detached") return GradMode::all_detached;
    throw ConfigError("grad_mode must be full, dic_detached or all_detached, got '" +
                      name + "'");
}

namespace {

void require_feature_shape(const Matrix& dictionary, const Matrix& features,
                           const char* op) {
    if (features.rows() != dictionary.rows()) {
        throw DimensionError(std::string(op) + ": features have " +
                             std::to_string(features.rows()) + " rows, dictionary has " +
                             std::to_string(dictionary.rows()));
    }
}

}  // namespace

CodeBatch solve_codes(const Matrix& dictionary, const Matrix& features, double lambda) {
    if (!(lambda > 0.0)) {
        throw ConfigError("solve_codes: lambda must be > 0");
    }
    require_feature_shape(dictionary, features, "solve_codes");
    Matrix gram = matmul(transpose(dictionary), dictionary);
    for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += lambda;
    CodeBatch codes;
    codes.lambda = lambda;
    codes.gram_factor = std::make_shared<SpdFactor>(gram);
    codes.alpha = codes.gram_factor->solve(matmul(transpose(dictionary), features));
    codes.probs = sigmoid_forward(codes.alpha);
    return codes;
}

double dictionary_loss(const Matrix& dictionary, const Matrix& features,
                       const CodeBatch& codes, double lambda) {
    require_feature_shape(dictionary, features, "dictionary_loss");
    if (codes.alpha.rows() != dictionary.cols() || codes.alpha.cols() != features.cols()) {
        throw DimensionError("dictionary_loss: codes shaped " +
                             std::to_string(codes.alpha.rows()) + "x" +
                             std::to_string(codes.alpha.cols()) + " do not match");
    }
    const Matrix residual = sub(features, matmul(dictionary, codes.alpha));
    const double batch = static_cast<double>(features.cols());
    return (frobenius_norm_sq(residual) + lambda * frobenius_norm_sq(codes.alpha)) / batch;
}

Matrix dictionary_loss_alpha_grad(const Matrix& dictionary, const Matrix& features,
                                  const CodeBatch& codes, double lambda) {
    require_feature_shape(dictionary, features, "dictionary_loss_alpha_grad");
    const Matrix dt = transpose(dictionary);
    Matrix g = sub(matmul(dt, matmul(dictionary, codes.alpha)), matmul(dt, features));
    const double scl = 2.0 / static_cast<double>(features.cols());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.data()[i] = scl * (g.data()[i] + lambda * codes.alpha.data()[i]);
    }
    return g;
}

CodeGrads backward_codes(const Matrix& upstream, GradMode mode, const Matrix& dictionary,
                         const Matrix& features, const CodeBatch& codes) {
    if (!codes.gram_factor) {
        throw Error("backward_codes: called before solve_codes");
    }
    if (!upstream.same_shape(codes.alpha)) {
        throw DimensionError("backward_codes: upstream gradient shape mismatch");
    }
    CodeGrads out;
    if (mode == GradMode::all_detached) {
        out.dictionary = Matrix(dictionary.rows(), dictionary.cols(), 0.0);
        out.features = Matrix(features.rows(), features.cols(), 0.0);
        return out;
    }
    const Matrix r = codes.gram_factor->solve(upstream);
    out.features = matmul(dictionary, r);
    const Matrix residual = sub(features, matmul(dictionary, codes.alpha));
    out.dictionary = sub(matmul(residual, transpose(r)),
                         matmul(dictionary, matmul(r, transpose(codes.alpha))));
    return out;
}

CodeGrads dictionary_loss_direct_grads(const Matrix& dictionary, const Matrix& features,
                                       const CodeBatch& codes) {
    require_feature_shape(dictionary, features, "dictionary_loss_direct_grads");
    const Matrix residual = sub(features, matmul(dictionary, codes.alpha));
    const double scl = 2.0 / static_cast<double>(features.cols());
    CodeGrads out;
    out.features = scale(residual, scl);
    out.dictionary = scale(matmul(residual, transpose(codes.alpha)), -scl);
    return out;
}

Matrix predict_probs(const Matrix& dictionary, const Matrix& features, double lambda) {
    return solve_codes(dictionary, features, lambda).probs;
}

}  // namespace dsdl
