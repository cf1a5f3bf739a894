#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dsdl/coding.hpp"
#include "dsdl/dataio.hpp"
#include "dsdl/diffcore.hpp"
#include "dsdl/metrics.hpp"
#include "dsdl/semantic.hpp"

namespace dsdl {

enum class FeatureVariant { passthrough, mlp };

std::string to_string(FeatureVariant v);
FeatureVariant feature_variant_from_string(const std::string& name);

/// Maps raw input vectors to d-dimensional visual features. passthrough
/// forwards precomputed features untouched (no parameters); mlp is a
/// trainable FC -> LeakyReLU(0.2) -> FC stack.
class FeatureModule {
public:
    static FeatureModule passthrough(std::size_t dim);
    static FeatureModule mlp(std::size_t in_dim, std::size_t hidden, std::size_t out_dim,
                             ParamStore& params, Rng& rng, const std::string& prefix = "theta");
    /// Rebinds an mlp to parameters already present in `params` (loading
    /// a checkpoint).
    static FeatureModule mlp_attached(std::size_t in_dim, std::size_t hidden,
                                      std::size_t out_dim, ParamStore& params,
                                      const std::string& prefix = "theta");

    Matrix forward(const Matrix& x);
    Matrix backward(const Matrix& upstream);

    FeatureVariant variant() const { return variant_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }
    bool trainable() const { return variant_ == FeatureVariant::mlp; }

private:
    FeatureModule() = default;
    FeatureVariant variant_ = FeatureVariant::passthrough;
    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
    std::unique_ptr<FullyConnected> fc0_;
    std::unique_ptr<LeakyRelu> act_;
    std::unique_ptr<FullyConnected> fc1_;
};

struct Hyper {
    double lambda = 10.0;        // ridge weight in the code solve
    double beta = 1e-4;          // dictionary-loss weight
    double lr0 = 0.01;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    int epochs = 100;
    int batch_size = 16;
    std::uint64_t seed = 7;
    GradMode grad_mode = GradMode::full;
    double sim_floor = 1e-3;     // clamp for the similarity divisor

    void validate() const;
    /// "voc": lambda=10, beta=1e-4.  "coco": lambda=0.1, beta=1e-6.
    static Hyper preset(const std::string& name);
};

/// Structural knobs for apus_train; dims of 0 are resolved from the data.
struct ArchSpec {
    FeatureVariant feature_variant = FeatureVariant::passthrough;
    std::size_t mlp_hidden = 64;
    std::size_t feature_dim = 0;   // mlp output dim; 0 = input dim
    std::size_t hidden_dim = 1024; // autoencoder hidden width
};

/// Fully resolved architecture, enough to rebuild the network.
struct ArchConfig {
    FeatureVariant feature_variant = FeatureVariant::passthrough;
    std::size_t input_dim = 0;
    std::size_t mlp_hidden = 0;
    std::size_t feature_dim = 0;
    std::size_t embed_dim = 0;
    std::size_t hidden_dim = 0;
    std::size_t class_count = 0;
};

/// Mean over the batch of the summed per-class binary cross entropies,
/// computed on logits for stability.
double ce_loss(const Matrix& logits, const Matrix& labels);
/// dL_ce/dlogits = (probs - labels)/B.
Matrix ce_loss_logit_grad(const Matrix& probs, const Matrix& labels);

struct TotalLossTerms {
    double total = 0.0;
    double ce = 0.0, dic = 0.0, sim = 0.0;
    double w_ce = 0.0;   // dL_total/dL_ce
    double w_dic = 0.0;  // dL_total/dL_dic
    double w_sim = 0.0;  // dL_total/dL_sim (zero while clamped)
    bool clamped = false;
};

/// L_total = (L_ce + beta * L_dic) / max(L_sim, sim_floor), with the
/// quotient-rule weights for the backward pass.
TotalLossTerms total_loss(double ce, double dic, double sim, const Hyper& hyper);

/// The composed network: feature module + tied autoencoder + ridge coding.
/// Owns one ParamStore holding theta.* and psi.* entries.
class DsdlModel {
public:
    DsdlModel(const ArchConfig& arch, const Hyper& hyper, SemanticSpace space);

    struct StepForward {
        Matrix features;       // d x B
        Matrix dictionary;     // d x c
        Matrix reconstructed;  // k x c
        CodeBatch codes;
        Matrix sim_grad;       // dL_sim/dS_hat
        TotalLossTerms loss;
    };

    StepForward forward(const Matrix& inputs, const Matrix& labels);
    /// Must follow the matching forward; accumulates into params().
    void backward(const StepForward& f, const Matrix& labels);

    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    const ArchConfig& arch() const { return arch_; }
    const Hyper& hyper() const { return hyper_; }
    const SemanticSpace& semantic() const { return space_; }

    /// Encodes the semantic space with the current weights.
    Matrix current_dictionary();

private:
    ArchConfig arch_;
    Hyper hyper_;
    SemanticSpace space_;
    ParamStore params_;
    std::optional<FeatureModule> feature_;
    std::optional<SemanticAutoencoder> autoencoder_;
};

struct Checkpoint {
    ArchConfig arch;
    Hyper hyper;
    ParamStore params;
    std::vector<std::string> class_names;
    Matrix dictionary;  // frozen D
    int epoch = 0;
};

struct EpochStats {
    int epoch = 0;
    double lr = 0.0;
    double ce = 0.0, dic = 0.0, sim = 0.0, total = 0.0;  // epoch means
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<EpochStats> curve;
};

/// Alternating optimization of the whole model: closed-form codes in the
/// forward pass, SGD on theta/psi in the backward pass, epochs under the
/// step learning-rate schedule. Throws DivergenceError when the total
/// loss turns non-finite.
TrainResult apus_train(const LabeledFeatureSet& data, const Hyper& hyper,
                       const ArchSpec& arch = ArchSpec{});

/// Probabilities from a frozen checkpoint (frozen dictionary + feature
/// module), the same numerical path as the training forward.
Matrix checkpoint_predict(const Checkpoint& ckpt, const Matrix& inputs);

MetricReport evaluate(const Checkpoint& ckpt, const LabeledFeatureSet& data,
                      std::size_t topk_k = 3, double threshold = 0.5);

/// Directory layout: manifest.txt (shapes and file map), classes.txt,
/// config.txt (hyper + architecture), dictionary.fmat and one FMAT per
/// parameter. Checkpoints are frozen to f32-representable values so the
/// round-trip is bit-exact.
void save_checkpoint(const Checkpoint& ckpt, const std::string& dir);
Checkpoint load_checkpoint(const std::string& dir);

void write_curve_csv(const std::vector<EpochStats>& curve, const std::string& path);

}  // namespace dsdl
