#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsdl/matrix.hpp"
#include "dsdl/rng.hpp"

namespace dsdl {

/// One named trainable tensor with its gradient and momentum buffers.
/// The three matrices always share one shape.
struct ParamEntry {
    Matrix value;
    Matrix grad;
    Matrix momentum;
};

/// Ordered collection of named parameters. Iteration follows insertion
/// order so checkpoints and updates are deterministic.
class ParamStore {
public:
    ParamEntry& add(const std::string& name, Matrix init);
    ParamEntry& at(const std::string& name);
    const ParamEntry& at(const std::string& name) const;
    bool contains(const std::string& name) const { return entries_.count(name) != 0; }
    const std::vector<std::string>& names() const { return order_; }
    std::size_t size() const { return order_.size(); }
    void zero_grads();

private:
    std::vector<std::string> order_;
    std::unordered_map<std::string, ParamEntry> entries_;
};

/// Differentiable block: forward caches whatever backward needs; backward
/// accumulates parameter gradients into the owning ParamStore and returns
/// the gradient with respect to its input. backward may be called at most
/// once per forward.
class Layer {
public:
    virtual ~Layer() = default;

    Matrix forward(const Matrix& input);
    Matrix backward(const Matrix& upstream);

protected:
    virtual Matrix do_forward(const Matrix& input) = 0;
    virtual Matrix do_backward(const Matrix& upstream) = 0;

private:
    bool pending_backward_ = false;
};

/// Affine map W*x + b applied column-wise to a batch. Weights are
/// initialized uniform(-1/sqrt(in_dim), +1/sqrt(in_dim)), biases zero.
class FullyConnected : public Layer {
public:
    FullyConnected(ParamStore& params, const std::string& name_prefix,
                   std::size_t in_dim, std::size_t out_dim, bool with_bias, Rng& rng);

    /// Binds to parameters '<prefix>.w' (and '.b' when present) that are
    /// already registered, e.g. when rebuilding from a checkpoint.
    static FullyConnected attached(ParamStore& params, const std::string& name_prefix);

    const std::string& weight_name() const { return weight_name_; }

protected:
    Matrix do_forward(const Matrix& input) override;
    Matrix do_backward(const Matrix& upstream) override;

private:
    FullyConnected() = default;
    ParamStore* params_ = nullptr;
    std::string weight_name_;
    std::string bias_name_;  // empty when bias-free
    Matrix cached_input_;
};

/// Applies the transpose of an existing weight matrix: x -> W^T x. Used
/// for tied-weight decoders; gradient flows into the shared entry.
class TransposedLinear : public Layer {
public:
    TransposedLinear(ParamStore& params, std::string weight_name);

protected:
    Matrix do_forward(const Matrix& input) override;
    Matrix do_backward(const Matrix& upstream) override;

private:
    ParamStore* params_;
    std::string weight_name_;
    Matrix cached_input_;
};

class LeakyRelu : public Layer {
public:
    explicit LeakyRelu(double slope);

protected:
    Matrix do_forward(const Matrix& input) override;
    Matrix do_backward(const Matrix& upstream) override;

private:
    double slope_;
    Matrix cached_input_;
};

std::unique_ptr<Layer> fully_connected(ParamStore& params, const std::string& name_prefix,
                                       std::size_t in_dim, std::size_t out_dim,
                                       bool with_bias, Rng& rng);
std::unique_ptr<Layer> leaky_relu(double slope);

/// Elementwise logistic, stable over the full double range; outputs are
/// clamped into the open interval (0, 1).
Matrix sigmoid_forward(const Matrix& x);
/// upstream * s * (1 - s) where s = sigmoid_forward(x).
Matrix sigmoid_backward(const Matrix& upstream, const Matrix& sigmoid_output);

/// Classic SGD: coupled weight decay folded into the gradient, then
/// momentum update v <- m*v + g and value <- value - lr*v.
void sgd_step(ParamStore& params, double lr, double momentum, double weight_decay);

/// Step schedule: lr0 * 0.1^floor(epoch/40).
double lr_schedule(int epoch, double lr0 = 0.01);

struct GradCheckBlock {
    std::string name;
    double max_rel_err = 0.0;
    std::size_t worst_row = 0;
    std::size_t worst_col = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckBlock> blocks;
    double max_rel_err = 0.0;
    double rtol = 0.0;
    bool passed() const { return max_rel_err <= rtol; }
    std::string summary() const;
};

/// Compares every analytic gradient entry produced by `fwd_bwd` (a
/// deterministic closure that runs forward+backward over `params` and
/// returns the scalar loss) against central finite differences.
/// Relative error uses max(|analytic|, |numeric|, guard) as denominator.
GradCheckReport grad_check(const std::function<double()>& fwd_bwd, ParamStore& params,
                           double rtol = 1e-4, double step = 1e-5, double guard = 1e-4);

}  // namespace dsdl
