#include "dsdl/diffcore.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>

namespace dsdl {

ParamEntry& ParamStore::add(const std::string& name, Matrix init) {
    if (contains(name)) {
        throw ConfigError("ParamStore: duplicate parameter '" + name + "'");
    }
    init.check_finite("ParamStore::add");
    ParamEntry entry;
    entry.grad = Matrix(init.rows(), init.cols(), 0.0);
    entry.momentum = Matrix(init.rows(), init.cols(), 0.0);
    entry.value = std::move(init);
    order_.push_back(name);
    return entries_.emplace(name, std::move(entry)).first->second;
}

ParamEntry& ParamStore::at(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("ParamStore: unknown parameter '" + name + "'");
    return it->second;
}

const ParamEntry& ParamStore::at(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("ParamStore: unknown parameter '" + name + "'");
    return it->second;
}

void ParamStore::zero_grads() {
    for (auto& name : order_) {
        Matrix& g = entries_.at(name).grad;
        for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = 0.0;
    }
}

Matrix Layer::forward(const Matrix& input) {
    Matrix out = do_forward(input);
    pending_backward_ = true;
    return out;
}

Matrix Layer::backward(const Matrix& upstream) {
    if (!pending_backward_) {
        throw Error("Layer: backward called without a pending forward");
    }
    pending_backward_ = false;
    return do_backward(upstream);
}

FullyConnected::FullyConnected(ParamStore& params, const std::string& name_prefix,
                               std::size_t in_dim, std::size_t out_dim, bool with_bias,
                               Rng& rng)
    : params_(&params), weight_name_(name_prefix + ".w") {
    if (in_dim == 0 || out_dim == 0) {
        throw DimensionError("fully_connected: dimensions must be positive");
    }
    const double lim = 1.0 / std::sqrt(static_cast<double>(in_dim));
    Matrix w(out_dim, in_dim, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-lim, lim);
    params.add(weight_name_, std::move(w));
    if (with_bias) {
        bias_name_ = name_prefix + ".b";
        params.add(bias_name_, Matrix(out_dim, 1, 0.0));
    }
}

FullyConnected FullyConnected::attached(ParamStore& params, const std::string& name_prefix) {
    FullyConnected fc;
    fc.params_ = &params;
    fc.weight_name_ = name_prefix + ".w";
    params.at(fc.weight_name_);  // must exist
    if (params.contains(name_prefix + ".b")) fc.bias_name_ = name_prefix + ".b";
    return fc;
}

Matrix FullyConnected::do_forward(const Matrix& input) {
    const Matrix& w = params_->at(weight_name_).value;
    if (input.rows() != w.cols()) {
        throw DimensionError("fully_connected: input has " + std::to_string(input.rows()) +
                             " rows, expected " + std::to_string(w.cols()));
    }
    cached_input_ = input;
    Matrix out = matmul(w, input);
    if (!bias_name_.empty()) {
        const Matrix& b = params_->at(bias_name_).value;
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += b(i, 0);
        out.check_finite("fully_connected");
    }
    return out;
}

Matrix FullyConnected::do_backward(const Matrix& upstream) {
    ParamEntry& went = params_->at(weight_name_);
    if (upstream.rows() != went.value.rows() || upstream.cols() != cached_input_.cols()) {
        throw DimensionError("fully_connected: upstream gradient shape mismatch");
    }
    Matrix dw = matmul(upstream, transpose(cached_input_));
    for (std::size_t i = 0; i < dw.size(); ++i) went.grad.data()[i] += dw.data()[i];
    if (!bias_name_.empty()) {
        ParamEntry& bent = params_->at(bias_name_);
        for (std::size_t i = 0; i < upstream.rows(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < upstream.cols(); ++j) acc += upstream(i, j);
            bent.grad(i, 0) += acc;
        }
    }
    return matmul(transpose(went.value), upstream);
}

TransposedLinear::TransposedLinear(ParamStore& params, std::string weight_name)
    : params_(&params), weight_name_(std::move(weight_name)) {
    params.at(weight_name_);  // must already exist
}

Matrix TransposedLinear::do_forward(const Matrix& input) {
    const Matrix& w = params_->at(weight_name_).value;
    if (input.rows() != w.rows()) {
        throw DimensionError("transposed_linear: input has " + std::to_string(input.rows()) +
                             " rows, expected " + std::to_string(w.rows()));
    }
    cached_input_ = input;
    return matmul(transpose(w), input);
}

Matrix TransposedLinear::do_backward(const Matrix& upstream) {
    ParamEntry& went = params_->at(weight_name_);
    Matrix dw = matmul(cached_input_, transpose(upstream));
    for (std::size_t i = 0; i < dw.size(); ++i) went.grad.data()[i] += dw.data()[i];
    return matmul(went.value, upstream);
}

LeakyRelu::LeakyRelu(double slope) : slope_(slope) {
    if (slope < 0.0) throw ConfigError("leaky_relu: slope must be >= 0");
}

Matrix LeakyRelu::do_forward(const Matrix& input) {
    cached_input_ = input;
    Matrix out(input.rows(), input.cols(), 0.0);
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double v = input.data()[i];
        out.data()[i] = v >= 0.0 ? v : slope_ * v;
    }
    return out;
}

Matrix LeakyRelu::do_backward(const Matrix& upstream) {
    if (!upstream.same_shape(cached_input_)) {
        throw DimensionError("leaky_relu: upstream gradient shape mismatch");
    }
    Matrix out(upstream.rows(), upstream.cols(), 0.0);
    for (std::size_t i = 0; i < upstream.size(); ++i) {
        out.data()[i] = upstream.data()[i] * (cached_input_.data()[i] >= 0.0 ? 1.0 : slope_);
    }
    return out;
}

std::unique_ptr<Layer> fully_connected(ParamStore& params, const std::string& name_prefix,
                                       std::size_t in_dim, std::size_t out_dim,
                                       bool with_bias, Rng& rng) {
    return std::make_unique<FullyConnected>(params, name_prefix, in_dim, out_dim, with_bias, rng);
}

std::unique_ptr<Layer> leaky_relu(double slope) { return std::make_unique<LeakyRelu>(slope); }

Matrix sigmoid_forward(const Matrix& x) {
    Matrix out(x.rows(), x.cols(), 0.0);
    const double top = 1.0 - DBL_EPSILON / 2.0;  // largest double below 1
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x.data()[i];
        double s;
        if (v >= 0.0) {
            s = 1.0 / (1.0 + std::exp(-v));
        } else {
            const double e = std::exp(v);
            s = e / (1.0 + e);
        }
        if (s >= 1.0) s = top;
        if (s <= 0.0) s = DBL_MIN;
        out.data()[i] = s;
    }
    return out;
}

Matrix sigmoid_backward(const Matrix& upstream, const Matrix& sigmoid_output) {
    if (!upstream.same_shape(sigmoid_output)) {
        throw DimensionError("sigmoid_backward: shape mismatch");
    }
    Matrix out(upstream.rows(), upstream.cols(), 0.0);
    for (std::size_t i = 0; i < upstream.size(); ++i) {
        const double s = sigmoid_output.data()[i];
        out.data()[i] = upstream.data()[i] * s * (1.0 - s);
    }
    return out;
}

void sgd_step(ParamStore& params, double lr, double momentum, double weight_decay) {
    for (const auto& name : params.names()) {
        ParamEntry& e = params.at(name);
        for (std::size_t i = 0; i < e.value.size(); ++i) {
            const double g = e.grad.data()[i] + weight_decay * e.value.data()[i];
            const double v = momentum * e.momentum.data()[i] + g;
            e.momentum.data()[i] = v;
            e.value.data()[i] -= lr * v;
        }
        e.value.check_finite("sgd_step");
    }
}

double lr_schedule(int epoch, double lr0) {
    if (epoch < 0) throw ConfigError("lr_schedule: epoch must be >= 0");
    return lr0 * std::pow(0.1, epoch / 40);
}

std::string GradCheckReport::summary() const {
    std::ostringstream os;
    for (const auto& b : blocks) {
        os << b.name << ": max rel err " << b.max_rel_err << " at (" << b.worst_row << ","
           << b.worst_col << ") analytic " << b.analytic << " numeric " << b.numeric
           << (b.max_rel_err <= rtol ? "  ok" : "  FAIL") << "\n";
    }
    return os.str();
}

GradCheckReport grad_check(const std::function<double()>& fwd_bwd, ParamStore& params,
                           double rtol, double step, double guard) {
    params.zero_grads();
    const double base1 = fwd_bwd();
    std::unordered_map<std::string, Matrix> analytic;
    for (const auto& name : params.names()) analytic.emplace(name, params.at(name).grad);

    params.zero_grads();
    const double base2 = fwd_bwd();
    if (base1 != base2) {
        throw NumericError("grad_check: closure is non-deterministic (" +
                           std::to_string(base1) + " vs " + std::to_string(base2) + ")");
    }

    GradCheckReport report;
    report.rtol = rtol;
    for (const auto& name : params.names()) {
        ParamEntry& e = params.at(name);
        const Matrix& a = analytic.at(name);
        GradCheckBlock block;
        block.name = name;
        for (std::size_t i = 0; i < e.value.rows(); ++i) {
            for (std::size_t j = 0; j < e.value.cols(); ++j) {
                const double saved = e.value(i, j);
                e.value(i, j) = saved + step;
                const double lp = fwd_bwd();
                e.value(i, j) = saved - step;
                const double lm = fwd_bwd();
                e.value(i, j) = saved;
                const double numeric = (lp - lm) / (2.0 * step);
                const double an = a(i, j);
                const double denom = std::max({std::abs(an), std::abs(numeric), guard});
                const double rel = std::abs(an - numeric) / denom;
                if (rel > block.max_rel_err) {
                    block.max_rel_err = rel;
                    block.worst_row = i;
                    block.worst_col = j;
                    block.analytic = an;
                    block.numeric = numeric;
                }
            }
        }
        report.max_rel_err = std::max(report.max_rel_err, block.max_rel_err);
        report.blocks.push_back(std::move(block));
    }
    params.zero_grads();
    return report;
}

}  // namespace dsdl
