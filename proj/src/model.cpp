#include "dsdl/model.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace dsdl {

std::string to_string(FeatureVariant v) {
    return v == FeatureVariant::passthrough ? "passthrough" : "mlp";
}

FeatureVariant feature_variant_from_string(const std::string& name) {
    if (name == "passthrough") return FeatureVariant::passthrough;
    if (name == "mlp") return FeatureVariant::mlp;
    throw ConfigError("feature variant must be passthrough or mlp, got '" + name + "'");
}

FeatureModule FeatureModule::passthrough(std::size_t dim) {
    FeatureModule m;
    m.variant_ = FeatureVariant::passthrough;
    m.input_dim_ = m.output_dim_ = dim;
    return m;
}

FeatureModule FeatureModule::mlp(std::size_t in_dim, std::size_t hidden, std::size_t out_dim,
                                 ParamStore& params, Rng& rng, const std::string& prefix) {
    FeatureModule m;
    m.variant_ = FeatureVariant::mlp;
    m.input_dim_ = in_dim;
    m.output_dim_ = out_dim;
    m.fc0_ = std::make_unique<FullyConnected>(params, prefix + ".fc0", in_dim, hidden,
                                              /*with_bias=*/true, rng);
    m.act_ = std::make_unique<LeakyRelu>(0.2);
    m.fc1_ = std::make_unique<FullyConnected>(params, prefix + ".fc1", hidden, out_dim,
                                              /*with_bias=*/true, rng);
    return m;
}

FeatureModule FeatureModule::mlp_attached(std::size_t in_dim, std::size_t hidden,
                                          std::size_t out_dim, ParamStore& params,
                                          const std::string& prefix) {
    FeatureModule m;
    m.variant_ = FeatureVariant::mlp;
    m.input_dim_ = in_dim;
    m.output_dim_ = out_dim;
    const auto check = [&params](const std::string& name, std::size_t r, std::size_t c) {
        const Matrix& v = params.at(name).value;
        if (v.rows() != r || v.cols() != c) {
            throw IoError("checkpoint parameter '" + name + "' has shape " +
                          std::to_string(v.rows()) + "x" + std::to_string(v.cols()) +
                          ", expected " + std::to_string(r) + "x" + std::to_string(c));
        }
    };
    check(prefix + ".fc0.w", hidden, in_dim);
    check(prefix + ".fc0.b", hidden, 1);
    check(prefix + ".fc1.w", out_dim, hidden);
    check(prefix + ".fc1.b", out_dim, 1);
    m.fc0_ = std::make_unique<FullyConnected>(FullyConnected::attached(params, prefix + ".fc0"));
    m.act_ = std::make_unique<LeakyRelu>(0.2);
    m.fc1_ = std::make_unique<FullyConnected>(FullyConnected::attached(params, prefix + ".fc1"));
    return m;
}

Matrix FeatureModule::forward(const Matrix& x) {
    if (x.rows() != input_dim_) {
        throw DimensionError("feature module: input has " + std::to_string(x.rows()) +
                             " rows, expected " + std::to_string(input_dim_));
    }
    if (variant_ == FeatureVariant::passthrough) return x;
    return fc1_->forward(act_->forward(fc0_->forward(x)));
}

Matrix FeatureModule::backward(const Matrix& upstream) {
    if (variant_ == FeatureVariant::passthrough) return upstream;
    return fc0_->backward(act_->backward(fc1_->backward(upstream)));
}

void Hyper::validate() const {
    if (!(lambda > 0.0)) throw ConfigError("hyper: lambda must be > 0");
    if (beta < 0.0) throw ConfigError("hyper: beta must be >= 0");
    if (lr0 < 0.0) throw ConfigError("hyper: lr0 must be >= 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("hyper: momentum must be in [0,1)");
    if (weight_decay < 0.0) throw ConfigError("hyper: weight_decay must be >= 0");
    if (epochs < 0) throw ConfigError("hyper: epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("hyper: batch_size must be >= 1");
    if (!(sim_floor > 0.0) || sim_floor > 1.0) {
        throw ConfigError("hyper: sim_floor must be in (0, 1]");
    }
}

Hyper Hyper::preset(const std::string& name) {
    Hyper h;
    if (name == "voc") {
        h.lambda = 10.0;
        h.beta = 1e-4;
    } else if (name == "coco") {
        h.lambda = 0.1;
        h.beta = 1e-6;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected voc or coco)");
    }
    return h;
}

double ce_loss(const Matrix& logits, const Matrix& labels) {
    if (!logits.same_shape(labels)) throw DimensionError("ce_loss: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double y = labels.data()[i];
        if (y != 0.0 && y != 1.0) {
            throw Error("ce_loss: label outside {0,1}");
        }
        const double a = logits.data()[i];
        // softplus(a) - y*a, with softplus(a) = max(a,0) + log1p(exp(-|a|))
        acc += std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))) - y * a;
    }
    const double loss = acc / static_cast<double>(logits.cols());
    if (!std::isfinite(loss)) throw NumericError("ce_loss: non-finite result");
    return loss;
}

Matrix ce_loss_logit_grad(const Matrix& probs, const Matrix& labels) {
    if (!probs.same_shape(labels)) throw DimensionError("ce_loss_logit_grad: shape mismatch");
    Matrix g(probs.rows(), probs.cols(), 0.0);
    const double inv_b = 1.0 / static_cast<double>(probs.cols());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        g.data()[i] = (probs.data()[i] - labels.data()[i]) * inv_b;
    }
    return g;
}

TotalLossTerms total_loss(double ce, double dic, double sim, const Hyper& hyper) {
    TotalLossTerms t;
    t.ce = ce;
    t.dic = dic;
    t.sim = sim;
    t.clamped = sim < hyper.sim_floor;
    const double v = t.clamped ? hyper.sim_floor : sim;
    const double u = ce + hyper.beta * dic;
    t.total = u / v;
    t.w_ce = 1.0 / v;
    t.w_dic = hyper.beta / v;
    t.w_sim = t.clamped ? 0.0 : -u / (v * v);
    return t;
}

DsdlModel::DsdlModel(const ArchConfig& arch, const Hyper& hyper, SemanticSpace space)
    : arch_(arch), hyper_(hyper), space_(std::move(space)) {
    hyper_.validate();
    if (space_.class_count() != arch_.class_count) {
        throw DimensionError("DsdlModel: semantic space has " +
                             std::to_string(space_.class_count()) + " classes, arch says " +
                             std::to_string(arch_.class_count));
    }
    if (space_.embedding_dim() != arch_.embed_dim) {
        throw DimensionError("DsdlModel: embedding dim mismatch");
    }
    if (arch_.class_count >= arch_.feature_dim) {
        throw DimensionError("DsdlModel: undercompleteness requires class_count < feature_dim");
    }
    Rng init_rng = Rng(hyper_.seed).fork(101);
    if (arch_.feature_variant == FeatureVariant::mlp) {
        feature_ = FeatureModule::mlp(arch_.input_dim, arch_.mlp_hidden, arch_.feature_dim,
                                      params_, init_rng);
    } else {
        if (arch_.input_dim != arch_.feature_dim) {
            throw DimensionError("DsdlModel: passthrough requires input_dim == feature_dim");
        }
        feature_ = FeatureModule::passthrough(arch_.feature_dim);
    }
    autoencoder_.emplace(arch_.embed_dim, arch_.hidden_dim, arch_.feature_dim, params_,
                         init_rng);
}

DsdlModel::StepForward DsdlModel::forward(const Matrix& inputs, const Matrix& labels) {
    StepForward f;
    f.features = feature_->forward(inputs);
    f.dictionary = autoencoder_->encode(space_.embeddings);
    f.reconstructed = autoencoder_->decode(f.dictionary);
    SimilarityLoss sim = similarity_loss(space_, f.reconstructed);
    f.sim_grad = std::move(sim.d_reconstructed);
    f.codes = solve_codes(f.dictionary, f.features, hyper_.lambda);
    const double ce = ce_loss(f.codes.alpha, labels);
    const double dic = dictionary_loss(f.dictionary, f.features, f.codes, hyper_.lambda);
    f.loss = total_loss(ce, dic, sim.value, hyper_);
    return f;
}

void DsdlModel::backward(const StepForward& f, const Matrix& labels) {
    const TotalLossTerms& t = f.loss;
    // dL_total/dalpha, assembled per grad mode
    Matrix g_alpha = ce_loss_logit_grad(f.codes.probs, labels);
    for (std::size_t i = 0; i < g_alpha.size(); ++i) g_alpha.data()[i] *= t.w_ce;
    if (hyper_.grad_mode == GradMode::full) {
        const Matrix dic_alpha =
            dictionary_loss_alpha_grad(f.dictionary, f.features, f.codes, hyper_.lambda);
        for (std::size_t i = 0; i < g_alpha.size(); ++i) {
            g_alpha.data()[i] += t.w_dic * dic_alpha.data()[i];
        }
    }
    CodeGrads solve_grads =
        backward_codes(g_alpha, hyper_.grad_mode, f.dictionary, f.features, f.codes);

    CodeGrads direct = dictionary_loss_direct_grads(f.dictionary, f.features, f.codes);
    Matrix d_dict = solve_grads.dictionary;
    Matrix d_feat = solve_grads.features;
    for (std::size_t i = 0; i < d_dict.size(); ++i) {
        d_dict.data()[i] += t.w_dic * direct.dictionary.data()[i];
    }
    for (std::size_t i = 0; i < d_feat.size(); ++i) {
        d_feat.data()[i] += t.w_dic * direct.features.data()[i];
    }

    Matrix d_reconstructed = scale(f.sim_grad, t.w_sim);
    Matrix d_dict_sim = autoencoder_->decode_backward(d_reconstructed);
    for (std::size_t i = 0; i < d_dict.size(); ++i) {
        d_dict.data()[i] += d_dict_sim.data()[i];
    }
    autoencoder_->encode_backward(d_dict);
    feature_->backward(d_feat);
}

Matrix DsdlModel::current_dictionary() { return autoencoder_->encode(space_.embeddings); }

namespace {

Matrix select_columns(const Matrix& m, const std::vector<std::size_t>& idx) {
    Matrix out(m.rows(), idx.size(), 0.0);
    for (std::size_t j = 0; j < idx.size(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = m(i, idx[j]);
    }
    return out;
}

double round_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

void freeze_f32(Matrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = round_f32(m.data()[i]);
}

}  // namespace

TrainResult apus_train(const LabeledFeatureSet& data, const Hyper& hyper,
                       const ArchSpec& spec) {
    hyper.validate();
    if (data.sample_count() == 0) throw ConfigError("apus_train: dataset is empty");

    ArchConfig arch;
    arch.feature_variant = spec.feature_variant;
    arch.input_dim = data.input_dim();
    arch.mlp_hidden = spec.mlp_hidden;
    arch.feature_dim = spec.feature_dim ? spec.feature_dim : data.input_dim();
    arch.embed_dim = data.semantic.embedding_dim();
    arch.hidden_dim = spec.hidden_dim;
    arch.class_count = data.class_count();

    DsdlModel model(arch, hyper, data.semantic);
    Rng shuffle_rng = Rng(hyper.seed).fork(202);

    std::vector<std::size_t> order(data.sample_count());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        const double lr = lr_schedule(epoch, hyper.lr0);
        shuffle_rng.shuffle(order);
        EpochStats stats;
        stats.epoch = epoch;
        stats.lr = lr;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(hyper.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
            const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                               order.begin() + static_cast<std::ptrdiff_t>(stop));
            const int batch_index = static_cast<int>(batches);
            try {
                const Matrix xb = select_columns(data.inputs, idx);
                const Matrix yb = select_columns(data.labels, idx);
                model.params().zero_grads();
                DsdlModel::StepForward f = model.forward(xb, yb);
                if (!std::isfinite(f.loss.total)) {
                    throw NumericError("apus_train: non-finite total loss");
                }
                model.backward(f, yb);
                sgd_step(model.params(), lr, hyper.momentum, hyper.weight_decay);
                stats.ce += f.loss.ce;
                stats.dic += f.loss.dic;
                stats.sim += f.loss.sim;
                stats.total += f.loss.total;
            } catch (const NumericError& e) {
                throw DivergenceError(epoch, batch_index,
                                      "apus_train: diverged at epoch " + std::to_string(epoch) +
                                          ", batch " + std::to_string(batch_index) + ": " +
                                          e.what());
            }
            ++batches;
        }
        if (batches > 0) {
            stats.ce /= static_cast<double>(batches);
            stats.dic /= static_cast<double>(batches);
            stats.sim /= static_cast<double>(batches);
            stats.total /= static_cast<double>(batches);
        }
        result.curve.push_back(stats);
    }

    Checkpoint& ckpt = result.checkpoint;
    ckpt.arch = arch;
    ckpt.hyper = hyper;
    ckpt.class_names = data.semantic.class_names;
    ckpt.epoch = hyper.epochs;
    // Freeze to f32-representable values so FMAT serialization round-trips
    // bit-exactly; the dictionary is regenerated from the frozen weights.
    ckpt.params = model.params();
    for (const auto& name : ckpt.params.names()) {
        ParamEntry& e = ckpt.params.at(name);
        freeze_f32(e.value);
        e.grad = Matrix(e.value.rows(), e.value.cols(), 0.0);
        e.momentum = Matrix(e.value.rows(), e.value.cols(), 0.0);
    }
    {
        DsdlModel frozen(arch, hyper, data.semantic);
        for (const auto& name : frozen.params().names()) {
            frozen.params().at(name).value = ckpt.params.at(name).value;
        }
        ckpt.dictionary = frozen.current_dictionary();
        freeze_f32(ckpt.dictionary);
    }
    return result;
}

Matrix checkpoint_predict(const Checkpoint& ckpt, const Matrix& inputs) {
    Matrix features = inputs;
    if (ckpt.arch.feature_variant == FeatureVariant::mlp) {
        ParamStore params = ckpt.params;
        FeatureModule feat = FeatureModule::mlp_attached(
            ckpt.arch.input_dim, ckpt.arch.mlp_hidden, ckpt.arch.feature_dim, params);
        features = feat.forward(inputs);
    } else if (inputs.rows() != ckpt.arch.feature_dim) {
        throw DimensionError("checkpoint_predict: inputs have " + std::to_string(inputs.rows()) +
                             " rows, expected " + std::to_string(ckpt.arch.feature_dim));
    }
    return predict_probs(ckpt.dictionary, features, ckpt.hyper.lambda);
}

MetricReport evaluate(const Checkpoint& ckpt, const LabeledFeatureSet& data,
                      std::size_t topk_k, double threshold) {
    if (data.class_count() != ckpt.class_names.size()) {
        throw DimensionError("evaluate: dataset has " + std::to_string(data.class_count()) +
                             " classes, checkpoint has " +
                             std::to_string(ckpt.class_names.size()));
    }
    if (data.semantic.class_names != ckpt.class_names) {
        throw ConfigError("evaluate: dataset and checkpoint class names differ");
    }
    const Matrix probs = checkpoint_predict(ckpt, data.inputs);
    return compute_metrics(probs, data.labels, ckpt.class_names, topk_k, threshold);
}

namespace {

std::string param_file_name(const std::string& param) {
    std::string f = param;
    for (char& ch : f) {
        if (ch == '.') ch = '_';
    }
    return f + ".fmat";
}

void write_config_kv(std::ostream& out, const Checkpoint& ckpt) {
    out.precision(17);
    out << "lambda=" << ckpt.hyper.lambda << '\n';
    out << "beta=" << ckpt.hyper.beta << '\n';
    out << "lr0=" << ckpt.hyper.lr0 << '\n';
    out << "momentum=" << ckpt.hyper.momentum << '\n';
    out << "weight_decay=" << ckpt.hyper.weight_decay << '\n';
    out << "epochs=" << ckpt.hyper.epochs << '\n';
    out << "batch_size=" << ckpt.hyper.batch_size << '\n';
    out << "seed=" << ckpt.hyper.seed << '\n';
    out << "grad_mode=" << to_string(ckpt.hyper.grad_mode) << '\n';
    out << "sim_floor=" << ckpt.hyper.sim_floor << '\n';
    out << "feature=" << to_string(ckpt.arch.feature_variant) << '\n';
    out << "input_dim=" << ckpt.arch.input_dim << '\n';
    out << "mlp_hidden=" << ckpt.arch.mlp_hidden << '\n';
    out << "feature_dim=" << ckpt.arch.feature_dim << '\n';
    out << "embed_dim=" << ckpt.arch.embed_dim << '\n';
    out << "hidden=" << ckpt.arch.hidden_dim << '\n';
    out << "class_count=" << ckpt.arch.class_count << '\n';
}

std::map<std::string, std::string> read_kv_file(const std::string& path);

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("save_checkpoint: cannot create directory '" + dir + "'");

    std::ofstream manifest(dir + "/manifest.txt", std::ios::trunc);
    if (!manifest) throw IoError("save_checkpoint: cannot write manifest in '" + dir + "'");
    manifest << "dsdl-checkpoint 1\n";
    manifest << "epoch " << ckpt.epoch << '\n';
    manifest << "dictionary dictionary.fmat\n";
    save_fmat(ckpt.dictionary, dir + "/dictionary.fmat");
    for (const auto& name : ckpt.params.names()) {
        const Matrix& v = ckpt.params.at(name).value;
        const std::string file = param_file_name(name);
        manifest << "param " << name << ' ' << v.rows() << ' ' << v.cols() << ' ' << file
                 << '\n';
        save_fmat(v, dir + "/" + file);
    }
    if (!manifest) throw IoError("save_checkpoint: manifest write failed");

    std::ofstream classes(dir + "/classes.txt", std::ios::trunc);
    if (!classes) throw IoError("save_checkpoint: cannot write classes.txt");
    for (const auto& name : ckpt.class_names) classes << name << '\n';

    std::ofstream config(dir + "/config.txt", std::ios::trunc);
    if (!config) throw IoError("save_checkpoint: cannot write config.txt");
    write_config_kv(config, ckpt);
}

namespace {

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError("'" + path + "' line " + std::to_string(lineno) +
                          " is not key=value");
        }
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError("checkpoint config is missing key '" + key + "'");
    return std::stod(it->second);
}

long long kv_int(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError("checkpoint config is missing key '" + key + "'");
    return std::stoll(it->second);
}

std::string kv_str(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError("checkpoint config is missing key '" + key + "'");
    return it->second;
}

}  // namespace

Checkpoint load_checkpoint(const std::string& dir) {
    Checkpoint ckpt;
    const auto kv = read_kv_file(dir + "/config.txt");
    ckpt.hyper.lambda = kv_double(kv, "lambda");
    ckpt.hyper.beta = kv_double(kv, "beta");
    ckpt.hyper.lr0 = kv_double(kv, "lr0");
    ckpt.hyper.momentum = kv_double(kv, "momentum");
    ckpt.hyper.weight_decay = kv_double(kv, "weight_decay");
    ckpt.hyper.epochs = static_cast<int>(kv_int(kv, "epochs"));
    ckpt.hyper.batch_size = static_cast<int>(kv_int(kv, "batch_size"));
    ckpt.hyper.seed = static_cast<std::uint64_t>(kv_int(kv, "seed"));
    ckpt.hyper.grad_mode = grad_mode_from_string(kv_str(kv, "grad_mode"));
    ckpt.hyper.sim_floor = kv_double(kv, "sim_floor");
    ckpt.arch.feature_variant = feature_variant_from_string(kv_str(kv, "feature"));
    ckpt.arch.input_dim = static_cast<std::size_t>(kv_int(kv, "input_dim"));
    ckpt.arch.mlp_hidden = static_cast<std::size_t>(kv_int(kv, "mlp_hidden"));
    ckpt.arch.feature_dim = static_cast<std::size_t>(kv_int(kv, "feature_dim"));
    ckpt.arch.embed_dim = static_cast<std::size_t>(kv_int(kv, "embed_dim"));
    ckpt.arch.hidden_dim = static_cast<std::size_t>(kv_int(kv, "hidden"));
    ckpt.arch.class_count = static_cast<std::size_t>(kv_int(kv, "class_count"));

    std::ifstream classes(dir + "/classes.txt");
    if (!classes) throw IoError("load_checkpoint: cannot open '" + dir + "/classes.txt'");
    std::string line;
    while (std::getline(classes, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ckpt.class_names.push_back(line);
    }
    if (ckpt.class_names.size() != ckpt.arch.class_count) {
        throw IoError("load_checkpoint: classes.txt lists " +
                      std::to_string(ckpt.class_names.size()) + " classes, config says " +
                      std::to_string(ckpt.arch.class_count));
    }

    std::ifstream manifest(dir + "/manifest.txt");
    if (!manifest) throw IoError("load_checkpoint: cannot open '" + dir + "/manifest.txt'");
    if (!std::getline(manifest, line) || line.rfind("dsdl-checkpoint 1", 0) != 0) {
        throw IoError("load_checkpoint: '" + dir + "' has an unrecognized manifest header");
    }
    bool have_dictionary = false;
    while (std::getline(manifest, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string kind;
        is >> kind;
        if (kind == "epoch") {
            is >> ckpt.epoch;
        } else if (kind == "dictionary") {
            std::string file;
            is >> file;
            ckpt.dictionary = load_fmat(dir + "/" + file);
            have_dictionary = true;
        } else if (kind == "param") {
            std::string name, file;
            std::size_t rows = 0, cols = 0;
            is >> name >> rows >> cols >> file;
            if (is.fail()) throw IoError("load_checkpoint: malformed manifest line '" + line + "'");
            Matrix value = load_fmat(dir + "/" + file);
            if (value.rows() != rows || value.cols() != cols) {
                throw IoError("load_checkpoint: '" + file + "' is " +
                              std::to_string(value.rows()) + "x" + std::to_string(value.cols()) +
                              ", manifest says " + std::to_string(rows) + "x" +
                              std::to_string(cols));
            }
            ckpt.params.add(name, std::move(value));
        } else {
            throw IoError("load_checkpoint: unknown manifest entry '" + kind + "'");
        }
    }
    if (!have_dictionary) throw IoError("load_checkpoint: manifest lists no dictionary");
    if (ckpt.dictionary.rows() != ckpt.arch.feature_dim ||
        ckpt.dictionary.cols() != ckpt.arch.class_count) {
        throw IoError("load_checkpoint: dictionary shape does not match config");
    }
    return ckpt;
}

void write_curve_csv(const std::vector<EpochStats>& curve, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("write_curve_csv: cannot open '" + path + "' for writing");
    out.precision(17);
    out << "epoch,lr,L_ce,L_dic,L_sim,L_total\n";
    for (const auto& s : curve) {
        out << s.epoch << ',' << s.lr << ',' << s.ce << ',' << s.dic << ',' << s.sim << ','
            << s.total << '\n';
    }
    if (!out) throw IoError("write_curve_csv: write failed for '" + path + "'");
}

}  // namespace dsdl
