#include "dsdl/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dsdl {

namespace {

const std::vector<std::string>& key_table() {
    static const std::vector<std::string> keys = {
        // hyper-parameters
        "lambda", "beta", "lr0", "momentum", "weight_decay", "epochs", "batch_size",
        "seed", "grad_mode", "sim_floor",
        // architecture
        "feature", "mlp_hidden", "feature_dim", "hidden",
        // paths
        "features", "labels", "embeddings", "checkpoint", "curve", "report", "out",
        // evaluation
        "topk", "threshold", "ap_variant",
        // gradient check
        "gradcheck_rtol", "gradcheck_step",
        // synthetic data
        "synth_d", "synth_c", "synth_n", "synth_test_n", "synth_k", "synth_noise",
    };
    return keys;
}

}  // namespace

RunConfig::RunConfig() {
    const Hyper h;
    const ArchSpec a;
    const SynthSpec s;
    std::ostringstream init;
    init.precision(17);
    const auto num = [&init](double v) {
        init.str("");
        init << v;
        return init.str();
    };
    values_["lambda"] = num(h.lambda);
    values_["beta"] = num(h.beta);
    values_["lr0"] = num(h.lr0);
    values_["momentum"] = num(h.momentum);
    values_["weight_decay"] = num(h.weight_decay);
    values_["epochs"] = std::to_string(h.epochs);
    values_["batch_size"] = std::to_string(h.batch_size);
    values_["seed"] = std::to_string(h.seed);
    values_["grad_mode"] = to_string(h.grad_mode);
    values_["sim_floor"] = num(h.sim_floor);
    values_["feature"] = to_string(a.feature_variant);
    values_["mlp_hidden"] = std::to_string(a.mlp_hidden);
    values_["feature_dim"] = std::to_string(a.feature_dim);
    values_["hidden"] = std::to_string(a.hidden_dim);
    values_["features"] = "";
    values_["labels"] = "";
    values_["embeddings"] = "";
    values_["checkpoint"] = "";
    values_["curve"] = "";
    values_["report"] = "";
    values_["out"] = "";
    values_["topk"] = "3";
    values_["threshold"] = "0.5";
    values_["ap_variant"] = "all_points";
    values_["gradcheck_rtol"] = "0.0001";
    values_["gradcheck_step"] = "1e-05";
    values_["synth_d"] = std::to_string(s.feature_dim);
    values_["synth_c"] = std::to_string(s.class_count);
    values_["synth_n"] = std::to_string(s.sample_count);
    values_["synth_test_n"] = std::to_string(s.test_count);
    values_["synth_k"] = std::to_string(s.embed_dim);
    values_["synth_noise"] = num(s.noise_sigma);
}

const std::vector<std::string>& RunConfig::known_keys() { return key_table(); }

void RunConfig::set(const std::string& key, const std::string& value) {
    if (values_.find(key) == values_.end()) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    values_[key] = value;
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config file '" + path + "' line " + std::to_string(lineno) +
                              " is not key=value");
        }
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

void RunConfig::apply_preset(const std::string& name) {
    const Hyper h = Hyper::preset(name);
    std::ostringstream os;
    os.precision(17);
    os << h.lambda;
    values_["lambda"] = os.str();
    os.str("");
    os << h.beta;
    values_["beta"] = os.str();
}

bool RunConfig::has(const std::string& key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

std::string RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' has non-numeric value '" + v + "'");
    }
}

long long RunConfig::get_int(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' has non-integer value '" + v + "'");
    }
}

Hyper RunConfig::hyper() const {
    Hyper h;
    h.lambda = get_double("lambda");
    h.beta = get_double("beta");
    h.lr0 = get_double("lr0");
    h.momentum = get_double("momentum");
    h.weight_decay = get_double("weight_decay");
    h.epochs = static_cast<int>(get_int("epochs"));
    h.batch_size = static_cast<int>(get_int("batch_size"));
    h.seed = static_cast<std::uint64_t>(get_int("seed"));
    h.grad_mode = grad_mode_from_string(get("grad_mode"));
    h.sim_floor = get_double("sim_floor");
    h.validate();
    return h;
}

ArchSpec RunConfig::arch() const {
    ArchSpec a;
    a.feature_variant = feature_variant_from_string(get("feature"));
    a.mlp_hidden = static_cast<std::size_t>(get_int("mlp_hidden"));
    a.feature_dim = static_cast<std::size_t>(get_int("feature_dim"));
    a.hidden_dim = static_cast<std::size_t>(get_int("hidden"));
    return a;
}

SynthSpec RunConfig::synth() const {
    SynthSpec s;
    s.feature_dim = static_cast<std::size_t>(get_int("synth_d"));
    s.class_count = static_cast<std::size_t>(get_int("synth_c"));
    s.sample_count = static_cast<std::size_t>(get_int("synth_n"));
    s.test_count = static_cast<std::size_t>(get_int("synth_test_n"));
    s.embed_dim = static_cast<std::size_t>(get_int("synth_k"));
    s.seed = static_cast<std::uint64_t>(get_int("seed"));
    s.noise_sigma = get_double("synth_noise");
    return s;
}

std::string RunConfig::resolved() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

}  // namespace dsdl
