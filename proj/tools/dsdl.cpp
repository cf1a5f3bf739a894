#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "dsdl/config.hpp"
#include "dsdl/dataio.hpp"
#include "dsdl/model.hpp"

namespace {

using dsdl::RunConfig;

struct CommonArgs {
    std::string config_file;
    std::string preset;
    std::map<std::string, std::string> overrides;
};

void attach_config_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_file, "key=value config file");
    cmd->add_option("--preset", args.preset, "hyper-parameter preset: voc or coco");
    for (const auto& key : RunConfig::known_keys()) {
        cmd->add_option_function<std::string>(
            "--" + key, [&args, key](const std::string& v) { args.overrides[key] = v; });
    }
}

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_file.empty()) cfg.load_file(args.config_file);
    if (!args.preset.empty()) cfg.apply_preset(args.preset);
    for (const auto& [key, value] : args.overrides) cfg.set(key, value);
    return cfg;
}

std::string require_path(const RunConfig& cfg, const std::string& key) {
    if (!cfg.has(key)) throw dsdl::ConfigError("missing required config key '" + key + "'");
    return cfg.get(key);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw dsdl::IoError("cannot open '" + path + "' for writing");
    out << text;
}

void log_config(const RunConfig& cfg) {
    std::cout << "resolved config:\n" << cfg.resolved() << std::flush;
}

dsdl::LabeledFeatureSet load_dataset(const RunConfig& cfg) {
    const dsdl::Matrix inputs = dsdl::load_fmat(require_path(cfg, "features"));
    const dsdl::LabelFile lf = dsdl::load_labels(require_path(cfg, "labels"));
    const dsdl::SemanticSpace space =
        dsdl::load_glove(require_path(cfg, "embeddings"), lf.class_names);
    dsdl::LabeledFeatureSet data(inputs, lf.labels, lf.ids, space);
    const std::size_t empty = data.empty_label_samples();
    if (empty > 0) {
        std::cout << "note: " << empty << " sample(s) carry no positive label\n";
    }
    return data;
}

int cmd_train(const RunConfig& cfg) {
    log_config(cfg);
    const std::string ckpt_dir = require_path(cfg, "checkpoint");
    const dsdl::LabeledFeatureSet data = load_dataset(cfg);
    const dsdl::TrainResult result = dsdl::apus_train(data, cfg.hyper(), cfg.arch());
    dsdl::save_checkpoint(result.checkpoint, ckpt_dir);
    const std::string curve_path =
        cfg.has("curve") ? cfg.get("curve") : ckpt_dir + "/curve.csv";
    dsdl::write_curve_csv(result.curve, curve_path);
    write_text(ckpt_dir + "/run_config.txt", cfg.resolved());
    if (!result.curve.empty()) {
        const auto& last = result.curve.back();
        std::cout << "trained " << result.curve.size() << " epoch(s); final L_total "
                  << last.total << " (L_ce " << last.ce << ", L_dic " << last.dic
                  << ", L_sim " << last.sim << ")\n";
    }
    std::cout << "checkpoint written to " << ckpt_dir << "\n";
    return 0;
}

int cmd_eval(const RunConfig& cfg) {
    log_config(cfg);
    const dsdl::Checkpoint ckpt = dsdl::load_checkpoint(require_path(cfg, "checkpoint"));
    const dsdl::Matrix inputs = dsdl::load_fmat(require_path(cfg, "features"));
    const dsdl::LabelFile lf =
        dsdl::load_labels(require_path(cfg, "labels"), ckpt.class_names);
    if (lf.labels.cols() != inputs.cols()) {
        throw dsdl::ConfigError("eval: features have " + std::to_string(inputs.cols()) +
                                " samples, labels have " + std::to_string(lf.labels.cols()));
    }
    const dsdl::Matrix probs = dsdl::checkpoint_predict(ckpt, inputs);
    const dsdl::MetricReport report = dsdl::compute_metrics(
        probs, lf.labels, ckpt.class_names,
        static_cast<std::size_t>(cfg.get_int("topk")), cfg.get_double("threshold"));
    std::cout << dsdl::format_report_table(report);
    if (cfg.has("report")) {
        const std::string path = cfg.get("report");
        dsdl::write_report_csv(report, path);
        write_text(path + ".config.txt", cfg.resolved());
        std::cout << "report written to " << path << "\n";
    }
    return 0;
}

int cmd_predict(const RunConfig& cfg) {
    log_config(cfg);
    const dsdl::Checkpoint ckpt = dsdl::load_checkpoint(require_path(cfg, "checkpoint"));
    const dsdl::Matrix inputs = dsdl::load_fmat(require_path(cfg, "features"));
    const std::string out_dir = require_path(cfg, "out");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw dsdl::IoError("cannot create output directory '" + out_dir + "'");

    const dsdl::Matrix probs = dsdl::checkpoint_predict(ckpt, inputs);
    dsdl::save_fmat(probs, out_dir + "/probs.fmat");
    const dsdl::Matrix assigned = dsdl::assign_threshold(probs, cfg.get_double("threshold"));
    dsdl::LabelFile lf;
    lf.class_names = ckpt.class_names;
    for (std::size_t i = 0; i < assigned.cols(); ++i) lf.ids.push_back("p" + std::to_string(i));
    lf.labels = assigned;
    dsdl::save_labels(lf, out_dir + "/predicted_labels.csv");
    write_text(out_dir + "/run_config.txt", cfg.resolved());
    std::cout << "predictions for " << probs.cols() << " sample(s) written to " << out_dir
              << "\n";
    return 0;
}

int cmd_synth(const RunConfig& cfg) {
    log_config(cfg);
    const std::string out_dir = require_path(cfg, "out");
    const dsdl::SynthOutput out = dsdl::synth_generate(cfg.synth());
    dsdl::synth_write(out, out_dir);
    write_text(out_dir + "/run_config.txt", cfg.resolved());
    std::cout << "planted dataset with " << out.train.sample_count() << " train";
    if (out.test.sample_count() > 0) std::cout << " + " << out.test.sample_count() << " test";
    std::cout << " sample(s) written to " << out_dir << "\n";
    return 0;
}

int cmd_gradcheck(const RunConfig& cfg) {
    log_config(cfg);
    // Toy composition with every differentiable path active: mlp feature
    // module 8 -> 8 -> 16, autoencoder 8 -> 8 -> 16, 4 classes, 6 samples.
    dsdl::ArchConfig arch;
    arch.feature_variant = dsdl::FeatureVariant::mlp;
    arch.input_dim = 8;
    arch.mlp_hidden = 8;
    arch.feature_dim = 16;
    arch.embed_dim = 8;
    arch.hidden_dim = 8;
    arch.class_count = 4;

    dsdl::Hyper hyper = cfg.hyper();
    hyper.epochs = 0;

    dsdl::Rng rng = dsdl::Rng(hyper.seed).fork(303);
    dsdl::Matrix embeddings(arch.embed_dim, arch.class_count, 0.0);
    for (std::size_t i = 0; i < embeddings.size(); ++i) embeddings.data()[i] = rng.normal();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < arch.class_count; ++j) names.push_back("class" + std::to_string(j));

    const std::size_t batch = 6;
    dsdl::Matrix x(arch.input_dim, batch, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    dsdl::Matrix y(arch.class_count, batch, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;

    dsdl::DsdlModel model(arch, hyper, dsdl::SemanticSpace(embeddings, names));
    const auto closure = [&]() {
        auto f = model.forward(x, y);
        model.backward(f, y);
        return f.loss.total;
    };
    const dsdl::GradCheckReport report =
        dsdl::grad_check(closure, model.params(), cfg.get_double("gradcheck_rtol"),
                         cfg.get_double("gradcheck_step"));
    std::cout << report.summary();
    std::cout << (report.passed() ? "gradcheck passed" : "gradcheck FAILED") << " (max rel err "
              << report.max_rel_err << ", rtol " << report.rtol << ")\n";
    return report.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deep semantic dictionary learning: train, evaluate and inspect "
                 "dictionary-query multi-label classifiers"};
    app.require_subcommand(1);

    CommonArgs train_args, eval_args, predict_args, synth_args, gradcheck_args;
    CLI::App* train = app.add_subcommand("train", "train a model with APUS");
    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint against labels");
    CLI::App* predict = app.add_subcommand("predict", "write probabilities and labels");
    CLI::App* synth = app.add_subcommand("synth", "generate a planted synthetic dataset");
    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    attach_config_flags(train, train_args);
    attach_config_flags(eval, eval_args);
    attach_config_flags(predict, predict_args);
    attach_config_flags(synth, synth_args);
    attach_config_flags(gradcheck, gradcheck_args);

    try {
        app.parse(argc, argv);
        if (train->parsed()) return cmd_train(resolve_config(train_args));
        if (eval->parsed()) return cmd_eval(resolve_config(eval_args));
        if (predict->parsed()) return cmd_predict(resolve_config(predict_args));
        if (synth->parsed()) return cmd_synth(resolve_config(synth_args));
        if (gradcheck->parsed()) return cmd_gradcheck(resolve_config(gradcheck_args));
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const dsdl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const dsdl::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 2;
    } catch (const dsdl::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const dsdl::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
