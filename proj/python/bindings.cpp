#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dsdl/config.hpp"
#include "dsdl/dataio.hpp"
#include "dsdl/metrics.hpp"
#include "dsdl/model.hpp"

namespace py = pybind11;
using namespace dsdl;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& array) {
    if (array.ndim() != 2) {
        throw DimensionError("expected a 2-D array, got " + std::to_string(array.ndim()) +
                             " dimension(s)");
    }
    const auto rows = static_cast<std::size_t>(array.shape(0));
    const auto cols = static_cast<std::size_t>(array.shape(1));
    std::vector<double> data(rows * cols);
    std::memcpy(data.data(), array.data(), rows * cols * sizeof(double));
    return Matrix(rows, cols, std::move(data));
}

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::memcpy(out.mutable_data(), m.data(), m.size() * sizeof(double));
    return out;
}

py::dict scores_dict(const PrfScores& s) {
    py::dict d;
    d["OP"] = s.op;
    d["OR"] = s.o_recall;
    d["OF1"] = s.of1;
    d["CP"] = s.cp;
    d["CR"] = s.cr;
    d["CF1"] = s.cf1;
    return d;
}

py::dict report_dict(const MetricReport& r) {
    py::dict d;
    d["mAP"] = r.map;
    py::list aps;
    for (const auto& ap : r.per_class_ap) {
        aps.append(ap.defined ? py::cast(ap.value) : py::none());
    }
    d["per_class_ap"] = aps;
    d["class_names"] = r.class_names;
    d["undefined_ap_classes"] = r.undefined_ap_classes;
    d[py::cast(r.topk.policy)] = scores_dict(r.topk.scores);
    d[py::cast(r.threshold.policy)] = scores_dict(r.threshold.scores);
    return d;
}

Hyper hyper_from_kwargs(double lambda, double beta, double lr0, double momentum,
                        double weight_decay, int epochs, int batch_size,
                        std::uint64_t seed, const std::string& grad_mode,
                        double sim_floor) {
    Hyper h;
    h.lambda = lambda;
    h.beta = beta;
    h.lr0 = lr0;
    h.momentum = momentum;
    h.weight_decay = weight_decay;
    h.epochs = epochs;
    h.batch_size = batch_size;
    h.seed = seed;
    h.grad_mode = grad_mode_from_string(grad_mode);
    h.sim_floor = sim_floor;
    h.validate();
    return h;
}

}  // namespace

PYBIND11_MODULE(_dsdl, m) {
    m.doc() = "Deep semantic dictionary learning: ridge-coded multi-label "
              "classification over a learned semantic dictionary";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    // numerics
    m.def(
        "solve_spd",
        [](const DoubleArray& a, const DoubleArray& rhs) {
            return to_numpy(solve_spd(to_matrix(a), to_matrix(rhs)));
        },
        py::arg("matrix"), py::arg("rhs"),
        "Solve an SPD system by Cholesky factorization.");
    m.def(
        "matmul",
        [](const DoubleArray& a, const DoubleArray& b) {
            return to_numpy(matmul(to_matrix(a), to_matrix(b)));
        },
        py::arg("a"), py::arg("b"));

    // collaborative coding
    m.def(
        "solve_codes",
        [](const DoubleArray& dictionary, const DoubleArray& features, double lam) {
            CodeBatch codes = solve_codes(to_matrix(dictionary), to_matrix(features), lam);
            return py::make_tuple(to_numpy(codes.alpha), to_numpy(codes.probs));
        },
        py::arg("dictionary"), py::arg("features"), py::arg("lambda_"),
        "Closed-form ridge codes; returns (alpha, probs).");
    m.def(
        "dictionary_loss",
        [](const DoubleArray& dictionary, const DoubleArray& features, double lam) {
            Matrix d = to_matrix(dictionary), f = to_matrix(features);
            CodeBatch codes = solve_codes(d, f, lam);
            return dictionary_loss(d, f, codes, lam);
        },
        py::arg("dictionary"), py::arg("features"), py::arg("lambda_"));
    m.def(
        "predict_probs",
        [](const DoubleArray& dictionary, const DoubleArray& features, double lam) {
            return to_numpy(predict_probs(to_matrix(dictionary), to_matrix(features), lam));
        },
        py::arg("dictionary"), py::arg("features"), py::arg("lambda_"));

    // metrics
    m.def(
        "average_precision",
        [](const std::vector<double>& scores, const std::vector<int>& relevance) {
            AveragePrecision ap = average_precision(scores, relevance);
            return ap.defined ? py::cast(ap.value) : py::object(py::none());
        },
        py::arg("scores"), py::arg("relevance"));
    m.def(
        "assign_topk",
        [](const DoubleArray& probs, std::size_t k) {
            return to_numpy(assign_topk(to_matrix(probs), k));
        },
        py::arg("probs"), py::arg("k"));
    m.def(
        "assign_threshold",
        [](const DoubleArray& probs, double t) {
            return to_numpy(assign_threshold(to_matrix(probs), t));
        },
        py::arg("probs"), py::arg("threshold") = 0.5);
    m.def(
        "prf_suite",
        [](const DoubleArray& assigned, const DoubleArray& truth) {
            return scores_dict(prf_suite(to_matrix(assigned), to_matrix(truth)));
        },
        py::arg("assigned"), py::arg("truth"));
    m.def(
        "compute_metrics",
        [](const DoubleArray& probs, const DoubleArray& truth,
           const std::vector<std::string>& names, std::size_t k, double threshold) {
            return report_dict(
                compute_metrics(to_matrix(probs), to_matrix(truth), names, k, threshold));
        },
        py::arg("probs"), py::arg("truth"), py::arg("class_names"), py::arg("topk") = 3,
        py::arg("threshold") = 0.5);

    // schedules
    m.def("lr_schedule", &lr_schedule, py::arg("epoch"), py::arg("lr0") = 0.01);

    // file formats
    m.def(
        "load_fmat", [](const std::string& path) { return to_numpy(load_fmat(path)); },
        py::arg("path"));
    m.def(
        "save_fmat",
        [](const DoubleArray& matrix, const std::string& path) {
            save_fmat(to_matrix(matrix), path);
        },
        py::arg("matrix"), py::arg("path"));
    m.def(
        "load_glove",
        [](const std::string& path, const std::vector<std::string>& class_names) {
            SemanticSpace space = load_glove(path, class_names);
            return py::make_tuple(to_numpy(space.embeddings), space.class_names);
        },
        py::arg("path"), py::arg("class_names"),
        "Returns (embeddings k x c, class_names).");
    m.def(
        "load_labels",
        [](const std::string& path) {
            LabelFile lf = load_labels(path);
            return py::make_tuple(to_numpy(lf.labels), lf.ids, lf.class_names);
        },
        py::arg("path"), "Returns (labels c x N, ids, class_names).");

    // synthetic data
    m.def(
        "synth_generate",
        [](std::size_t d, std::size_t c, std::size_t n, std::uint64_t seed,
           double noise_sigma, std::size_t embed_dim, std::size_t test_n) {
            SynthSpec spec;
            spec.feature_dim = d;
            spec.class_count = c;
            spec.sample_count = n;
            spec.seed = seed;
            spec.noise_sigma = noise_sigma;
            spec.embed_dim = embed_dim;
            spec.test_count = test_n;
            SynthOutput out = synth_generate(spec);
            py::dict result;
            result["features"] = to_numpy(out.train.inputs);
            result["labels"] = to_numpy(out.train.labels);
            result["codes"] = to_numpy(out.train_codes);
            result["embeddings"] = to_numpy(out.train.semantic.embeddings);
            result["class_names"] = out.train.semantic.class_names;
            result["planted_dictionary"] = to_numpy(out.planted_dictionary);
            if (out.test.sample_count() > 0) {
                result["test_features"] = to_numpy(out.test.inputs);
                result["test_labels"] = to_numpy(out.test.labels);
            }
            return result;
        },
        py::arg("d") = 64, py::arg("c") = 8, py::arg("n") = 512, py::arg("seed") = 0,
        py::arg("noise_sigma") = 0.0, py::arg("embed_dim") = 32, py::arg("test_n") = 0);

    // training and checkpoints
    py::class_<Checkpoint>(m, "Checkpoint")
        .def_property_readonly("epoch", [](const Checkpoint& c) { return c.epoch; })
        .def_property_readonly("class_names",
                               [](const Checkpoint& c) { return c.class_names; })
        .def_property_readonly("dictionary",
                               [](const Checkpoint& c) { return to_numpy(c.dictionary); })
        .def("predict",
             [](const Checkpoint& c, const DoubleArray& inputs) {
                 return to_numpy(checkpoint_predict(c, to_matrix(inputs)));
             })
        .def("save", [](const Checkpoint& c, const std::string& dir) {
            save_checkpoint(c, dir);
        });

    m.def("load_checkpoint", &load_checkpoint, py::arg("dir"));

    m.def(
        "train",
        [](const DoubleArray& features, const DoubleArray& labels,
           const DoubleArray& embeddings, const std::vector<std::string>& class_names,
           double lambda, double beta, double lr0, double momentum, double weight_decay,
           int epochs, int batch_size, std::uint64_t seed, const std::string& grad_mode,
           double sim_floor, const std::string& feature, std::size_t mlp_hidden,
           std::size_t feature_dim, std::size_t hidden) {
            Matrix x = to_matrix(features);
            std::vector<std::string> ids;
            for (std::size_t i = 0; i < x.cols(); ++i) ids.push_back("s" + std::to_string(i));
            LabeledFeatureSet data(std::move(x), to_matrix(labels), std::move(ids),
                                   SemanticSpace(to_matrix(embeddings), class_names));
            Hyper h = hyper_from_kwargs(lambda, beta, lr0, momentum, weight_decay, epochs,
                                        batch_size, seed, grad_mode, sim_floor);
            ArchSpec arch;
            arch.feature_variant = feature_variant_from_string(feature);
            arch.mlp_hidden = mlp_hidden;
            arch.feature_dim = feature_dim;
            arch.hidden_dim = hidden;
            TrainResult result = apus_train(data, h, arch);
            py::list curve;
            for (const auto& s : result.curve) {
                py::dict row;
                row["epoch"] = s.epoch;
                row["lr"] = s.lr;
                row["L_ce"] = s.ce;
                row["L_dic"] = s.dic;
                row["L_sim"] = s.sim;
                row["L_total"] = s.total;
                curve.append(row);
            }
            return py::make_tuple(result.checkpoint, curve);
        },
        py::arg("features"), py::arg("labels"), py::arg("embeddings"),
        py::arg("class_names"), py::arg("lambda_") = 10.0, py::arg("beta") = 1e-4,
        py::arg("lr0") = 0.01, py::arg("momentum") = 0.9, py::arg("weight_decay") = 1e-4,
        py::arg("epochs") = 100, py::arg("batch_size") = 16, py::arg("seed") = 7,
        py::arg("grad_mode") = "full", py::arg("sim_floor") = 1e-3,
        py::arg("feature") = "passthrough", py::arg("mlp_hidden") = 64,
        py::arg("feature_dim") = 0, py::arg("hidden") = 1024,
        "APUS training; returns (checkpoint, curve).");

    m.def(
        "evaluate",
        [](const Checkpoint& ckpt, const DoubleArray& features, const DoubleArray& labels,
           std::size_t k, double threshold) {
            Matrix probs = checkpoint_predict(ckpt, to_matrix(features));
            return report_dict(
                compute_metrics(probs, to_matrix(labels), ckpt.class_names, k, threshold));
        },
        py::arg("checkpoint"), py::arg("features"), py::arg("labels"), py::arg("topk") = 3,
        py::arg("threshold") = 0.5);
}
