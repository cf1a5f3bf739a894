#include "dsdl/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace dsdl {

namespace {

std::vector<std::size_t> rank_order(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

void require_scores(const std::vector<double>& scores, const std::vector<int>& relevance) {
    if (scores.size() != relevance.size()) {
        throw DimensionError("average_precision: scores and relevance lengths differ");
    }
    if (scores.empty()) throw DimensionError("average_precision: empty input");
}

}  // namespace

AveragePrecision average_precision(const std::vector<double>& scores,
                                   const std::vector<int>& relevance) {
    require_scores(scores, relevance);
    const auto order = rank_order(scores);
    long long hits = 0;
    double acc = 0.0;
    for (std::size_t rank = 1; rank <= order.size(); ++rank) {
        if (relevance[order[rank - 1]]) {
            ++hits;
            acc += static_cast<double>(hits) / static_cast<double>(rank);
        }
    }
    AveragePrecision ap;
    ap.defined = hits > 0;
    ap.value = ap.defined ? acc / static_cast<double>(hits) : 0.0;
    return ap;
}

AveragePrecision average_precision_11point(const std::vector<double>& scores,
                                           const std::vector<int>& relevance) {
    require_scores(scores, relevance);
    const auto order = rank_order(scores);
    const long long total = std::count_if(relevance.begin(), relevance.end(),
                                          [](int r) { return r != 0; });
    AveragePrecision ap;
    if (total == 0) return ap;
    std::vector<double> precision(order.size()), recall(order.size());
    long long hits = 0;
    for (std::size_t rank = 1; rank <= order.size(); ++rank) {
        if (relevance[order[rank - 1]]) ++hits;
        precision[rank - 1] = static_cast<double>(hits) / static_cast<double>(rank);
        recall[rank - 1] = static_cast<double>(hits) / static_cast<double>(total);
    }
    double acc = 0.0;
    for (int t = 0; t <= 10; ++t) {
        const double level = t / 10.0;
        double best = 0.0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (recall[i] >= level) best = std::max(best, precision[i]);
        }
        acc += best;
    }
    ap.defined = true;
    ap.value = acc / 11.0;
    return ap;
}

Matrix assign_topk(const Matrix& probs, std::size_t k) {
    if (k == 0 || k > probs.rows()) {
        throw DimensionError("assign_topk: k=" + std::to_string(k) + " with " +
                             std::to_string(probs.rows()) + " classes");
    }
    Matrix out(probs.rows(), probs.cols(), 0.0);
    std::vector<std::size_t> order(probs.rows());
    for (std::size_t col = 0; col < probs.cols(); ++col) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return probs(a, col) > probs(b, col);
        });
        for (std::size_t i = 0; i < k; ++i) out(order[i], col) = 1.0;
    }
    return out;
}

Matrix assign_threshold(const Matrix& probs, double t) {
    Matrix out(probs.rows(), probs.cols(), 0.0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        out.data()[i] = probs.data()[i] > t ? 1.0 : 0.0;
    }
    return out;
}

PrfScores prf_suite(const Matrix& assigned, const Matrix& truth, PrfCounts* counts) {
    if (!assigned.same_shape(truth)) {
        throw DimensionError("prf_suite: assigned/truth shape mismatch");
    }
    const std::size_t c = assigned.rows();
    PrfCounts local;
    local.correct.assign(c, 0);
    local.predicted.assign(c, 0);
    local.truth.assign(c, 0);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < assigned.cols(); ++j) {
            const bool p = assigned(i, j) != 0.0;
            const bool g = truth(i, j) != 0.0;
            local.predicted[i] += p;
            local.truth[i] += g;
            local.correct[i] += p && g;
        }
    }
    long long nt = 0, np = 0, ng = 0;
    double cp = 0.0, cr = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
        nt += local.correct[i];
        np += local.predicted[i];
        ng += local.truth[i];
        cp += local.predicted[i] > 0
                  ? static_cast<double>(local.correct[i]) / static_cast<double>(local.predicted[i])
                  : 0.0;
        cr += local.truth[i] > 0
                  ? static_cast<double>(local.correct[i]) / static_cast<double>(local.truth[i])
                  : 0.0;
    }
    PrfScores s;
    s.op = np > 0 ? static_cast<double>(nt) / static_cast<double>(np) : 0.0;
    s.o_recall = ng > 0 ? static_cast<double>(nt) / static_cast<double>(ng) : 0.0;
    s.cp = cp / static_cast<double>(c);
    s.cr = cr / static_cast<double>(c);
    s.of1 = (s.op + s.o_recall) > 0.0 ? 2.0 * s.op * s.o_recall / (s.op + s.o_recall) : 0.0;
    s.cf1 = (s.cp + s.cr) > 0.0 ? 2.0 * s.cp * s.cr / (s.cp + s.cr) : 0.0;
    if (counts) *counts = std::move(local);
    return s;
}

MetricReport compute_metrics(const Matrix& probs, const Matrix& truth,
                             const std::vector<std::string>& class_names,
                             std::size_t topk_k, double threshold) {
    if (!probs.same_shape(truth)) {
        throw DimensionError("compute_metrics: probs/truth shape mismatch");
    }
    if (class_names.size() != probs.rows()) {
        throw DimensionError("compute_metrics: class name count mismatch");
    }
    MetricReport report;
    report.class_names = class_names;
    report.topk_k = topk_k;
    report.threshold_value = threshold;

    const std::size_t n = probs.cols();
    std::vector<double> scores(n);
    std::vector<int> relevance(n);
    double map_acc = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            scores[j] = probs(i, j);
            relevance[j] = truth(i, j) != 0.0 ? 1 : 0;
        }
        AveragePrecision ap = average_precision(scores, relevance);
        report.per_class_ap.push_back(ap);
        if (ap.defined) {
            map_acc += ap.value;
            ++defined;
        } else {
            ++report.undefined_ap_classes;
        }
    }
    report.map = defined > 0 ? map_acc / static_cast<double>(defined) : 0.0;

    report.topk.policy = "top" + std::to_string(topk_k);
    report.topk.scores = prf_suite(assign_topk(probs, topk_k), truth, &report.topk.counts);
    std::ostringstream tn;
    tn << "threshold" << threshold;
    report.threshold.policy = tn.str();
    report.threshold.scores =
        prf_suite(assign_threshold(probs, threshold), truth, &report.threshold.counts);
    return report;
}

namespace {

void write_policy_csv(std::ostream& out, const PolicyReport& p,
                      const std::vector<std::string>& names) {
    out << p.policy << ".OP," << p.scores.op << '\n';
    out << p.policy << ".OR," << p.scores.o_recall << '\n';
    out << p.policy << ".OF1," << p.scores.of1 << '\n';
    out << p.policy << ".CP," << p.scores.cp << '\n';
    out << p.policy << ".CR," << p.scores.cr << '\n';
    out << p.policy << ".CF1," << p.scores.cf1 << '\n';
    for (std::size_t i = 0; i < names.size(); ++i) {
        out << p.policy << ".counts." << names[i] << ".Nt," << p.counts.correct[i] << '\n';
        out << p.policy << ".counts." << names[i] << ".Np," << p.counts.predicted[i] << '\n';
        out << p.policy << ".counts." << names[i] << ".Ng," << p.counts.truth[i] << '\n';
    }
}

}  // namespace

void write_report_csv(const MetricReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("write_report_csv: cannot open '" + path + "' for writing");
    out.precision(17);
    out << "key,value\n";
    out << "mAP," << report.map << '\n';
    out << "undefined_ap_classes," << report.undefined_ap_classes << '\n';
    for (std::size_t i = 0; i < report.class_names.size(); ++i) {
        out << "AP." << report.class_names[i] << ',';
        if (report.per_class_ap[i].defined) {
            out << report.per_class_ap[i].value;
        } else {
            out << "undefined";
        }
        out << '\n';
    }
    write_policy_csv(out, report.topk, report.class_names);
    write_policy_csv(out, report.threshold, report.class_names);
    if (!out) throw IoError("write_report_csv: write failed for '" + path + "'");
}

std::string format_report_table(const MetricReport& report) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "mAP " << report.map;
    if (report.undefined_ap_classes > 0) {
        os << "  (" << report.undefined_ap_classes
           << " class(es) without positives excluded; AP undefined)";
    }
    os << "\n\n";
    std::size_t width = 5;
    for (const auto& name : report.class_names) width = std::max(width, name.size());
    os << std::left << std::setw(static_cast<int>(width)) << "class" << std::right
       << "      AP\n";
    for (std::size_t i = 0; i < report.class_names.size(); ++i) {
        os << std::left << std::setw(static_cast<int>(width)) << report.class_names[i]
           << std::right << "  ";
        if (report.per_class_ap[i].defined) {
            os << std::setw(6) << report.per_class_ap[i].value;
        } else {
            os << "  n/a ";
        }
        os << '\n';
    }
    os << '\n';
    os << std::left << std::setw(16) << "policy" << std::right << std::setw(8) << "OP"
       << std::setw(8) << "OR" << std::setw(8) << "OF1" << std::setw(8) << "CP"
       << std::setw(8) << "CR" << std::setw(8) << "CF1" << '\n';
    for (const PolicyReport* p : {&report.topk, &report.threshold}) {
        os << std::left << std::setw(16) << p->policy << std::right << std::setw(8)
           << p->scores.op << std::setw(8) << p->scores.o_recall << std::setw(8)
           << p->scores.of1 << std::setw(8) << p->scores.cp << std::setw(8) << p->scores.cr
           << std::setw(8) << p->scores.cf1 << '\n';
    }
    return os.str();
}

}  // namespace dsdl
