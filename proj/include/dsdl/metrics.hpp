#pragma once

#include <string>
#include <vector>

#include "dsdl/matrix.hpp"

namespace dsdl {

struct AveragePrecision {
    double value = 0.0;
    bool defined = false;  // false when the class has no positives
};

/// All-points average precision: sort by score descending (ties broken by
/// original index), then average the precision at the rank of each
/// positive. Undefined (excluded from mAP) when there are no positives.
AveragePrecision average_precision(const std::vector<double>& scores,
                                   const std::vector<int>& relevance);

/// 11-point interpolated variant (VOC2007 style).
AveragePrecision average_precision_11point(const std::vector<double>& scores,
                                           const std::vector<int>& relevance);

/// Exactly k ones per column (the k highest probabilities; ties resolved
/// toward the lower class index).
Matrix assign_topk(const Matrix& probs, std::size_t k);

/// 1 where prob > t, strictly.
Matrix assign_threshold(const Matrix& probs, double t = 0.5);

/// Per-class confusion counts: correct positives N_t, predicted positives
/// N_p, ground-truth positives N_g.
struct PrfCounts {
    std::vector<long long> correct;
    std::vector<long long> predicted;
    std::vector<long long> truth;
};

struct PrfScores {
    double op = 0.0, o_recall = 0.0, of1 = 0.0;
    double cp = 0.0, cr = 0.0, cf1 = 0.0;
};

/// Overall and per-class precision/recall/F1. Classes with N_p = 0
/// contribute precision 0 to CP (and N_g = 0 recall 0 to CR).
PrfScores prf_suite(const Matrix& assigned, const Matrix& truth, PrfCounts* counts = nullptr);

struct PolicyReport {
    std::string policy;
    PrfScores scores;
    PrfCounts counts;
};

struct MetricReport {
    std::vector<std::string> class_names;
    std::vector<AveragePrecision> per_class_ap;
    double map = 0.0;
    std::size_t undefined_ap_classes = 0;
    PolicyReport topk;
    PolicyReport threshold;
    std::size_t topk_k = 3;
    double threshold_value = 0.5;
};

/// Full evaluation of probability scores against binary ground truth
/// under both assignment policies.
MetricReport compute_metrics(const Matrix& probs, const Matrix& truth,
                             const std::vector<std::string>& class_names,
                             std::size_t topk_k = 3, double threshold = 0.5);

void write_report_csv(const MetricReport& report, const std::string& path);
std::string format_report_table(const MetricReport& report);

}  // namespace dsdl
