#pragma once

#include <string>
#include <vector>

#include "anomgait/model.hpp"
#include "anomgait/video.hpp"

namespace anomgait {

struct ScoreRecord {
    std::string clip_id;
    std::string subject_id;
    std::string class_label;
    std::string group_label;
    std::string stage_label;
    double score_enc = 0;  // ||z_G - z'_G||_2
    double score_con = 0;  // mean |x - x'|
    double score_adv = 0;  // ||z_D - z'_D||_2
};

// Paper defaults; exposed as configuration.
struct Thresholds {
    double tau_enc = 1.768;
    double tau_con = 0.147;
    double tau_adv = 0.429;
};

enum class BinaryLabel { normal, anomalous };

struct MetricsReport {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0, precision = 0, recall = 0, specificity = 0, f1 = 0;
    double roc_auc = 0;
    bool degenerate = false;  // some ratio hit 0/0 and was reported as 0
};

// Eval-mode forward per clip, all three embedding-error scores populated.
// Clips are scored in parallel; records come back sorted by clip_id. A clip
// that does not match the model input raises dim_mismatch_error naming it.
std::vector<ScoreRecord> anomaly_scores(const Generator<float>& gen,
                                        const Discriminator<float>& disc,
                                        const DatasetManifest& manifest);

// score <= tau -> normal, score > tau -> anomalous.
inline BinaryLabel binarize(double score, double tau) {
    return score <= tau ? BinaryLabel::normal : BinaryLabel::anomalous;
}

std::vector<BinaryLabel> binarize(const std::vector<double>& scores, double tau);

// Positive class = anomalous. Fills everything except roc_auc.
MetricsReport confusion_metrics(const std::vector<BinaryLabel>& predicted,
                                const std::vector<BinaryLabel>& truth);

// Tie-corrected rank statistic, equal to the Mann-Whitney probability
// P(score_pos > score_neg) + P(tie)/2. Throws std::invalid_argument when
// only one class is present.
double roc_auc(const std::vector<double>& scores, const std::vector<BinaryLabel>& truth);

void save_scores_csv(const std::vector<ScoreRecord>& records, const std::string& path);
std::vector<ScoreRecord> load_scores_csv(const std::string& path);

}  // namespace anomgait
