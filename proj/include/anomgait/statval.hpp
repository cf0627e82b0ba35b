#pragma once

#include <string>
#include <utility>
#include <vector>

#include "anomgait/scoring.hpp"

namespace anomgait {

// One group of per-clip scores: class (i) and partition <k> in the paper's
// notation.
struct ScoreGroup {
    std::string class_id;
    std::string group_id;
    std::vector<double> values;
};

enum class DispersionCenter { mean, median };

// |x_l - center(x)| per element.
std::vector<double> dispersion(const ScoreGroup& group, DispersionCenter center);

struct WResult {
    double w = 0.0;
    bool degenerate = false;  // zero dispersion denominator; W defined as 0
};

// Levene / Brown-Forsythe statistic over >= 2 groups (each with >= 2 values).
WResult w_statistic(const std::vector<const ScoreGroup*>& groups,
                    DispersionCenter center);

// 1 when the homoscedasticity null is NOT rejected at level alpha
// (W <= f upper critical with |P|-1 and N-|P| dof), else 0. Degenerate W
// accepts.
int w_test(const std::vector<const ScoreGroup*>& groups, DispersionCenter center,
           double alpha);

// Sorted cyclic tiling of the smaller group up to the larger cardinality;
// both outputs sorted ascending.
std::pair<ScoreGroup, ScoreGroup> equalize_cardinality(const ScoreGroup& k,
                                                       const ScoreGroup& u);

struct Chi2Result {
    double chi2 = 0.0;
    int skipped_terms = 0;  // reference elements <= 1e-12 are skipped
};

// Directed sum (k_l - u_l)^2 / u_l over paired sorted elements; requires
// equalized cardinalities.
Chi2Result chi2_statistic(const ScoreGroup& from, const ScoreGroup& to);

// 1 when the equal-shape null is NOT rejected at level alpha (chi2 <= upper
// critical with |group|-1 dof), else 0.
int chi2_test(const ScoreGroup& from, const ScoreGroup& to, double alpha);

// Eq. 2 / Eq. 4 pairwise values, with the W and chi-square terms read as
// accept indicators so both land in [0, 1].
double homoscedasticity_value(const ScoreGroup& a, const ScoreGroup& b, double alpha);
double shapeness_value(const ScoreGroup& a, const ScoreGroup& b, double alpha);

struct PairLedgerEntry {
    std::string class_a, group_a, class_b, group_b;
    double h = 0.0, sh = 0.0;
    double w_mean = 0.0, w_median = 0.0;
    bool w_mean_degenerate = false, w_median_degenerate = false;
    int t_w_mean = 0, t_w_median = 0;
    double f_crit = 0.0;
    double chi2_ab = 0.0, chi2_ba = 0.0;
    double chi2_crit = 0.0;
    int t_chi2_ab = 0, t_chi2_ba = 0;
    int chi2_skipped_ab = 0, chi2_skipped_ba = 0;
    // Equalization can shift the tiled group's mean when the cardinality
    // ratio is not a whole multiple; recorded, not hidden.
    double equalize_mean_shift = 0.0;
};

struct StatReport {
    double h = 0.0;  // homoscedasticity level
    double s = 0.0;  // shapeness level
    std::vector<PairLedgerEntry> ledger;
};

// Algorithm 1: every unordered pair of distinct groups in the global union
// visited exactly once, averaged over d = C(N, 2). Groups are ordered
// lexicographically by (class_id, group_id) for a deterministic ledger.
StatReport statval_levels(const std::vector<ScoreGroup>& groups, double alpha);

// Grouping of a scores CSV by (class_label, group_label).
enum class ScoreKind { enc, con, adv };
std::vector<ScoreGroup> groups_from_scores(const std::vector<ScoreRecord>& records,
                                           ScoreKind kind);

void save_statreport_json(const StatReport& enc_report, const StatReport& con_report,
                          const StatReport& adv_report, double alpha,
                          const std::string& path);

}  // namespace anomgait
