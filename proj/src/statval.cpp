#include "anomgait/statval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "anomgait/errors.hpp"
#include "anomgait/special_functions.hpp"

namespace anomgait {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_group(const ScoreGroup& g, std::size_t min_size, const char* what) {
    if (g.values.size() < min_size)
        throw std::invalid_argument(std::string(what) + ": group '" + g.class_id + "/" +
                                    g.group_id + "' needs >= " +
                                    std::to_string(min_size) + " values");
    for (double v : g.values)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(what) + ": non-finite value");
}

bool same_ids(const ScoreGroup& a, const ScoreGroup& b) {
    return a.class_id == b.class_id && a.group_id == b.group_id;
}

}  // namespace

std::vector<double> dispersion(const ScoreGroup& group, DispersionCenter center) {
    check_group(group, 1, "dispersion");
    const double c = center == DispersionCenter::mean ? mean_of(group.values)
                                                      : median_of(group.values);
    std::vector<double> out(group.values.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::abs(group.values[i] - c);
    return out;
}

WResult w_statistic(const std::vector<const ScoreGroup*>& groups,
                    DispersionCenter center) {
    if (groups.size() < 2)
        throw std::invalid_argument("w_statistic: needs >= 2 groups");
    std::size_t total = 0;
    for (const ScoreGroup* g : groups) {
        check_group(*g, 2, "w_statistic");
        total += g->values.size();
    }
    const double p = static_cast<double>(groups.size());
    const double n = static_cast<double>(total);
    if (!(n > p)) throw std::invalid_argument("w_statistic: pooled N must exceed |P|");

    std::vector<std::vector<double>> deltas;
    std::vector<double> group_means;
    double overall = 0.0;
    for (const ScoreGroup* g : groups) {
        deltas.push_back(dispersion(*g, center));
        group_means.push_back(mean_of(deltas.back()));
        for (double d : deltas.back()) overall += d;
    }
    overall /= n;

    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const double gm = group_means[gi];
        numerator += static_cast<double>(deltas[gi].size()) * (gm - overall) * (gm - overall);
        for (double d : deltas[gi]) denominator += (d - gm) * (d - gm);
    }

    WResult r;
    if (denominator <= 0.0) {
        // Every group has constant dispersion; variances are trivially equal.
        r.w = 0.0;
        r.degenerate = true;
        return r;
    }
    r.w = (n - p) / (p - 1.0) * numerator / denominator;
    return r;
}

int w_test(const std::vector<const ScoreGroup*>& groups, DispersionCenter center,
           double alpha) {
    const WResult r = w_statistic(groups, center);
    if (r.degenerate) return 1;
    std::size_t total = 0;
    for (const ScoreGroup* g : groups) total += g->values.size();
    const double d1 = static_cast<double>(groups.size()) - 1.0;
    const double d2 = static_cast<double>(total) - static_cast<double>(groups.size());
    const double crit = stats::f_critical(alpha, d1, d2);
    return r.w <= crit ? 1 : 0;
}

std::pair<ScoreGroup, ScoreGroup> equalize_cardinality(const ScoreGroup& k,
                                                       const ScoreGroup& u) {
    check_group(k, 1, "equalize_cardinality");
    check_group(u, 1, "equalize_cardinality");
    ScoreGroup small = k.values.size() <= u.values.size() ? k : u;
    ScoreGroup large = k.values.size() <= u.values.size() ? u : k;
    std::sort(small.values.begin(), small.values.end());
    std::sort(large.values.begin(), large.values.end());

    const std::size_t target = large.values.size();
    std::vector<double> tiled(target);
    for (std::size_t i = 0; i < target; ++i)
        tiled[i] = small.values[i % small.values.size()];
    std::sort(tiled.begin(), tiled.end());
    small.values = std::move(tiled);

    if (k.values.size() <= u.values.size()) return {std::move(small), std::move(large)};
    return {std::move(large), std::move(small)};
}

Chi2Result chi2_statistic(const ScoreGroup& from, const ScoreGroup& to) {
    check_group(from, 1, "chi2_statistic");
    check_group(to, 1, "chi2_statistic");
    if (from.values.size() != to.values.size())
        throw std::invalid_argument("chi2_statistic: cardinalities must be equalized");
    constexpr double kEps = 1e-12;
    Chi2Result r;
    for (std::size_t i = 0; i < from.values.size(); ++i) {
        const double u = to.values[i];
        if (u <= kEps) {
            ++r.skipped_terms;
            continue;
        }
        const double d = from.values[i] - u;
        r.chi2 += d * d / u;
    }
    return r;
}

int chi2_test(const ScoreGroup& from, const ScoreGroup& to, double alpha) {
    const Chi2Result r = chi2_statistic(from, to);
    const double dof = static_cast<double>(from.values.size()) - 1.0;
    if (dof < 1.0) throw std::invalid_argument("chi2_test: dof must be >= 1");
    const double crit = stats::chi2_critical(alpha, dof);
    return r.chi2 <= crit ? 1 : 0;
}

namespace {

PairLedgerEntry evaluate_pair(const ScoreGroup& a, const ScoreGroup& b, double alpha) {
    PairLedgerEntry e;
    e.class_a = a.class_id;
    e.group_a = a.group_id;
    e.class_b = b.class_id;
    e.group_b = b.group_id;

    if (same_ids(a, b)) {
        // Eq. 2 / Eq. 4 identity case: zero by definition, nothing to test.
        return e;
    }

    const std::vector<const ScoreGroup*> pair{&a, &b};
    const WResult wm = w_statistic(pair, DispersionCenter::mean);
    const WResult wd = w_statistic(pair, DispersionCenter::median);
    const std::size_t total = a.values.size() + b.values.size();
    e.w_mean = wm.w;
    e.w_median = wd.w;
    e.w_mean_degenerate = wm.degenerate;
    e.w_median_degenerate = wd.degenerate;
    e.f_crit = stats::f_critical(alpha, 1.0, static_cast<double>(total) - 2.0);
    e.t_w_mean = wm.degenerate ? 1 : (wm.w <= e.f_crit ? 1 : 0);
    e.t_w_median = wd.degenerate ? 1 : (wd.w <= e.f_crit ? 1 : 0);

    auto [ae, be] = equalize_cardinality(a, b);
    const double small_mean =
        a.values.size() <= b.values.size() ? mean_of(a.values) : mean_of(b.values);
    const double tiled_mean =
        a.values.size() <= b.values.size() ? mean_of(ae.values) : mean_of(be.values);
    e.equalize_mean_shift = std::abs(tiled_mean - small_mean);

    const Chi2Result c_ab = chi2_statistic(ae, be);
    const Chi2Result c_ba = chi2_statistic(be, ae);
    e.chi2_ab = c_ab.chi2;
    e.chi2_ba = c_ba.chi2;
    e.chi2_skipped_ab = c_ab.skipped_terms;
    e.chi2_skipped_ba = c_ba.skipped_terms;
    e.chi2_crit =
        stats::chi2_critical(alpha, static_cast<double>(ae.values.size()) - 1.0);
    e.t_chi2_ab = c_ab.chi2 <= e.chi2_crit ? 1 : 0;
    e.t_chi2_ba = c_ba.chi2 <= e.chi2_crit ? 1 : 0;

    const bool same_class = a.class_id == b.class_id;
    const double w_sum = e.t_w_mean + e.t_w_median;
    const double c_sum = e.t_chi2_ab + e.t_chi2_ba;
    e.h = same_class ? w_sum / 2.0 : (2.0 - w_sum) / 2.0;
    e.sh = same_class ? c_sum / 2.0 : (2.0 - c_sum) / 2.0;
    return e;
}

}  // namespace

double homoscedasticity_value(const ScoreGroup& a, const ScoreGroup& b, double alpha) {
    return evaluate_pair(a, b, alpha).h;
}

double shapeness_value(const ScoreGroup& a, const ScoreGroup& b, double alpha) {
    return evaluate_pair(a, b, alpha).sh;
}

StatReport statval_levels(const std::vector<ScoreGroup>& groups, double alpha) {
    if (groups.size() < 2)
        throw std::invalid_argument("statval_levels: needs >= 2 groups");

    std::vector<const ScoreGroup*> ordered;
    for (const auto& g : groups) ordered.push_back(&g);
    std::sort(ordered.begin(), ordered.end(),
              [](const ScoreGroup* x, const ScoreGroup* y) {
                  if (x->class_id != y->class_id) return x->class_id < y->class_id;
                  return x->group_id < y->group_id;
              });

    StatReport report;
    double h_sum = 0.0, s_sum = 0.0;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        for (std::size_t j = i + 1; j < ordered.size(); ++j) {
            PairLedgerEntry e = evaluate_pair(*ordered[i], *ordered[j], alpha);
            h_sum += e.h;
            s_sum += e.sh;
            report.ledger.push_back(std::move(e));
        }
    }
    const double d =
        static_cast<double>(groups.size()) * (static_cast<double>(groups.size()) - 1.0) /
        2.0;
    report.h = h_sum / d;
    report.s = s_sum / d;
    return report;
}

std::vector<ScoreGroup> groups_from_scores(const std::vector<ScoreRecord>& records,
                                           ScoreKind kind) {
    std::map<std::pair<std::string, std::string>, std::vector<double>> buckets;
    for (const auto& r : records) {
        const double v = kind == ScoreKind::enc
                             ? r.score_enc
                             : (kind == ScoreKind::con ? r.score_con : r.score_adv);
        buckets[{r.class_label, r.group_label}].push_back(v);
    }
    std::vector<ScoreGroup> out;
    for (auto& [key, values] : buckets)
        out.push_back({key.first, key.second, std::move(values)});
    return out;
}

namespace {

nlohmann::json report_to_json(const StatReport& r) {
    nlohmann::json j;
    j["homoscedasticity_level"] = r.h;
    j["shapeness_level"] = r.s;
    j["pairs"] = nlohmann::json::array();
    for (const auto& e : r.ledger) {
        j["pairs"].push_back(
            {{"class_a", e.class_a},
             {"group_a", e.group_a},
             {"class_b", e.class_b},
             {"group_b", e.group_b},
             {"H", e.h},
             {"Sh", e.sh},
             {"W_mean", e.w_mean},
             {"W_median", e.w_median},
             {"W_mean_degenerate", e.w_mean_degenerate},
             {"W_median_degenerate", e.w_median_degenerate},
             {"t_W_mean", e.t_w_mean},
             {"t_W_median", e.t_w_median},
             {"f_critical", e.f_crit},
             {"chi2_ab", e.chi2_ab},
             {"chi2_ba", e.chi2_ba},
             {"chi2_critical", e.chi2_crit},
             {"t_chi2_ab", e.t_chi2_ab},
             {"t_chi2_ba", e.t_chi2_ba},
             {"chi2_skipped_ab", e.chi2_skipped_ab},
             {"chi2_skipped_ba", e.chi2_skipped_ba},
             {"equalize_mean_shift", e.equalize_mean_shift}});
    }
    return j;
}

}  // namespace

void save_statreport_json(const StatReport& enc_report, const StatReport& con_report,
                          const StatReport& adv_report, double alpha,
                          const std::string& path) {
    nlohmann::json j;
    j["alpha"] = alpha;
    j["enc"] = report_to_json(enc_report);
    j["con"] = report_to_json(con_report);
    j["adv"] = report_to_json(adv_report);
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("statreport: cannot open for write: " + path);
    os << j.dump(2) << "\n";
    if (!os) throw io_error("statreport: write failed: " + path);
}

}  // namespace anomgait
