#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "anomgait/rng.hpp"
#include "anomgait/special_functions.hpp"
#include "anomgait/statval.hpp"

using namespace anomgait;

// ---------------------------------------------------------------------------
// Independent Levene/Brown-Forsythe reference: a direct transcription of the
// W formula with its own center/dispersion code, kept deliberately separate
// from the implementation under test.
// ---------------------------------------------------------------------------
namespace oracle {

double center_mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
}

double center_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2]
                        : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

double levene_w(const std::vector<std::vector<double>>& groups, bool use_median) {
    const std::size_t p = groups.size();
    std::size_t n = 0;
    std::vector<std::vector<double>> z(p);
    for (std::size_t g = 0; g < p; ++g) {
        const double c = use_median ? center_median(groups[g]) : center_mean(groups[g]);
        for (double x : groups[g]) z[g].push_back(std::abs(x - c));
        n += groups[g].size();
    }
    std::vector<double> zbar(p);
    double zall = 0;
    for (std::size_t g = 0; g < p; ++g) {
        zbar[g] = center_mean(z[g]);
        for (double v : z[g]) zall += v;
    }
    zall /= n;
    double num = 0, den = 0;
    for (std::size_t g = 0; g < p; ++g) {
        num += z[g].size() * (zbar[g] - zall) * (zbar[g] - zall);
        for (double v : z[g]) den += (v - zbar[g]) * (v - zbar[g]);
    }
    return (n - p) / (p - 1.0) * num / den;
}

double chi2(const std::vector<double>& from, const std::vector<double>& to) {
    double s = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        if (to[i] <= 1e-12) continue;
        s += (from[i] - to[i]) * (from[i] - to[i]) / to[i];
    }
    return s;
}

}  // namespace oracle

namespace {

ScoreGroup make_group(std::string cls, std::string grp, std::vector<double> v) {
    return {std::move(cls), std::move(grp), std::move(v)};
}

std::vector<double> random_values(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("dispersion against centers") {
    CHECK(dispersion(make_group("c", "g", {0, 2, 4}), DispersionCenter::mean) ==
          std::vector<double>{2, 0, 2});
    CHECK(dispersion(make_group("c", "g", {1, 1, 1}), DispersionCenter::median) ==
          std::vector<double>{0, 0, 0});

    Rng rng(11);
    const auto vals = random_values(rng, 17, -5, 5);
    const ScoreGroup g = make_group("c", "g", vals);
    const auto d = dispersion(g, DispersionCenter::mean);
    const double m = oracle::center_mean(vals);
    for (std::size_t i = 0; i < vals.size(); ++i)
        CHECK(d[i] == doctest::Approx(std::abs(vals[i] - m)).epsilon(1e-12));
}

TEST_CASE("w_statistic basics") {
    const ScoreGroup a = make_group("c", "a", {0, 2, 4});
    const ScoreGroup b = make_group("c", "b", {10, 12, 14});
    // Translated copies have identical dispersions: the numerator vanishes.
    const WResult r = w_statistic({&a, &b}, DispersionCenter::mean);
    CHECK(r.w == doctest::Approx(0.0));
    CHECK_FALSE(r.degenerate);

    const ScoreGroup c = make_group("c", "c", {1, 2, 3, 4, 5});
    const ScoreGroup d = make_group("c", "d", {2, 4, 6, 8, 10});
    const WResult w = w_statistic({&c, &d}, DispersionCenter::mean);
    // Frozen scipy.stats.levene(center='mean') anchor.
    CHECK(w.w == doctest::Approx(2.0571428571428565).epsilon(1e-12));
    CHECK(w.w == doctest::Approx(oracle::levene_w({{1, 2, 3, 4, 5}, {2, 4, 6, 8, 10}},
                                                  false))
                     .epsilon(1e-12));
}

TEST_CASE("w_statistic matches independent reference on random instances") {
    Rng rng(20240311);
    for (int trial = 0; trial < 50; ++trial) {
        const int n_groups = 2 + static_cast<int>(rng.uniform_index(3));
        std::vector<ScoreGroup> storage;
        std::vector<std::vector<double>> raw;
        for (int g = 0; g < n_groups; ++g) {
            const std::size_t size = 3 + rng.uniform_index(28);
            const double base = rng.uniform(-10, 10);
            const double spread = rng.uniform(0.1, 5.0);
            auto vals = random_values(rng, size, base - spread, base + spread);
            raw.push_back(vals);
            storage.push_back(make_group("c", "g" + std::to_string(g), vals));
        }
        std::vector<const ScoreGroup*> ptrs;
        for (const auto& g : storage) ptrs.push_back(&g);

        for (const bool median : {false, true}) {
            const DispersionCenter center =
                median ? DispersionCenter::median : DispersionCenter::mean;
            const WResult got = w_statistic(ptrs, center);
            const double want = oracle::levene_w(raw, median);
            CHECK(std::abs(got.w - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("w_statistic element duplication changes only cardinality factors") {
    const std::vector<double> a = {1.0, 2.5, 3.0, 4.7};
    const std::vector<double> b = {2.0, 2.1, 8.0};
    auto dup = [](const std::vector<double>& v) {
        std::vector<double> out;
        for (double x : v) {
            out.push_back(x);
            out.push_back(x);
        }
        return out;
    };
    const ScoreGroup ga = make_group("c", "a", a);
    const ScoreGroup da = make_group("c", "a", dup(a));
    const ScoreGroup db = make_group("c", "b", dup(b));
    const WResult w2 = w_statistic({&da, &db}, DispersionCenter::mean);
    const double want = oracle::levene_w({dup(a), dup(b)}, false);
    CHECK(w2.w == doctest::Approx(want).epsilon(1e-12));
    // Group Δ-means are untouched by duplication (same mean, same |x - mean|).
    const auto d1 = dispersion(ga, DispersionCenter::mean);
    const auto d2 = dispersion(da, DispersionCenter::mean);
    CHECK(oracle::center_mean(d1) == doctest::Approx(oracle::center_mean(d2)));
}

TEST_CASE("w_statistic degenerate dispersion flags and accepts") {
    const ScoreGroup a = make_group("c", "a", {1, 1, 1});
    const ScoreGroup b = make_group("c", "b", {5, 5});
    const WResult r = w_statistic({&a, &b}, DispersionCenter::mean);
    CHECK(r.degenerate);
    CHECK(r.w == 0.0);
    CHECK(w_test({&a, &b}, DispersionCenter::mean, 0.05) == 1);
}

TEST_CASE("w_test accept/reject") {
    const ScoreGroup same1 = make_group("c", "a", {1, 2, 3, 4, 5});
    const ScoreGroup same2 = make_group("c", "b", {1, 2, 3, 4, 5});
    CHECK(w_test({&same1, &same2}, DispersionCenter::mean, 0.05) == 1);

    std::vector<double> tight, wide;
    for (int i = 1; i <= 10; ++i) {
        tight.push_back(0.01 * i);
        wide.push_back(10.0 * i);
    }
    const ScoreGroup gt = make_group("c", "a", tight);
    const ScoreGroup gw = make_group("c", "b", wide);
    CHECK(w_test({&gt, &gw}, DispersionCenter::mean, 0.05) == 0);
    CHECK(w_test({&gt, &gw}, DispersionCenter::median, 0.05) == 0);

    // Threshold consistency: indicator == [W <= f_critical] exactly.
    const WResult w = w_statistic({&gt, &gw}, DispersionCenter::mean);
    const double crit = stats::f_critical(0.05, 1.0, 18.0);
    CHECK((w.w <= crit ? 1 : 0) == w_test({&gt, &gw}, DispersionCenter::mean, 0.05));
}

TEST_CASE("f_critical anchors and inversion property") {
    // Frozen scipy.stats.f.ppf anchors.
    CHECK(stats::f_critical(0.05, 1, 8) ==
          doctest::Approx(5.317655071578714).epsilon(1e-9));
    CHECK(stats::f_critical(0.01, 1, 8) ==
          doctest::Approx(11.258624143272643).epsilon(1e-9));
    CHECK(stats::f_critical(0.05, 3, 40) ==
          doctest::Approx(2.8387453980206443).epsilon(1e-9));
    // d2 -> large approaches the chi2(1) critical value 3.8415.
    CHECK(stats::f_critical(0.05, 1, 10000) ==
          doctest::Approx(3.8423889008678023).epsilon(1e-9));
    CHECK(std::abs(stats::f_critical(0.05, 1, 1e7) - 3.841458820694124) < 1e-3);

    CHECK(stats::f_critical(0.01, 2, 12) > stats::f_critical(0.05, 2, 12));

    for (int d1 = 1; d1 <= 30; ++d1) {
        for (double p : {0.9, 0.95, 0.99}) {
            const double q = stats::f_critical(1.0 - p, d1, 17);
            CHECK(std::abs(stats::f_cdf(q, d1, 17) - p) <= 1e-10);
        }
    }
    CHECK_THROWS_AS(stats::f_critical(0.0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(stats::f_critical(0.05, 0, 1), std::invalid_argument);
}

TEST_CASE("chi2 critical anchors and inversion property") {
    // Frozen scipy.stats.chi2.ppf anchors.
    CHECK(stats::chi2_critical(0.05, 9) ==
          doctest::Approx(16.918977604620448).epsilon(1e-9));
    CHECK(stats::chi2_critical(0.05, 1) ==
          doctest::Approx(3.841458820694124).epsilon(1e-9));
    CHECK(stats::chi2_critical(0.01, 25) ==
          doctest::Approx(44.31410489621915).epsilon(1e-9));
    for (int dof = 1; dof <= 30; ++dof) {
        for (double p : {0.9, 0.95, 0.99}) {
            const double q = stats::chi2_critical(1.0 - p, dof);
            CHECK(std::abs(stats::chi2_cdf(q, dof) - p) <= 1e-10);
        }
    }
    CHECK_THROWS_AS(stats::chi2_critical(0.05, 0), std::invalid_argument);
}

TEST_CASE("equalize_cardinality tiles the sorted smaller group") {
    const ScoreGroup k = make_group("c", "k", {1, 2, 3});
    const ScoreGroup u = make_group("c", "u", {9, 8, 7, 6, 5, 4});
    const auto [ke, ue] = equalize_cardinality(k, u);
    CHECK(ke.values == std::vector<double>{1, 1, 2, 2, 3, 3});
    CHECK(ue.values == std::vector<double>{4, 5, 6, 7, 8, 9});
    // Whole-multiple tiling preserves the mean exactly.
    CHECK(oracle::center_mean(ke.values) == doctest::Approx(2.0));

    const ScoreGroup e1 = make_group("c", "a", {3, 1});
    const ScoreGroup e2 = make_group("c", "b", {5, 2});
    const auto [a2, b2] = equalize_cardinality(e1, e2);
    CHECK(a2.values == std::vector<double>{1, 3});
    CHECK(b2.values == std::vector<double>{2, 5});

    // 4 into 6: tiling restarts at the sorted head.
    const ScoreGroup k4 = make_group("c", "k", {4, 3, 2, 1});
    const ScoreGroup u6 = make_group("c", "u", {1, 2, 3, 4, 5, 6});
    const auto [k6, u6e] = equalize_cardinality(k4, u6);
    std::vector<double> want{1, 2, 3, 4, 1, 2};
    std::sort(want.begin(), want.end());
    CHECK(k6.values == want);
    CHECK(u6e.values.size() == 6);
}

TEST_CASE("chi2_statistic basics and loop oracle") {
    const ScoreGroup a = make_group("c", "a", {1, 2, 3});
    CHECK(chi2_statistic(a, a).chi2 == 0.0);

    const ScoreGroup k = make_group("c", "k", {2, 2});
    const ScoreGroup u = make_group("c", "u", {1, 1});
    CHECK(chi2_statistic(k, u).chi2 == doctest::Approx(2.0));

    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(20);
        auto va = random_values(rng, n, 0.0, 10.0);
        auto vb = random_values(rng, n, 0.0, 10.0);
        std::sort(va.begin(), va.end());
        std::sort(vb.begin(), vb.end());
        const ScoreGroup ga = make_group("c", "a", va), gb = make_group("c", "b", vb);
        CHECK(chi2_statistic(ga, gb).chi2 == oracle::chi2(va, vb));
    }

    const Chi2Result r = chi2_statistic(a, make_group("c", "zz", {0.0, 1.0, 2.0}));
    CHECK(r.skipped_terms == 1);
}

TEST_CASE("chi2_test accept/reject") {
    const ScoreGroup a = make_group("c", "a", {1, 2, 3, 4});
    CHECK(chi2_test(a, a, 0.05) == 1);

    std::vector<double> small, big;
    for (int i = 1; i <= 10; ++i) {
        small.push_back(i);
        big.push_back(100.0 * i);
    }
    const ScoreGroup gs = make_group("c", "s", small);
    const ScoreGroup gb = make_group("c", "b", big);
    CHECK(chi2_test(gs, gb, 0.05) == 0);
    // 10-element groups use the chi2(9) critical value.
    const double crit = stats::chi2_critical(0.05, 9);
    CHECK(crit == doctest::Approx(16.918977604620448).epsilon(1e-9));
    CHECK(oracle::chi2(small, big) > crit);
}

TEST_CASE("homoscedasticity value case law") {
    const ScoreGroup g = make_group("c", "train", {1, 2, 3, 4});
    CHECK(homoscedasticity_value(g, g, 0.05) == 0.0);

    const ScoreGroup a = make_group("c", "train", {1, 2, 3, 4});
    const ScoreGroup b = make_group("c", "test", {1, 2, 3, 4});
    CHECK(homoscedasticity_value(a, b, 0.05) == 1.0);

    const ScoreGroup cross = make_group("p", "test", {1, 2, 3, 4});
    CHECK(homoscedasticity_value(a, cross, 0.05) == 0.0);

    // Far-separated dispersions across classes: both tests reject -> 1.
    std::vector<double> tight, wide;
    for (int i = 1; i <= 10; ++i) {
        tight.push_back(0.01 * i);
        wide.push_back(10.0 * i);
    }
    CHECK(homoscedasticity_value(make_group("c", "a", tight),
                                 make_group("p", "b", wide), 0.05) == 1.0);
}

TEST_CASE("shapeness value case law") {
    const ScoreGroup g = make_group("c", "train", {1, 2, 3, 4});
    CHECK(shapeness_value(g, g, 0.05) == 0.0);

    const ScoreGroup a = make_group("c", "train", {1, 2, 3, 4});
    const ScoreGroup b = make_group("c", "test", {1, 2, 3, 4});
    CHECK(shapeness_value(a, b, 0.05) == 1.0);

    const ScoreGroup cross = make_group("p", "test", {1, 2, 3, 4});
    CHECK(shapeness_value(a, cross, 0.05) == 0.0);

    std::vector<double> small, big;
    for (int i = 1; i <= 10; ++i) {
        small.push_back(i);
        big.push_back(100.0 * i);
    }
    CHECK(shapeness_value(make_group("c", "a", small), make_group("p", "b", big),
                          0.05) == 1.0);
}

TEST_CASE("statval_levels composes pairwise values over C(N,2)") {
    // One class, two identical groups: accept-accept on the single pair.
    {
        std::vector<ScoreGroup> gs{make_group("c", "a", {1, 2, 3, 4}),
                                   make_group("c", "b", {1, 2, 3, 4})};
        const StatReport r = statval_levels(gs, 0.05);
        CHECK(r.h == 1.0);
        CHECK(r.s == 1.0);
        CHECK(r.ledger.size() == 1);
    }
    // Two classes, one identical group each: cross-class case (2-2)/2.
    {
        std::vector<ScoreGroup> gs{make_group("c", "test", {1, 2, 3, 4}),
                                   make_group("p", "test", {1, 2, 3, 4})};
        const StatReport r = statval_levels(gs, 0.05);
        CHECK(r.h == 0.0);
        CHECK(r.s == 0.0);
    }
    // Two near-identical same-class groups plus one far other-class group.
    {
        std::vector<double> far;
        for (int i = 1; i <= 8; ++i) far.push_back(500.0 + 40.0 * i);
        std::vector<ScoreGroup> gs{make_group("c", "a", {1.0, 1.2, 1.4, 1.6}),
                                   make_group("c", "b", {1.0, 1.2, 1.4, 1.6}),
                                   make_group("p", "x", far)};
        const StatReport r = statval_levels(gs, 0.05);
        double h = 0, s = 0;
        for (std::size_t i = 0; i < gs.size(); ++i)
            for (std::size_t j = i + 1; j < gs.size(); ++j) {
                h += homoscedasticity_value(gs[i], gs[j], 0.05);
                s += shapeness_value(gs[i], gs[j], 0.05);
            }
        CHECK(r.h == h / 3.0);
        CHECK(r.s == s / 3.0);
        CHECK(r.h == 1.0);
        CHECK(r.s == 1.0);
    }
    CHECK_THROWS_AS(statval_levels({make_group("c", "a", {1, 2})}, 0.05),
                    std::invalid_argument);
}

TEST_CASE("statval_levels randomized composition and ledger consistency") {
    Rng rng(909);
    for (int trial = 0; trial < 12; ++trial) {
        const int n_classes = 1 + static_cast<int>(rng.uniform_index(3));
        std::vector<ScoreGroup> gs;
        int total = 0;
        for (int c = 0; c < n_classes; ++c) {
            const int n_groups = 1 + static_cast<int>(rng.uniform_index(3));
            for (int g = 0; g < n_groups; ++g) {
                const std::size_t size = 4 + rng.uniform_index(12);
                const double base = rng.uniform(0.0, 5.0);
                gs.push_back(make_group("c" + std::to_string(c), "g" + std::to_string(g),
                                        random_values(rng, size, base, base + 2.0)));
                ++total;
            }
        }
        if (total < 2) continue;
        const StatReport r = statval_levels(gs, 0.05);
        const std::size_t d = static_cast<std::size_t>(total) * (total - 1) / 2;
        CHECK(r.ledger.size() == d);

        double h = 0, s = 0;
        for (std::size_t i = 0; i < gs.size(); ++i)
            for (std::size_t j = i + 1; j < gs.size(); ++j) {
                h += homoscedasticity_value(gs[i], gs[j], 0.05);
                s += shapeness_value(gs[i], gs[j], 0.05);
            }
        CHECK(r.h == doctest::Approx(h / d).epsilon(1e-15));
        CHECK(r.s == doctest::Approx(s / d).epsilon(1e-15));

        // Headline values reproduce exactly from the ledger.
        double hl = 0, sl = 0;
        for (const auto& e : r.ledger) {
            hl += e.h;
            sl += e.sh;
            CHECK((e.h == 0.0 || e.h == 0.5 || e.h == 1.0));
            CHECK((e.sh == 0.0 || e.sh == 0.5 || e.sh == 1.0));
        }
        CHECK(r.h == hl / d);
        CHECK(r.s == sl / d);
    }
}

TEST_CASE("H and Sh are symmetric and W is shift invariant") {
    Rng rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        const ScoreGroup a =
            make_group("c", "a", random_values(rng, 5 + rng.uniform_index(6), 0, 3));
        const ScoreGroup b =
            make_group(trial % 2 ? "c" : "p", "b",
                       random_values(rng, 5 + rng.uniform_index(6), 0, 3));
        CHECK(homoscedasticity_value(a, b, 0.05) == homoscedasticity_value(b, a, 0.05));
        CHECK(shapeness_value(a, b, 0.05) == shapeness_value(b, a, 0.05));

        const double shift = rng.uniform(-7, 7);
        ScoreGroup a2 = a, b2 = b;
        for (double& v : a2.values) v += shift;
        for (double& v : b2.values) v += shift;
        const WResult w1 = w_statistic({&a, &b}, DispersionCenter::mean);
        const WResult w2 = w_statistic({&a2, &b2}, DispersionCenter::mean);
        CHECK(w1.w == doctest::Approx(w2.w).epsilon(1e-9));
    }
}

TEST_CASE("groups_from_scores buckets by class and partition") {
    std::vector<ScoreRecord> records;
    for (int i = 0; i < 6; ++i) {
        ScoreRecord r;
        r.clip_id = "clip" + std::to_string(i);
        r.class_label = i < 4 ? "control" : "anomalous";
        r.group_label = i % 2 ? "test" : "train";
        r.score_enc = i;
        r.score_con = 10 + i;
        r.score_adv = 20 + i;
        records.push_back(r);
    }
    const auto groups = groups_from_scores(records, ScoreKind::enc);
    CHECK(groups.size() == 4);
    const auto groups_con = groups_from_scores(records, ScoreKind::con);
    double total = 0;
    for (const auto& g : groups_con)
        for (double v : g.values) total += v;
    CHECK(total == doctest::Approx(10 + 11 + 12 + 13 + 14 + 15));
}
