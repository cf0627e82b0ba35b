#include "anomgait/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "anomgait/errors.hpp"
#include "anomgait/gvt.hpp"
#include "anomgait/losses.hpp"
#include "anomgait/parallel.hpp"

namespace anomgait {

namespace {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

ScoreRecord score_one(const Generator<float>& gen, const Discriminator<float>& disc,
                      const VideoClip& clip, const ClipMeta& meta) {
    const Volume<float> x = clip_to_volume<float>(clip);
    const auto z = gen.enc1.forward_eval(x);
    const Volume<float> xr = gen.dec.forward_eval(z.out);
    const auto zp = gen.enc2.forward_eval(xr);
    const auto d_real = disc.tower.forward_eval(x);
    const auto d_fake = disc.tower.forward_eval(xr);

    ScoreRecord r;
    r.clip_id = meta.clip_id;
    r.subject_id = meta.subject_id;
    r.class_label = meta.class_label;
    r.group_label = meta.group_label;
    r.stage_label = meta.stage_label;
    r.score_con = contextual_loss(x, xr);
    r.score_enc = batch_l2_loss(z.out, zp.out).per_item[0];
    r.score_adv = batch_l2_loss(d_real.feat, d_fake.feat).per_item[0];
    return r;
}

}  // namespace

std::vector<ScoreRecord> anomaly_scores(const Generator<float>& gen,
                                        const Discriminator<float>& disc,
                                        const DatasetManifest& manifest) {
    std::vector<ScoreRecord> records(manifest.entries.size());
    parallel_for_index(manifest.entries.size(), [&](std::size_t i) {
        const auto& e = manifest.entries[i];
        auto [clip, meta] = read_gvt(manifest.resolve(e));
        // Manifest metadata wins over the embedded copy (partition updates
        // group labels without rewriting clip files).
        try {
            records[i] = score_one(gen, disc, clip, e.meta);
        } catch (const dim_mismatch_error& err) {
            throw dim_mismatch_error("clip '" + e.meta.clip_id + "': " + err.what());
        }
    });
    std::sort(records.begin(), records.end(),
              [](const ScoreRecord& a, const ScoreRecord& b) {
                  return a.clip_id < b.clip_id;
              });
    return records;
}

std::vector<BinaryLabel> binarize(const std::vector<double>& scores, double tau) {
    std::vector<BinaryLabel> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = binarize(scores[i], tau);
    return out;
}

MetricsReport confusion_metrics(const std::vector<BinaryLabel>& predicted,
                                const std::vector<BinaryLabel>& truth) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw std::invalid_argument("confusion_metrics: label length mismatch");
    MetricsReport m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] == BinaryLabel::anomalous;
        const bool t = truth[i] == BinaryLabel::anomalous;
        if (p && t) ++m.tp;
        else if (p && !t) ++m.fp;
        else if (!p && t) ++m.fn;
        else ++m.tn;
    }
    const auto ratio = [&m](long num, long den) -> double {
        if (den == 0) {
            m.degenerate = true;
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(predicted.size());
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.recall = ratio(m.tp, m.tp + m.fn);
    m.specificity = ratio(m.tn, m.tn + m.fp);
    if (m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.f1 = 0.0;
        m.degenerate = true;
    }
    return m;
}

double roc_auc(const std::vector<double>& scores, const std::vector<BinaryLabel>& truth) {
    if (scores.size() != truth.size() || scores.empty())
        throw std::invalid_argument("roc_auc: length mismatch");
    long n_pos = 0;
    for (const auto& t : truth) n_pos += t == BinaryLabel::anomalous ? 1 : 0;
    const long n_neg = static_cast<long>(truth.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_auc: AUC undefined for single-class truth");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Doubled average ranks stay integral, so the Mann-Whitney numerator is
    // exact and matches pairwise counting bit for bit.
    long long rank2_pos_sum = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const long long rank2 = static_cast<long long>(i + 1) + static_cast<long long>(j + 1);
        for (std::size_t k = i; k <= j; ++k)
            if (truth[order[k]] == BinaryLabel::anomalous) rank2_pos_sum += rank2;
        i = j + 1;
    }
    const long long u2 = rank2_pos_sum - static_cast<long long>(n_pos) * (n_pos + 1);
    return static_cast<double>(u2) /
           (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

void save_scores_csv(const std::vector<ScoreRecord>& records, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("scores: cannot open for write: " + path);
    os << "clip_id,subject_id,class,group,stage,score_enc,score_con,score_adv\n";
    for (const auto& r : records) {
        os << r.clip_id << ',' << r.subject_id << ',' << r.class_label << ','
           << r.group_label << ',' << r.stage_label << ',' << format_double(r.score_enc)
           << ',' << format_double(r.score_con) << ',' << format_double(r.score_adv)
           << '\n';
    }
    if (!os) throw io_error("scores: write failed: " + path);
}

std::vector<ScoreRecord> load_scores_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("scores: cannot open: " + path);
    std::string line;
    if (!std::getline(is, line)) throw io_error("scores: empty file: " + path);
    std::vector<ScoreRecord> records;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        ScoreRecord r;
        std::getline(ss, r.clip_id, ',');
        std::getline(ss, r.subject_id, ',');
        std::getline(ss, r.class_label, ',');
        std::getline(ss, r.group_label, ',');
        std::getline(ss, r.stage_label, ',');
        std::getline(ss, field, ',');
        r.score_enc = std::stod(field);
        std::getline(ss, field, ',');
        r.score_con = std::stod(field);
        std::getline(ss, field, ',');
        r.score_adv = std::stod(field);
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace anomgait
