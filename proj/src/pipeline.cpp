#include "anomgait/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <nlohmann/json.hpp>

#include "anomgait/checkpoint.hpp"
#include "anomgait/errors.hpp"
#include "anomgait/gait_synth.hpp"
#include "anomgait/gvt.hpp"
#include "anomgait/preprocess.hpp"
#include "anomgait/statval.hpp"
#include "anomgait/svg_report.hpp"

namespace anomgait {

namespace fs = std::filesystem;

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("config: cannot open: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: invalid JSON in " + path + ": " + e.what());
    }

    RunConfig cfg;
    if (j.contains("arch")) {
        const auto& a = j["arch"];
        cfg.arch.input_size = a.value("input_size", cfg.arch.input_size);
        cfg.arch.base_channels = a.value("base_channels", cfg.arch.base_channels);
        cfg.arch.latent_n = a.value("latent_n", cfg.arch.latent_n);
        cfg.arch.leaky_slope = a.value("leaky_slope", cfg.arch.leaky_slope);
        cfg.arch.bn_momentum = a.value("bn_momentum", cfg.arch.bn_momentum);
        cfg.arch.bn_eps = a.value("bn_eps", cfg.arch.bn_eps);
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        cfg.train.epochs = t.value("epochs", cfg.train.epochs);
        cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
        cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
        cfg.train.beta1 = t.value("beta1", cfg.train.beta1);
        cfg.train.beta2 = t.value("beta2", cfg.train.beta2);
        cfg.train.adam_eps = t.value("adam_eps", cfg.train.adam_eps);
        cfg.train.w_con = t.value("w_con", cfg.train.w_con);
        cfg.train.w_adv = t.value("w_adv", cfg.train.w_adv);
        cfg.train.w_enc = t.value("w_enc", cfg.train.w_enc);
        cfg.train.seed = t.value("seed", cfg.train.seed);
        cfg.train.shuffle = t.value("shuffle", cfg.train.shuffle);
    }
    if (j.contains("thresholds")) {
        const auto& t = j["thresholds"];
        cfg.thresholds.tau_enc = t.value("tau_enc", cfg.thresholds.tau_enc);
        cfg.thresholds.tau_con = t.value("tau_con", cfg.thresholds.tau_con);
        cfg.thresholds.tau_adv = t.value("tau_adv", cfg.thresholds.tau_adv);
    }
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.normal_class = j.value("normal_class", cfg.normal_class);
    if (j.contains("paths")) {
        const auto& p = j["paths"];
        cfg.paths.train_manifest = p.value("train_manifest", cfg.paths.train_manifest);
        cfg.paths.val_manifest = p.value("val_manifest", cfg.paths.val_manifest);
        cfg.paths.test_manifest = p.value("test_manifest", cfg.paths.test_manifest);
        cfg.paths.checkpoint_dir = p.value("checkpoint_dir", cfg.paths.checkpoint_dir);
        cfg.paths.report_dir = p.value("report_dir", cfg.paths.report_dir);
        cfg.paths.checkpoint = p.value("checkpoint", cfg.paths.checkpoint);
    }
    return cfg;
}

namespace {

// Optional per-split manifests requested by the corpus spec file.
void write_split_manifests(const DatasetManifest& manifest, const nlohmann::json& spec_json,
                           std::uint64_t seed, const std::string& out_dir) {
    if (!spec_json.contains("splits")) return;
    std::vector<SplitFraction> splits;
    for (const auto& [name, frac] : spec_json["splits"].items())
        splits.push_back({name, frac.get<double>()});
    std::sort(splits.begin(), splits.end(),
              [](const SplitFraction& a, const SplitFraction& b) { return a.name < b.name; });
    const DatasetManifest partitioned = partition(manifest, splits, seed);
    save_manifest(partitioned, out_dir + "/manifest.json");
    for (const auto& s : splits) {
        DatasetManifest sub;
        sub.base_dir = partitioned.base_dir;
        sub.preprocessing = partitioned.preprocessing;
        for (const auto& e : partitioned.entries)
            if (e.meta.group_label == s.name) sub.entries.push_back(e);
        save_manifest(sub, out_dir + "/manifest_" + s.name + ".json");
    }
}

nlohmann::json metrics_to_json(const MetricsReport& m, double tau) {
    return {{"tau", tau},
            {"accuracy", m.accuracy},
            {"precision", m.precision},
            {"recall", m.recall},
            {"specificity", m.specificity},
            {"f1", m.f1},
            {"roc_auc", m.roc_auc},
            {"tp", m.tp},
            {"fp", m.fp},
            {"tn", m.tn},
            {"fn", m.fn},
            {"degenerate", m.degenerate}};
}

}  // namespace

int cmd_gen_corpus(const std::string& spec_path, const std::string& out_dir,
                   bool seed_overridden, std::uint64_t seed) {
    nlohmann::json spec_json;
    CorpusSpec spec;
    try {
        spec = parse_corpus_spec_file(spec_path);
        std::ifstream is(spec_path);
        is >> spec_json;
    } catch (const std::exception& e) {
        std::cerr << "gen-corpus: " << e.what() << "\n";
        return kExitInvalidSpec;
    }
    if (seed_overridden) spec.seed = seed;
    try {
        const DatasetManifest manifest = generate_corpus(spec, out_dir);
        write_split_manifests(manifest, spec_json, spec.seed, out_dir);
        std::map<std::string, int> counts;
        for (const auto& e : manifest.entries) counts[e.meta.class_label]++;
        std::cout << "wrote " << manifest.entries.size() << " clips to " << out_dir
                  << "\n";
        for (const auto& [label, n] : counts)
            std::cout << "  class " << label << ": " << n << " clips\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "gen-corpus: " << e.what() << "\n";
        return kExitInvalidSpec;
    } catch (const std::exception& e) {
        std::cerr << "gen-corpus: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_ingest(const RunConfig& cfg, const std::string& input_manifest,
               const std::string& out_dir) {
    try {
        const DatasetManifest raw = load_manifest(input_manifest);
        if (raw.entries.empty()) {
            std::cerr << "ingest: no clips in " << input_manifest << "\n";
            return kExitInvalidSpec;
        }
        fs::create_directories(fs::path(out_dir) / "clips");
        DatasetManifest out;
        out.base_dir = out_dir;
        const int s = cfg.arch.input_size;
        for (const auto& e : raw.entries) {
            auto [clip, meta] = read_gvt(raw.resolve(e));
            const VideoClip processed = preprocess(clip, s, s, s, /*gray=*/true);
            ManifestEntry ne;
            ne.meta = e.meta;
            ne.path = "clips/" + e.meta.clip_id + ".gvt";
            write_gvt(processed, ne.meta, out_dir + "/" + ne.path);
            out.entries.push_back(std::move(ne));
        }
        out.preprocessing.target_f = s;
        out.preprocessing.target_h = s;
        out.preprocessing.target_w = s;
        out.preprocessing.gray = true;
        save_manifest(out, out_dir + "/manifest.json");
        std::cout << "ingested " << out.entries.size() << " clips to " << out_dir
                  << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "ingest: " << e.what() << "\n";
        return kExitInvalidSpec;
    }
}

int cmd_train(const RunConfig& cfg, const std::string& out_dir) {
    try {
        const DatasetManifest train_mf = load_manifest(cfg.paths.train_manifest);
        DatasetManifest val_mf;
        if (fs::exists(cfg.paths.val_manifest))
            val_mf = load_manifest(cfg.paths.val_manifest);
        const std::string dir = out_dir.empty() ? cfg.paths.checkpoint_dir : out_dir;
        const TrainResult result =
            train(cfg.arch, cfg.train, train_mf, val_mf, dir,
                  [](int epoch, const TrainHistory::Row& r) {
                      std::cout << "epoch " << epoch << " L_con=" << r.l_con
                                << " L_adv=" << r.l_adv << " L_enc=" << r.l_enc
                                << " L_disc=" << r.l_disc << " L_G=" << r.l_g_total
                                << "\n";
                  });
        std::cout << "final checkpoint: " << result.final_checkpoint << "\n";
        std::cout << "best checkpoint:  " << result.best_checkpoint << "\n";
        return kExitOk;
    } catch (const one_class_violation_error& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitOneClassViolation;
    } catch (const nan_abort_error& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitNanAbort;
    } catch (const std::exception& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitError;
    }
}

namespace {

int score_into(const RunConfig& cfg, const std::string& manifest_path,
               std::vector<ScoreRecord>& records) {
    const DatasetManifest mf = load_manifest(manifest_path);
    if (mf.entries.empty()) {
        std::cerr << "score: no samples in " << manifest_path << "\n";
        return kExitArchMismatch;
    }
    auto [gen, disc, arch] = load_checkpoint(cfg.resolved_checkpoint());
    try {
        records = anomaly_scores(gen, disc, mf);
    } catch (const dim_mismatch_error& e) {
        std::cerr << "score: " << e.what() << "\n";
        return kExitArchMismatch;
    }
    return kExitOk;
}

}  // namespace

int cmd_score(const RunConfig& cfg, const std::string& manifest_path,
              const std::string& out_csv) {
    try {
        std::vector<ScoreRecord> records;
        const int rc = score_into(cfg, manifest_path, records);
        if (rc != kExitOk) return rc;
        fs::create_directories(fs::path(out_csv).parent_path());
        save_scores_csv(records, out_csv);
        std::cout << "scored " << records.size() << " clips -> " << out_csv << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "score: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_eval(const RunConfig& cfg, const std::string& manifest_path,
             const std::string& out_dir) {
    try {
        std::vector<ScoreRecord> records;
        const int rc = score_into(cfg, manifest_path, records);
        if (rc != kExitOk) return rc;
        fs::create_directories(out_dir);
        save_scores_csv(records, out_dir + "/scores.csv");

        std::vector<BinaryLabel> truth;
        truth.reserve(records.size());
        for (const auto& r : records)
            truth.push_back(r.class_label == cfg.normal_class ? BinaryLabel::normal
                                                              : BinaryLabel::anomalous);

        nlohmann::json out;
        out["thresholds"] = {{"tau_enc", cfg.thresholds.tau_enc},
                             {"tau_con", cfg.thresholds.tau_con},
                             {"tau_adv", cfg.thresholds.tau_adv}};
        out["normal_class"] = cfg.normal_class;
        const struct {
            const char* key;
            ScoreKind kind;
            double tau;
        } blocks[] = {{"enc", ScoreKind::enc, cfg.thresholds.tau_enc},
                      {"con", ScoreKind::con, cfg.thresholds.tau_con},
                      {"adv", ScoreKind::adv, cfg.thresholds.tau_adv}};
        for (const auto& blk : blocks) {
            std::vector<double> scores;
            scores.reserve(records.size());
            for (const auto& r : records)
                scores.push_back(blk.kind == ScoreKind::enc
                                     ? r.score_enc
                                     : (blk.kind == ScoreKind::con ? r.score_con
                                                                   : r.score_adv));
            MetricsReport m = confusion_metrics(binarize(scores, blk.tau), truth);
            m.roc_auc = roc_auc(scores, truth);
            out[blk.key] = metrics_to_json(m, blk.tau);
            std::cout << blk.key << ": acc=" << m.accuracy << " auc=" << m.roc_auc
                      << "\n";
        }
        std::ofstream os(out_dir + "/metrics.json", std::ios::trunc);
        os << out.dump(2) << "\n";
        if (!os) throw io_error("eval: cannot write metrics.json");
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return kExitArchMismatch;
    } catch (const std::exception& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_statval(const RunConfig& cfg, const std::string& scores_csv,
                const std::string& out_dir) {
    try {
        const std::vector<ScoreRecord> records = load_scores_csv(scores_csv);
        fs::create_directories(out_dir);
        StatReport reports[3];
        const ScoreKind kinds[3] = {ScoreKind::enc, ScoreKind::con, ScoreKind::adv};
        const char* names[3] = {"enc", "con", "adv"};
        for (int i = 0; i < 3; ++i) {
            const auto groups = groups_from_scores(records, kinds[i]);
            if (groups.size() < 2) {
                std::cerr << "statval: fewer than 2 groups in " << scores_csv << "\n";
                return kExitTooFewGroups;
            }
            reports[i] = statval_levels(groups, cfg.alpha);
            std::cout << names[i] << ": homoscedasticity=" << reports[i].h
                      << " shapeness=" << reports[i].s << "\n";
        }
        save_statreport_json(reports[0], reports[1], reports[2], cfg.alpha,
                             out_dir + "/statreport.json");
        for (int i = 0; i < 3; ++i) {
            save_box_plot_svg(records, kinds[i],
                              std::string("anomaly score (") + names[i] + ")",
                              out_dir + "/scores_" + names[i] + ".svg");
        }
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "statval: " << e.what() << "\n";
        return kExitTooFewGroups;
    } catch (const std::exception& e) {
        std::cerr << "statval: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_report(const RunConfig& cfg, const std::string& scores_csv,
               const std::string& out_dir) {
    (void)cfg;
    try {
        const std::vector<ScoreRecord> records = load_scores_csv(scores_csv);
        if (records.empty()) {
            std::cerr << "report: no records in " << scores_csv << "\n";
            return kExitInvalidSpec;
        }
        fs::create_directories(out_dir);
        const ScoreKind kinds[3] = {ScoreKind::enc, ScoreKind::con, ScoreKind::adv};
        const char* names[3] = {"enc", "con", "adv"};
        for (int i = 0; i < 3; ++i)
            save_box_plot_svg(records, kinds[i],
                              std::string("anomaly score (") + names[i] + ")",
                              out_dir + "/scores_" + names[i] + ".svg");
        std::cout << "wrote plots to " << out_dir << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "report: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace anomgait
