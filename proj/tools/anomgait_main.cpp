#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "anomgait/pipeline.hpp"

using namespace anomgait;

int main(int argc, char** argv) {
    CLI::App app{"anomgait: one-class gait-video anomaly engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string spec_path;
    std::string in_path;
    std::string out_path;
    std::string manifest_path;
    std::string scores_path;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* copt = cmd->add_option("--config", config_path, "run config JSON");
        if (needs_config) copt->required();
        cmd->add_option("--seed", seed, "override the config/spec seed")
            ->each([&](const std::string&) { seed_given = true; });
    };

    auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic gait corpus");
    gen->add_option("--spec", spec_path, "corpus spec JSON")->required();
    gen->add_option("--out", out_path, "output directory")->required();
    add_common(gen, false);

    auto* ingest = app.add_subcommand("ingest", "preprocess raw GVT clips");
    ingest->add_option("--in", in_path, "input manifest JSON")->required();
    ingest->add_option("--out", out_path, "output directory")->required();
    add_common(ingest, true);

    auto* train_cmd = app.add_subcommand("train", "train on the one-class split");
    train_cmd->add_option("--out", out_path, "checkpoint directory override");
    add_common(train_cmd, true);

    auto* score = app.add_subcommand("score", "score clips with a checkpoint");
    score->add_option("--manifest", manifest_path, "manifest override");
    score->add_option("--out", out_path, "output scores CSV");
    add_common(score, true);

    auto* eval = app.add_subcommand("eval", "scores + classification metrics");
    eval->add_option("--manifest", manifest_path, "manifest override");
    eval->add_option("--out", out_path, "output directory");
    add_common(eval, true);

    auto* statval = app.add_subcommand("statval", "homoscedasticity/shapeness report");
    statval->add_option("--scores", scores_path, "scores CSV override");
    statval->add_option("--out", out_path, "output directory");
    add_common(statval, true);

    auto* report = app.add_subcommand("report", "score distribution plots");
    report->add_option("--scores", scores_path, "scores CSV override");
    report->add_option("--out", out_path, "output directory");
    add_common(report, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalidSpec;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_run_config(config_path);
        if (seed_given) cfg.train.seed = seed;

        if (gen->parsed()) return cmd_gen_corpus(spec_path, out_path, seed_given, seed);
        if (ingest->parsed()) return cmd_ingest(cfg, in_path, out_path);
        if (train_cmd->parsed()) return cmd_train(cfg, out_path);
        if (score->parsed()) {
            const std::string mf =
                manifest_path.empty() ? cfg.paths.test_manifest : manifest_path;
            const std::string out =
                out_path.empty() ? cfg.paths.report_dir + "/scores.csv" : out_path;
            return cmd_score(cfg, mf, out);
        }
        if (eval->parsed()) {
            const std::string mf =
                manifest_path.empty() ? cfg.paths.test_manifest : manifest_path;
            const std::string out = out_path.empty() ? cfg.paths.report_dir : out_path;
            return cmd_eval(cfg, mf, out);
        }
        if (statval->parsed()) {
            const std::string csv =
                scores_path.empty() ? cfg.paths.report_dir + "/scores.csv" : scores_path;
            const std::string out = out_path.empty() ? cfg.paths.report_dir : out_path;
            return cmd_statval(cfg, csv, out);
        }
        if (report->parsed()) {
            const std::string csv =
                scores_path.empty() ? cfg.paths.report_dir + "/scores.csv" : scores_path;
            const std::string out = out_path.empty() ? cfg.paths.report_dir : out_path;
            return cmd_report(cfg, csv, out);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "anomgait: " << e.what() << "\n";
        return kExitInvalidSpec;
    } catch (const std::exception& e) {
        std::cerr << "anomgait: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
