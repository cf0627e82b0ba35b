#pragma once

#include <string>

#include "anomgait/arch.hpp"
#include "anomgait/scoring.hpp"
#include "anomgait/train.hpp"

namespace anomgait {

// Exit codes shared by the CLI commands.
enum ExitCode {
    kExitOk = 0,
    kExitError = 1,
    kExitInvalidSpec = 2,
    kExitOneClassViolation = 3,
    kExitNanAbort = 4,
    kExitArchMismatch = 5,
    kExitTooFewGroups = 6,
};

struct RunPaths {
    std::string train_manifest = "corpus/manifest_train.json";
    std::string val_manifest = "corpus/manifest_val.json";
    std::string test_manifest = "corpus/manifest_test.json";
    std::string checkpoint_dir = "checkpoints";
    std::string report_dir = "reports";
    std::string checkpoint;  // defaults to checkpoint_dir/checkpoint_best.agck
};

struct RunConfig {
    ArchConfig arch;
    TrainConfig train;
    Thresholds thresholds;
    double alpha = 0.05;
    std::string normal_class = "control";
    RunPaths paths;

    std::string resolved_checkpoint() const {
        return paths.checkpoint.empty()
                   ? paths.checkpoint_dir + "/checkpoint_best.agck"
                   : paths.checkpoint;
    }
};

RunConfig load_run_config(const std::string& path);

// Command bodies; each returns one of the exit codes above and reports
// problems on stderr. The CLI in tools/ is a thin argument layer over these.
int cmd_gen_corpus(const std::string& spec_path, const std::string& out_dir,
                   bool seed_overridden, std::uint64_t seed);
int cmd_ingest(const RunConfig& cfg, const std::string& input_manifest,
               const std::string& out_dir);
int cmd_train(const RunConfig& cfg, const std::string& out_dir);
int cmd_score(const RunConfig& cfg, const std::string& manifest_path,
              const std::string& out_csv);
int cmd_eval(const RunConfig& cfg, const std::string& manifest_path,
             const std::string& out_dir);
int cmd_statval(const RunConfig& cfg, const std::string& scores_csv,
                const std::string& out_dir);
int cmd_report(const RunConfig& cfg, const std::string& scores_csv,
               const std::string& out_dir);

}  // namespace anomgait
