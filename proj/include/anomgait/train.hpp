#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "anomgait/arch.hpp"
#include "anomgait/video.hpp"

namespace anomgait {

struct TrainConfig {
    int epochs = 30;
    int batch_size = 8;
    double learning_rate = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double w_con = 50.0;
    double w_adv = 1.0;
    double w_enc = 1.0;
    std::uint64_t seed = 0;
    bool shuffle = true;

    void validate() const;
};

struct TrainHistory {
    struct Row {
        double l_con = 0, l_adv = 0, l_enc = 0, l_disc = 0, l_g_total = 0;
    };
    std::vector<Row> rows;  // one per completed epoch
};

struct TrainResult {
    TrainHistory history;
    std::string final_checkpoint;
    std::string best_checkpoint;
};

// Alternating adversarial loop over a one-class train split: per batch, a
// generator step on w_con*L_con + w_adv*L_adv + w_enc*L_enc, then a
// discriminator step on the cross-entropy with the reconstruction detached.
// Writes checkpoint_final.agck, checkpoint_best.agck (best validation loss;
// equal to final when the val manifest is empty) and history.csv under
// out_dir. Throws one_class_violation_error on a mixed-class train split and
// nan_abort_error (with epoch/batch) when a loss goes non-finite.
using EpochCallback = std::function<void(int epoch, const TrainHistory::Row&)>;

TrainResult train(const ArchConfig& arch, const TrainConfig& cfg,
                  const DatasetManifest& train_manifest,
                  const DatasetManifest& val_manifest, const std::string& out_dir,
                  const EpochCallback& on_epoch = {});

void save_history_csv(const TrainHistory& history, const std::string& path);

}  // namespace anomgait
