#include "anomgait/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "anomgait/adam.hpp"
#include "anomgait/checkpoint.hpp"
#include "anomgait/errors.hpp"
#include "anomgait/gvt.hpp"
#include "anomgait/losses.hpp"
#include "anomgait/model.hpp"
#include "anomgait/rng.hpp"

namespace anomgait {

namespace {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::vector<VideoClip> load_clips(const DatasetManifest& mf, const ArchConfig& arch,
                                  const char* split_name) {
    std::vector<VideoClip> clips;
    clips.reserve(mf.entries.size());
    for (const auto& e : mf.entries) {
        auto [clip, meta] = read_gvt(mf.resolve(e));
        if (clip.f != arch.input_size || clip.h != arch.input_size ||
            clip.w != arch.input_size || clip.c != 1)
            throw dim_mismatch_error(std::string(split_name) + " clip '" +
                                     e.meta.clip_id + "' does not match arch input " +
                                     std::to_string(arch.input_size));
        clips.push_back(std::move(clip));
    }
    return clips;
}

Volume<float> assemble_batch(const std::vector<VideoClip>& clips,
                             const std::vector<std::size_t>& order, std::size_t lo,
                             std::size_t hi) {
    const VideoClip& first = clips[order[lo]];
    Volume<float> batch(static_cast<int>(hi - lo), first.f, first.h, first.w, first.c);
    const std::size_t per = first.data.size();
    for (std::size_t i = lo; i < hi; ++i) {
        std::memcpy(batch.data.data() + (i - lo) * per, clips[order[i]].data.data(),
                    per * sizeof(float));
    }
    return batch;
}

// Weighted generator objective on a batch with eval-mode (pure) forwards;
// used for validation checkpoint selection.
double eval_generator_loss(const Generator<float>& gen,
                           const Discriminator<float>& disc, const Volume<float>& x,
                           const TrainConfig& cfg) {
    const auto z = gen.enc1.forward_eval(x);
    const Volume<float> xr = gen.dec.forward_eval(z.out);
    const auto zp = gen.enc2.forward_eval(xr);
    const auto feat_real = disc.tower.forward_eval(x);
    const auto feat_fake = disc.tower.forward_eval(xr);
    const double l_con = contextual_loss(x, xr);
    const double l_enc = batch_l2_loss(z.out, zp.out).mean;
    const double l_adv = batch_l2_loss(feat_real.feat, feat_fake.feat).mean;
    return cfg.w_con * l_con + cfg.w_adv * l_adv + cfg.w_enc * l_enc;
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (!(learning_rate > 0) || !(beta1 > 0) || !(beta2 > 0) || !(adam_eps > 0))
        throw std::invalid_argument("train: optimizer fields must be positive");
    if (!std::isfinite(w_con) || !std::isfinite(w_adv) || !std::isfinite(w_enc))
        throw std::invalid_argument("train: loss weights must be finite");
}

void save_history_csv(const TrainHistory& history, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("history: cannot open for write: " + path);
    os << "epoch,L_con,L_adv,L_enc,L_disc,L_G_total\n";
    for (std::size_t i = 0; i < history.rows.size(); ++i) {
        const auto& r = history.rows[i];
        os << i << ',' << format_double(r.l_con) << ',' << format_double(r.l_adv) << ','
           << format_double(r.l_enc) << ',' << format_double(r.l_disc) << ','
           << format_double(r.l_g_total) << '\n';
    }
    if (!os) throw io_error("history: write failed: " + path);
}

TrainResult train(const ArchConfig& arch, const TrainConfig& cfg,
                  const DatasetManifest& train_manifest,
                  const DatasetManifest& val_manifest, const std::string& out_dir,
                  const EpochCallback& on_epoch) {
    arch.validate();
    cfg.validate();
    if (train_manifest.entries.empty())
        throw std::invalid_argument("train: empty train manifest");
    const std::string& cls = train_manifest.entries.front().meta.class_label;
    for (const auto& e : train_manifest.entries)
        if (e.meta.class_label != cls)
            throw one_class_violation_error(
                "one-class training violated: train split mixes '" + cls + "' and '" +
                e.meta.class_label + "'");

    std::filesystem::create_directories(out_dir);

    const std::vector<VideoClip> train_clips = load_clips(train_manifest, arch, "train");
    const std::vector<VideoClip> val_clips = load_clips(val_manifest, arch, "val");

    Generator<float> gen = init_generator<float>(arch, derive_seed(cfg.seed, 1));
    Discriminator<float> disc = init_discriminator<float>(arch, derive_seed(cfg.seed, 2));
    auto gparams = collect_params(gen);
    auto dparams = collect_params(disc);
    AdamConfig<float> opt{static_cast<float>(cfg.learning_rate),
                          static_cast<float>(cfg.beta1), static_cast<float>(cfg.beta2),
                          static_cast<float>(cfg.adam_eps)};
    AdamState<float> gstate, dstate;
    gstate.init(gparams);
    dstate.init(dparams);

    TrainResult result;
    result.final_checkpoint = out_dir + "/checkpoint_final.agck";
    result.best_checkpoint = out_dir + "/checkpoint_best.agck";

    const float w_con = static_cast<float>(cfg.w_con);
    const float w_adv = static_cast<float>(cfg.w_adv);
    const float w_enc = static_cast<float>(cfg.w_enc);

    double best_val = std::numeric_limits<double>::infinity();
    bool best_written = false;

    std::vector<std::size_t> order(train_clips.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            Rng rng(derive_seed(cfg.seed, 0x65706f00ull + epoch));
            rng.shuffle(order);
        }
        TrainHistory::Row row;
        std::size_t seen = 0;

        for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
            const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
            const std::size_t bsz = hi - lo;
            const Volume<float> x = assemble_batch(train_clips, order, lo, hi);

            // ---- generator step ----
            zero_grads(gparams);
            zero_grads(dparams);
            EncoderTower<float>::Tape t_enc1, t_enc2, t_disc;
            DecoderTower<float>::Tape t_dec;
            const Volume<float> z = gen.enc1.forward_train(x, &t_enc1).out;
            const Volume<float> xr = gen.dec.forward_train(z, &t_dec);
            const Volume<float> zp = gen.enc2.forward_train(xr, &t_enc2).out;
            const Volume<float> feat_fake = disc.tower.forward_train(xr, &t_disc).feat;
            const Volume<float> feat_real = disc.tower.forward_train(x, nullptr).feat;

            const float l_con = contextual_loss(x, xr);
            const BatchL2<float> enc_l2 = batch_l2_loss(z, zp);
            const BatchL2<float> adv_l2 = batch_l2_loss(feat_real, feat_fake);
            const float l_g_total =
                w_con * l_con + w_adv * adv_l2.mean + w_enc * enc_l2.mean;

            // dL/dz' and the reconstruction gradient assembled from all three
            // generator loss terms.
            Volume<float> g_zp = batch_l2_grad(zp, z, enc_l2, w_enc);
            Volume<float> g_xr = gen.enc2.backward(t_enc2, &g_zp, nullptr);
            {
                const Volume<float> g_con =
                    contextual_grad_wrt_reconstruction(x, xr, w_con);
                kernels::accumulate(g_xr.size(), g_con.data.data(), g_xr.data.data());
                Volume<float> g_feat = batch_l2_grad(feat_fake, feat_real, adv_l2, w_adv);
                const Volume<float> g_adv =
                    disc.tower.backward(t_disc, nullptr, &g_feat);
                kernels::accumulate(g_xr.size(), g_adv.data.data(), g_xr.data.data());
            }
            Volume<float> g_z = gen.dec.backward(t_dec, g_xr);
            {
                const Volume<float> g_z_enc = batch_l2_grad(z, zp, enc_l2, w_enc);
                kernels::accumulate(g_z.size(), g_z_enc.data.data(), g_z.data.data());
            }
            gen.enc1.backward(t_enc1, &g_z, nullptr);
            adam_step(gstate, gparams, opt);

            // ---- discriminator step (reconstruction detached) ----
            zero_grads(dparams);
            EncoderTower<float>::Tape t_real, t_fake;
            const Volume<float> logit_real = disc.tower.forward_train(x, &t_real).out;
            const Volume<float> logit_fake = disc.tower.forward_train(xr, &t_fake).out;
            const Volume<float> y_real = sigmoid_forward(logit_real);
            const Volume<float> y_fake = sigmoid_forward(logit_fake);
            float l_disc = 0.0f;
            Volume<float> g_real(logit_real.b, 1, 1, 1, 1);
            Volume<float> g_fake(logit_fake.b, 1, 1, 1, 1);
            const float inv_b = 1.0f / static_cast<float>(bsz);
            for (int i = 0; i < logit_real.b; ++i) {
                l_disc += discriminator_loss(y_real.data[i], y_fake.data[i]) * inv_b;
                g_real.data[i] = -(1.0f - y_real.data[i]) * 0.5f * inv_b;
                g_fake.data[i] = y_fake.data[i] * 0.5f * inv_b;
            }
            disc.tower.backward(t_real, &g_real, nullptr);
            disc.tower.backward(t_fake, &g_fake, nullptr);
            adam_step(dstate, dparams, opt);

            if (!std::isfinite(l_g_total) || !std::isfinite(l_disc))
                throw nan_abort_error("train: non-finite loss at epoch " +
                                      std::to_string(epoch) + " batch " +
                                      std::to_string(lo / cfg.batch_size));

            row.l_con += l_con * bsz;
            row.l_adv += adv_l2.mean * bsz;
            row.l_enc += enc_l2.mean * bsz;
            row.l_disc += l_disc * bsz;
            row.l_g_total += l_g_total * bsz;
            seen += bsz;
        }

        row.l_con /= seen;
        row.l_adv /= seen;
        row.l_enc /= seen;
        row.l_disc /= seen;
        row.l_g_total /= seen;
        result.history.rows.push_back(row);
        if (on_epoch) on_epoch(epoch, row);

        if (!val_clips.empty()) {
            double val_loss = 0.0;
            std::vector<std::size_t> vorder(val_clips.size());
            for (std::size_t i = 0; i < vorder.size(); ++i) vorder[i] = i;
            for (std::size_t lo = 0; lo < vorder.size(); lo += cfg.batch_size) {
                const std::size_t hi = std::min(vorder.size(), lo + cfg.batch_size);
                const Volume<float> vx = assemble_batch(val_clips, vorder, lo, hi);
                val_loss += eval_generator_loss(gen, disc, vx, cfg) * (hi - lo);
            }
            val_loss /= val_clips.size();
            if (val_loss < best_val) {
                best_val = val_loss;
                save_checkpoint(gen, disc, arch, result.best_checkpoint);
                best_written = true;
            }
        }
    }

    save_checkpoint(gen, disc, arch, result.final_checkpoint);
    if (!best_written) {
        std::filesystem::copy_file(result.final_checkpoint, result.best_checkpoint,
                                   std::filesystem::copy_options::overwrite_existing);
    }
    save_history_csv(result.history, out_dir + "/history.csv");
    return result;
}

}  // namespace anomgait
