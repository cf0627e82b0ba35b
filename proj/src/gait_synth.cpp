#include "anomgait/gait_synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "anomgait/errors.hpp"
#include "anomgait/gvt.hpp"
#include "anomgait/rng.hpp"

namespace anomgait {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Vec2 {
    double x, y;
};

// Signed distance to an axis-aligned ellipse, approximated by scaling the
// normalized radial excess with the smaller semi-axis. Good enough for
// one-pixel anti-aliased edges.
double ellipse_distance(Vec2 p, Vec2 center, double ax, double ay) {
    const double dx = (p.x - center.x) / ax;
    const double dy = (p.y - center.y) / ay;
    const double r = std::sqrt(dx * dx + dy * dy);
    return (r - 1.0) * std::min(ax, ay);
}

// Exact signed distance to a capsule (segment with radius).
double capsule_distance(Vec2 p, Vec2 a, Vec2 b, double radius) {
    const double abx = b.x - a.x, aby = b.y - a.y;
    const double apx = p.x - a.x, apy = p.y - a.y;
    const double ab2 = abx * abx + aby * aby;
    double t = ab2 > 0.0 ? (apx * abx + apy * aby) / ab2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = apx - t * abx, dy = apy - t * aby;
    return std::sqrt(dx * dx + dy * dy) - radius;
}

double coverage_from_distance(double d) { return std::clamp(0.5 - d, 0.0, 1.0); }

// Continuous ping-pong between lo and hi.
double ping_pong(double v, double lo, double hi) {
    const double span = hi - lo;
    if (span <= 0.0) return lo;
    double u = std::fmod(v - lo, 2.0 * span);
    if (u < 0.0) u += 2.0 * span;
    return lo + (u <= span ? u : 2.0 * span - u);
}

void validate_params(const GaitParams& p) {
    const double fields[] = {p.stride_freq,      p.amplitude, p.tremor_sigma,
                             p.walker_speed,     p.silhouette_scale,
                             p.bg_level,         p.fg_level,  p.noise_sigma};
    for (double v : fields)
        if (!std::isfinite(v))
            throw std::invalid_argument("generate_clip: non-finite gait parameter");
    if (p.stride_freq <= 0.0)
        throw std::invalid_argument("generate_clip: stride_freq must be > 0");
    if (p.amplitude < 0.0 || p.tremor_sigma < 0.0 || p.noise_sigma < 0.0)
        throw std::invalid_argument("generate_clip: negative dispersion parameter");
    if (p.bg_level < 0.0 || p.bg_level > 1.0 || p.fg_level < 0.0 || p.fg_level > 1.0)
        throw std::invalid_argument("generate_clip: intensity levels must be in [0,1]");
    if (p.silhouette_scale <= 0.0 || p.silhouette_scale > 1.0)
        throw std::invalid_argument("generate_clip: silhouette_scale must be in (0,1]");
}

}  // namespace

VideoClip generate_clip(const GaitParams& params, int f, int h, int w,
                        std::uint64_t seed) {
    validate_params(params);
    if (f < 8 || h < 8 || w < 8)
        throw std::invalid_argument("generate_clip: dims must be >= 8");

    Rng rng(derive_seed(seed, 0x67616974));  // independent of dims

    // Raise the frequency when the clip is too short for one full cycle.
    const double min_freq = kSynthFps / static_cast<double>(f);
    const double freq = std::max(params.stride_freq, min_freq);
    const double phase = rng.uniform(0.0, kTwoPi);

    // Body proportions tied to the frame height.
    const double body = params.silhouette_scale * h;
    const double leg_len = 0.45 * body;
    const double hip_y0 = 0.9 * h - leg_len;  // feet near the lower margin
    const double torso_ax = 0.10 * body, torso_ay = 0.22 * body;
    const double head_r = 0.08 * body;
    const double leg_r = std::max(0.6, 0.045 * body);
    const double swing = params.amplitude >= leg_len
                             ? 1.5533430342749532  // asin(0.9999...)
                             : std::asin(params.amplitude / leg_len);
    const double bob_amp = 0.03 * body + 0.25 * params.amplitude;

    const double margin = 0.5 * w * (1.0 - 0.6) + torso_ax;  // keep body in frame
    const double x_start = rng.uniform(margin, std::max(margin + 1.0, w - margin));

    VideoClip clip(f, h, w, 1);
    for (int t = 0; t < f; ++t) {
        const double ts = static_cast<double>(t) / kSynthFps;
        const double cyc = kTwoPi * freq * ts + phase;

        double hip_x = ping_pong(x_start + params.walker_speed * t, margin, w - margin);
        double hip_y = hip_y0 - bob_amp * std::cos(cyc);
        if (params.tremor_sigma > 0.0) {
            hip_x += rng.normal(0.0, params.tremor_sigma);
            hip_y += rng.normal(0.0, params.tremor_sigma);
        }

        const double theta = swing * std::sin(cyc);
        const Vec2 hip{hip_x, hip_y};
        const Vec2 foot_a{hip_x + leg_len * std::sin(theta),
                          hip_y + leg_len * std::cos(theta)};
        const Vec2 foot_b{hip_x - leg_len * std::sin(theta),
                          hip_y + leg_len * std::cos(theta)};
        const Vec2 torso_c{hip_x, hip_y - 0.28 * body};
        const Vec2 head_c{hip_x, hip_y - 0.58 * body};

        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const Vec2 p{x + 0.5, y + 0.5};
                double d = ellipse_distance(p, torso_c, torso_ax, torso_ay);
                d = std::min(d, ellipse_distance(p, head_c, head_r, head_r));
                d = std::min(d, capsule_distance(p, hip, foot_a, leg_r));
                d = std::min(d, capsule_distance(p, hip, foot_b, leg_r));
                const double cov = coverage_from_distance(d);
                clip.at(t, y, x, 0) =
                    static_cast<float>(params.bg_level +
                                       cov * (params.fg_level - params.bg_level));
            }
        }
    }

    if (params.noise_sigma > 0.0) {
        for (float& v : clip.data) {
            v = static_cast<float>(
                std::clamp(static_cast<double>(v) + rng.normal(0.0, params.noise_sigma),
                           0.0, 1.0));
        }
    }
    return clip;
}

namespace {

double sample_range(const ParamRange& r, Rng& rng) {
    if (r.hi <= r.lo) return r.lo;
    return rng.uniform(r.lo, r.hi);
}

GaitParams sample_params(const GaitParamRanges& ranges, Rng& rng) {
    GaitParams p;
    p.stride_freq = sample_range(ranges.stride_freq, rng);
    p.amplitude = sample_range(ranges.amplitude, rng);
    p.tremor_sigma = sample_range(ranges.tremor_sigma, rng);
    p.walker_speed = sample_range(ranges.walker_speed, rng);
    p.silhouette_scale = sample_range(ranges.silhouette_scale, rng);
    p.bg_level = sample_range(ranges.bg_level, rng);
    p.fg_level = sample_range(ranges.fg_level, rng);
    p.noise_sigma = sample_range(ranges.noise_sigma, rng);
    return p;
}

std::string two_digits(int v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

}  // namespace

DatasetManifest generate_corpus(const CorpusSpec& spec, const std::string& out_dir) {
    if (spec.classes.empty())
        throw std::invalid_argument("generate_corpus: at least one class required");
    for (const auto& cls : spec.classes) {
        if (cls.label.empty())
            throw std::invalid_argument("generate_corpus: class label must be nonempty");
        if (cls.subjects < 1 || cls.clips_per_subject < 1)
            throw std::invalid_argument("generate_corpus: counts must be >= 1");
    }

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "clips", ec);
    if (ec)
        throw io_error("generate_corpus: cannot create " + out_dir + ": " + ec.message());

    DatasetManifest manifest;
    manifest.base_dir = out_dir;

    for (std::size_t ci = 0; ci < spec.classes.size(); ++ci) {
        const ClassSpec& cls = spec.classes[ci];
        for (int s = 0; s < cls.subjects; ++s) {
            const std::uint64_t subj_salt = (ci + 1) * 0x100000ull + s;
            Rng subj_rng(derive_seed(spec.seed, subj_salt));
            const GaitParams params = sample_params(cls.ranges, subj_rng);
            const std::string subject_id = cls.label + "_s" + two_digits(s);
            for (int k = 0; k < cls.clips_per_subject; ++k) {
                const std::uint64_t clip_seed =
                    derive_seed(spec.seed, subj_salt * 0x1000ull + k + 1);
                VideoClip clip = generate_clip(params, spec.f, spec.h, spec.w, clip_seed);
                ManifestEntry e;
                e.meta.clip_id = subject_id + "_c" + two_digits(k);
                e.meta.subject_id = subject_id;
                e.meta.class_label = cls.label;
                e.meta.stage_label = cls.stage_label;
                e.path = "clips/" + e.meta.clip_id + ".gvt";
                const std::string full = out_dir + "/" + e.path;
                try {
                    write_gvt(clip, e.meta, full);
                } catch (const io_error& err) {
                    throw io_error("generate_corpus: " + std::string(err.what()));
                }
                manifest.entries.push_back(std::move(e));
            }
        }
    }

    manifest.preprocessing.target_f = spec.f;
    manifest.preprocessing.target_h = spec.h;
    manifest.preprocessing.target_w = spec.w;
    manifest.preprocessing.gray = true;
    save_manifest(manifest, out_dir + "/manifest.json");
    return manifest;
}

namespace {

ParamRange parse_range(const nlohmann::json& j, const ParamRange& dflt) {
    if (j.is_null()) return dflt;
    if (j.is_number()) return {j.get<double>(), j.get<double>()};
    if (j.is_array() && j.size() == 2)
        return {j[0].get<double>(), j[1].get<double>()};
    throw std::invalid_argument("corpus spec: parameter range must be a number or [lo,hi]");
}

}  // namespace

CorpusSpec parse_corpus_spec_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("corpus spec: cannot open: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("corpus spec: invalid JSON in " + path + ": " +
                                    e.what());
    }

    CorpusSpec spec;
    spec.f = j.value("f", 64);
    spec.h = j.value("h", 64);
    spec.w = j.value("w", 64);
    spec.seed = j.value("seed", 0ull);
    if (!j.contains("classes") || !j["classes"].is_array() || j["classes"].empty())
        throw std::invalid_argument("corpus spec: 'classes' array required in " + path);
    for (const auto& cj : j["classes"]) {
        ClassSpec cls;
        cls.label = cj.value("label", "");
        cls.stage_label = cj.value("stage_label", "");
        cls.subjects = cj.value("subjects", 1);
        cls.clips_per_subject = cj.value("clips_per_subject", 1);
        const auto pj = cj.value("params", nlohmann::json::object());
        GaitParamRanges& r = cls.ranges;
        r.stride_freq = parse_range(pj.value("stride_freq", nlohmann::json()), r.stride_freq);
        r.amplitude = parse_range(pj.value("amplitude", nlohmann::json()), r.amplitude);
        r.tremor_sigma =
            parse_range(pj.value("tremor_sigma", nlohmann::json()), r.tremor_sigma);
        r.walker_speed =
            parse_range(pj.value("walker_speed", nlohmann::json()), r.walker_speed);
        r.silhouette_scale = parse_range(pj.value("silhouette_scale", nlohmann::json()),
                                         r.silhouette_scale);
        r.bg_level = parse_range(pj.value("bg_level", nlohmann::json()), r.bg_level);
        r.fg_level = parse_range(pj.value("fg_level", nlohmann::json()), r.fg_level);
        r.noise_sigma =
            parse_range(pj.value("noise_sigma", nlohmann::json()), r.noise_sigma);
        spec.classes.push_back(std::move(cls));
    }
    return spec;
}

}  // namespace anomgait
