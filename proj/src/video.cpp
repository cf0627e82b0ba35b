#include "anomgait/video.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "anomgait/errors.hpp"

namespace anomgait {

namespace {

nlohmann::json meta_json(const ClipMeta& m) {
    return {{"clip_id", m.clip_id},
            {"subject_id", m.subject_id},
            {"class_label", m.class_label},
            {"group_label", m.group_label},
            {"stage_label", m.stage_label}};
}

ClipMeta meta_parse(const nlohmann::json& j) {
    ClipMeta m;
    m.clip_id = j.value("clip_id", "");
    m.subject_id = j.value("subject_id", "");
    m.class_label = j.value("class_label", "");
    m.group_label = j.value("group_label", "");
    m.stage_label = j.value("stage_label", "");
    return m;
}

}  // namespace

void save_manifest(const DatasetManifest& m, const std::string& path) {
    nlohmann::json j;
    j["clips"] = nlohmann::json::array();
    for (const auto& e : m.entries) {
        j["clips"].push_back({{"path", e.path}, {"meta", meta_json(e.meta)}});
    }
    j["preprocessing"] = {{"target_f", m.preprocessing.target_f},
                          {"target_h", m.preprocessing.target_h},
                          {"target_w", m.preprocessing.target_w},
                          {"gray", m.preprocessing.gray},
                          {"subsample_stride", m.preprocessing.subsample_stride},
                          {"normalization", m.preprocessing.normalization}};
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("manifest: cannot open for write: " + path);
    os << j.dump(2) << "\n";
    if (!os) throw io_error("manifest: write failed: " + path);
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("manifest: cannot open: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw io_error("manifest: invalid JSON in " + path + ": " + e.what());
    }
    DatasetManifest m;
    m.base_dir = std::filesystem::path(path).parent_path().string();
    for (const auto& c : j.value("clips", nlohmann::json::array())) {
        ManifestEntry e;
        e.path = c.value("path", "");
        e.meta = meta_parse(c.value("meta", nlohmann::json::object()));
        m.entries.push_back(std::move(e));
    }
    if (j.contains("preprocessing")) {
        const auto& p = j["preprocessing"];
        m.preprocessing.target_f = p.value("target_f", 0);
        m.preprocessing.target_h = p.value("target_h", 0);
        m.preprocessing.target_w = p.value("target_w", 0);
        m.preprocessing.gray = p.value("gray", false);
        m.preprocessing.subsample_stride = p.value("subsample_stride", 1);
        m.preprocessing.normalization = p.value("normalization", "minmax");
    }
    return m;
}

}  // namespace anomgait
