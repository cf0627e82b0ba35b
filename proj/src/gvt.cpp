#include "anomgait/gvt.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "anomgait/errors.hpp"

namespace anomgait {

namespace {

constexpr char kMagic[4] = {'G', 'V', 'T', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is, const std::string& path, const char* field) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw truncated_error("gvt: truncated " + std::string(field) + " in " + path);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

nlohmann::json meta_to_json(const ClipMeta& m) {
    return nlohmann::json{{"clip_id", m.clip_id},
                          {"subject_id", m.subject_id},
                          {"class_label", m.class_label},
                          {"group_label", m.group_label},
                          {"stage_label", m.stage_label}};
}

ClipMeta meta_from_json(const nlohmann::json& j) {
    ClipMeta m;
    m.clip_id = j.value("clip_id", "");
    m.subject_id = j.value("subject_id", "");
    m.class_label = j.value("class_label", "");
    m.group_label = j.value("group_label", "");
    m.stage_label = j.value("stage_label", "");
    return m;
}

}  // namespace

void write_gvt(const VideoClip& clip, const ClipMeta& meta, const std::string& path) {
    if (!clip.valid()) throw dim_mismatch_error("gvt: invalid clip for " + path);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("gvt: cannot open for write: " + path);

    os.write(kMagic, 4);
    put_u32(os, static_cast<std::uint32_t>(clip.f));
    put_u32(os, static_cast<std::uint32_t>(clip.h));
    put_u32(os, static_cast<std::uint32_t>(clip.w));
    put_u32(os, static_cast<std::uint32_t>(clip.c));
    const std::string meta_str = meta_to_json(meta).dump();
    put_u32(os, static_cast<std::uint32_t>(meta_str.size()));
    os.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
    os.write(reinterpret_cast<const char*>(clip.data.data()),
             static_cast<std::streamsize>(clip.data.size() * sizeof(float)));
    os.flush();
    if (!os) throw io_error("gvt: write failed: " + path);
}

std::pair<VideoClip, ClipMeta> read_gvt(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("gvt: cannot open for read: " + path);

    char magic[4];
    if (!is.read(magic, 4)) throw truncated_error("gvt: truncated magic in " + path);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw bad_magic_error("gvt: bad magic in " + path);

    VideoClip clip;
    clip.f = static_cast<int>(get_u32(is, path, "f"));
    clip.h = static_cast<int>(get_u32(is, path, "h"));
    clip.w = static_cast<int>(get_u32(is, path, "w"));
    clip.c = static_cast<int>(get_u32(is, path, "c"));
    if (clip.f < 1 || clip.h < 1 || clip.w < 1 || clip.c < 1)
        throw length_mismatch_error("gvt: non-positive dims in " + path);

    const std::uint32_t meta_len = get_u32(is, path, "meta_len");
    std::string meta_str(meta_len, '\0');
    if (meta_len > 0 && !is.read(meta_str.data(), meta_len))
        throw truncated_error("gvt: truncated meta in " + path);
    ClipMeta meta;
    try {
        meta = meta_from_json(nlohmann::json::parse(meta_str));
    } catch (const nlohmann::json::exception& e) {
        throw io_error("gvt: invalid meta JSON in " + path + ": " + e.what());
    }

    const std::size_t count =
        static_cast<std::size_t>(clip.f) * clip.h * clip.w * clip.c;
    const std::streampos payload_start = is.tellg();
    is.seekg(0, std::ios::end);
    const std::size_t avail = static_cast<std::size_t>(is.tellg() - payload_start);
    if (avail != count * sizeof(float))
        throw length_mismatch_error(
            "gvt: length mismatch in " + path + ": header declares " +
            std::to_string(count) + " floats, payload has " +
            std::to_string(avail / sizeof(float)));
    is.seekg(payload_start);
    clip.data.resize(count);
    if (!is.read(reinterpret_cast<char*>(clip.data.data()),
                 static_cast<std::streamsize>(count * sizeof(float))))
        throw truncated_error("gvt: truncated payload in " + path);
    return {std::move(clip), std::move(meta)};
}

}  // namespace anomgait
