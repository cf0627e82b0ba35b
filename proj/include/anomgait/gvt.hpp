#pragma once

#include <string>
#include <utility>

#include "anomgait/video.hpp"

namespace anomgait {

// GVT container, little-endian:
//   magic "GVT1" | u32 f,h,w,c | u32 meta_len | meta_len bytes UTF-8 JSON
//   {clip_id, subject_id, class_label, group_label, stage_label}
//   | f*h*w*c IEEE-754 f32 payload
//
// Round-trips are bit-exact. Distinct failures raise distinct errors:
// bad_magic_error, truncated_error (header/meta cut short),
// length_mismatch_error (payload size disagrees with the header dims).

void write_gvt(const VideoClip& clip, const ClipMeta& meta, const std::string& path);
std::pair<VideoClip, ClipMeta> read_gvt(const std::string& path);

}  // namespace anomgait
