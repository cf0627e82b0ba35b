#pragma once

#include <string>
#include <tuple>

#include "anomgait/model.hpp"

namespace anomgait {

// Checkpoint container, little-endian:
//   magic "AGCK" | u32 version=1 | u32 arch_json_len + arch JSON | u32 tensor
//   count | per tensor: u32 name_len + name, u32 rank, u32 dims[rank], f32
//   payload.
// Tensor names follow the parameter registry ("gen.enc1.l0.conv.w", ...) and
// are stable across versions. Round-trips are bit-exact for float models.
// bad_magic_error / version_error / shape_mismatch_error are distinct.

void save_checkpoint(Generator<float>& gen, Discriminator<float>& disc,
                     const ArchConfig& arch, const std::string& path);

std::tuple<Generator<float>, Discriminator<float>, ArchConfig> load_checkpoint(
    const std::string& path);

}  // namespace anomgait
