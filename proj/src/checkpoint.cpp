#include "anomgait/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "anomgait/errors.hpp"

namespace anomgait {

namespace {

constexpr char kMagic[4] = {'A', 'G', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is, const char* what) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw shape_mismatch_error(std::string("checkpoint: file ends inside ") + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

nlohmann::json arch_to_json(const ArchConfig& a) {
    return {{"input_size", a.input_size}, {"base_channels", a.base_channels},
            {"latent_n", a.latent_n},     {"leaky_slope", a.leaky_slope},
            {"bn_momentum", a.bn_momentum}, {"bn_eps", a.bn_eps}};
}

ArchConfig arch_from_json(const nlohmann::json& j) {
    ArchConfig a;
    a.input_size = j.value("input_size", 64);
    a.base_channels = j.value("base_channels", 64);
    a.latent_n = j.value("latent_n", 128);
    a.leaky_slope = j.value("leaky_slope", 0.2);
    a.bn_momentum = j.value("bn_momentum", 0.1);
    a.bn_eps = j.value("bn_eps", 1e-5);
    return a;
}

void write_tensor(std::ostream& os, const ParamRef<float>& p) {
    put_u32(os, static_cast<std::uint32_t>(p.name.size()));
    os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_u32(os, static_cast<std::uint32_t>(p.dims.size()));
    std::size_t expected = 1;
    for (int d : p.dims) {
        put_u32(os, static_cast<std::uint32_t>(d));
        expected *= static_cast<std::size_t>(d);
    }
    os.write(reinterpret_cast<const char*>(p.value->data()),
             static_cast<std::streamsize>(p.value->size() * sizeof(float)));
    (void)expected;
}

void read_tensor_into(std::istream& is, const ParamRef<float>& p) {
    const std::uint32_t name_len = get_u32(is, "tensor name length");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len))
        throw shape_mismatch_error("checkpoint: file ends inside tensor name");
    if (name != p.name)
        throw shape_mismatch_error("checkpoint: expected tensor '" + p.name +
                                   "', found '" + name + "'");
    const std::uint32_t rank = get_u32(is, "tensor rank");
    if (rank != p.dims.size())
        throw shape_mismatch_error("checkpoint: rank mismatch for " + p.name);
    std::size_t count = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
        const std::uint32_t d = get_u32(is, "tensor dim");
        if (static_cast<int>(d) != p.dims[r])
            throw shape_mismatch_error("checkpoint: dim mismatch for " + p.name);
        count *= d;
    }
    if (count != p.value->size())
        throw shape_mismatch_error("checkpoint: size mismatch for " + p.name);
    if (!is.read(reinterpret_cast<char*>(p.value->data()),
                 static_cast<std::streamsize>(count * sizeof(float))))
        throw shape_mismatch_error("checkpoint: file ends inside payload of " + p.name);
}

}  // namespace

void save_checkpoint(Generator<float>& gen, Discriminator<float>& disc,
                     const ArchConfig& arch, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("checkpoint: cannot open for write: " + path);

    os.write(kMagic, 4);
    put_u32(os, kVersion);
    const std::string arch_str = arch_to_json(arch).dump();
    put_u32(os, static_cast<std::uint32_t>(arch_str.size()));
    os.write(arch_str.data(), static_cast<std::streamsize>(arch_str.size()));

    auto gp = collect_params(gen);
    auto dp = collect_params(disc);
    put_u32(os, static_cast<std::uint32_t>(gp.size() + dp.size()));
    for (const auto& p : gp) write_tensor(os, p);
    for (const auto& p : dp) write_tensor(os, p);
    os.flush();
    if (!os) throw io_error("checkpoint: write failed: " + path);
}

std::tuple<Generator<float>, Discriminator<float>, ArchConfig> load_checkpoint(
    const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("checkpoint: cannot open: " + path);

    char magic[4];
    if (!is.read(magic, 4)) throw bad_magic_error("checkpoint: truncated magic in " + path);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw bad_magic_error("checkpoint: bad magic in " + path);
    const std::uint32_t version = get_u32(is, "version");
    if (version != kVersion)
        throw version_error("checkpoint: unsupported version " + std::to_string(version));

    const std::uint32_t arch_len = get_u32(is, "arch blob length");
    std::string arch_str(arch_len, '\0');
    if (!is.read(arch_str.data(), arch_len))
        throw shape_mismatch_error("checkpoint: file ends inside arch blob");
    ArchConfig arch;
    try {
        arch = arch_from_json(nlohmann::json::parse(arch_str));
        arch.validate();
    } catch (const nlohmann::json::exception& e) {
        throw shape_mismatch_error("checkpoint: invalid arch blob: " +
                                   std::string(e.what()));
    }

    Generator<float> gen;
    gen.arch = arch;
    gen.enc1.configure(arch, 1, arch.latent_n);
    gen.dec.configure(arch, 1);
    gen.enc2.configure(arch, 1, arch.latent_n);
    Discriminator<float> disc;
    disc.arch = arch;
    disc.tower.configure(arch, 1, 1);

    auto gp = collect_params(gen);
    auto dp = collect_params(disc);
    const std::uint32_t count = get_u32(is, "tensor count");
    if (count != gp.size() + dp.size())
        throw shape_mismatch_error("checkpoint: tensor count mismatch: file has " +
                                   std::to_string(count) + ", arch expects " +
                                   std::to_string(gp.size() + dp.size()));
    for (const auto& p : gp) read_tensor_into(is, p);
    for (const auto& p : dp) read_tensor_into(is, p);
    return {std::move(gen), std::move(disc), arch};
}

}  // namespace anomgait
