#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "anomgait/checkpoint.hpp"
#include "anomgait/losses.hpp"
#include "anomgait/model.hpp"
#include "anomgait/rng.hpp"

using namespace anomgait;
namespace fs = std::filesystem;

namespace {

ArchConfig toy_arch(int s = 8, int c0 = 2, int n = 4) {
    ArchConfig a;
    a.input_size = s;
    a.base_channels = c0;
    a.latent_n = n;
    return a;
}

Volume<float> random_volume(Rng& rng, int b, int side, int c, double lo = 0.0,
                            double hi = 1.0) {
    Volume<float> v(b, side, side, side, c);
    for (auto& x : v.data) x = static_cast<float>(rng.uniform(lo, hi));
    return v;
}

// Independent quintuple-loop convolution, one output element at a time.
Volume<float> naive_conv3d(const Volume<float>& in, const std::vector<float>& w,
                           const std::vector<float>& bias, int k, int stride, int pad,
                           int ci, int co) {
    const int os = (in.f + 2 * pad - k) / stride + 1;
    Volume<float> out(in.b, os, os, os, co);
    for (int b = 0; b < in.b; ++b)
        for (int ot = 0; ot < os; ++ot)
            for (int oy = 0; oy < os; ++oy)
                for (int ox = 0; ox < os; ++ox)
                    for (int oc = 0; oc < co; ++oc) {
                        double acc = bias[oc];
                        for (int kt = 0; kt < k; ++kt)
                            for (int ky = 0; ky < k; ++ky)
                                for (int kx = 0; kx < k; ++kx) {
                                    const int it = ot * stride - pad + kt;
                                    const int iy = oy * stride - pad + ky;
                                    const int ix = ox * stride - pad + kx;
                                    if (it < 0 || it >= in.f || iy < 0 || iy >= in.h ||
                                        ix < 0 || ix >= in.w)
                                        continue;
                                    for (int ic = 0; ic < ci; ++ic) {
                                        const std::size_t wi =
                                            (((static_cast<std::size_t>(kt) * k + ky) * k +
                                              kx) * ci + ic) * co + oc;
                                        acc += in.at(b, it, iy, ix)[ic] * w[wi];
                                    }
                                }
                        out.at(b, ot, oy, ox)[oc] = static_cast<float>(acc);
                    }
    return out;
}

// Independent transposed convolution: out[o] collects in[p]*w[k] wherever
// o = p*stride - pad + k.
Volume<float> naive_convT3d(const Volume<float>& in, const std::vector<float>& w,
                            const std::vector<float>& bias, int k, int stride, int pad,
                            int ci, int co) {
    const int os = (in.f - 1) * stride - 2 * pad + k;
    Volume<float> out(in.b, os, os, os, co);
    for (int b = 0; b < in.b; ++b)
        for (int ot = 0; ot < os; ++ot)
            for (int oy = 0; oy < os; ++oy)
                for (int ox = 0; ox < os; ++ox)
                    for (int oc = 0; oc < co; ++oc) out.at(b, ot, oy, ox)[oc] = bias[oc];
    for (int b = 0; b < in.b; ++b)
        for (int it = 0; it < in.f; ++it)
            for (int iy = 0; iy < in.h; ++iy)
                for (int ix = 0; ix < in.w; ++ix)
                    for (int kt = 0; kt < k; ++kt)
                        for (int ky = 0; ky < k; ++ky)
                            for (int kx = 0; kx < k; ++kx) {
                                const int ot = it * stride - pad + kt;
                                const int oy = iy * stride - pad + ky;
                                const int ox = ix * stride - pad + kx;
                                if (ot < 0 || ot >= os || oy < 0 || oy >= os || ox < 0 ||
                                    ox >= os)
                                    continue;
                                for (int ic = 0; ic < ci; ++ic)
                                    for (int oc = 0; oc < co; ++oc) {
                                        const std::size_t wi =
                                            (((static_cast<std::size_t>(kt) * k + ky) * k +
                                              kx) * ci + ic) * co + oc;
                                        out.at(b, ot, oy, ox)[oc] +=
                                            in.at(b, it, iy, ix)[ic] * w[wi];
                                    }
                            }
    return out;
}

}  // namespace

TEST_CASE("init is deterministic under seed") {
    const ArchConfig arch = toy_arch();
    auto g1 = init_generator<float>(arch, 42);
    auto g2 = init_generator<float>(arch, 42);
    auto g3 = init_generator<float>(arch, 43);
    auto p1 = collect_params(g1), p2 = collect_params(g2), p3 = collect_params(g3);
    REQUIRE(p1.size() == p2.size());
    bool any_diff_seed = false;
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(*p1[i].value == *p2[i].value);
        any_diff_seed |= *p1[i].value != *p3[i].value;
    }
    CHECK(any_diff_seed);

    auto d1 = init_discriminator<float>(arch, 7);
    auto d2 = init_discriminator<float>(arch, 7);
    auto q1 = collect_params(d1), q2 = collect_params(d2);
    for (std::size_t i = 0; i < q1.size(); ++i) CHECK(*q1[i].value == *q2[i].value);
}

TEST_CASE("encoder1 and encoder2 are shape-identical but independent") {
    auto gen = init_generator<float>(toy_arch(16, 4, 8), 1);
    REQUIRE(gen.enc1.convs.size() == gen.enc2.convs.size());
    bool differs = false;
    for (std::size_t i = 0; i < gen.enc1.convs.size(); ++i) {
        CHECK(gen.enc1.convs[i].w.size() == gen.enc2.convs[i].w.size());
        differs |= gen.enc1.convs[i].w != gen.enc2.convs[i].w;
    }
    CHECK(differs);
}

TEST_CASE("s=64 encoder channel widths double per level up to the latent") {
    ArchConfig arch = toy_arch(64, 64, 128);
    EncoderTower<float> enc;
    enc.configure(arch, 1, arch.latent_n);
    REQUIRE(enc.convs.size() == 5);
    CHECK(enc.convs[0].co == 64);
    CHECK(enc.convs[1].co == 128);
    CHECK(enc.convs[2].co == 256);
    CHECK(enc.convs[3].co == 512);
    CHECK(enc.convs[4].co == 128);  // latent n
    CHECK(enc.convs[4].stride == 1);
    CHECK(enc.convs[4].pad == 0);
    CHECK(arch.disc_feature_len() == 64 * 512);
}

TEST_CASE("parameter count equals closed-form shape arithmetic") {
    const ArchConfig arch = toy_arch(16, 4, 8);
    auto gen = init_generator<float>(arch, 3);
    auto disc = init_discriminator<float>(arch, 4);

    // Closed form per tower, summed over declared levels.
    auto encoder_count = [&](int in_ch, int out_ch) {
        long total = 0;
        int ci = in_ch;
        const int reducing = arch.reducing_levels();
        for (int i = 0; i < reducing; ++i) {
            const int co = arch.base_channels << i;
            total += 64L * ci * co + co;  // conv w + b
            total += 2L * co;             // bn gamma + beta
            ci = co;
        }
        total += 64L * ci * out_ch + out_ch;  // projection conv
        return total;
    };
    auto decoder_count = [&]() {
        long total = 0;
        const int reducing = arch.reducing_levels();
        int ci = arch.latent_n;
        int co = arch.base_channels << (reducing - 1);
        total += 64L * ci * co + co + 2L * co;
        ci = co;
        for (int j = 1; j <= reducing; ++j) {
            co = (j == reducing) ? 1 : (arch.base_channels << (reducing - 1 - j));
            total += 64L * ci * co + co;
            if (j < reducing) total += 2L * co;
            ci = co;
        }
        return total;
    };
    const long expected_gen = 2 * encoder_count(1, arch.latent_n) + decoder_count();
    const long expected_disc = encoder_count(1, 1);

    // Brute-force enumeration of the declared registry shapes.
    auto count_learnable = [](const std::vector<ParamRef<float>>& params) {
        long total = 0;
        for (const auto& p : params) {
            if (!p.learnable) continue;
            long prod = 1;
            for (int d : p.dims) prod *= d;
            CHECK(prod == static_cast<long>(p.value->size()));
            total += prod;
        }
        return total;
    };
    auto gp = collect_params(gen);
    auto dp = collect_params(disc);
    CHECK(count_learnable(gp) == expected_gen);
    CHECK(count_learnable(dp) == expected_disc);
}

TEST_CASE("conv3d forward matches the naive oracle") {
    Rng rng(55);
    Conv3d<float> conv;
    conv.init_shape(4, 2, 1, 2, 3);
    for (auto& w : conv.w) w = static_cast<float>(rng.uniform(-0.5, 0.5));
    for (auto& b : conv.bias) b = static_cast<float>(rng.uniform(-0.2, 0.2));
    const Volume<float> in = random_volume(rng, 2, 8, 2, -1.0, 1.0);
    const Volume<float> got = conv.forward(in);
    const Volume<float> want = naive_conv3d(in, conv.w, conv.bias, 4, 2, 1, 2, 3);
    REQUIRE(got.size() == want.size());
    CHECK(got.f == 4);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-5));
}

TEST_CASE("valid projection conv matches the naive oracle") {
    Rng rng(56);
    Conv3d<float> conv;
    conv.init_shape(4, 1, 0, 3, 5);
    for (auto& w : conv.w) w = static_cast<float>(rng.uniform(-0.5, 0.5));
    for (auto& b : conv.bias) b = static_cast<float>(rng.uniform(-0.2, 0.2));
    const Volume<float> in = random_volume(rng, 1, 4, 3, -1.0, 1.0);
    const Volume<float> got = conv.forward(in);
    CHECK(got.f == 1);
    CHECK(got.c == 5);
    const Volume<float> want = naive_conv3d(in, conv.w, conv.bias, 4, 1, 0, 3, 5);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-5));
}

TEST_CASE("transposed conv3d matches the naive oracle") {
    Rng rng(57);
    ConvT3d<float> conv;
    conv.init_shape(4, 2, 1, 3, 2);
    for (auto& w : conv.w) w = static_cast<float>(rng.uniform(-0.5, 0.5));
    for (auto& b : conv.bias) b = static_cast<float>(rng.uniform(-0.2, 0.2));
    const Volume<float> in = random_volume(rng, 2, 4, 3, -1.0, 1.0);
    const Volume<float> got = conv.forward(in);
    CHECK(got.f == 8);
    const Volume<float> want = naive_convT3d(in, conv.w, conv.bias, 4, 2, 1, 3, 2);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-5));

    // Valid 1 -> 4 lift used by the decoder head.
    ConvT3d<float> lift;
    lift.init_shape(4, 1, 0, 5, 3);
    for (auto& w : lift.w) w = static_cast<float>(rng.uniform(-0.5, 0.5));
    const Volume<float> z = random_volume(rng, 1, 1, 5, -1.0, 1.0);
    const Volume<float> up = lift.forward(z);
    CHECK(up.f == 4);
    const Volume<float> upw = naive_convT3d(z, lift.w, lift.bias, 4, 1, 0, 5, 3);
    for (std::size_t i = 0; i < up.size(); ++i)
        CHECK(up.data[i] == doctest::Approx(upw.data[i]).epsilon(1e-5));
}

TEST_CASE("encode eval matches a composed per-layer oracle on the toy config") {
    const ArchConfig arch = toy_arch(8, 2, 4);
    auto gen = init_generator<float>(arch, 9);
    // Nontrivial BN running stats so eval actually exercises them.
    Rng rng(10);
    for (auto& bn : gen.enc1.bns) {
        for (auto& v : bn.running_mean) v = static_cast<float>(rng.uniform(-0.3, 0.3));
        for (auto& v : bn.running_var) v = static_cast<float>(rng.uniform(0.5, 1.5));
        for (auto& v : bn.gamma) v = static_cast<float>(rng.uniform(0.8, 1.2));
        for (auto& v : bn.beta) v = static_cast<float>(rng.uniform(-0.1, 0.1));
    }
    const Volume<float> x = random_volume(rng, 1, 8, 1);

    const auto got = gen.enc1.forward_eval(x);

    Volume<float> cur =
        naive_conv3d(x, gen.enc1.convs[0].w, gen.enc1.convs[0].bias, 4, 2, 1, 1, 2);
    const auto& bn = gen.enc1.bns[0];
    for (std::size_t r = 0; r < cur.voxels(); ++r)
        for (int c = 0; c < cur.c; ++c) {
            float& v = cur.data[r * cur.c + c];
            const float isd = 1.0f / std::sqrt(bn.running_var[c] + bn.eps);
            v = (v - bn.running_mean[c]) * isd * bn.gamma[c] + bn.beta[c];
            v = v > 0 ? v : 0.2f * v;
        }
    const Volume<float> want =
        naive_conv3d(cur, gen.enc1.convs[1].w, gen.enc1.convs[1].bias, 4, 1, 0, 2, 4);
    REQUIRE(got.out.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(got.out.data[i] == doctest::Approx(want.data[i]).epsilon(1e-5));
}

TEST_CASE("architecture shape law for s in {16, 32, 64}") {
    for (int s : {16, 32, 64}) {
        ArchConfig arch = toy_arch(s, 4, 16);
        auto gen = init_generator<float>(arch, 2);
        Rng rng(s);
        const Volume<float> x = random_volume(rng, 1, s, 1);
        const auto enc = gen.enc1.forward_eval(x);
        CHECK(enc.out.f == 1);
        CHECK(enc.out.h == 1);
        CHECK(enc.out.w == 1);
        CHECK(enc.out.c == 16);
        const Volume<float> xr = gen.dec.forward_eval(enc.out);
        CHECK(xr.f == s);
        CHECK(xr.h == s);
        CHECK(xr.w == s);
        CHECK(xr.c == 1);
        for (float v : xr.data) {
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
        }
        CHECK(all_finite(xr));
    }
}

TEST_CASE("generator_forward triple has contract shapes and positive L_con") {
    const ArchConfig arch = toy_arch(8, 2, 4);
    auto gen = init_generator<float>(arch, 21);
    VideoClip x(8, 8, 8, 1);
    std::fill(x.data.begin(), x.data.end(), 0.5f);

    auto r = generator_forward(gen, x, Mode::eval);
    CHECK(r.reconstruction.f == 8);
    CHECK(r.reconstruction.c == 1);
    CHECK(r.z_g.values.size() == 4);
    CHECK(r.z_g_prime.values.size() == 4);
    CHECK(r.z_g.kind == EmbeddingKind::z_g);
    CHECK(r.z_g_prime.kind == EmbeddingKind::z_g_prime);

    // A fresh random net cannot reproduce its input.
    CHECK(contextual_loss(x, r.reconstruction) > 0.0f);

    // Eval-mode determinism.
    auto r2 = generator_forward(gen, x, Mode::eval);
    CHECK(r.reconstruction.data == r2.reconstruction.data);
    CHECK(r.z_g.values == r2.z_g.values);
}

TEST_CASE("eval forwards are pure: BN stats untouched, train mode mutates") {
    const ArchConfig arch = toy_arch(8, 2, 4);
    auto gen = init_generator<float>(arch, 5);
    const std::vector<float> rm_before = gen.enc1.bns[0].running_mean;
    Rng rng(6);
    const Volume<float> x = random_volume(rng, 2, 8, 1);
    gen.enc1.forward_eval(x);
    CHECK(gen.enc1.bns[0].running_mean == rm_before);
    gen.enc1.forward_train(x, nullptr);
    CHECK(gen.enc1.bns[0].running_mean != rm_before);
}

TEST_CASE("discriminate outputs realness in (0,1) and an m-length embedding") {
    const ArchConfig arch = toy_arch(8, 2, 4);
    auto disc = init_discriminator<float>(arch, 31);
    VideoClip x(8, 8, 8, 1);
    Rng rng(32);
    for (auto& v : x.data) v = static_cast<float>(rng.uniform());
    const auto r = discriminate(disc, x, Mode::eval);
    CHECK(r.realness > 0.0f);
    CHECK(r.realness < 1.0f);
    CHECK(static_cast<int>(r.z_d.values.size()) == arch.disc_feature_len());
    CHECK(r.z_d.kind == EmbeddingKind::z_d);

    // Logit path against the composed conv oracle (feature tap is the final
    // conv input, so discriminate's realness must equal sigmoid(conv(feat))).
    const auto tower_out = disc.tower.forward_eval(clip_to_volume<float>(x));
    const Volume<float> logit = naive_conv3d(
        tower_out.feat, disc.tower.convs.back().w, disc.tower.convs.back().bias, 4, 1, 0,
        disc.tower.convs.back().ci, 1);
    const float want = 1.0f / (1.0f + std::exp(-logit.data[0]));
    CHECK(r.realness == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("encode rejects dimension mismatches") {
    const ArchConfig arch = toy_arch(8, 2, 4);
    auto gen = init_generator<float>(arch, 11);
    VideoClip wrong(16, 16, 16, 1);
    CHECK_THROWS_AS(encode(gen.enc1, wrong, Mode::eval), dim_mismatch_error);
    Embedding<float> bad_z{EmbeddingKind::z_g, std::vector<float>(7, 0.0f)};
    CHECK_THROWS_AS(decode(gen.dec, bad_z, Mode::eval), dim_mismatch_error);
}

TEST_CASE("checkpoint round-trip is bit-exact") {
    const fs::path dir = fs::temp_directory_path() / "anomgait_test_ckpt";
    fs::create_directories(dir);
    const ArchConfig arch = toy_arch(8, 2, 4);
    auto gen = init_generator<float>(arch, 77);
    auto disc = init_discriminator<float>(arch, 78);
    const std::string path = (dir / "model.agck").string();
    save_checkpoint(gen, disc, arch, path);

    auto [gen2, disc2, arch2] = load_checkpoint(path);
    CHECK(arch2 == arch);
    auto p1 = collect_params(gen), p2 = collect_params(gen2);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1[i].name == p2[i].name);
        CHECK(*p1[i].value == *p2[i].value);
    }
    auto q1 = collect_params(disc), q2 = collect_params(disc2);
    for (std::size_t i = 0; i < q1.size(); ++i) CHECK(*q1[i].value == *q2[i].value);
    fs::remove_all(dir);
}

TEST_CASE("checkpoint corruption raises distinct errors") {
    const fs::path dir = fs::temp_directory_path() / "anomgait_test_ckpt_err";
    fs::create_directories(dir);
    const ArchConfig arch = toy_arch(8, 2, 4);
    auto gen = init_generator<float>(arch, 1);
    auto disc = init_discriminator<float>(arch, 2);
    const std::string path = (dir / "model.agck").string();
    save_checkpoint(gen, disc, arch, path);

    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.write("XXXX", 4);
    }
    CHECK_THROWS_AS(load_checkpoint(path), bad_magic_error);

    save_checkpoint(gen, disc, arch, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const std::uint32_t v = 99;
        f.write(reinterpret_cast<const char*>(&v), 4);
    }
    CHECK_THROWS_AS(load_checkpoint(path), version_error);

    // Corrupt the tensor count (right after the arch JSON blob).
    save_checkpoint(gen, disc, arch, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekg(8);
        std::uint32_t arch_len = 0;
        f.read(reinterpret_cast<char*>(&arch_len), 4);
        f.seekp(12 + arch_len);
        const std::uint32_t bogus = 3;
        f.write(reinterpret_cast<const char*>(&bogus), 4);
    }
    CHECK_THROWS_AS(load_checkpoint(path), shape_mismatch_error);

    // A checkpoint from s=8 cannot encode an s=16 clip.
    save_checkpoint(gen, disc, arch, path);
    auto [gen3, disc3, arch3] = load_checkpoint(path);
    VideoClip big(16, 16, 16, 1);
    CHECK_THROWS_AS(encode(gen3.enc1, big, Mode::eval), dim_mismatch_error);
    fs::remove_all(dir);
}

TEST_CASE("arch validation") {
    ArchConfig a = toy_arch(8, 2, 4);
    CHECK_NOTHROW(a.validate());
    a.input_size = 12;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
    a.input_size = 4;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
    a = toy_arch();
    a.base_channels = 0;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("forward activations stay finite on random input") {
    const ArchConfig arch = toy_arch(16, 4, 8);
    auto gen = init_generator<float>(arch, 100);
    auto disc = init_discriminator<float>(arch, 101);
    Rng rng(102);
    const Volume<float> x = random_volume(rng, 2, 16, 1);
    const auto z = gen.enc1.forward_eval(x);
    const Volume<float> xr = gen.dec.forward_eval(z.out);
    const auto zp = gen.enc2.forward_eval(xr);
    const auto d = disc.tower.forward_eval(x);
    CHECK(all_finite(z.out));
    CHECK(all_finite(xr));
    CHECK(all_finite(zp.out));
    CHECK(all_finite(d.out));
    CHECK(all_finite(d.feat));
}
