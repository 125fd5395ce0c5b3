#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "doctest.h"
#include "sglc/hazelab.hpp"
#include "sglc/parallel.hpp"
#include "sglc/pipeline.hpp"
#include "test_util.hpp"

using namespace sglc;
using test::bit_equal;
using test::max_abs_diff;
using test::random_image;
using test::smooth_image;

namespace {

struct CountingRestorer final : Restorer {
    mutable std::atomic<int> calls{0};
    ImageBuffer restore(const ImageBuffer& patch, const PatchContext&) const override {
        calls.fetch_add(1);
        return patch;
    }
};

struct AddQuarterRestorer final : Restorer {
    ImageBuffer restore(const ImageBuffer& patch, const PatchContext&) const override {
        ImageBuffer out = patch;
        for (std::size_t i = 0; i < out.sample_count(); ++i)
            out.data()[i] = std::min(out.data()[i] + 0.25f, 1.0f);
        return out;
    }
};

struct HalveRestorer final : Restorer {
    ImageBuffer restore(const ImageBuffer& patch, const PatchContext&) const override {
        ImageBuffer out = patch;
        for (std::size_t i = 0; i < out.sample_count(); ++i) out.data()[i] *= 0.5f;
        return out;
    }
};

struct FailingRestorer final : Restorer {
    ImageBuffer restore(const ImageBuffer&, const PatchContext&) const override {
        throw std::runtime_error("always fails");
    }
};

HazeField desk_field(int h, int w, float beta, float light, std::uint64_t seed) {
    HazeField f;
    f.beta = beta;
    f.depth = smooth_depth_map(h, w, seed, 3);
    f.atmospheric_light = {light, light, light};
    return f;
}

} // namespace

TEST_CASE("gfg with the identity model is a bit-exact passthrough") {
    const auto identity = identity_restorer();
    const ImageBuffer img = random_image(100, 150, 3, 1); // not divisible by 64
    CHECK(bit_equal(run_gfg(img, *identity, 64), img));
}

TEST_CASE("gfg processes the expected patch count") {
    const CountingRestorer dm;
    const ImageBuffer img = random_image(256, 384, 3, 2);
    run_gfg(img, dm, 64);
    CHECK(dm.calls.load() == 24);
}

TEST_CASE("gfg with the haze oracle recovers the clean image") {
    const int h = 128, w = 192;
    const ImageBuffer clean = smooth_image(h, w, 3, 3);
    const HazeField f = desk_field(h, w, 2.3f, 1.0f, 4);
    const ImageBuffer hazy = synthesize_haze(clean, f);

    HazeOracleParams params;
    params.transmission = transmission(f, h, w);
    params.atmospheric_light = f.atmospheric_light;
    const auto oracle = haze_oracle_restorer(std::move(params));

    const ImageBuffer restored = run_gfg(hazy, *oracle, 64);
    CHECK(psnr(clean, restored) >= 60.0);
}

TEST_CASE("lfe identity paths") {
    const auto identity = identity_restorer();
    const ImageBuffer img = random_image(90, 130, 3, 5);
    CHECK(bit_equal(run_lfe(img, *identity, 64, false, false), img));
    CHECK(max_abs_diff(run_lfe(img, *identity, 64, true, false), img) <= 1e-5);
    CHECK(max_abs_diff(run_lfe(img, *identity, 64, true, true), img) <= 1e-5);
}

TEST_CASE("mops suppresses the seams a damaged enhancer creates") {
    const auto damage = border_damage_restorer(2, 0.0f);
    for (std::uint64_t seed : {10u, 11u, 12u}) {
        const ImageBuffer img = smooth_image(256, 384, 3, seed);
        const ImageBuffer naive = run_lfe(img, *damage, 64, false, false);
        const ImageBuffer smoothed = run_lfe(img, *damage, 64, true, false);
        const double naive_seam = seam_metric(naive, 64);
        const double mops_seam = seam_metric(smoothed, 64);
        CAPTURE(seed);
        CHECK(naive_seam > seam_metric(img, 64));
        CHECK(mops_seam <= 0.25 * naive_seam);
        CHECK(mops_seam <= 1.2);
    }
}

TEST_CASE("sglc passthrough preserves bits on awkward sizes") {
    const auto identity = identity_restorer();
    PipelineConfig cfg;
    cfg.grid_patch_side = 64;
    cfg.use_mops = false;
    cfg.use_dihedral = false;
    const ImageBuffer img = random_image(250, 390, 3, 20);
    CHECK(bit_equal(run_sglc(img, *identity, *identity, cfg), img));
}

TEST_CASE("stage order controls composition") {
    const AddQuarterRestorer dm;
    const HalveRestorer em;
    PipelineConfig cfg;
    cfg.grid_patch_side = 32;
    cfg.use_mops = false;

    const ImageBuffer img = ImageBuffer::constant(64, 64, 1, 0.2f);
    cfg.order = StageOrder::Sglc;
    const ImageBuffer forward = run_sglc(img, dm, em, cfg);
    CHECK(forward.at(5, 5, 0) == doctest::Approx(0.225f).epsilon(1e-6)); // (x+0.25)/2

    cfg.order = StageOrder::InvSglc;
    const ImageBuffer inverse = run_sglc(img, dm, em, cfg);
    CHECK(inverse.at(5, 5, 0) == doctest::Approx(0.35f).epsilon(1e-6)); // x/2+0.25
}

TEST_CASE("full pipeline with the oracle model clears 60 dB") {
    const int h = 128, w = 192;
    const ImageBuffer clean = smooth_image(h, w, 3, 30);
    const HazeField f = desk_field(h, w, 1.0f, 0.9f, 31);
    const ImageBuffer hazy = synthesize_haze(clean, f);

    HazeOracleParams params;
    params.transmission = transmission(f, h, w);
    params.atmospheric_light = f.atmospheric_light;
    const auto dm = haze_oracle_restorer(std::move(params));
    const auto em = identity_restorer();

    PipelineConfig cfg;
    cfg.grid_patch_side = 64;
    cfg.use_mops = true;
    cfg.use_dihedral = false;
    const ImageBuffer restored = run_sglc(hazy, *dm, *em, cfg);
    CHECK(psnr(clean, restored) >= 60.0);
    CHECK(ssim(clean, restored) >= 0.999);
}

TEST_CASE("pipeline output is bit-identical across worker counts") {
    LeWinConfig lw;
    lw.channels = 3;
    lw.window = 8;
    lw.heads = 1;
    lw.seed = 77;
    const auto dm = lewin_restorer(lw);
    const auto em = lewin_restorer(lw);

    PipelineConfig cfg;
    cfg.grid_patch_side = 32;
    cfg.use_mops = true;
    cfg.use_dihedral = true;
    const ImageBuffer img = random_image(70, 90, 3, 40);

    set_worker_cap(1);
    const ImageBuffer one = run_sglc(img, *dm, *em, cfg);
    set_worker_cap(4);
    const ImageBuffer four = run_sglc(img, *dm, *em, cfg);
    set_worker_cap(8);
    const ImageBuffer eight = run_sglc(img, *dm, *em, cfg);
    set_worker_cap(0);

    CHECK(bit_equal(one, four));
    CHECK(bit_equal(one, eight));

    const ImageBuffer again = run_sglc(img, *dm, *em, cfg);
    CHECK(bit_equal(one, again));
}

TEST_CASE("worker count resolves from the environment") {
    set_worker_cap(0);
    setenv("SGLC_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    unsetenv("SGLC_THREADS");
    CHECK(worker_count() >= 1);
    set_worker_cap(5);
    CHECK(worker_count() == 5);
    set_worker_cap(0);
}

TEST_CASE("restorer failures surface with patch coordinates") {
    const FailingRestorer dm;
    const ImageBuffer img = random_image(64, 64, 1, 50);
    CHECK_THROWS_AS(run_gfg(img, dm, 32), RestorerError);
    try {
        run_gfg(img, dm, 32);
    } catch (const RestorerError& e) {
        const std::string what = e.what();
        CHECK(what.find("grid patch 0") != std::string::npos);
        CHECK(what.find("always fails") != std::string::npos);
    }
}

TEST_CASE("evaluate bundles the metrics") {
    const ImageBuffer img = smooth_image(128, 128, 3, 60);
    const QualityReport report = evaluate(img, img, 64, 1.5);
    CHECK(std::isinf(report.psnr_db));
    CHECK(report.ssim == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(report.wall_time_s == 1.5);
    const QualityReport back = QualityReport::from_record(report.to_record());
    CHECK(std::isinf(back.psnr_db));

    CHECK_THROWS_AS(evaluate(img, random_image(64, 64, 3, 61), 64, 0.0),
                    std::invalid_argument);
}

TEST_CASE("config validation") {
    const auto identity = identity_restorer();
    PipelineConfig cfg;
    cfg.grid_patch_side = 30; // not a multiple of 4
    CHECK_THROWS_AS(run_sglc(random_image(64, 64, 1, 70), *identity, *identity, cfg),
                    std::invalid_argument);
}
