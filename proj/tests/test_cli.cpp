// Integration tests that drive the installed CLI binary end to end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "sglc/io.hpp"
#include "sglc/metrics.hpp"
#include "test_util.hpp"

using namespace sglc;
using test::bit_equal;
using test::max_abs_diff;
using test::random_image;
using test::smooth_image;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;
};

std::filesystem::path work_dir() {
    static const auto dir = std::filesystem::temp_directory_path() /
                            ("sglc_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const auto out_path = work_dir() / "stdout.txt";
    const std::string cmd = env_prefix + std::string(SGLC_CLI_PATH) + " " + args +
                            " > " + out_path.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_path);
    r.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return r;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

} // namespace

TEST_CASE("cli: identity pipeline is a bit-exact file round trip") {
    const auto dir = work_dir();
    const ImageBuffer img = random_image(100, 140, 3, 1);
    write_raw(dir / "in.raw", img);

    const CliResult r = run_cli("dehaze " + q(dir / "in.raw") + " " + q(dir / "out.raw") +
                                " --dm identity --em identity --no-mops --grid-side 64");
    REQUIRE(r.exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "out.raw"), img));
}

TEST_CASE("cli: missing input exits 1 and writes nothing") {
    const auto dir = work_dir();
    const CliResult r =
        run_cli("dehaze " + q(dir / "missing.raw") + " " + q(dir / "never.raw"));
    CHECK(r.exit_code == 1);
    CHECK(!std::filesystem::exists(dir / "never.raw"));
}

TEST_CASE("cli: bad restorer selector exits 2") {
    const auto dir = work_dir();
    write_raw(dir / "sel.raw", random_image(64, 64, 1, 2));
    const CliResult r = run_cli("dehaze " + q(dir / "sel.raw") + " " +
                                q(dir / "sel_out.raw") + " --dm bogus --grid-side 32");
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: synth fixtures and determinism") {
    const auto dir = work_dir();
    write_raw(dir / "clean.raw", ImageBuffer::constant(64, 64, 3, 0.2f));

    // beta 0: transmission 1, hazy == clean
    CHECK(run_cli("synth " + q(dir / "clean.raw") + " " + q(dir / "h0.raw") +
                  " --beta 0")
              .exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "h0.raw"), read_raw(dir / "clean.raw")));

    // constant depth 1, beta ln 2, light 1: 0.5*0.2 + 0.5 = 0.6
    CHECK(run_cli("synth " + q(dir / "clean.raw") + " " + q(dir / "h1.raw") +
                  " --beta 0.6931471805599453 --depth constant:1 --light 1.0")
              .exit_code == 0);
    const ImageBuffer hazy = read_raw(dir / "h1.raw");
    CHECK(max_abs_diff(hazy, ImageBuffer::constant(64, 64, 3, 0.6f)) <= 1e-6);

    // seeded noise depth: identical bytes across runs
    CHECK(run_cli("synth " + q(dir / "clean.raw") + " " + q(dir / "n1.raw") +
                  " --beta 1.2 --seed 42")
              .exit_code == 0);
    CHECK(run_cli("synth " + q(dir / "clean.raw") + " " + q(dir / "n2.raw") +
                  " --beta 1.2 --seed 42")
              .exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "n1.raw"), read_raw(dir / "n2.raw")));
    CHECK(std::filesystem::exists(dir / "n1.raw.trans.raw"));
}

TEST_CASE("cli: oracle dehaze reports high fidelity") {
    const auto dir = work_dir();
    write_raw(dir / "oc.raw", smooth_image(256, 384, 3, 3));
    REQUIRE(run_cli("synth " + q(dir / "oc.raw") + " " + q(dir / "oh.raw") +
                    " --beta 1.0 --seed 7 --light 0.9")
                .exit_code == 0);

    const CliResult r = run_cli(
        "dehaze " + q(dir / "oh.raw") + " " + q(dir / "or.raw") +
        " --dm haze-oracle --em identity --transmission " + q(dir / "oh.raw.trans.raw") +
        " --light 0.9 --grid-side 64 --mops --no-dihedral --truth " + q(dir / "oc.raw"));
    REQUIRE(r.exit_code == 0);
    const QualityReport report = QualityReport::from_record(r.output);
    CHECK(report.psnr_db >= 60.0);
    CHECK(report.ssim >= 0.999);
    CHECK(report.wall_time_s > 0.0);
}

TEST_CASE("cli: corrupt count and determinism") {
    const auto dir = work_dir();
    write_raw(dir / "cc.raw", random_image(64, 64, 3, 5));

    CHECK(run_cli("corrupt " + q(dir / "cc.raw") + " " + q(dir / "c0.raw") +
                  " --count 0")
              .exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "c0.raw"), read_raw(dir / "cc.raw")));

    CHECK(run_cli("corrupt " + q(dir / "cc.raw") + " " + q(dir / "c1.raw") +
                  " --count 1 --side 4 --seed 9 --fill 1.0")
              .exit_code == 0);
    const ImageBuffer mask = read_raw(dir / "c1.raw.mask.raw");
    int set = 0;
    for (std::size_t i = 0; i < mask.sample_count(); ++i)
        if (mask.data()[i] == 1.0f) ++set;
    CHECK(set == 16);
    const ImageBuffer corrupted = read_raw(dir / "c1.raw");
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (mask.at(y, x, 0) == 1.0f)
                for (int c = 0; c < 3; ++c) CHECK(corrupted.at(y, x, c) == 1.0f);
}

TEST_CASE("cli: metrics fixtures and error contract") {
    const auto dir = work_dir();
    write_raw(dir / "z.raw", ImageBuffer::constant(16, 16, 1, 0.0f));
    write_raw(dir / "o.raw", ImageBuffer::constant(16, 16, 1, 1.0f));
    write_raw(dir / "small.raw", ImageBuffer::constant(16, 17, 1, 0.0f));

    CliResult r = run_cli("metrics " + q(dir / "z.raw") + " " + q(dir / "z.raw"));
    REQUIRE(r.exit_code == 0);
    QualityReport rep = QualityReport::from_record(r.output);
    CHECK(std::isinf(rep.psnr_db));
    CHECK(rep.ssim == doctest::Approx(1.0).epsilon(1e-9));

    r = run_cli("metrics " + q(dir / "z.raw") + " " + q(dir / "o.raw"));
    REQUIRE(r.exit_code == 0);
    rep = QualityReport::from_record(r.output);
    CHECK(rep.psnr_db == 0.0);

    r = run_cli("metrics " + q(dir / "z.raw") + " " + q(dir / "small.raw"));
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: config file applies and explicit flags win") {
    const auto dir = work_dir();
    const ImageBuffer img = random_image(80, 96, 3, 6);
    write_raw(dir / "cfg_in.raw", img);
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# pipeline configuration\n"
            << "dm=border-damage:2:0\n"
            << "em=identity\n"
            << "grid_patch_side=32\n"
            << "use_mops=false\n"
            << "use_dihedral=false\n"
            << "order=sglc\n";
    }
    // config's damaging dm changes the image...
    CliResult r = run_cli("dehaze " + q(dir / "cfg_in.raw") + " " + q(dir / "cfg_a.raw") +
                          " --config " + q(dir / "run.cfg"));
    REQUIRE(r.exit_code == 0);
    CHECK(!bit_equal(read_raw(dir / "cfg_a.raw"), img));

    // ...but an explicit --dm identity overrides the file and passes through.
    r = run_cli("dehaze " + q(dir / "cfg_in.raw") + " " + q(dir / "cfg_b.raw") +
                " --config " + q(dir / "run.cfg") + " --dm identity");
    REQUIRE(r.exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "cfg_b.raw"), img));

    // unknown keys are a config error
    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "nonsense=1\n";
    }
    r = run_cli("dehaze " + q(dir / "cfg_in.raw") + " " + q(dir / "cfg_c.raw") +
                " --config " + q(dir / "bad.cfg"));
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: both stage orders run under one config") {
    const auto dir = work_dir();
    write_raw(dir / "ord.raw", smooth_image(128, 192, 3, 8));
    {
        std::ofstream cfg(dir / "ord.cfg");
        cfg << "dm=lewin:3\nem=border-damage:1:0.5\ngrid_patch_side=64\n"
            << "use_mops=true\nuse_dihedral=false\n";
    }
    for (const std::string order : {"sglc", "inv_sglc"}) {
        const CliResult r = run_cli("dehaze " + q(dir / "ord.raw") + " " +
                                    q(dir / ("ord_" + order + ".raw")) + " --config " +
                                    q(dir / "ord.cfg") + " --order " + order +
                                    " --truth " + q(dir / "ord.raw"));
        CAPTURE(order);
        REQUIRE(r.exit_code == 0);
        const QualityReport rep = QualityReport::from_record(r.output);
        CHECK(rep.wall_time_s > 0.0);
    }
    CHECK(!bit_equal(read_raw(dir / "ord_sglc.raw"), read_raw(dir / "ord_inv_sglc.raw")));
}

TEST_CASE("cli: SGLC_THREADS never changes the output bytes") {
    const auto dir = work_dir();
    write_raw(dir / "thr.raw", smooth_image(96, 128, 3, 9));
    const std::string base = "dehaze " + q(dir / "thr.raw") + " ";
    const std::string tail = " --dm lewin:5 --em identity --grid-side 32 --mops "
                             "--no-dihedral";

    REQUIRE(run_cli(base + q(dir / "t1.raw") + tail, "SGLC_THREADS=1 ").exit_code == 0);
    REQUIRE(run_cli(base + q(dir / "t4.raw") + tail, "SGLC_THREADS=4 ").exit_code == 0);
    REQUIRE(run_cli(base + q(dir / "t8.raw") + tail, "SGLC_THREADS=8 ").exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "t1.raw"), read_raw(dir / "t4.raw")));
    CHECK(bit_equal(read_raw(dir / "t1.raw"), read_raw(dir / "t8.raw")));
}

TEST_CASE("cli: forcing the scalar kernel backend never changes bytes") {
    const auto dir = work_dir();
    write_raw(dir / "kb.raw", smooth_image(96, 128, 3, 14));
    const std::string base = "dehaze " + q(dir / "kb.raw") + " ";
    const std::string tail = " --dm border-damage:2:0 --em identity --grid-side 32 "
                             "--mops --dihedral";
    REQUIRE(run_cli(base + q(dir / "kb_auto.raw") + tail).exit_code == 0);
    REQUIRE(run_cli(base + q(dir / "kb_scalar.raw") + tail, "SGLC_KERNELS=scalar ")
                .exit_code == 0);
    REQUIRE(run_cli(base + q(dir / "kb_avx2.raw") + tail, "SGLC_KERNELS=avx2 ")
                .exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "kb_auto.raw"), read_raw(dir / "kb_scalar.raw")));
    CHECK(bit_equal(read_raw(dir / "kb_auto.raw"), read_raw(dir / "kb_avx2.raw")));
}

TEST_CASE("cli: exec restorer plugs in an external process") {
    const auto dir = work_dir();
    const ImageBuffer img = random_image(64, 96, 3, 10);
    write_raw(dir / "ex.raw", img);
    const CliResult r = run_cli("dehaze " + q(dir / "ex.raw") + " " + q(dir / "exo.raw") +
                                " --dm exec:cat --em identity --no-mops --grid-side 32");
    REQUIRE(r.exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "exo.raw"), img));
}

TEST_CASE("cli: dataset export writes tile pairs and a stable manifest") {
    const auto dir = work_dir();
    const auto hazy_dir = dir / "hazy";
    const auto clean_dir = dir / "clean";
    std::filesystem::create_directories(hazy_dir);
    std::filesystem::create_directories(clean_dir);

    const ImageBuffer clean = smooth_image(256, 384, 3, 11);
    write_raw(clean_dir / "scene.raw", clean);
    write_raw(hazy_dir / "scene.raw", clean); // identity-dm path only needs a pair

    const std::string cmd = "export-lfe-dataset " + q(hazy_dir) + " " + q(clean_dir) +
                            " " + q(dir / "ds") + " --dm identity --grid-side 64";
    REQUIRE(run_cli(cmd).exit_code == 0);

    std::ifstream manifest(dir / "ds" / "manifest.txt");
    REQUIRE(manifest.good());
    int lines = 0;
    std::string line;
    std::string first_line;
    while (std::getline(manifest, line)) {
        if (lines == 0) first_line = line;
        ++lines;
    }
    CHECK(lines == 24); // (256/64)*(384/64)
    CHECK(first_line.find("pair=scene") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "ds" / "scene_t0_pred.raw"));
    CHECK(std::filesystem::exists(dir / "ds" / "scene_t23_clean.raw"));

    // re-run reproduces byte-identical artifacts
    const auto manifest_bytes = [&] {
        std::ifstream in(dir / "ds" / "manifest.txt", std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
    };
    const std::string before = manifest_bytes();
    const ImageBuffer tile_before = read_raw(dir / "ds" / "scene_t5_pred.raw");
    REQUIRE(run_cli(cmd).exit_code == 0);
    CHECK(manifest_bytes() == before);
    CHECK(bit_equal(read_raw(dir / "ds" / "scene_t5_pred.raw"), tile_before));

    // unmatched pairs exit 2 and name the offender
    write_raw(hazy_dir / "orphan.raw", clean);
    const CliResult bad = run_cli(cmd);
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find("orphan") != std::string::npos);
}

TEST_CASE("cli: empty dataset export succeeds with an empty manifest") {
    const auto dir = work_dir();
    std::filesystem::create_directories(dir / "eh");
    std::filesystem::create_directories(dir / "ec");
    REQUIRE(run_cli("export-lfe-dataset " + q(dir / "eh") + " " + q(dir / "ec") + " " +
                    q(dir / "eds"))
                .exit_code == 0);
    std::ifstream manifest(dir / "eds" / "manifest.txt");
    REQUIRE(manifest.good());
    std::string line;
    CHECK(!std::getline(manifest, line));
}

TEST_CASE("cli: grid and window debug verbs round trip through files") {
    const auto dir = work_dir();
    const ImageBuffer img = random_image(100, 130, 3, 12);
    write_raw(dir / "g.raw", img);

    REQUIRE(run_cli("grid extract " + q(dir / "g.raw") + " " + q(dir / "gpatches") +
                    " --patch-side 32")
                .exit_code == 0);
    REQUIRE(run_cli("grid reconstruct " + q(dir / "gpatches") + " " + q(dir / "gback.raw"))
                .exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "gback.raw"), img));

    REQUIRE(run_cli("window extract " + q(dir / "g.raw") + " " + q(dir / "wtiles") +
                    " --tile-side 32")
                .exit_code == 0);
    REQUIRE(run_cli("window reconstruct " + q(dir / "wtiles") + " " + q(dir / "wback.raw"))
                .exit_code == 0);
    CHECK(bit_equal(read_raw(dir / "wback.raw"), img));
}

TEST_CASE("cli: png output and truth work together") {
    const auto dir = work_dir();
    const ImageBuffer img = smooth_image(128, 128, 3, 13);
    write_png(dir / "p.png", img);
    const CliResult r = run_cli("dehaze " + q(dir / "p.png") + " " + q(dir / "po.png") +
                                " --dm identity --em identity --no-mops --grid-side 64 "
                                " --truth " + q(dir / "p.png"));
    REQUIRE(r.exit_code == 0);
    const QualityReport rep = QualityReport::from_record(r.output);
    CHECK(rep.psnr_db > 80.0); // only 16-bit quantization noise
    const ImageBuffer back = read_png(dir / "po.png");
    CHECK(max_abs_diff(back, img) <= 1.0 / 65535.0);
}
