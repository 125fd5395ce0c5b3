#include <stdexcept>

#include "doctest.h"
#include "sglc/image.hpp"
#include "sglc/rng.hpp"
#include "test_util.hpp"

using namespace sglc;
using test::bit_equal;
using test::random_image;

TEST_CASE("padded extent follows the div-plus-one rule") {
    CHECK(padded_extent(4000, 1024) == 4096);
    CHECK(padded_extent(6000, 1024) == 6144);
    CHECK(padded_extent(2048, 1024) == 2048);
    CHECK(padded_extent(1, 64) == 64);
    CHECK_THROWS_AS(padded_extent(5, 0), std::invalid_argument);
}

TEST_CASE("pad_to_multiple output dims are divisible") {
    SplitMix64 rng(7);
    for (int i = 0; i < 60; ++i) {
        const int h = 1 + static_cast<int>(rng.next_below(300));
        const int w = 1 + static_cast<int>(rng.next_below(300));
        const int g = 1 + static_cast<int>(rng.next_below(4096));
        const ImageBuffer img = random_image(h, w, 1, 1000 + i);
        const auto [padded, spec] = pad_to_multiple(img, g);
        CHECK(padded.height() % g == 0);
        CHECK(padded.width() % g == 0);
        CHECK(padded.height() - spec.bottom == h);
        CHECK(padded.width() - spec.right == w);
    }
}

TEST_CASE("already divisible image returns unchanged with zero spec") {
    const ImageBuffer img = random_image(128, 64, 3, 42);
    const auto [padded, spec] = pad_to_multiple(img, 64);
    CHECK(spec.is_zero());
    CHECK(bit_equal(padded, img));
}

TEST_CASE("pad/unpad round trip is bit-exact in both modes") {
    SplitMix64 rng(99);
    for (PadMode mode : {PadMode::Replicate, PadMode::Reflect}) {
        for (int i = 0; i < 25; ++i) {
            const int h = 1 + static_cast<int>(rng.next_below(150));
            const int w = 1 + static_cast<int>(rng.next_below(150));
            const int c = rng.next_below(2) == 0 ? 1 : 3;
            const int g = 2 + static_cast<int>(rng.next_below(96));
            const ImageBuffer img = random_image(h, w, c, 5000 + i);
            const auto [padded, spec] = pad_to_multiple(img, g, mode);
            CHECK(bit_equal(unpad(padded, spec), img));
        }
    }
}

TEST_CASE("replicate padding repeats the edge sample") {
    const ImageBuffer img = random_image(37, 41, 3, 3);
    const auto [padded, spec] = pad_to_multiple(img, 32, PadMode::Replicate);
    REQUIRE(spec.right > 0);
    for (int y = 0; y < img.height(); ++y)
        for (int c = 0; c < 3; ++c)
            CHECK(padded.at(y, padded.width() - 1, c) == img.at(y, img.width() - 1, c));
}

TEST_CASE("reflect padding mirrors about the edge") {
    ImageBuffer img(1, 3, 1);
    img.at(0, 0, 0) = 1.0f;
    img.at(0, 1, 0) = 2.0f;
    img.at(0, 2, 0) = 3.0f;
    const ImageBuffer padded = pad_borders(img, 0, 2, 0, 0, PadMode::Reflect);
    CHECK(padded.at(0, 3, 0) == 2.0f);
    CHECK(padded.at(0, 4, 0) == 1.0f);

    // Folding handles pads larger than the image.
    const ImageBuffer wide = pad_borders(img, 0, 4, 0, 0, PadMode::Reflect);
    CHECK(wide.at(0, 5, 0) == 2.0f);
    CHECK(wide.at(0, 6, 0) == 3.0f);
}

TEST_CASE("unpad rejects oversized specs") {
    const ImageBuffer img = random_image(8, 8, 1, 1);
    CHECK_THROWS_AS(unpad(img, PadSpec{8, 0, PadMode::Replicate}), std::invalid_argument);
    CHECK_THROWS_AS(unpad(img, PadSpec{0, 9, PadMode::Replicate}), std::invalid_argument);
    CHECK(bit_equal(unpad(img, PadSpec{}), img));
}

TEST_CASE("pad rejects invalid arguments") {
    const ImageBuffer img = random_image(8, 8, 1, 1);
    CHECK_THROWS_AS(pad_to_multiple(img, 0), std::invalid_argument);
    CHECK_THROWS_AS(pad_to_multiple(ImageBuffer{}, 8), std::invalid_argument);
    CHECK_THROWS_AS(ImageBuffer(0, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(ImageBuffer(4, 4, 2), std::invalid_argument);
}

TEST_CASE("clamp01 clamps and is idempotent") {
    ImageBuffer img(1, 4, 1);
    img.at(0, 0, 0) = 1.2f;
    img.at(0, 1, 0) = -0.3f;
    img.at(0, 2, 0) = 0.5f;
    img.at(0, 3, 0) = 1.0f;
    const ImageBuffer once = clamp01(img);
    CHECK(once.at(0, 0, 0) == 1.0f);
    CHECK(once.at(0, 1, 0) == 0.0f);
    CHECK(once.at(0, 2, 0) == 0.5f);
    CHECK(once.at(0, 3, 0) == 1.0f);
    CHECK(bit_equal(clamp01(once), once));

    const ImageBuffer in_range = random_image(9, 9, 3, 8);
    CHECK(bit_equal(clamp01(in_range), in_range));
}

TEST_CASE("crop extracts the requested region") {
    const ImageBuffer img = random_image(10, 12, 3, 17);
    const ImageBuffer sub = crop(img, 3, 2, 5, 4);
    CHECK(sub.height() == 4);
    CHECK(sub.width() == 5);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 5; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(sub.at(y, x, c) == img.at(y + 2, x + 3, c));
    CHECK_THROWS_AS(crop(img, 8, 0, 5, 4), std::invalid_argument);
}
