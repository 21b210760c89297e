// This file is part of the monofuse library.
//
// Copyright 2026 The monofuse authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "monofuse/dataset.hpp"
#include "monofuse/image_io.hpp"

#include "support/synthetic.hpp"

using namespace monofuse;
namespace fs = std::filesystem;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("load_split") {
    testsupport::TempDir dir("split");

    SECTION("well-formed three-line file keeps order") {
        const auto file = dir.path() / "split.txt";
        write_text(file,
                   "a/c0.png a/m0.png a/d0.png\n"
                   "b/c1.png b/m1.png\n"
                   "c/c2.png c/m2.png c/d2.png\n");
        const DatasetIndex idx = load_split(file, dir.path());
        REQUIRE(idx.entries.size() == 3);
        CHECK(idx.entries[0].color_path == "a/c0.png");
        CHECK(idx.entries[1].mono_path == "b/m1.png");
        CHECK(!idx.entries[1].gt_depth_path.has_value());
        CHECK(idx.entries[2].gt_depth_path.value() == "c/d2.png");
        CHECK(idx.root == dir.path());
    }
    SECTION("empty file gives an empty index") {
        const auto file = dir.path() / "empty.txt";
        write_text(file, "");
        CHECK(load_split(file, dir.path()).entries.empty());
    }
    SECTION("blank lines are skipped") {
        const auto file = dir.path() / "blank.txt";
        write_text(file, "\na/c.png a/m.png\n\n");
        CHECK(load_split(file, dir.path()).entries.size() == 1);
    }
    SECTION("single-field line reported with its line number") {
        const auto file = dir.path() / "bad.txt";
        write_text(file, "a/c.png a/m.png\nonly_one_field\n");
        CHECK_THROWS_WITH(load_split(file, dir.path()),
                          Catch::Matchers::ContainsSubstring("line 2"));
    }
    SECTION("duplicate color paths rejected") {
        const auto file = dir.path() / "dup.txt";
        write_text(file, "a/c.png a/m.png\na/c.png a/m2.png\n");
        CHECK_THROWS_AS(load_split(file, dir.path()), InvalidInputError);
    }
    SECTION("missing file is an I/O error") {
        CHECK_THROWS_AS(load_split(dir.path() / "nope.txt", dir.path()), IoError);
    }
    SECTION("loading is idempotent") {
        const auto file = dir.path() / "split.txt";
        write_text(file, "a/c.png a/m.png\nb/c.png b/m.png\n");
        const DatasetIndex a = load_split(file, dir.path());
        const DatasetIndex b = load_split(file, dir.path());
        REQUIRE(a.entries.size() == b.entries.size());
        for (size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(a.entries[i].color_path == b.entries[i].color_path);
            CHECK(a.entries[i].mono_path == b.entries[i].mono_path);
        }
    }
}

TEST_CASE("depth PNG codec") {
    SECTION("raw 256 is one meter, raw 0 invalid, raw 25600 is 100 m") {
        DepthMap d(3, 1);
        d.set(0, 0, 1.0f, true);
        d.set(1, 0, 0.0f, false);
        d.set(2, 0, 100.0f, true);
        const DepthMap back = decode_depth_png(encode_depth_png(d));
        CHECK(back.depth_at(0, 0) == 1.0f);
        CHECK(back.valid_at(0, 0));
        CHECK(!back.valid_at(1, 0));
        CHECK(back.depth_at(2, 0) == 100.0f);
        CHECK(back.valid_at(2, 0));
    }
    SECTION("multiples of 1/256 below 256 m survive exactly") {
        std::mt19937_64 rng(61);
        DepthMap d(16, 16);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) {
                const int raw = testsupport::uniform_int(rng, 0, 65535);
                d.set(x, y, static_cast<float>(raw) / 256.0f, raw != 0);
            }
        const DepthMap back = decode_depth_png(encode_depth_png(d));
        CHECK(back.depth == d.depth);
        CHECK(back.valid == d.valid);
    }
    SECTION("8-bit PNG rejected as depth") {
        const std::vector<uint8_t> png8 = encode_png(PlanarImage(4, 4, 1, 0.5f));
        CHECK_THROWS_AS(decode_depth_png(png8), FormatError);
    }
    SECTION("garbage bytes rejected") {
        const std::vector<uint8_t> junk = {1, 2, 3, 4, 5};
        CHECK_THROWS_AS(decode_depth_png(junk), FormatError);
    }
}

TEST_CASE("load_image / save_image") {
    testsupport::TempDir dir("img");

    SECTION("8-bit gray value 128 becomes 128/255") {
        const auto p = dir.path() / "gray.png";
        save_image(PlanarImage(5, 4, 1, 128.0f / 255.0f), p);
        const PlanarImage img = load_image(p);
        REQUIRE(img.channels == 1);
        for (float v : img.samples) CHECK(v == 128.0f / 255.0f);
    }
    SECTION("RGB (255,0,0) becomes (1,0,0)") {
        const auto p = dir.path() / "red.png";
        PlanarImage red(3, 3, 3, 0.0f);
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x)
                red.at(x, y, 0) = 1.0f;
        save_image(red, p);
        const PlanarImage img = load_image(p);
        REQUIRE(img.channels == 3);
        CHECK(img.at(1, 1, 0) == 1.0f);
        CHECK(img.at(1, 1, 1) == 0.0f);
        CHECK(img.at(1, 1, 2) == 0.0f);
    }
    SECTION("16-bit PNG rejected by load_image") {
        const auto p = dir.path() / "d16.png";
        DepthMap d(4, 4);
        d.set(0, 0, 1.0f, true);
        save_depth_png(d, p);
        CHECK_THROWS_AS(load_image(p), FormatError);
    }
    SECTION("save-then-load stays within the quantization bound") {
        std::mt19937_64 rng(67);
        PlanarImage img(9, 7, 3);
        for (float& s : img.samples)
            s = static_cast<float>(testsupport::uniform(rng, 0, 1));
        const auto p = dir.path() / "rt.png";
        save_image(img, p);
        const PlanarImage back = load_image(p);
        for (size_t i = 0; i < img.samples.size(); ++i)
            CHECK(std::fabs(back.samples[i] - img.samples[i]) <= 1.0f / 510.0f + 1e-7f);
        // quantization is idempotent: a second trip is lossless
        const auto p2 = dir.path() / "rt2.png";
        save_image(back, p2);
        CHECK(load_image(p2).samples == back.samples);
    }
    SECTION("all-zero image round trips to all zeros") {
        const auto p = dir.path() / "zero.png";
        save_image(PlanarImage(4, 4, 1, 0.0f), p);
        for (float v : load_image(p).samples) CHECK(v == 0.0f);
    }
    SECTION("encoding is byte-stable across calls") {
        const PlanarImage img = testsupport::make_color_fixture(33, 21);
        CHECK(encode_png(img) == encode_png(img));
    }
    SECTION("missing file is an I/O error") {
        CHECK_THROWS_AS(load_image(dir.path() / "absent.png"), IoError);
    }
    SECTION("non-image bytes rejected") {
        const auto p = dir.path() / "text.png";
        std::ofstream(p) << "not an image";
        CHECK_THROWS_AS(load_image(p), FormatError);
    }
    SECTION("RGBA PNG rejected rather than coerced") {
        // assemble a 2x2 RGBA PNG directly with libpng
        std::vector<uint8_t> bytes;
        {
            monofuse::detail::PngWriteGuard g;
            std::vector<uint8_t> raw(2 * 2 * 4, 200);
            std::vector<png_bytep> rows{raw.data(), raw.data() + 8};
            monofuse::detail::PngHeader hdr{2, 2, 8, PNG_COLOR_TYPE_RGB_ALPHA};
            REQUIRE(monofuse::detail::png_write_phase(g, bytes, hdr, rows.data()));
        }
        CHECK_THROWS_AS(decode_png(bytes), FormatError);
        CHECK_THROWS_AS(decode_depth_png(bytes), FormatError);
    }
}

namespace {

// writes a flat-field JPEG with libjpeg so load_image's decoder has a real
// system-encoded file to chew on
void write_flat_jpeg(const fs::path& p, int w, int h, int components, uint8_t value) {
    FILE* f = fopen(p.string().c_str(), "wb");
    REQUIRE(f != nullptr);
    jpeg_compress_struct cinfo{};
    jpeg_error_mgr err{};
    cinfo.err = jpeg_std_error(&err);
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, f);
    cinfo.image_width = static_cast<JDIMENSION>(w);
    cinfo.image_height = static_cast<JDIMENSION>(h);
    cinfo.input_components = components;
    cinfo.in_color_space = components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, 95, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    std::vector<uint8_t> row(static_cast<size_t>(w) * components, value);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW r = row.data();
        jpeg_write_scanlines(&cinfo, &r, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    fclose(f);
}

} // namespace

TEST_CASE("JPEG decoding") {
    testsupport::TempDir dir("jpeg");

    SECTION("grayscale") {
        const auto p = dir.path() / "gray.jpg";
        write_flat_jpeg(p, 8, 8, 1, 128);
        const PlanarImage img = load_image(p);
        CHECK(img.width == 8);
        CHECK(img.height == 8);
        CHECK(img.channels == 1);
        // flat field survives lossy compression essentially unchanged
        for (float v : img.samples)
            CHECK_THAT(v, Catch::Matchers::WithinAbs(128.0 / 255.0, 2.0 / 255.0));
    }
    SECTION("RGB") {
        const auto p = dir.path() / "rgb.jpg";
        write_flat_jpeg(p, 6, 4, 3, 90);
        const PlanarImage img = load_image(p);
        CHECK(img.channels == 3);
        for (float v : img.samples)
            CHECK_THAT(v, Catch::Matchers::WithinAbs(90.0 / 255.0, 2.0 / 255.0));
    }
}

TEST_CASE("to_single_channel") {
    SECTION("replicated 3-channel mono collapses to its first channel") {
        PlanarImage img(4, 3, 3);
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 4; ++x)
                for (int c = 0; c < 3; ++c)
                    img.at(x, y, c) = 0.1f * x;
        const PlanarImage mono = to_single_channel(img);
        REQUIRE(mono.channels == 1);
        CHECK(mono.at(2, 1) == 0.2f);
    }
    SECTION("genuinely colored input rejected") {
        PlanarImage img(2, 2, 3, 0.5f);
        img.at(0, 0, 1) = 0.6f;
        CHECK_THROWS_AS(to_single_channel(img), InvalidInputError);
    }
}
