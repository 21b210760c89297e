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

#pragma once

#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "monofuse/depth.hpp"
#include "monofuse/image.hpp"

namespace monofuse {

inline std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open file: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failure: " + path.string());
    return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             std::span<const uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open file for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failure: " + path.string());
}

namespace detail {

// ---- libpng plumbing -------------------------------------------------------
//
// libpng reports errors by longjmp. To keep C++ objects out of the jump's
// way, every libpng call sequence lives in a small function that owns the
// setjmp and touches only caller-owned storage through pointers.

struct MemReader {
    const uint8_t* data;
    size_t size;
    size_t off;
};

inline void png_mem_read(png_structp png, png_bytep out, png_size_t n) {
    auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
    if (r->off + n > r->size)
        png_error(png, "unexpected end of PNG stream");
    std::memcpy(out, r->data + r->off, n);
    r->off += n;
}

inline void png_vec_write(png_structp png, png_bytep data, png_size_t n) {
    auto* v = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
    v->insert(v->end(), data, data + n);
}

inline void png_noop_flush(png_structp) {}

struct PngErrState {
    char message[256] = "unknown libpng error";
};

inline void png_throwless_error(png_structp png, png_const_charp msg) {
    auto* st = static_cast<PngErrState*>(png_get_error_ptr(png));
    if (st && msg) {
        std::strncpy(st->message, msg, sizeof(st->message) - 1);
        st->message[sizeof(st->message) - 1] = '\0';
    }
    longjmp(png_jmpbuf(png), 1);
}

inline void png_ignore_warning(png_structp, png_const_charp) {}

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    PngErrState err;

    PngReadGuard() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                     png_throwless_error, png_ignore_warning);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) {
            if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
            throw IoError("libpng allocation failed");
        }
    }
    PngReadGuard(const PngReadGuard&) = delete;
    PngReadGuard& operator=(const PngReadGuard&) = delete;
    ~PngReadGuard() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    PngErrState err;

    PngWriteGuard() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                      png_throwless_error, png_ignore_warning);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) {
            if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
            throw IoError("libpng allocation failed");
        }
    }
    PngWriteGuard(const PngWriteGuard&) = delete;
    PngWriteGuard& operator=(const PngWriteGuard&) = delete;
    ~PngWriteGuard() { png_destroy_write_struct(&png, &info); }
};

struct PngHeader {
    uint32_t width = 0;
    uint32_t height = 0;
    int bit_depth = 0;
    int color_type = 0;
};

inline bool png_read_header_phase(PngReadGuard& g, MemReader& src, PngHeader& hdr) {
    if (setjmp(png_jmpbuf(g.png))) return false;
    png_set_read_fn(g.png, &src, png_mem_read);
    png_read_info(g.png, g.info);
    hdr.width = png_get_image_width(g.png, g.info);
    hdr.height = png_get_image_height(g.png, g.info);
    hdr.bit_depth = png_get_bit_depth(g.png, g.info);
    hdr.color_type = png_get_color_type(g.png, g.info);
    return true;
}

inline bool png_read_rows_phase(PngReadGuard& g, png_bytep* rows) {
    if (setjmp(png_jmpbuf(g.png))) return false;
    png_read_image(g.png, rows);
    png_read_end(g.png, nullptr);
    return true;
}

inline bool png_write_phase(PngWriteGuard& g, std::vector<uint8_t>& out,
                            const PngHeader& hdr, png_bytep* rows) {
    if (setjmp(png_jmpbuf(g.png))) return false;
    png_set_write_fn(g.png, &out, png_vec_write, png_noop_flush);
    png_set_compression_level(g.png, 6);
    png_set_IHDR(g.png, g.info, hdr.width, hdr.height, hdr.bit_depth, hdr.color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    png_write_image(g.png, rows);
    png_write_end(g.png, nullptr);
    return true;
}

inline bool looks_like_png(std::span<const uint8_t> bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

inline bool looks_like_jpeg(std::span<const uint8_t> bytes) {
    return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

// ---- libjpeg plumbing ------------------------------------------------------

struct JpegErrState {
    jpeg_error_mgr mgr;
    jmp_buf jump;
    char message[JMSG_LENGTH_MAX] = "unknown libjpeg error";
};

inline void jpeg_throwless_error(j_common_ptr cinfo) {
    auto* st = reinterpret_cast<JpegErrState*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, st->message);
    longjmp(st->jump, 1);
}

inline void jpeg_silent_emit(j_common_ptr, int) {}

struct JpegReadGuard {
    jpeg_decompress_struct cinfo{};
    JpegErrState err;

    JpegReadGuard() {
        cinfo.err = jpeg_std_error(&err.mgr);
        err.mgr.error_exit = jpeg_throwless_error;
        err.mgr.emit_message = jpeg_silent_emit;
        jpeg_create_decompress(&cinfo);
    }
    JpegReadGuard(const JpegReadGuard&) = delete;
    JpegReadGuard& operator=(const JpegReadGuard&) = delete;
    ~JpegReadGuard() { jpeg_destroy_decompress(&cinfo); }
};

struct JpegHeader {
    uint32_t width = 0;
    uint32_t height = 0;
    int components = 0;
    int precision = 0;
};

inline bool jpeg_header_phase(JpegReadGuard& g, const uint8_t* data, size_t size,
                              JpegHeader& hdr) {
    if (setjmp(g.err.jump)) return false;
    jpeg_mem_src(&g.cinfo, data, static_cast<unsigned long>(size));
    jpeg_read_header(&g.cinfo, TRUE);
    hdr.width = g.cinfo.image_width;
    hdr.height = g.cinfo.image_height;
    hdr.components = g.cinfo.num_components;
    hdr.precision = g.cinfo.data_precision;
    return true;
}

inline bool jpeg_decode_phase(JpegReadGuard& g, uint8_t* out, size_t row_stride) {
    if (setjmp(g.err.jump)) return false;
    jpeg_start_decompress(&g.cinfo);
    while (g.cinfo.output_scanline < g.cinfo.output_height) {
        JSAMPROW row = out + static_cast<size_t>(g.cinfo.output_scanline) * row_stride;
        jpeg_read_scanlines(&g.cinfo, &row, 1);
    }
    jpeg_finish_decompress(&g.cinfo);
    return true;
}

} // namespace detail

/// Decodes an in-memory 8-bit gray or RGB PNG into [0,1] samples.
inline PlanarImage decode_png(std::span<const uint8_t> bytes) {
    detail::PngReadGuard g;
    detail::MemReader src{bytes.data(), bytes.size(), 0};
    detail::PngHeader hdr;
    if (!detail::png_read_header_phase(g, src, hdr))
        throw FormatError(std::string("PNG decode failed: ") + g.err.message);

    if (hdr.bit_depth != 8)
        throw FormatError("unsupported PNG bit depth " + std::to_string(hdr.bit_depth) +
                          " (expected 8-bit; 16-bit depth maps go through decode_depth_png)");
    int channels;
    if (hdr.color_type == PNG_COLOR_TYPE_GRAY)
        channels = 1;
    else if (hdr.color_type == PNG_COLOR_TYPE_RGB)
        channels = 3;
    else
        throw FormatError("unsupported PNG color type " + std::to_string(hdr.color_type) +
                          " (expected 8-bit gray or RGB)");

    const int w = static_cast<int>(hdr.width);
    const int h = static_cast<int>(hdr.height);
    const size_t stride = static_cast<size_t>(w) * channels;
    std::vector<uint8_t> raw(stride * h);
    std::vector<png_bytep> rows(static_cast<size_t>(h));
    for (int y = 0; y < h; ++y) rows[static_cast<size_t>(y)] = raw.data() + y * stride;
    if (!detail::png_read_rows_phase(g, rows.data()))
        throw FormatError(std::string("PNG decode failed: ") + g.err.message);

    PlanarImage img(w, h, channels);
    for (size_t i = 0; i < img.samples.size(); ++i)
        img.samples[i] = static_cast<float>(raw[i]) / 255.0f;
    return img;
}

/// Decodes an in-memory 8-bit baseline/progressive JPEG (gray or RGB).
inline PlanarImage decode_jpeg(std::span<const uint8_t> bytes) {
    detail::JpegReadGuard g;
    detail::JpegHeader hdr;
    if (!detail::jpeg_header_phase(g, bytes.data(), bytes.size(), hdr))
        throw FormatError(std::string("JPEG decode failed: ") + g.err.message);
    if (hdr.precision != 8)
        throw FormatError("unsupported JPEG precision " + std::to_string(hdr.precision));
    if (hdr.components != 1 && hdr.components != 3)
        throw FormatError("unsupported JPEG component count " +
                          std::to_string(hdr.components));

    g.cinfo.out_color_space = hdr.components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    const int w = static_cast<int>(hdr.width);
    const int h = static_cast<int>(hdr.height);
    const size_t stride = static_cast<size_t>(w) * hdr.components;
    std::vector<uint8_t> raw(stride * h);
    if (!detail::jpeg_decode_phase(g, raw.data(), stride))
        throw FormatError(std::string("JPEG decode failed: ") + g.err.message);

    PlanarImage img(w, h, hdr.components);
    for (size_t i = 0; i < img.samples.size(); ++i)
        img.samples[i] = static_cast<float>(raw[i]) / 255.0f;
    return img;
}

/// Loads an 8-bit gray or RGB image (PNG or JPEG; dispatched on magic bytes)
/// and scales samples to [0,1] by /255. Anything else is rejected rather than
/// coerced.
inline PlanarImage load_image(const std::filesystem::path& path) {
    const std::vector<uint8_t> bytes = read_file_bytes(path);
    if (detail::looks_like_png(bytes)) return decode_png(bytes);
    if (detail::looks_like_jpeg(bytes)) return decode_jpeg(bytes);
    throw FormatError("not a PNG or JPEG file: " + path.string());
}

/// Encodes an image as an 8-bit PNG (gray for 1 channel, RGB for 3), with
/// samples quantized by rounding half-up to the nearest of 256 levels.
inline std::vector<uint8_t> encode_png(const PlanarImage& img) {
    const size_t stride = static_cast<size_t>(img.width) * img.channels;
    std::vector<uint8_t> raw(stride * img.height);
    for (size_t i = 0; i < img.samples.size(); ++i) {
        const float v = clamp01(img.samples[i]);
        raw[i] = static_cast<uint8_t>(std::floor(v * 255.0f + 0.5f));
    }
    std::vector<png_bytep> rows(static_cast<size_t>(img.height));
    for (int y = 0; y < img.height; ++y)
        rows[static_cast<size_t>(y)] = raw.data() + y * stride;

    detail::PngWriteGuard g;
    detail::PngHeader hdr{static_cast<uint32_t>(img.width), static_cast<uint32_t>(img.height),
                          8, img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB};
    std::vector<uint8_t> out;
    if (!detail::png_write_phase(g, out, hdr, rows.data()))
        throw IoError(std::string("PNG encode failed: ") + g.err.message);
    return out;
}

inline void save_image(const PlanarImage& img, const std::filesystem::path& path) {
    write_file_bytes(path, encode_png(img));
}

/// Decodes a KITTI-convention ground-truth depth PNG: 16-bit single-channel,
/// depth_m = raw / 256, raw 0 marks an invalid pixel.
inline DepthMap decode_depth_png(std::span<const uint8_t> bytes) {
    detail::PngReadGuard g;
    detail::MemReader src{bytes.data(), bytes.size(), 0};
    detail::PngHeader hdr;
    if (!detail::png_read_header_phase(g, src, hdr))
        throw FormatError(std::string("depth PNG decode failed: ") + g.err.message);
    if (hdr.bit_depth != 16 || hdr.color_type != PNG_COLOR_TYPE_GRAY)
        throw FormatError("depth maps must be 16-bit single-channel PNG (got bit depth " +
                          std::to_string(hdr.bit_depth) + ", color type " +
                          std::to_string(hdr.color_type) + ")");

    const int w = static_cast<int>(hdr.width);
    const int h = static_cast<int>(hdr.height);
    const size_t stride = static_cast<size_t>(w) * 2; // big-endian uint16 per pixel
    std::vector<uint8_t> raw(stride * h);
    std::vector<png_bytep> rows(static_cast<size_t>(h));
    for (int y = 0; y < h; ++y) rows[static_cast<size_t>(y)] = raw.data() + y * stride;
    if (!detail::png_read_rows_phase(g, rows.data()))
        throw FormatError(std::string("depth PNG decode failed: ") + g.err.message);

    DepthMap out(w, h);
    for (int y = 0; y < h; ++y) {
        const uint8_t* row = raw.data() + y * stride;
        for (int x = 0; x < w; ++x) {
            const uint16_t v = static_cast<uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
            out.set(x, y, static_cast<float>(v) / 256.0f, v != 0);
        }
    }
    return out;
}

/// Inverse of decode_depth_png: raw = round(depth * 256) for valid pixels,
/// 0 for invalid ones. Exact for depths that are multiples of 1/256 m below
/// 256 m.
inline std::vector<uint8_t> encode_depth_png(const DepthMap& depth) {
    const size_t stride = static_cast<size_t>(depth.width) * 2;
    std::vector<uint8_t> raw(stride * depth.height);
    for (int y = 0; y < depth.height; ++y) {
        uint8_t* row = raw.data() + y * stride;
        for (int x = 0; x < depth.width; ++x) {
            uint16_t v = 0;
            if (depth.valid_at(x, y)) {
                const long q = std::lround(static_cast<double>(depth.depth_at(x, y)) * 256.0);
                v = static_cast<uint16_t>(std::clamp(q, 0L, 65535L));
            }
            row[2 * x] = static_cast<uint8_t>(v >> 8);
            row[2 * x + 1] = static_cast<uint8_t>(v & 0xFF);
        }
    }
    std::vector<png_bytep> rows(static_cast<size_t>(depth.height));
    for (int y = 0; y < depth.height; ++y)
        rows[static_cast<size_t>(y)] = raw.data() + y * stride;

    detail::PngWriteGuard g;
    detail::PngHeader hdr{static_cast<uint32_t>(depth.width),
                          static_cast<uint32_t>(depth.height), 16, PNG_COLOR_TYPE_GRAY};
    std::vector<uint8_t> out;
    if (!detail::png_write_phase(g, out, hdr, rows.data()))
        throw IoError(std::string("depth PNG encode failed: ") + g.err.message);
    return out;
}

inline DepthMap load_depth_png(const std::filesystem::path& path) {
    return decode_depth_png(read_file_bytes(path));
}

inline void save_depth_png(const DepthMap& depth, const std::filesystem::path& path) {
    write_file_bytes(path, encode_depth_png(depth));
}

} // namespace monofuse
