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

#include <utility>
#include <vector>

#include "monofuse/color.hpp"
#include "monofuse/ecc.hpp"
#include "monofuse/image.hpp"

namespace monofuse {

/// 5x5 partition of an image into rectangles, raster order. The bottom row is
/// the aligned row: those blocks sit closest to the camera in road scenes and
/// carry most of the disparity between the two sensors.
struct BlockGrid {
    int rows = 0;
    int cols = 0;
    std::vector<Rect> rects;
    int aligned_row = 0;

    const Rect& rect(int row, int col) const {
        return rects[static_cast<size_t>(row) * cols + col];
    }
    bool is_aligned(int row) const { return row == aligned_row; }
};

/// Settings of the per-block alignment step.
struct AlignOptions {
    int ecc_iters = 20;
    double ecc_eps = 1e-7;
};

/// Fusion output: the fused RGB image plus one alignment report per bottom
/// block, left to right.
struct FusionResult {
    PlanarImage fused;
    std::vector<AlignmentReport> reports;
    BlockGrid grid;
};

inline constexpr int kGridRows = 5;
inline constexpr int kGridCols = 5;
inline constexpr int kMinBlockSide = 8;

/// Splits a width x height frame into the 5x5 grid. The first four columns
/// get floor(width/5) pixels, the last takes the remainder; rows likewise.
inline BlockGrid partition_grid(int width, int height) {
    const int min_dim = kGridCols * kMinBlockSide;
    if (width < min_dim || height < min_dim)
        throw InvalidInputError("image too small to partition: need at least " +
                                std::to_string(min_dim) + " pixels per side");

    const int base_w = width / kGridCols;
    const int base_h = height / kGridRows;

    BlockGrid grid;
    grid.rows = kGridRows;
    grid.cols = kGridCols;
    grid.aligned_row = kGridRows - 1;
    grid.rects.reserve(static_cast<size_t>(kGridRows) * kGridCols);
    for (int r = 0; r < kGridRows; ++r) {
        const int y = r * base_h;
        const int h = (r == kGridRows - 1) ? height - y : base_h;
        for (int c = 0; c < kGridCols; ++c) {
            const int x = c * base_w;
            const int w = (c == kGridCols - 1) ? width - x : base_w;
            grid.rects.push_back(Rect{x, y, w, h});
        }
    }
    return grid;
}

/// Registers the five bottom blocks of mono against the matching lightness
/// blocks, block by block in block-local coordinates with identity init.
/// Output starts as a copy of mono; each aligned block is the warped mono
/// block with uncovered pixels filled from the unwarped mono at the same
/// coordinates. A diverged block passes through unwarped (its report says so).
inline std::pair<PlanarImage, std::vector<AlignmentReport>>
align_bottom_blocks(const PlanarImage& lightness, const PlanarImage& mono,
                    const BlockGrid& grid, const AlignOptions& opts = {}) {
    if (lightness.channels != 1 || mono.channels != 1)
        throw InvalidInputError("align_bottom_blocks expects single-channel images");
    if (!lightness.same_dims(mono))
        throw InvalidInputError("lightness and mono dimensions must match");

    PlanarImage out = mono;
    std::vector<AlignmentReport> reports;
    reports.reserve(static_cast<size_t>(grid.cols));

    for (int c = 0; c < grid.cols; ++c) {
        const Rect& r = grid.rect(grid.aligned_row, c);
        const PlanarImage tpl_block = lightness.crop(r);
        const PlanarImage mono_block = mono.crop(r);

        AlignmentReport report = estimate_ecc_homography(
            tpl_block, mono_block, Homography::identity(), opts.ecc_iters, opts.ecc_eps);

        PlanarImage aligned = mono_block;
        if (!report.diverged) {
            WarpResult warped = warp_bilinear(mono_block, report.warp, r.w, r.h);
            for (int y = 0; y < r.h; ++y)
                for (int x = 0; x < r.w; ++x)
                    if (!warped.coverage.at(x, y))
                        warped.image.at(x, y) = mono_block.at(x, y);
            aligned = std::move(warped.image);
        }
        out.paste(aligned, r.x, r.y);
        reports.push_back(std::move(report));
    }
    return {std::move(out), std::move(reports)};
}

/// The end-to-end fusion pipeline: convert the color frame to HSL, align the
/// bottom mono blocks to its lightness, swap the lightness plane for the
/// aligned mono, and convert back to RGB. Hue and saturation come through
/// untouched; only lightness differs from the input.
inline FusionResult fuse(const PlanarImage& color, const PlanarImage& mono,
                         const AlignOptions& opts = {}) {
    if (color.channels != 3)
        throw InvalidInputError("fuse expects a 3-channel color image");
    if (mono.channels != 1)
        throw InvalidInputError("fuse expects a single-channel mono image");
    if (!color.same_dims(mono))
        throw InvalidInputError("color and mono dimensions must match");

    const HslImage hsl = rgb_to_hsl(color);
    BlockGrid grid = partition_grid(color.width, color.height);
    auto [warped, reports] = align_bottom_blocks(extract_lightness(hsl), mono, grid, opts);

    FusionResult result;
    result.fused = hsl_to_rgb(replace_lightness(hsl, warped));
    result.reports = std::move(reports);
    result.grid = std::move(grid);
    return result;
}

} // namespace monofuse
