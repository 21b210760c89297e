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

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "monofuse/depth.hpp"
#include "monofuse/image.hpp"

namespace monofuse {

/// Training-time augmentation settings. All randomness flows through an
/// explicit engine, so (seed, config, input) fully determines the output.
struct AugmentConfig {
    uint64_t seed = 42;
    double flip_prob = 0.5;
    double jitter_prob = 0.5;
    std::array<double, 2> jitter_range{0.9, 1.1};
    std::array<double, 2> rotation_range_deg{-1.0, 1.0};
    int crop_w = 704;
    int crop_h = 352;
};

/// The two rotation presets; the narrow one is the default.
inline constexpr std::array<double, 2> kRotationRangeNarrow{-1.0, 1.0};
inline constexpr std::array<double, 2> kRotationRangeWide{-2.5, 2.5};

using AugmentRng = std::mt19937_64;

namespace detail {

// Engine-only uniforms: std::uniform_*_distribution is implementation
// defined, which would break the bit-identical determinism contract.
inline double uniform01(AugmentRng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(AugmentRng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n); multiply-shift, bias < 2^-64.
inline int uniform_below(AugmentRng& rng, int n) {
    return static_cast<int>((static_cast<unsigned __int128>(rng()) *
                             static_cast<unsigned __int128>(n)) >> 64);
}

inline void check_pair_dims(const PlanarImage& img, const DepthMap& depth) {
    if (img.width != depth.width || img.height != depth.height)
        throw InvalidInputError("image and depth dimensions must match");
}

} // namespace detail

/// Crops the same window from image and depth; the origin is uniform over all
/// valid placements.
inline std::pair<PlanarImage, DepthMap>
random_crop(const PlanarImage& img, const DepthMap& depth, const AugmentConfig& cfg,
            AugmentRng& rng) {
    detail::check_pair_dims(img, depth);
    if (cfg.crop_w > img.width || cfg.crop_h > img.height)
        throw InvalidInputError("crop window larger than image");
    const int x0 = detail::uniform_below(rng, img.width - cfg.crop_w + 1);
    const int y0 = detail::uniform_below(rng, img.height - cfg.crop_h + 1);

    const Rect r{x0, y0, cfg.crop_w, cfg.crop_h};
    DepthMap d(r.w, r.h);
    for (int y = 0; y < r.h; ++y)
        for (int x = 0; x < r.w; ++x)
            d.set(x, y, depth.depth_at(r.x + x, r.y + y), depth.valid_at(r.x + x, r.y + y));
    return {img.crop(r), std::move(d)};
}

namespace detail {

inline PlanarImage mirror_horizontal(const PlanarImage& img) {
    PlanarImage out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = img.at(img.width - 1 - x, y, c);
    return out;
}

inline DepthMap mirror_horizontal(const DepthMap& d) {
    DepthMap out(d.width, d.height);
    for (int y = 0; y < d.height; ++y)
        for (int x = 0; x < d.width; ++x)
            out.set(x, y, d.depth_at(d.width - 1 - x, y), d.valid_at(d.width - 1 - x, y));
    return out;
}

} // namespace detail

/// With probability flip_prob, mirrors both inputs horizontally.
inline std::pair<PlanarImage, DepthMap>
random_flip(const PlanarImage& img, const DepthMap& depth, const AugmentConfig& cfg,
            AugmentRng& rng) {
    detail::check_pair_dims(img, depth);
    if (detail::uniform01(rng) >= cfg.flip_prob) return {img, depth};
    return {detail::mirror_horizontal(img), detail::mirror_horizontal(depth)};
}

/// Photometric jitter with explicit factors: multiply by brightness, rescale
/// contrast about the (post-brightness) per-image mean, scale each channel
/// independently, clamp to [0,1].
inline PlanarImage apply_color_jitter(const PlanarImage& img, double brightness,
                                      double contrast, const std::array<double, 3>& channel) {
    if (img.channels != 3)
        throw InvalidInputError("color jitter expects a 3-channel image");

    PlanarImage out = img;
    double mean = 0.0;
    for (float& s : out.samples) {
        s = static_cast<float>(s * brightness);
        mean += s;
    }
    mean /= static_cast<double>(out.samples.size());

    const size_t n = out.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            double v = out.samples[3 * i + c];
            v = mean + contrast * (v - mean);
            v *= channel[static_cast<size_t>(c)];
            out.samples[3 * i + c] = static_cast<float>(clamp01(v));
        }
    }
    return out;
}

/// With probability jitter_prob, applies apply_color_jitter with all five
/// factors drawn uniformly from jitter_range.
/// Draw order: gate, brightness, contrast, r, g, b.
inline PlanarImage color_jitter(const PlanarImage& img, const AugmentConfig& cfg,
                                AugmentRng& rng) {
    if (img.channels != 3)
        throw InvalidInputError("color_jitter expects a 3-channel image");
    if (detail::uniform01(rng) >= cfg.jitter_prob) return img;

    const double brightness = detail::uniform_range(rng, cfg.jitter_range[0], cfg.jitter_range[1]);
    const double contrast = detail::uniform_range(rng, cfg.jitter_range[0], cfg.jitter_range[1]);
    const std::array<double, 3> channel{
        detail::uniform_range(rng, cfg.jitter_range[0], cfg.jitter_range[1]),
        detail::uniform_range(rng, cfg.jitter_range[0], cfg.jitter_range[1]),
        detail::uniform_range(rng, cfg.jitter_range[0], cfg.jitter_range[1])};
    return apply_color_jitter(img, brightness, contrast, channel);
}

/// Rotates both inputs about the image center by one angle drawn uniformly
/// from rotation_range_deg. The image is sampled bilinearly, depth by nearest
/// neighbor; pixels whose source leaves the frame become 0 / invalid, so the
/// depth validity mask never gains pixels.
inline std::pair<PlanarImage, DepthMap>
random_rotation(const PlanarImage& img, const DepthMap& depth, const AugmentConfig& cfg,
                AugmentRng& rng) {
    detail::check_pair_dims(img, depth);
    const double angle_deg =
        detail::uniform_range(rng, cfg.rotation_range_deg[0], cfg.rotation_range_deg[1]);
    if (angle_deg == 0.0) return {img, depth};

    const double theta = angle_deg * std::acos(-1.0) / 180.0;
    const double c = std::cos(theta), s = std::sin(theta);
    const double cx = 0.5 * (img.width - 1);
    const double cy = 0.5 * (img.height - 1);

    PlanarImage out_img(img.width, img.height, img.channels);
    DepthMap out_depth(depth.width, depth.height);

    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            // inverse mapping: rotate the output pixel back by -theta
            const double dx = x - cx, dy = y - cy;
            const double sx = cx + c * dx + s * dy;
            const double sy = cy - s * dx + c * dy;

            if (sx >= 0.0 && sx <= img.width - 1 && sy >= 0.0 && sy <= img.height - 1) {
                const int x0 = static_cast<int>(sx);
                const int y0 = static_cast<int>(sy);
                const int x1 = std::min(x0 + 1, img.width - 1);
                const int y1 = std::min(y0 + 1, img.height - 1);
                const double fx = sx - x0, fy = sy - y0;
                for (int ch = 0; ch < img.channels; ++ch) {
                    const double v =
                        (1.0 - fy) * ((1.0 - fx) * img.at(x0, y0, ch) + fx * img.at(x1, y0, ch)) +
                        fy * ((1.0 - fx) * img.at(x0, y1, ch) + fx * img.at(x1, y1, ch));
                    out_img.at(x, y, ch) = static_cast<float>(v);
                }
                const int nx = std::clamp(static_cast<int>(std::lround(sx)), 0, img.width - 1);
                const int ny = std::clamp(static_cast<int>(std::lround(sy)), 0, img.height - 1);
                out_depth.set(x, y, depth.depth_at(nx, ny), depth.valid_at(nx, ny));
            }
        }
    }
    return {std::move(out_img), std::move(out_depth)};
}

/// The full post-fusion pipeline in the fixed order flip, jitter, rotate,
/// crop. Pass depth = nullptr to augment an image that has no paired depth;
/// the draw sequence is identical either way.
inline void apply_augmentations(PlanarImage& img, DepthMap* depth,
                                const AugmentConfig& cfg, AugmentRng& rng) {
    DepthMap dummy(img.width, img.height);
    DepthMap& d = depth ? *depth : dummy;
    detail::check_pair_dims(img, d);

    std::tie(img, d) = random_flip(img, d, cfg, rng);
    img = color_jitter(img, cfg, rng);
    std::tie(img, d) = random_rotation(img, d, cfg, rng);
    std::tie(img, d) = random_crop(img, d, cfg, rng);
}

} // namespace monofuse
