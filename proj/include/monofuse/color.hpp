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

#include "monofuse/image.hpp"

namespace monofuse {

/// HSL raster stored as three planes of equal dimensions.
/// Hue in degrees [0,360), saturation and lightness in [0,1].
/// At achromatic pixels (saturation 0) hue is canonically 0, which keeps
/// round trips deterministic.
struct HslImage {
    int width = 0;
    int height = 0;
    std::vector<float> hue;
    std::vector<float> saturation;
    std::vector<float> lightness;

    HslImage() = default;
    HslImage(int w, int h)
        : width(w), height(h),
          hue(plane_size(w, h), 0.0f),
          saturation(plane_size(w, h), 0.0f),
          lightness(plane_size(w, h), 0.0f) {}

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }

private:
    static size_t plane_size(int w, int h) {
        if (w <= 0 || h <= 0)
            throw InvalidInputError("image dimensions must be positive");
        return static_cast<size_t>(w) * h;
    }
};

namespace detail {

struct Hsl {
    float h, s, l;
};

inline Hsl rgb_pixel_to_hsl(float r, float g, float b) {
    const float mx = std::max(r, std::max(g, b));
    const float mn = std::min(r, std::min(g, b));
    const float d = mx - mn;
    const float l = 0.5f * (mx + mn);
    if (d == 0.0f) return {0.0f, 0.0f, l};

    const float s = d / (1.0f - std::fabs(2.0f * l - 1.0f));
    float hp; // hue in sixths of a turn
    if (mx == r) {
        hp = std::fmod((g - b) / d, 6.0f);
        if (hp < 0.0f) hp += 6.0f;
    } else if (mx == g) {
        hp = (b - r) / d + 2.0f;
    } else {
        hp = (r - g) / d + 4.0f;
    }
    float h = 60.0f * hp;
    if (h >= 360.0f) h -= 360.0f;
    return {h, std::min(s, 1.0f), l};
}

inline void hsl_pixel_to_rgb(float h, float s, float l, float& r, float& g, float& b) {
    const float c = (1.0f - std::fabs(2.0f * l - 1.0f)) * s;
    const float x = c * (1.0f - std::fabs(std::fmod(h / 60.0f, 2.0f) - 1.0f));
    const float m = l - 0.5f * c;
    float rp = 0, gp = 0, bp = 0;
    switch (static_cast<int>(h / 60.0f) % 6) {
        case 0: rp = c; gp = x; break;
        case 1: rp = x; gp = c; break;
        case 2: gp = c; bp = x; break;
        case 3: gp = x; bp = c; break;
        case 4: rp = x; bp = c; break;
        default: rp = c; bp = x; break;
    }
    r = clamp01(rp + m);
    g = clamp01(gp + m);
    b = clamp01(bp + m);
}

} // namespace detail

/// Converts a 3-channel RGB image to HSL planes.
inline HslImage rgb_to_hsl(const PlanarImage& img) {
    if (img.channels != 3)
        throw InvalidInputError("rgb_to_hsl expects a 3-channel image");
    HslImage out(img.width, img.height);
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        const auto hsl = detail::rgb_pixel_to_hsl(img.samples[3 * i],
                                                  img.samples[3 * i + 1],
                                                  img.samples[3 * i + 2]);
        out.hue[i] = hsl.h;
        out.saturation[i] = hsl.s;
        out.lightness[i] = hsl.l;
    }
    return out;
}

/// Converts HSL planes back to a 3-channel RGB image, clamped to [0,1].
inline PlanarImage hsl_to_rgb(const HslImage& img) {
    PlanarImage out(img.width, img.height, 3);
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        detail::hsl_pixel_to_rgb(img.hue[i], img.saturation[i], img.lightness[i],
                                 out.samples[3 * i], out.samples[3 * i + 1],
                                 out.samples[3 * i + 2]);
    }
    return out;
}

/// Copies the lightness plane out as a single-channel image.
inline PlanarImage extract_lightness(const HslImage& img) {
    return PlanarImage::from_samples(img.width, img.height, 1, img.lightness);
}

/// Returns a copy of img whose lightness plane is replaced by l.
/// Hue and saturation planes are carried over bit for bit.
inline HslImage replace_lightness(const HslImage& img, const PlanarImage& l) {
    if (l.channels != 1)
        throw InvalidInputError("replacement lightness must be single-channel");
    if (l.width != img.width || l.height != img.height)
        throw InvalidInputError("replacement lightness dimensions do not match");
    HslImage out = img;
    out.lightness = l.samples;
    return out;
}

} // namespace monofuse
