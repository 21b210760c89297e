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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace monofuse {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an operation's inputs was violated.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Input is structurally fine but numerically unusable (constant region, zero variance, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A warp matrix is singular or otherwise unusable.
class InvalidWarpError : public Error {
public:
    using Error::Error;
};

/// A file is readable but not in a supported format.
class FormatError : public Error {
public:
    using Error::Error;
};

/// The underlying filesystem operation failed.
class IoError : public Error {
public:
    using Error::Error;
};

/// Metric computation found no pixel satisfying the validity filter.
class NoValidPixelsError : public Error {
public:
    using Error::Error;
};

inline float clamp01(float v) { return std::clamp(v, 0.0f, 1.0f); }
inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

/// Axis-aligned pixel rectangle, origin top-left, half-open in neither axis:
/// covers columns [x, x+w) and rows [y, y+h).
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool contains(int px, int py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
    long long area() const { return static_cast<long long>(w) * h; }
    bool operator==(const Rect&) const = default;
};

/// H x W x C raster of floating-point samples in [0,1], row-major, channels
/// interleaved. The universal image currency of the library; 8-bit
/// quantization happens only at file boundaries.
struct PlanarImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> samples;

    PlanarImage() = default;

    PlanarImage(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c), samples(checked_size(w, h, c), fill) {}

    static PlanarImage from_samples(int w, int h, int c, std::vector<float> data) {
        if (data.size() != checked_size(w, h, c))
            throw InvalidInputError("sample count does not match image dimensions");
        PlanarImage img;
        img.width = w;
        img.height = h;
        img.channels = c;
        img.samples = std::move(data);
        return img;
    }

    size_t index(int x, int y, int c = 0) const {
        return (static_cast<size_t>(y) * width + x) * channels + c;
    }
    float at(int x, int y, int c = 0) const { return samples[index(x, y, c)]; }
    float& at(int x, int y, int c = 0) { return samples[index(x, y, c)]; }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_dims(const PlanarImage& o) const {
        return width == o.width && height == o.height;
    }

    bool in_range() const {
        return std::all_of(samples.begin(), samples.end(),
                           [](float s) { return s >= 0.0f && s <= 1.0f; });
    }

    PlanarImage crop(const Rect& r) const {
        if (r.x < 0 || r.y < 0 || r.w <= 0 || r.h <= 0 ||
            r.x + r.w > width || r.y + r.h > height)
            throw InvalidInputError("crop rectangle outside image bounds");
        PlanarImage out(r.w, r.h, channels);
        for (int y = 0; y < r.h; ++y) {
            const float* src = &samples[index(r.x, r.y + y, 0)];
            float* dst = &out.samples[out.index(0, y, 0)];
            std::copy(src, src + static_cast<size_t>(r.w) * channels, dst);
        }
        return out;
    }

    void paste(const PlanarImage& block, int x0, int y0) {
        if (block.channels != channels)
            throw InvalidInputError("paste channel mismatch");
        if (x0 < 0 || y0 < 0 || x0 + block.width > width || y0 + block.height > height)
            throw InvalidInputError("paste rectangle outside image bounds");
        for (int y = 0; y < block.height; ++y) {
            const float* src = &block.samples[block.index(0, y, 0)];
            float* dst = &samples[index(x0, y0 + y, 0)];
            std::copy(src, src + static_cast<size_t>(block.width) * channels, dst);
        }
    }

private:
    static size_t checked_size(int w, int h, int c) {
        if (w <= 0 || h <= 0)
            throw InvalidInputError("image dimensions must be positive");
        if (c != 1 && c != 3)
            throw InvalidInputError("channel count must be 1 or 3");
        return static_cast<size_t>(w) * h * c;
    }
};

/// Marks which output pixels of a warp found their source point inside the
/// source image bounds.
struct CoverageMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> covered;

    CoverageMask() = default;
    CoverageMask(int w, int h, bool fill = false)
        : width(w), height(h), covered(static_cast<size_t>(w) * h, fill ? 1 : 0) {}

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    bool at(int x, int y) const { return covered[index(x, y)] != 0; }
    void set(int x, int y, bool v) { covered[index(x, y)] = v ? 1 : 0; }

    size_t count() const {
        return static_cast<size_t>(std::count(covered.begin(), covered.end(), uint8_t{1}));
    }
};

/// Collapses a monochrome image stored as 3 equal channels down to 1 channel.
/// Channels must match exactly; a genuinely colored image is rejected.
inline PlanarImage to_single_channel(const PlanarImage& img) {
    if (img.channels == 1) return img;
    PlanarImage out(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const float r = img.at(x, y, 0);
            if (img.at(x, y, 1) != r || img.at(x, y, 2) != r)
                throw InvalidInputError(
                    "3-channel monochrome input has unequal channels at pixel (" +
                    std::to_string(x) + "," + std::to_string(y) + ")");
            out.at(x, y) = r;
        }
    }
    return out;
}

} // namespace monofuse
