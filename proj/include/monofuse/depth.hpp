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

#include <cstdint>
#include <vector>

#include "monofuse/image.hpp"

namespace monofuse {

/// Per-pixel metric depth in meters plus a validity mask. Invalid pixels
/// carry depth 0; valid pixels are strictly positive.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<float> depth;
    std::vector<uint8_t> valid;

    DepthMap() = default;
    DepthMap(int w, int h)
        : width(w), height(h),
          depth(checked_size(w, h), 0.0f),
          valid(checked_size(w, h), 0) {}

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    float depth_at(int x, int y) const { return depth[index(x, y)]; }
    bool valid_at(int x, int y) const { return valid[index(x, y)] != 0; }
    void set(int x, int y, float d, bool v) {
        depth[index(x, y)] = d;
        valid[index(x, y)] = v ? 1 : 0;
    }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_dims(const DepthMap& o) const {
        return width == o.width && height == o.height;
    }

private:
    static size_t checked_size(int w, int h) {
        if (w <= 0 || h <= 0)
            throw InvalidInputError("depth map dimensions must be positive");
        return static_cast<size_t>(w) * h;
    }
};

} // namespace monofuse
