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
#include <utility>
#include <vector>

#include "monofuse/homography.hpp"
#include "monofuse/image.hpp"

namespace monofuse {

struct WarpResult {
    PlanarImage image;
    CoverageMask coverage;
};

/// Resamples src into a out_w x out_h frame: each output pixel x takes the
/// bilinear sample of src at w*x. Output pixels whose source point falls
/// outside src carry 0 and coverage false. Sampling at integer coordinates is
/// exact, so the identity warp reproduces src bit for bit.
inline WarpResult warp_bilinear(const PlanarImage& src, const Homography& w,
                                int out_w, int out_h) {
    if (src.channels != 1)
        throw InvalidInputError("warp_bilinear expects a single-channel image");
    if (out_w <= 0 || out_h <= 0)
        throw InvalidInputError("warp output dimensions must be positive");
    if (!w.invertible())
        throw InvalidWarpError("warp_bilinear given a singular homography");

    WarpResult res{PlanarImage(out_w, out_h, 1), CoverageMask(out_w, out_h)};
    const double max_x = static_cast<double>(src.width - 1);
    const double max_y = static_cast<double>(src.height - 1);

    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            double sx, sy;
            if (!w.apply(x, y, sx, sy)) continue;
            if (sx < 0.0 || sx > max_x || sy < 0.0 || sy > max_y) continue;

            const int x0 = static_cast<int>(sx);
            const int y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const int y1 = std::min(y0 + 1, src.height - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;

            const double v00 = src.at(x0, y0);
            const double v10 = src.at(x1, y0);
            const double v01 = src.at(x0, y1);
            const double v11 = src.at(x1, y1);
            const double v = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
                             fy * ((1.0 - fx) * v01 + fx * v11);

            res.image.at(x, y) = static_cast<float>(v);
            res.coverage.set(x, y, true);
        }
    }
    return res;
}

/// Separable Gaussian blur, kernel radius ceil(3*sigma), replicated border.
/// sigma == 0 returns the input unchanged.
inline PlanarImage gaussian_prefilter(const PlanarImage& img, double sigma) {
    if (sigma < 0.0)
        throw InvalidInputError("gaussian sigma must be non-negative");
    if (sigma == 0.0) return img;

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : kernel) v /= sum;

    const int w = img.width, h = img.height, ch = img.channels;
    PlanarImage tmp(w, h, ch), out(w, h, ch);

    // horizontal pass
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    const int xx = std::clamp(x + k, 0, w - 1);
                    acc += kernel[static_cast<size_t>(k + radius)] * img.at(xx, y, c);
                }
                tmp.at(x, y, c) = static_cast<float>(acc);
            }
        }
    }
    // vertical pass
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    const int yy = std::clamp(y + k, 0, h - 1);
                    acc += kernel[static_cast<size_t>(k + radius)] * tmp.at(x, yy, c);
                }
                out.at(x, y, c) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

/// Image gradients by central differences, falling back to one-sided
/// differences at image borders and wherever a neighbor is outside the
/// coverage mask. Uncovered pixels get zero gradient.
inline void masked_gradients(const PlanarImage& img, const CoverageMask& mask,
                             std::vector<float>& gx, std::vector<float>& gy) {
    if (img.channels != 1)
        throw InvalidInputError("masked_gradients expects a single-channel image");
    const int w = img.width, h = img.height;
    gx.assign(static_cast<size_t>(w) * h, 0.0f);
    gy.assign(static_cast<size_t>(w) * h, 0.0f);

    auto cov = [&](int x, int y) {
        return x >= 0 && x < w && y >= 0 && y < h && mask.at(x, y);
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            const size_t i = img.index(x, y);
            const bool l = cov(x - 1, y), r = cov(x + 1, y);
            if (l && r)
                gx[i] = 0.5f * (img.at(x + 1, y) - img.at(x - 1, y));
            else if (r)
                gx[i] = img.at(x + 1, y) - img.at(x, y);
            else if (l)
                gx[i] = img.at(x, y) - img.at(x - 1, y);

            const bool u = cov(x, y - 1), d = cov(x, y + 1);
            if (u && d)
                gy[i] = 0.5f * (img.at(x, y + 1) - img.at(x, y - 1));
            else if (d)
                gy[i] = img.at(x, y + 1) - img.at(x, y);
            else if (u)
                gy[i] = img.at(x, y) - img.at(x, y - 1);
        }
    }
}

} // namespace monofuse
