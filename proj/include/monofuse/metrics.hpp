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
#include <cstdint>
#include <optional>
#include <vector>

#include "monofuse/depth.hpp"
#include "monofuse/image.hpp"

namespace monofuse {

/// The seven-number monocular-depth evaluation record: four error metrics
/// (lower is better) and three threshold accuracies (higher is better).
struct EvalMetrics {
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rmse = 0.0;
    double rmse_log = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    int64_t n_valid = 0;
};

inline constexpr double kDefaultMinDepth = 1e-3; // meters
inline constexpr double kDefaultMaxDepth = 80.0; // meters

/// The fractional evaluation crop used on KITTI Eigen-split ground truth:
/// rows [floor(0.40810811*h), floor(0.99189189*h)),
/// cols [floor(0.03594771*w), floor(0.96405229*w)).
inline Rect garg_crop(int width, int height) {
    if (width <= 0 || height <= 0)
        throw InvalidInputError("garg_crop dimensions must be positive");
    const int r0 = static_cast<int>(std::floor(0.40810811 * height));
    const int r1 = static_cast<int>(std::floor(0.99189189 * height));
    const int c0 = static_cast<int>(std::floor(0.03594771 * width));
    const int c1 = static_cast<int>(std::floor(0.96405229 * width));
    return Rect{c0, r0, c1 - c0, r1 - r0};
}

/// Computes the metric suite over the valid set T: pixels inside `crop` where
/// gt is valid and min_depth <= gt <= max_depth. Predictions are clamped to
/// [min_depth, max_depth] before comparison. Logs are natural logs.
inline EvalMetrics compute_metrics(const DepthMap& pred, const DepthMap& gt,
                                   double min_depth = kDefaultMinDepth,
                                   double max_depth = kDefaultMaxDepth,
                                   const std::optional<Rect>& crop = std::nullopt) {
    if (!pred.same_dims(gt))
        throw InvalidInputError("prediction and ground truth dimensions must match "
                                "(upsample the prediction first)");
    if (!(min_depth > 0.0) || !(min_depth < max_depth))
        throw InvalidInputError("need 0 < min_depth < max_depth");

    double sum_abs_rel = 0.0, sum_sq_rel = 0.0, sum_sq = 0.0, sum_sq_log = 0.0;
    int64_t n = 0, n1 = 0, n2 = 0, n3 = 0;
    const double thr1 = 1.25, thr2 = 1.25 * 1.25, thr3 = 1.25 * 1.25 * 1.25;

    for (int yy = 0; yy < gt.height; ++yy) {
        for (int xx = 0; xx < gt.width; ++xx) {
            if (crop && !crop->contains(xx, yy)) continue;
            if (!gt.valid_at(xx, yy)) continue;
            const double y = gt.depth_at(xx, yy);
            if (y < min_depth || y > max_depth) continue;

            const double y_hat =
                std::clamp(static_cast<double>(pred.depth_at(xx, yy)), min_depth, max_depth);
            const double diff = y - y_hat;
            sum_abs_rel += std::fabs(diff) / y;
            sum_sq_rel += diff * diff / y;
            sum_sq += diff * diff;
            const double dlog = std::log(y) - std::log(y_hat);
            sum_sq_log += dlog * dlog;
            const double ratio = std::max(y / y_hat, y_hat / y);
            if (ratio < thr1) ++n1;
            if (ratio < thr2) ++n2;
            if (ratio < thr3) ++n3;
            ++n;
        }
    }
    if (n == 0)
        throw NoValidPixelsError("no valid ground-truth pixels in the evaluation region");

    const double dn = static_cast<double>(n);
    EvalMetrics m;
    m.abs_rel = sum_abs_rel / dn;
    m.sq_rel = sum_sq_rel / dn;
    m.rmse = std::sqrt(sum_sq / dn);
    m.rmse_log = std::sqrt(sum_sq_log / dn);
    m.d1 = static_cast<double>(n1) / dn;
    m.d2 = static_cast<double>(n2) / dn;
    m.d3 = static_cast<double>(n3) / dn;
    m.n_valid = n;
    return m;
}

/// Bilinear upsampling of the depth plane (align-corners-false convention);
/// the validity mask is resampled by nearest neighbor.
inline DepthMap upsample_bilinear(const DepthMap& pred, int out_w, int out_h) {
    if (pred.width <= 0 || pred.height <= 0)
        throw InvalidInputError("cannot upsample an empty depth map");
    if (out_w < pred.width || out_h < pred.height)
        throw InvalidInputError("upsample target must be at least the input size");
    if (out_w == pred.width && out_h == pred.height) return pred;

    DepthMap out(out_w, out_h);
    const double sx = static_cast<double>(pred.width) / out_w;
    const double sy = static_cast<double>(pred.height) / out_h;

    for (int y = 0; y < out_h; ++y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        const double cy = std::clamp(src_y, 0.0, static_cast<double>(pred.height - 1));
        const int y0 = static_cast<int>(cy);
        const int y1 = std::min(y0 + 1, pred.height - 1);
        const double fy = cy - y0;
        const int ny = std::clamp(static_cast<int>(std::floor((y + 0.5) * sy)), 0,
                                  pred.height - 1);
        for (int x = 0; x < out_w; ++x) {
            const double src_x = (x + 0.5) * sx - 0.5;
            const double cx = std::clamp(src_x, 0.0, static_cast<double>(pred.width - 1));
            const int x0 = static_cast<int>(cx);
            const int x1 = std::min(x0 + 1, pred.width - 1);
            const double fx = cx - x0;

            const double v =
                (1.0 - fy) * ((1.0 - fx) * pred.depth_at(x0, y0) + fx * pred.depth_at(x1, y0)) +
                fy * ((1.0 - fx) * pred.depth_at(x0, y1) + fx * pred.depth_at(x1, y1));

            const int nx = std::clamp(static_cast<int>(std::floor((x + 0.5) * sx)), 0,
                                      pred.width - 1);
            out.set(x, y, static_cast<float>(v), pred.valid_at(nx, ny));
        }
    }
    return out;
}

/// Unweighted per-image mean of every metric field; n_valid accumulates.
inline EvalMetrics aggregate(const std::vector<EvalMetrics>& per_image) {
    if (per_image.empty())
        throw InvalidInputError("aggregate needs at least one record");
    EvalMetrics acc;
    for (const EvalMetrics& m : per_image) {
        acc.abs_rel += m.abs_rel;
        acc.sq_rel += m.sq_rel;
        acc.rmse += m.rmse;
        acc.rmse_log += m.rmse_log;
        acc.d1 += m.d1;
        acc.d2 += m.d2;
        acc.d3 += m.d3;
        acc.n_valid += m.n_valid;
    }
    const double k = static_cast<double>(per_image.size());
    acc.abs_rel /= k;
    acc.sq_rel /= k;
    acc.rmse /= k;
    acc.rmse_log /= k;
    acc.d1 /= k;
    acc.d2 /= k;
    acc.d3 /= k;
    return acc;
}

} // namespace monofuse
