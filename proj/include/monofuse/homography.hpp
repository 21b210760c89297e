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
#include <limits>

#include "monofuse/image.hpp"

namespace monofuse {

/// 3x3 projective transform, row-major, with the lower-right entry fixed to 1
/// (8 free parameters). Maps template-frame pixel coordinates to source-frame
/// coordinates.
struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Homography identity() { return {}; }

    static Homography translation(double tx, double ty) {
        Homography h;
        h.m[2] = tx;
        h.m[5] = ty;
        return h;
    }

    static Homography from_rows(const std::array<double, 9>& rows) {
        Homography h;
        h.m = rows;
        h.normalize();
        return h;
    }

    double at(int r, int c) const { return m[static_cast<size_t>(r) * 3 + c]; }
    double& at(int r, int c) { return m[static_cast<size_t>(r) * 3 + c]; }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) -
               m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    bool invertible() const { return std::fabs(det()) > 1e-12; }

    /// Rescales so that m[2][2] == 1 exactly.
    void normalize() {
        const double w = m[8];
        if (w == 0.0 || !std::isfinite(w))
            throw InvalidWarpError("homography has zero or non-finite scale entry");
        if (w != 1.0)
            for (double& v : m) v /= w;
        m[8] = 1.0;
    }

    /// Applies the warp to (x, y): homogeneous multiply then perspective divide.
    /// Returns false when the point maps to infinity (denominator ~ 0).
    bool apply(double x, double y, double& ox, double& oy) const {
        const double d = m[6] * x + m[7] * y + m[8];
        if (std::fabs(d) < 1e-12) return false;
        ox = (m[0] * x + m[1] * y + m[2]) / d;
        oy = (m[3] * x + m[4] * y + m[5]) / d;
        return true;
    }

    Homography inverse() const {
        const double d = det();
        if (std::fabs(d) <= 1e-12)
            throw InvalidWarpError("homography is singular");
        std::array<double, 9> adj{
            m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
            m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
            m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
        for (double& v : adj) v /= d;
        return from_rows(adj);
    }

    /// Matrix product this * rhs (apply rhs first), renormalized.
    Homography compose(const Homography& rhs) const {
        std::array<double, 9> p{};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < 3; ++k)
                    p[static_cast<size_t>(r) * 3 + c] += at(r, k) * rhs.at(k, c);
        return from_rows(p);
    }

    /// Max absolute entry-wise difference, the infinity norm used by the
    /// identity checks.
    double max_abs_diff(const Homography& o) const {
        double d = 0.0;
        for (size_t i = 0; i < 9; ++i) d = std::max(d, std::fabs(m[i] - o.m[i]));
        return d;
    }

    bool operator==(const Homography&) const = default;
};

/// Mean Euclidean distance between the images of the four corners of a
/// w x h pixel grid under the two warps. The standard way this library
/// compares recovered against ground-truth warps.
inline double mean_corner_reprojection_error(const Homography& a, const Homography& b,
                                             int w, int h) {
    const double xs[2] = {0.0, static_cast<double>(w - 1)};
    const double ys[2] = {0.0, static_cast<double>(h - 1)};
    double sum = 0.0;
    for (double cx : xs) {
        for (double cy : ys) {
            double ax, ay, bx, by;
            if (!a.apply(cx, cy, ax, ay) || !b.apply(cx, cy, bx, by))
                return std::numeric_limits<double>::infinity();
            sum += std::hypot(ax - bx, ay - by);
        }
    }
    return sum / 4.0;
}

} // namespace monofuse
