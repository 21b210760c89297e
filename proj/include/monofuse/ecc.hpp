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
#include <vector>

#include <Eigen/Dense>

#include "monofuse/homography.hpp"
#include "monofuse/image.hpp"
#include "monofuse/warp.hpp"

namespace monofuse {

/// Diagnostics of one enhanced-correlation-coefficient alignment.
/// converged and diverged are mutually exclusive; a diverged report carries
/// the initial warp so callers can always apply `warp` safely.
struct AlignmentReport {
    double rho_initial = 0.0;
    double rho_final = 0.0;
    int iterations = 0;
    bool converged = false;
    bool diverged = false;
    Homography warp;
};

/// Normalized correlation of the two masked pixel vectors after mean
/// subtraction: rho in [-1, 1], invariant to affine intensity changes.
inline double ecc_coefficient(const PlanarImage& a, const PlanarImage& b,
                              const CoverageMask& mask) {
    if (a.channels != 1 || b.channels != 1)
        throw InvalidInputError("ecc_coefficient expects single-channel images");
    if (!a.same_dims(b) || a.width != mask.width || a.height != mask.height)
        throw InvalidInputError("ecc_coefficient inputs must share dimensions");

    size_t n = 0;
    double mean_a = 0.0, mean_b = 0.0;
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            if (!mask.at(x, y)) continue;
            mean_a += a.at(x, y);
            mean_b += b.at(x, y);
            ++n;
        }
    }
    if (n < 2)
        throw InvalidInputError("ecc_coefficient mask must select at least 2 pixels");
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            if (!mask.at(x, y)) continue;
            const double da = a.at(x, y) - mean_a;
            const double db = b.at(x, y) - mean_b;
            dot += da * db;
            norm_a += da * da;
            norm_b += db * db;
        }
    }
    if (norm_a <= 0.0 || norm_b <= 0.0)
        throw DegenerateInputError("ecc_coefficient given a constant masked region");
    const double rho = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
    return std::clamp(rho, -1.0, 1.0);
}

namespace detail {

// dW/dp for the 8-parameter homography gauge at template pixel (x, y), with
// per-pixel denominator D = m20*x + m21*y + 1 and warped point (wx, wy).
// Parameter order: m00 m01 m02 m10 m11 m12 m20 m21.
inline void homography_jacobian(const Homography& h, double x, double y,
                                double wx, double wy,
                                double jx[8], double jy[8]) {
    const double d = h.m[6] * x + h.m[7] * y + 1.0;
    const double inv_d = 1.0 / d;
    jx[0] = x * inv_d; jx[1] = y * inv_d; jx[2] = inv_d;
    jx[3] = 0.0;       jx[4] = 0.0;       jx[5] = 0.0;
    jx[6] = -x * wx * inv_d;
    jx[7] = -y * wx * inv_d;
    jy[0] = 0.0;       jy[1] = 0.0;       jy[2] = 0.0;
    jy[3] = x * inv_d; jy[4] = y * inv_d; jy[5] = inv_d;
    jy[6] = -x * wy * inv_d;
    jy[7] = -y * wy * inv_d;
}

inline Homography params_to_homography(const Eigen::Matrix<double, 8, 1>& p) {
    Homography h;
    h.m = {p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], 1.0};
    return h;
}

inline Eigen::Matrix<double, 8, 1> homography_to_params(const Homography& h) {
    Eigen::Matrix<double, 8, 1> p;
    for (int i = 0; i < 8; ++i) p[i] = h.m[static_cast<size_t>(i)];
    return p;
}

} // namespace detail

/// Aligns input to template by iterative enhanced-correlation-coefficient
/// maximization over the 8 homography parameters (forward-additive updates).
///
/// Both images are smoothed with a sigma = 1 Gaussian before the iteration;
/// the reported rho values refer to that smoothed pair. The returned warp maps
/// template coordinates to input coordinates and is meant to be applied to the
/// unfiltered input. Numerical failure (singular normal equations,
/// non-positive lambda denominator) or a final correlation below the initial
/// one never throws: the report comes back flagged diverged with warp = init.
inline AlignmentReport estimate_ecc_homography(const PlanarImage& tpl,
                                               const PlanarImage& input,
                                               const Homography& init = Homography::identity(),
                                               int max_iters = 20,
                                               double eps = 1e-7) {
    if (tpl.channels != 1 || input.channels != 1)
        throw InvalidInputError("estimate_ecc_homography expects single-channel images");
    if (!tpl.same_dims(input))
        throw InvalidInputError("template and input dimensions must match");
    if (max_iters < 1)
        throw InvalidInputError("max_iters must be at least 1");

    const int w = tpl.width, h = tpl.height;
    const PlanarImage tpl_s = gaussian_prefilter(tpl, 1.0);
    const PlanarImage input_s = gaussian_prefilter(input, 1.0);

    AlignmentReport report;
    report.warp = init;

    auto diverge = [&](int iters) {
        report.iterations = iters;
        report.converged = false;
        report.diverged = true;
        report.warp = init;
        report.rho_final = report.rho_initial;
        return report;
    };

    // rho of the initial warp; unusable inputs (constant block, init warp
    // covering nothing) surface as an immediate divergence.
    try {
        const WarpResult w0 = warp_bilinear(input_s, init, w, h);
        report.rho_initial = ecc_coefficient(tpl_s, w0.image, w0.coverage);
    } catch (const Error&) {
        report.rho_initial = 0.0;
        return diverge(0);
    }

    using Vec8 = Eigen::Matrix<double, 8, 1>;
    using Mat8 = Eigen::Matrix<double, 8, 8>;

    Vec8 p = detail::homography_to_params(init);
    std::vector<float> gx, gy;
    int iters = 0;
    bool converged = false;

    // minimum pixel support for the 8-parameter system
    const size_t min_support = 32;

    for (; iters < max_iters;) {
        const Homography cur = detail::params_to_homography(p);
        WarpResult warped;
        try {
            warped = warp_bilinear(input_s, cur, w, h);
        } catch (const InvalidWarpError&) {
            return diverge(iters);
        }
        const size_t n = warped.coverage.count();
        if (n < min_support) return diverge(iters);

        masked_gradients(warped.image, warped.coverage, gx, gy);

        // masked means of template and warped input
        double mean_t = 0.0, mean_w = 0.0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (warped.coverage.at(x, y)) {
                    mean_t += tpl_s.at(x, y);
                    mean_w += warped.image.at(x, y);
                }
        mean_t /= static_cast<double>(n);
        mean_w /= static_cast<double>(n);

        // steepest-descent correlations, accumulated in one pass:
        //   gtg = G^T G, gta = G^T a, gtb = G^T b (G columns not yet
        //   mean-compensated; compensation is applied afterwards in closed
        //   form using the column sums)
        Mat8 gtg = Mat8::Zero();
        Vec8 gta = Vec8::Zero(), gtb = Vec8::Zero(), gsum = Vec8::Zero();
        double bb = 0.0, ab = 0.0;
        double jx[8], jy[8];
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!warped.coverage.at(x, y)) continue;
                const size_t i = warped.image.index(x, y);
                double wx = 0.0, wy = 0.0;
                if (!cur.apply(x, y, wx, wy)) continue; // covered pixels always map

                detail::homography_jacobian(cur, x, y, wx, wy, jx, jy);
                Vec8 g;
                for (int k = 0; k < 8; ++k)
                    g[k] = gx[i] * jx[k] + gy[i] * jy[k];
                const double a_c = tpl_s.at(x, y) - mean_t;
                const double b_c = warped.image.at(x, y) - mean_w;
                gtg.selfadjointView<Eigen::Lower>().rankUpdate(g);
                gta.noalias() += g * a_c;
                gtb.noalias() += g * b_c;
                gsum.noalias() += g;
                bb += b_c * b_c;
                ab += a_c * b_c;
            }
        }
        gtg = gtg.selfadjointView<Eigen::Lower>();

        // mean-compensate the columns of G: G' = G - 1*mean(G) per column.
        // With a and b already zero-mean, G'^T a = G^T a and G'^T b = G^T b;
        // only the normal matrix needs the rank-one correction.
        const Vec8 gmean = gsum / static_cast<double>(n);
        gtg.noalias() -= gsum * gmean.transpose();

        Eigen::FullPivLU<Mat8> lu(gtg);
        if (!lu.isInvertible()) return diverge(iters);

        const Vec8 v = lu.solve(gtb);
        const double lambda_num = bb - gtb.dot(v);
        const double lambda_den = ab - gta.dot(v);
        if (lambda_den <= 0.0) return diverge(iters);
        const double lambda = lambda_num / lambda_den;

        const Vec8 rhs = lambda * gta - gtb;
        const Vec8 delta = lu.solve(rhs);
        p += delta;
        ++iters;

        if (delta.norm() < eps) {
            converged = true;
            break;
        }
    }

    const Homography final_warp = detail::params_to_homography(p);
    double rho_final;
    try {
        if (!final_warp.invertible()) return diverge(iters);
        const WarpResult wf = warp_bilinear(input_s, final_warp, w, h);
        rho_final = ecc_coefficient(tpl_s, wf.image, wf.coverage);
    } catch (const Error&) {
        return diverge(iters);
    }
    if (rho_final < report.rho_initial) return diverge(iters);

    report.iterations = iters;
    report.converged = converged;
    report.diverged = false;
    report.warp = final_warp;
    report.rho_final = rho_final;
    return report;
}

} // namespace monofuse
