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
//
// Batch frontend: fuse datasets, evaluate depth predictions, inspect
// per-block alignment. Exit codes: 0 success, 1 runtime failure, 2 usage
// error.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "monofuse/monofuse.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Style {
    bool enabled = false;
    const char* bold() const { return enabled ? "\033[1m" : ""; }
    const char* reset() const { return enabled ? "\033[0m" : ""; }
};

Style stdout_style() {
    Style s;
    s.enabled = ::isatty(fileno(stdout)) && std::getenv("NO_COLOR") == nullptr;
    return s;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// stable per-item seed derived from the run seed and the item index only,
// so worker count and completion order cannot affect outputs
uint64_t item_seed(uint64_t run_seed, size_t index) {
    uint64_t z = run_seed + 0x9E3779B97F4A7C15ULL * (static_cast<uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void run_parallel(size_t n_items, int workers, const std::function<void(size_t)>& body) {
    const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(n_items)));
    if (n_threads == 1) {
        for (size_t i = 0; i < n_items; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n_items; i = next.fetch_add(1)) body(i);
        });
    for (std::thread& t : pool) t.join();
}

monofuse::AugmentConfig parse_augment_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw monofuse::IoError("cannot open augment config: " + path.string());
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw monofuse::InvalidInputError("augment config is not valid JSON: " +
                                          std::string(e.what()));
    }

    monofuse::AugmentConfig cfg;
    auto range = [&](const ordered_json& v, const char* key) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number() ||
            v[0].get<double>() > v[1].get<double>())
            throw monofuse::InvalidInputError(std::string("augment config: ") + key +
                                              " must be an ordered [lo, hi] pair");
        return std::array<double, 2>{v[0].get<double>(), v[1].get<double>()};
    };

    for (const auto& [key, value] : j.items()) {
        if (key == "seed")
            cfg.seed = value.get<uint64_t>();
        else if (key == "flip_prob")
            cfg.flip_prob = value.get<double>();
        else if (key == "jitter_prob")
            cfg.jitter_prob = value.get<double>();
        else if (key == "jitter_range")
            cfg.jitter_range = range(value, "jitter_range");
        else if (key == "rotation_range_deg")
            cfg.rotation_range_deg = range(value, "rotation_range_deg");
        else if (key == "rotation_preset") {
            const std::string preset = value.get<std::string>();
            if (preset == "narrow")
                cfg.rotation_range_deg = monofuse::kRotationRangeNarrow;
            else if (preset == "wide")
                cfg.rotation_range_deg = monofuse::kRotationRangeWide;
            else
                throw monofuse::InvalidInputError(
                    "augment config: rotation_preset must be \"narrow\" or \"wide\"");
        } else if (key == "crop_w")
            cfg.crop_w = value.get<int>();
        else if (key == "crop_h")
            cfg.crop_h = value.get<int>();
        else
            throw monofuse::InvalidInputError("augment config: unknown key \"" + key + "\"");
    }
    if (cfg.flip_prob < 0 || cfg.flip_prob > 1 || cfg.jitter_prob < 0 || cfg.jitter_prob > 1)
        throw monofuse::InvalidInputError("augment config: probabilities must be in [0,1]");
    if (cfg.crop_w <= 0 || cfg.crop_h <= 0)
        throw monofuse::InvalidInputError("augment config: crop dimensions must be positive");
    return cfg;
}

ordered_json augment_config_json(const monofuse::AugmentConfig& cfg) {
    return ordered_json{{"seed", cfg.seed},
                        {"flip_prob", cfg.flip_prob},
                        {"jitter_prob", cfg.jitter_prob},
                        {"jitter_range", cfg.jitter_range},
                        {"rotation_range_deg", cfg.rotation_range_deg},
                        {"crop_w", cfg.crop_w},
                        {"crop_h", cfg.crop_h}};
}

void write_json_report(const fs::path& path, const ordered_json& j) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw monofuse::IoError("cannot write report: " + path.string());
    out << j.dump(2) << "\n";
}

// ---- fuse ------------------------------------------------------------------

struct FuseOptions {
    std::string split;
    std::string root;
    std::string out;
    int workers = 1;
    int ecc_iters = 20;
    uint64_t seed = 42;
    std::string report_path;
    std::string augment_path;
};

struct FuseItemOutcome {
    std::string id;
    bool failed = false;
    std::string error;
    std::vector<double> rho_per_block;
    int diverged_blocks = 0;
    double wall_ms = 0.0;
};

int cmd_fuse(const FuseOptions& opt) {
    monofuse::DatasetIndex index;
    try {
        index = monofuse::load_split(opt.split, opt.root);
    } catch (const monofuse::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    if (index.entries.empty())
        std::fprintf(stderr, "warning: split file %s holds no entries\n", opt.split.c_str());

    std::optional<monofuse::AugmentConfig> augment;
    if (!opt.augment_path.empty()) {
        try {
            augment = parse_augment_config(opt.augment_path);
        } catch (const monofuse::Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitFailure;
        }
    }

    const fs::path out_root(opt.out);
    std::error_code ec;
    fs::create_directories(out_root, ec);
    if (ec || !fs::is_directory(out_root)) {
        std::fprintf(stderr, "error: cannot create output directory %s\n", opt.out.c_str());
        return kExitFailure;
    }

    // output paths mirror the color-relative paths with a forced .png suffix;
    // collisions would let workers race on one file, so reject them up front
    std::vector<fs::path> out_paths(index.entries.size());
    {
        std::unordered_set<std::string> seen;
        for (size_t i = 0; i < index.entries.size(); ++i) {
            fs::path rel(index.entries[i].color_path);
            rel.replace_extension(".png");
            out_paths[i] = out_root / rel;
            if (!seen.insert(out_paths[i].string()).second) {
                std::fprintf(stderr, "error: output path collision at %s\n",
                             out_paths[i].string().c_str());
                return kExitFailure;
            }
        }
    }

    const auto run_t0 = std::chrono::steady_clock::now();
    std::vector<FuseItemOutcome> outcomes(index.entries.size());

    run_parallel(index.entries.size(), opt.workers, [&](size_t i) {
        FuseItemOutcome& out = outcomes[i];
        out.id = index.entries[i].color_path;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const monofuse::PlanarImage color = monofuse::load_image(index.color_file(i));
            if (color.channels != 3)
                throw monofuse::InvalidInputError("color image is not 3-channel: " + out.id);
            const monofuse::PlanarImage mono =
                monofuse::to_single_channel(monofuse::load_image(index.mono_file(i)));

            monofuse::AlignOptions align;
            align.ecc_iters = opt.ecc_iters;
            monofuse::FusionResult fused = monofuse::fuse(color, mono, align);

            for (const monofuse::AlignmentReport& r : fused.reports) {
                out.rho_per_block.push_back(r.rho_final);
                if (r.diverged) ++out.diverged_blocks;
            }

            if (augment) {
                monofuse::AugmentConfig cfg = *augment;
                cfg.seed = item_seed(opt.seed ^ cfg.seed, i);
                monofuse::AugmentRng rng(cfg.seed);
                std::optional<monofuse::DepthMap> depth;
                if (const auto gt = index.gt_depth_file(i))
                    depth = monofuse::load_depth_png(*gt);
                monofuse::apply_augmentations(fused.fused, depth ? &*depth : nullptr, cfg, rng);
                if (depth) {
                    fs::path depth_rel(*index.entries[i].gt_depth_path);
                    depth_rel.replace_extension(".png");
                    const fs::path depth_out = out_root / depth_rel;
                    fs::create_directories(depth_out.parent_path());
                    monofuse::save_depth_png(*depth, depth_out);
                }
            }

            fs::create_directories(out_paths[i].parent_path());
            monofuse::save_image(fused.fused, out_paths[i]);
        } catch (const monofuse::Error& e) {
            out.failed = true;
            out.error = e.what();
        }
        out.wall_ms = elapsed_ms(t0);
    });

    ordered_json per_item = ordered_json::array();
    ordered_json skipped = ordered_json::array();
    double rho_sum = 0.0;
    size_t rho_count = 0;
    size_t failures = 0;
    for (const FuseItemOutcome& out : outcomes) {
        if (out.failed) {
            ++failures;
            skipped.push_back({{"id", out.id}, {"error", out.error}});
            std::fprintf(stderr, "failed: %s: %s\n", out.id.c_str(), out.error.c_str());
            continue;
        }
        per_item.push_back({{"id", out.id},
                            {"rho_per_block", out.rho_per_block},
                            {"diverged_blocks", out.diverged_blocks},
                            {"wall_ms", out.wall_ms}});
        for (double rho : out.rho_per_block) {
            rho_sum += rho;
            ++rho_count;
        }
    }

    ordered_json config_echo{{"split", opt.split},
                             {"root", opt.root},
                             {"out", opt.out},
                             {"workers", opt.workers},
                             {"ecc_iters", opt.ecc_iters},
                             {"seed", opt.seed},
                             {"augment", augment ? augment_config_json(*augment)
                                                 : ordered_json(nullptr)}};
    ordered_json report{{"schema", 1},
                        {"per_item", per_item},
                        {"skipped", skipped},
                        {"totals",
                         {{"items", outcomes.size()},
                          {"failures", failures},
                          {"mean_rho", rho_count ? rho_sum / static_cast<double>(rho_count) : 0.0},
                          {"elapsed_ms", elapsed_ms(run_t0)}}},
                        {"config_echo", config_echo}};

    const fs::path report_path =
        opt.report_path.empty() ? out_root / "run_report.json" : fs::path(opt.report_path);
    try {
        write_json_report(report_path, report);
    } catch (const monofuse::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }

    std::printf("fused %zu/%zu item(s), %zu failure(s), report: %s\n",
                outcomes.size() - failures, outcomes.size(), failures,
                report_path.string().c_str());
    return failures == 0 ? kExitOk : kExitFailure;
}

// ---- eval ------------------------------------------------------------------

struct EvalOptions {
    std::string pred_dir;
    std::string gt_dir;
    std::string split;
    double max_depth = monofuse::kDefaultMaxDepth;
    double min_depth = monofuse::kDefaultMinDepth;
    bool garg = false;
    std::string report_path;
};

void print_metrics_table(const monofuse::EvalMetrics& m) {
    const Style style = stdout_style();
    std::printf("%s%10s %10s %10s %10s %10s %10s %10s%s\n", style.bold(), "Abs Rel",
                "Sq Rel", "RMSE", "RMSE log", "d<1.25", "d<1.25^2", "d<1.25^3",
                style.reset());
    std::printf("%10.4f %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f\n", m.abs_rel, m.sq_rel,
                m.rmse, m.rmse_log, m.d1, m.d2, m.d3);
}

ordered_json metrics_json(const monofuse::EvalMetrics& m) {
    return ordered_json{{"abs_rel", m.abs_rel}, {"sq_rel", m.sq_rel},
                        {"rmse", m.rmse},       {"rmse_log", m.rmse_log},
                        {"d1", m.d1},           {"d2", m.d2},
                        {"d3", m.d3},           {"n_valid", m.n_valid}};
}

int cmd_eval(const EvalOptions& opt) {
    monofuse::DatasetIndex index;
    try {
        index = monofuse::load_split(opt.split, opt.gt_dir);
    } catch (const monofuse::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }

    std::vector<monofuse::EvalMetrics> per_image;
    ordered_json per_image_json = ordered_json::array();
    ordered_json missing = ordered_json::array();

    for (size_t i = 0; i < index.entries.size(); ++i) {
        const monofuse::DatasetEntry& entry = index.entries[i];
        if (!entry.gt_depth_path) {
            missing.push_back({{"id", entry.color_path}, {"reason", "no ground truth column"}});
            continue;
        }
        const fs::path gt_path = fs::path(opt.gt_dir) / *entry.gt_depth_path;
        const fs::path pred_path = fs::path(opt.pred_dir) / *entry.gt_depth_path;
        if (!fs::exists(gt_path) || !fs::exists(pred_path)) {
            missing.push_back({{"id", entry.color_path},
                               {"reason", std::string("missing ") +
                                              (fs::exists(gt_path) ? "prediction" : "ground truth")}});
            continue;
        }
        try {
            const monofuse::DepthMap gt = monofuse::load_depth_png(gt_path);
            monofuse::DepthMap pred = monofuse::load_depth_png(pred_path);
            if (pred.width != gt.width || pred.height != gt.height)
                pred = monofuse::upsample_bilinear(pred, gt.width, gt.height);
            std::optional<monofuse::Rect> crop;
            if (opt.garg) crop = monofuse::garg_crop(gt.width, gt.height);
            const monofuse::EvalMetrics m =
                monofuse::compute_metrics(pred, gt, opt.min_depth, opt.max_depth, crop);
            per_image.push_back(m);
            ordered_json rec{{"id", entry.color_path}};
            rec.update(metrics_json(m));
            per_image_json.push_back(rec);
        } catch (const monofuse::Error& e) {
            missing.push_back({{"id", entry.color_path}, {"reason", e.what()}});
        }
    }

    for (const auto& rec : missing)
        std::fprintf(stderr, "skipped: %s (%s)\n", rec["id"].get<std::string>().c_str(),
                     rec["reason"].get<std::string>().c_str());

    if (per_image.empty()) {
        std::fprintf(stderr, "error: no evaluable prediction/ground-truth pairs\n");
        return kExitFailure;
    }

    const monofuse::EvalMetrics agg = monofuse::aggregate(per_image);
    std::printf("evaluated %zu image(s), %zu skipped\n", per_image.size(), missing.size());
    print_metrics_table(agg);

    ordered_json report{{"schema", 1},
                        {"per_image", per_image_json},
                        {"aggregate", metrics_json(agg)},
                        {"missing", missing},
                        {"config_echo",
                         {{"pred", opt.pred_dir},
                          {"gt", opt.gt_dir},
                          {"split", opt.split},
                          {"min_depth", opt.min_depth},
                          {"max_depth", opt.max_depth},
                          {"garg_crop", opt.garg}}}};
    if (!opt.report_path.empty()) {
        try {
            write_json_report(opt.report_path, report);
        } catch (const monofuse::Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitFailure;
        }
    }
    return kExitOk;
}

// ---- inspect ---------------------------------------------------------------

struct InspectOptions {
    std::string color_path;
    std::string mono_path;
    int block = 2;
    int ecc_iters = 20;
    std::string out_path = "inspect_overlay.png";
};

int cmd_inspect(const InspectOptions& opt) {
    try {
        const monofuse::PlanarImage color = monofuse::load_image(opt.color_path);
        if (color.channels != 3)
            throw monofuse::InvalidInputError("color image is not 3-channel");
        const monofuse::PlanarImage mono =
            monofuse::to_single_channel(monofuse::load_image(opt.mono_path));
        if (!color.same_dims(mono))
            throw monofuse::InvalidInputError("color and mono dimensions differ");

        const monofuse::PlanarImage lightness =
            monofuse::extract_lightness(monofuse::rgb_to_hsl(color));
        const monofuse::BlockGrid grid =
            monofuse::partition_grid(color.width, color.height);

        const Style style = stdout_style();
        std::printf("%s%-6s %12s %12s %6s %-10s%s\n", style.bold(), "block", "rho_before",
                    "rho_after", "iters", "status", style.reset());

        for (int c = 0; c < grid.cols; ++c) {
            const monofuse::Rect& r = grid.rect(grid.aligned_row, c);
            const monofuse::PlanarImage tpl = lightness.crop(r);
            const monofuse::PlanarImage blk = mono.crop(r);
            const monofuse::AlignmentReport rep = monofuse::estimate_ecc_homography(
                tpl, blk, monofuse::Homography::identity(), opt.ecc_iters);

            std::printf("%-6d %12.6f %12.6f %6d %-10s\n", c, rep.rho_initial, rep.rho_final,
                        rep.iterations,
                        rep.diverged ? "diverged" : (rep.converged ? "converged" : "ran"));
            for (int row = 0; row < 3; ++row)
                std::printf("       [ %12.6f %12.6f %12.6f ]\n", rep.warp.at(row, 0),
                            rep.warp.at(row, 1), rep.warp.at(row, 2));

            if (c == opt.block) {
                monofuse::WarpResult warped =
                    monofuse::warp_bilinear(blk, rep.warp, r.w, r.h);
                for (int y = 0; y < r.h; ++y)
                    for (int x = 0; x < r.w; ++x)
                        if (!warped.coverage.at(x, y))
                            warped.image.at(x, y) = blk.at(x, y);

                // lightness | warped mono | abs difference
                monofuse::PlanarImage overlay(3 * r.w, r.h, 1);
                for (int y = 0; y < r.h; ++y)
                    for (int x = 0; x < r.w; ++x) {
                        overlay.at(x, y) = tpl.at(x, y);
                        overlay.at(r.w + x, y) = warped.image.at(x, y);
                        overlay.at(2 * r.w + x, y) =
                            std::fabs(tpl.at(x, y) - warped.image.at(x, y));
                    }
                monofuse::save_image(overlay, opt.out_path);
                std::printf("overlay for block %d written to %s\n", c, opt.out_path.c_str());
            }
        }
    } catch (const monofuse::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"monofuse: pixel-level color/monochrome image fusion and "
                 "monocular-depth evaluation"};
    app.require_subcommand(1);

    FuseOptions fuse_opt;
    CLI::App* fuse = app.add_subcommand(
        "fuse", "Fuse every color/mono pair of a dataset split");
    fuse->add_option("--split", fuse_opt.split, "Split file: <color> <mono> [<gt_depth>] per line")
        ->required();
    fuse->add_option("--root", fuse_opt.root, "Dataset root the split paths are relative to")
        ->required();
    fuse->add_option("--out", fuse_opt.out, "Output directory (mirrors input relative paths)")
        ->required();
    fuse->add_option("--workers", fuse_opt.workers, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fuse->add_option("--ecc-iters", fuse_opt.ecc_iters, "ECC iterations per block")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fuse->add_option("--seed", fuse_opt.seed, "Run seed for all randomness")
        ->capture_default_str();
    fuse->add_option("--report", fuse_opt.report_path,
                     "Run report path (default: <out>/run_report.json)");
    fuse->add_option("--augment", fuse_opt.augment_path,
                     "JSON augmentation config; applied after fusion");

    EvalOptions eval_opt;
    CLI::App* eval = app.add_subcommand(
        "eval", "Evaluate depth predictions against 16-bit ground-truth PNGs");
    eval->add_option("--pred", eval_opt.pred_dir, "Prediction directory")->required();
    eval->add_option("--gt", eval_opt.gt_dir, "Ground-truth directory (split root)")->required();
    eval->add_option("--split", eval_opt.split, "Split file naming the ground-truth paths")
        ->required();
    eval->add_option("--max-depth", eval_opt.max_depth, "Depth cap in meters")
        ->capture_default_str();
    eval->add_option("--min-depth", eval_opt.min_depth, "Minimum valid depth in meters")
        ->capture_default_str();
    eval->add_flag("--garg-crop", eval_opt.garg, "Apply the Garg evaluation crop");
    eval->add_option("--report", eval_opt.report_path, "Write a JSON evaluation report here");

    InspectOptions inspect_opt;
    CLI::App* inspect = app.add_subcommand(
        "inspect", "Show per-block alignment quality for one color/mono pair");
    inspect->add_option("--color", inspect_opt.color_path, "Color image")->required();
    inspect->add_option("--mono", inspect_opt.mono_path, "Monochrome image")->required();
    inspect->add_option("--block", inspect_opt.block, "Bottom-row block for the overlay (0..4)")
        ->check(CLI::Range(0, 4))
        ->capture_default_str();
    inspect->add_option("--ecc-iters", inspect_opt.ecc_iters, "ECC iterations per block")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    inspect->add_option("--out", inspect_opt.out_path, "Overlay PNG path")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (fuse->parsed()) return cmd_fuse(fuse_opt);
    if (eval->parsed()) return cmd_eval(eval_opt);
    if (inspect->parsed()) return cmd_inspect(inspect_opt);
    return kExitUsage;
}
