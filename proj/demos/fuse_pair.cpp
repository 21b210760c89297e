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
// Minimal library walkthrough: fuse one color/mono pair and print the
// per-block alignment quality.
//
//   fuse_pair_demo <color.png> <mono.png> <out.png>

#include <cstdio>

#include "monofuse/monofuse.hpp"

int main(int argc, char** argv) {
    if (argc != 4) {
        std::fprintf(stderr, "usage: %s <color.png> <mono.png> <out.png>\n", argv[0]);
        return 2;
    }
    try {
        const monofuse::PlanarImage color = monofuse::load_image(argv[1]);
        const monofuse::PlanarImage mono =
            monofuse::to_single_channel(monofuse::load_image(argv[2]));

        const monofuse::FusionResult result = monofuse::fuse(color, mono);
        monofuse::save_image(result.fused, argv[3]);

        for (size_t i = 0; i < result.reports.size(); ++i) {
            const auto& r = result.reports[i];
            std::printf("block %zu: rho %.4f -> %.4f, %d iterations%s\n", i,
                        r.rho_initial, r.rho_final, r.iterations,
                        r.diverged ? " (diverged, passed through)" : "");
        }
    } catch (const monofuse::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
