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

#include "monofuse/augment.hpp"
#include "monofuse/color.hpp"
#include "monofuse/dataset.hpp"
#include "monofuse/depth.hpp"
#include "monofuse/ecc.hpp"
#include "monofuse/fusion.hpp"
#include "monofuse/homography.hpp"
#include "monofuse/image.hpp"
#include "monofuse/image_io.hpp"
#include "monofuse/metrics.hpp"
#include "monofuse/warp.hpp"
