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

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "monofuse/image.hpp"

namespace monofuse {

/// One dataset sample: paired color/monochrome frames plus optional ground
/// truth depth, all relative to the index root.
struct DatasetEntry {
    std::string color_path;
    std::string mono_path;
    std::optional<std::string> gt_depth_path;
};

/// An ordered list of samples parsed from a split file. Referenced files are
/// checked lazily, when each item is actually loaded.
struct DatasetIndex {
    std::filesystem::path root;
    std::vector<DatasetEntry> entries;

    std::filesystem::path color_file(size_t i) const { return root / entries[i].color_path; }
    std::filesystem::path mono_file(size_t i) const { return root / entries[i].mono_path; }
    std::optional<std::filesystem::path> gt_depth_file(size_t i) const {
        if (!entries[i].gt_depth_path) return std::nullopt;
        return root / *entries[i].gt_depth_path;
    }
};

/// Parses a split file: one sample per non-empty line,
/// `<color> <mono> [<gt_depth>]`, whitespace separated, paths relative to
/// root. Order is preserved. Malformed lines (wrong column count, duplicate
/// color path) are all collected and reported by line number in one error.
inline DatasetIndex load_split(const std::filesystem::path& split_file,
                               const std::filesystem::path& root) {
    std::ifstream in(split_file);
    if (!in)
        throw IoError("cannot open split file: " + split_file.string());

    DatasetIndex index;
    index.root = root;
    std::unordered_set<std::string> seen_color;
    std::vector<std::string> problems;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::vector<std::string> cols;
        std::string col;
        while (fields >> col) cols.push_back(col);
        if (cols.empty()) continue; // blank line

        if (cols.size() < 2) {
            problems.push_back("line " + std::to_string(line_no) +
                               ": expected color and mono paths, got " +
                               std::to_string(cols.size()) + " field(s)");
            continue;
        }
        if (cols.size() > 3) {
            problems.push_back("line " + std::to_string(line_no) + ": too many fields (" +
                               std::to_string(cols.size()) + ")");
            continue;
        }
        if (!seen_color.insert(cols[0]).second) {
            problems.push_back("line " + std::to_string(line_no) + ": duplicate color path " +
                               cols[0]);
            continue;
        }
        DatasetEntry entry;
        entry.color_path = cols[0];
        entry.mono_path = cols[1];
        if (cols.size() == 3) entry.gt_depth_path = cols[2];
        index.entries.push_back(std::move(entry));
    }
    if (in.bad())
        throw IoError("read failure on split file: " + split_file.string());

    if (!problems.empty()) {
        std::string msg = "malformed split file " + split_file.string() + ":";
        for (const std::string& p : problems) msg += "\n  " + p;
        throw InvalidInputError(msg);
    }
    return index;
}

} // namespace monofuse
