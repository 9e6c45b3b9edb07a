#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hyloc/pipeline.hpp"

namespace hyloc::synth {

// Generator for small Java-like projects with simulated coverage and
// annotated buggy lines.
//
// Every method is one coverage block. Blocks are fail-only (all failing
// tests), pass-only (a random subset of passing tests), both, or uncovered.
// Buggy lines come in two kinds:
//   planted: statements in fail-only blocks that use fresh identifiers and
//            rare operators, so they read as unnatural;
//   random:  ordinary lines of pass-only blocks picked uniformly.
struct Options {
    std::uint64_t seed = 1;
    std::string project = "synth";
    int versions = 6;
    int first_year = 2010;
    int files = 10;
    int methods_per_file = 10;
    int statements_per_method = 7;
    int planted_per_version = 20;
    int random_per_version = 40;
    int failing_tests = 2;
    int passing_tests = 10;
    // fraction of blocks per group; the rest are uncovered
    double fail_only_share = 0.15;
    double pass_only_share = 0.40;
    double both_share = 0.25;
    // versions [0, train_versions) are training versions, the rest are test versions
    int train_versions = 4;
};

struct Project {
    std::filesystem::path root;
    std::filesystem::path config_path;
    RunConfig config;
    std::vector<std::string> version_ids;
};

// Writes sources, coverage JSONL, annotations and config.json under `root`.
Project write_project(const std::filesystem::path& root, const Options& options);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace hyloc::synth
