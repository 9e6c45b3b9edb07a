#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "hyloc/common.hpp"
#include "hyloc/entropy.hpp"
#include "hyloc/spectrum.hpp"

namespace hyloc {

// sbbl_only: the 25 spectrum metrics. sbbl_plus_entropy appends the three
// line-type normalized entropies (forward, backward, average).
enum class FeatureMode { sbbl_only, sbbl_plus_entropy };

std::string_view to_string(FeatureMode mode);
// Accepts "sbbl"/"sbbl_only" and "hybrid"/"sbbl_plus_entropy".
FeatureMode parse_feature_mode(std::string_view text);

inline constexpr std::size_t kEntropyFeatureCount = 3;
inline constexpr std::array<std::string_view, kEntropyFeatureCount> kEntropyFeatureNames = {
    "ForwardEntropy", "BackwardEntropy", "AverageEntropy"};

std::size_t feature_count(FeatureMode mode);
std::vector<std::string> feature_names(FeatureMode mode);

struct LabeledInstance {
    LineKey key;
    std::vector<double> features;
    double relevance = 0.0;
    bool buggy = false;  // relevance == R_b
};

// Normalized entropy features of one line.
struct EntropyFeatures {
    LineKey key;
    std::array<double, 3> z{};
};

// One feature row per spectra line, in matrix order. In entropy mode every
// line must have an entry in `entropy`.
std::vector<LabeledInstance> join_features(const SpectraMatrix& matrix, const std::vector<EntropyFeatures>& entropy,
                                           FeatureMode mode, const MetricOptions& options = {});

// CSV: file,line_no,<feature names...>
std::string features_csv(const std::vector<LabeledInstance>& rows, FeatureMode mode);
std::vector<LabeledInstance> parse_features_csv(std::string_view text, FeatureMode& mode_out);

}  // namespace hyloc
