#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyloc/forest.hpp"

namespace hyloc {

struct Relevance {
    double buggy = 1.0;  // R_b
    double clean = 0.0;  // R_g

    void validate() const;
};

// Buggy lines get R_b, every other universe line R_g. Throws DataError
// listing buggy keys that are not in the universe.
std::vector<LabeledInstance> label_lines(const std::vector<LineKey>& universe, const std::set<LineKey>& buggy,
                                         const Relevance& relevance);

// Keeps every buggy instance and ceil(ratio * #buggy) non-buggy ones drawn
// without replacement (all of them when fewer exist). Input order is kept.
std::vector<LabeledInstance> undersample(const std::vector<LabeledInstance>& instances, double target_ratio,
                                         std::uint64_t seed);

// Mean over trees of R_b * P_k + R_g * (1 - P_k).
double hybrid_suspiciousness(const ForestModel& model, std::span<const double> features, const Relevance& relevance);

struct RankedEntry {
    LineKey key;
    double score = 0.0;
    int rank = 0;  // 1-based
};

struct RankedReport {
    std::vector<RankedEntry> entries;

    std::size_t size() const noexcept { return entries.size(); }
};

// Sorted by decreasing score, then file and line ascending. Throws on
// duplicate keys or NaN scores.
RankedReport rank_lines(std::vector<std::pair<LineKey, double>> scored);

// rank,file,line_no,HySusp with an optional "# top_features: ..." header.
std::string ranked_csv(const RankedReport& report, const std::vector<std::pair<std::string, double>>& top_features);
RankedReport parse_ranked_csv(std::string_view text);

}  // namespace hyloc
