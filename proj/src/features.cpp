#include "hyloc/features.hpp"

#include <unordered_map>

#include "hyloc/io.hpp"

namespace hyloc {

std::string_view to_string(FeatureMode mode) {
    return mode == FeatureMode::sbbl_only ? "sbbl_only" : "sbbl_plus_entropy";
}

FeatureMode parse_feature_mode(std::string_view text) {
    if (text == "sbbl" || text == "sbbl_only") return FeatureMode::sbbl_only;
    if (text == "hybrid" || text == "sbbl_plus_entropy") return FeatureMode::sbbl_plus_entropy;
    throw UsageError("unknown mode '" + std::string(text) + "' (expected sbbl or hybrid)");
}

std::size_t feature_count(FeatureMode mode) {
    return kMetricCount + (mode == FeatureMode::sbbl_plus_entropy ? kEntropyFeatureCount : 0);
}

std::vector<std::string> feature_names(FeatureMode mode) {
    std::vector<std::string> names(kMetricNames.begin(), kMetricNames.end());
    if (mode == FeatureMode::sbbl_plus_entropy)
        names.insert(names.end(), kEntropyFeatureNames.begin(), kEntropyFeatureNames.end());
    return names;
}

std::vector<LabeledInstance> join_features(const SpectraMatrix& matrix, const std::vector<EntropyFeatures>& entropy,
                                           FeatureMode mode, const MetricOptions& options) {
    std::unordered_map<LineKey, const EntropyFeatures*, LineKeyHash> by_key;
    if (mode == FeatureMode::sbbl_plus_entropy)
        for (const auto& e : entropy) by_key.emplace(e.key, &e);
    std::vector<LabeledInstance> rows;
    rows.reserve(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        LabeledInstance row;
        row.key = matrix.lines()[i];
        const auto metrics = suspiciousness_vector(matrix.counters(i), options);
        row.features.assign(metrics.begin(), metrics.end());
        if (mode == FeatureMode::sbbl_plus_entropy) {
            auto it = by_key.find(row.key);
            if (it == by_key.end())
                throw DataError("no entropy for " + row.key.file + ":" + std::to_string(row.key.line_no));
            row.features.insert(row.features.end(), it->second->z.begin(), it->second->z.end());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string features_csv(const std::vector<LabeledInstance>& rows, FeatureMode mode) {
    std::string out = "file,line_no";
    for (const auto& name : feature_names(mode)) out += ',' + name;
    out += '\n';
    for (const auto& row : rows) {
        out += io::csv_escape(row.key.file) + ',' + std::to_string(row.key.line_no);
        for (double v : row.features) out += ',' + io::format_double(v);
        out += '\n';
    }
    return out;
}

std::vector<LabeledInstance> parse_features_csv(std::string_view text, FeatureMode& mode_out) {
    const auto table = io::parse_csv(text);
    if (table.header.size() == 2 + feature_count(FeatureMode::sbbl_only))
        mode_out = FeatureMode::sbbl_only;
    else if (table.header.size() == 2 + feature_count(FeatureMode::sbbl_plus_entropy))
        mode_out = FeatureMode::sbbl_plus_entropy;
    else
        throw DataError("features CSV has " + std::to_string(table.header.size()) + " columns");
    const auto names = feature_names(mode_out);
    for (std::size_t i = 0; i < names.size(); ++i)
        if (table.header[i + 2] != names[i]) throw DataError("features CSV column " + std::to_string(i + 2) +
                                                             " is '" + table.header[i + 2] + "', expected " + names[i]);
    std::vector<LabeledInstance> rows;
    for (const auto& r : table.rows) {
        LabeledInstance row;
        row.key = {r[0], static_cast<int>(io::parse_int(r[1]))};
        for (std::size_t i = 2; i < r.size(); ++i) row.features.push_back(io::parse_double(r[i]));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace hyloc
