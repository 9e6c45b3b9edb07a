#include "hyloc/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hyloc/io.hpp"
#include "hyloc/random.hpp"

namespace hyloc {

void Relevance::validate() const {
    if (!(buggy > clean)) throw UsageError("relevance of buggy lines must exceed that of clean lines");
}

std::vector<LabeledInstance> label_lines(const std::vector<LineKey>& universe, const std::set<LineKey>& buggy,
                                         const Relevance& relevance) {
    relevance.validate();
    std::set<LineKey> missing = buggy;
    std::vector<LabeledInstance> out;
    out.reserve(universe.size());
    for (const auto& key : universe) {
        const bool is_buggy = buggy.contains(key);
        missing.erase(key);
        out.push_back({key, {}, is_buggy ? relevance.buggy : relevance.clean, is_buggy});
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k.file + ":" + std::to_string(k.line_no);
        throw DataError("buggy lines outside the line universe: " + list);
    }
    return out;
}

std::vector<LabeledInstance> undersample(const std::vector<LabeledInstance>& instances, double target_ratio,
                                         std::uint64_t seed) {
    if (!(target_ratio > 0.0)) throw UsageError("undersampling ratio must be > 0");
    std::vector<std::size_t> clean;
    std::size_t buggy = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (instances[i].buggy)
            ++buggy;
        else
            clean.push_back(i);
    }
    if (buggy == 0) throw DataError("cannot train: no positive class");
    const auto wanted = static_cast<std::size_t>(std::ceil(target_ratio * static_cast<double>(buggy)));
    std::vector<bool> keep(instances.size(), false);
    for (std::size_t i = 0; i < instances.size(); ++i) keep[i] = instances[i].buggy;
    if (wanted >= clean.size()) {
        for (auto i : clean) keep[i] = true;
    } else {
        std::mt19937_64 rng(seed);
        for (std::size_t j = 0; j < wanted; ++j) {
            const auto pick = j + static_cast<std::size_t>(uniform_index(rng, clean.size() - j));
            std::swap(clean[j], clean[pick]);
            keep[clean[j]] = true;
        }
    }
    std::vector<LabeledInstance> out;
    for (std::size_t i = 0; i < instances.size(); ++i)
        if (keep[i]) out.push_back(instances[i]);
    return out;
}

double hybrid_suspiciousness(const ForestModel& model, std::span<const double> features, const Relevance& relevance) {
    const auto probs = model.tree_probabilities(features);
    double sum = 0.0;
    for (double p : probs) sum += relevance.buggy * p + relevance.clean * (1.0 - p);
    return sum / static_cast<double>(probs.size());
}

RankedReport rank_lines(std::vector<std::pair<LineKey, double>> scored) {
    for (const auto& [key, score] : scored)
        if (std::isnan(score)) throw DataError("NaN score for " + key.file + ":" + std::to_string(key.line_no));
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    // duplicates with different scores are not adjacent in `scored`
    std::vector<LineKey> keys;
    keys.reserve(scored.size());
    for (const auto& s : scored) keys.push_back(s.first);
    std::sort(keys.begin(), keys.end());
    if (auto dup = std::adjacent_find(keys.begin(), keys.end()); dup != keys.end())
        throw DataError("duplicate line in ranking: " + dup->file + ":" + std::to_string(dup->line_no));
    RankedReport report;
    report.entries.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i)
        report.entries.push_back({scored[i].first, scored[i].second, static_cast<int>(i) + 1});
    return report;
}

std::string ranked_csv(const RankedReport& report, const std::vector<std::pair<std::string, double>>& top_features) {
    std::string out;
    if (!top_features.empty()) {
        out += "# top_features:";
        for (std::size_t i = 0; i < top_features.size(); ++i)
            out += (i ? "," : " ") + top_features[i].first + "=" + io::format_double(top_features[i].second);
        out += '\n';
    }
    out += "rank,file,line_no,HySusp\n";
    for (const auto& e : report.entries)
        out += std::to_string(e.rank) + ',' + io::csv_escape(e.key.file) + ',' + std::to_string(e.key.line_no) + ',' +
               io::format_double(e.score) + '\n';
    return out;
}

RankedReport parse_ranked_csv(std::string_view text) {
    const auto table = io::parse_csv(text);
    const auto file = table.column("file");
    const auto line = table.column("line_no");
    const auto score = table.column("HySusp");
    std::vector<std::pair<LineKey, double>> scored;
    for (const auto& row : table.rows)
        scored.push_back({{row[file], static_cast<int>(io::parse_int(row[line]))}, io::parse_double(row[score])});
    return rank_lines(std::move(scored));
}

}  // namespace hyloc
