#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyloc/common.hpp"
#include "hyloc/ranker.hpp"

namespace hyloc {

struct CEPoint {
    double inspected = 0.0;   // fraction of lines inspected
    double bugs_found = 0.0;  // fraction of buggy lines found
};

// Cost-effectiveness step curve sampled at every rank: N + 1 points from
// (0,0) to (1,1).
struct CECurve {
    std::vector<CEPoint> points;
    std::size_t lines = 0;  // N
    std::size_t buggy = 0;  // b
};

// Throws DataError when there are no buggy lines, or when a buggy key is not
// in the report.
CECurve ce_curve(const RankedReport& report, const std::set<LineKey>& buggy);

// Trapezoidal area under the curve over x in [0, budget_percent / 100].
// The budgeted area is absolute; `normalized` divides by the window width.
double aucec(const CECurve& curve, double budget_percent, bool normalized = false);

// 100 * (en - sp) / sp
double gain(double aucec_en, double aucec_sp);
// 100 * sum(en - sp) / sum(sp)
double overall_gain(const std::vector<std::pair<double, double>>& pairs);

std::string ce_csv(const CECurve& curve);
// Static SVG plot of one or more curves plus the random baseline.
std::string ce_svg(const std::vector<std::pair<std::string, const CECurve*>>& curves, std::string_view title);

struct VersionEntry {
    std::string project;
    std::string version_id;
    Language language = Language::java_like;
    std::string timestamp;  // ISO date, compared lexicographically
};

class VersionManifest {
public:
    VersionManifest() = default;
    explicit VersionManifest(std::vector<VersionEntry> entries);

    // Chronological: by timestamp, ties by version_id.
    const std::vector<VersionEntry>& entries() const noexcept { return entries_; }
    const VersionEntry& find(std::string_view version_id) const;

    static VersionManifest from_json(std::string_view text);
    std::string to_json() const;

private:
    std::vector<VersionEntry> entries_;
};

// Versions of other projects in the same language with a strictly earlier
// timestamp, in chronological order. Throws DataError when there are none.
std::vector<std::string> cross_project_split(const VersionManifest& manifest, std::string_view target);

}  // namespace hyloc
