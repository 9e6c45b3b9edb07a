#include "hyloc/evaluation.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "hyloc/io.hpp"

namespace hyloc {

CECurve ce_curve(const RankedReport& report, const std::set<LineKey>& buggy) {
    if (buggy.empty()) throw DataError("no buggy lines to evaluate");
    std::set<LineKey> remaining = buggy;
    CECurve curve;
    curve.lines = report.size();
    curve.buggy = buggy.size();
    std::vector<bool> hit(report.size(), false);
    for (std::size_t i = 0; i < report.size(); ++i) hit[i] = remaining.erase(report.entries[i].key) > 0;
    if (!remaining.empty()) {
        const auto& k = *remaining.begin();
        throw DataError("buggy line " + k.file + ":" + std::to_string(k.line_no) + " is not in the ranking");
    }
    const auto n = static_cast<double>(curve.lines);
    const auto b = static_cast<double>(curve.buggy);
    curve.points.reserve(curve.lines + 1);
    curve.points.push_back({0.0, 0.0});
    std::size_t found = 0;
    for (std::size_t k = 1; k <= curve.lines; ++k) {
        found += hit[k - 1] ? 1 : 0;
        curve.points.push_back({static_cast<double>(k) / n, static_cast<double>(found) / b});
    }
    // exact endpoint regardless of rounding
    curve.points.back() = {1.0, 1.0};
    return curve;
}

double aucec(const CECurve& curve, double budget_percent, bool normalized) {
    if (!(budget_percent > 0.0 && budget_percent <= 100.0))
        throw UsageError("inspection budget must lie in (0, 100]");
    const double limit = budget_percent / 100.0;
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        if (a.inspected >= limit) break;
        if (b.inspected <= limit) {
            area += (b.inspected - a.inspected) * (a.bugs_found + b.bugs_found) / 2.0;
        } else {
            const double t = (limit - a.inspected) / (b.inspected - a.inspected);
            const double y = a.bugs_found + t * (b.bugs_found - a.bugs_found);
            area += (limit - a.inspected) * (a.bugs_found + y) / 2.0;
            break;
        }
    }
    return normalized ? area / limit : area;
}

double gain(double aucec_en, double aucec_sp) {
    if (aucec_sp == 0.0) throw DataError("gain is undefined for a zero baseline AUCEC");
    return 100.0 * (aucec_en - aucec_sp) / aucec_sp;
}

double overall_gain(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) throw DataError("overall gain needs at least one pair");
    double diff = 0.0;
    double base = 0.0;
    for (const auto& [en, sp] : pairs) {
        diff += en - sp;
        base += sp;
    }
    if (!(base > 0.0)) throw DataError("overall gain is undefined for a zero baseline AUCEC sum");
    return 100.0 * diff / base;
}

std::string ce_csv(const CECurve& curve) {
    std::string out = "x,y\n";
    for (const auto& p : curve.points) out += io::format_double(p.inspected) + ',' + io::format_double(p.bugs_found) + '\n';
    return out;
}

std::string ce_svg(const std::vector<std::pair<std::string, const CECurve*>>& curves, std::string_view title) {
    constexpr int kSize = 400;
    constexpr int kMargin = 40;
    static constexpr std::string_view kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
    auto px = [](double v) { return io::format_double(kMargin + v * kSize); };
    auto py = [](double v) { return io::format_double(kMargin + (1.0 - v) * kSize); };
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + 2 * kMargin << "\" height=\""
        << kSize + 2 * kMargin << "\">\n";
    svg << "<text x=\"" << kMargin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
        << "</text>\n";
    svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize << "\" height=\"" << kSize
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
        << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n";
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& [label, curve] = curves[c];
        // thin the polyline for long curves
        const std::size_t step = std::max<std::size_t>(1, curve->points.size() / 2000);
        svg << "<polyline fill=\"none\" stroke=\"" << kColors[c % 4] << "\" points=\"";
        for (std::size_t i = 0; i < curve->points.size(); i += step)
            svg << px(curve->points[i].inspected) << ',' << py(curve->points[i].bugs_found) << ' ';
        svg << px(curve->points.back().inspected) << ',' << py(curve->points.back().bugs_found) << "\"/>\n";
        svg << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + 20 + 16 * static_cast<int>(c)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << kColors[c % 4] << "\">" << label
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

// ---- manifest ----

VersionManifest::VersionManifest(std::vector<VersionEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const VersionEntry& a, const VersionEntry& b) {
        return std::tie(a.timestamp, a.version_id) < std::tie(b.timestamp, b.version_id);
    });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (entries_[i].version_id == entries_[j].version_id)
                throw DataError("duplicate version id '" + entries_[i].version_id + "' in manifest");
    }
}

const VersionEntry& VersionManifest::find(std::string_view version_id) const {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const VersionEntry& e) { return e.version_id == version_id; });
    if (it == entries_.end()) throw DataError("version '" + std::string(version_id) + "' is not in the manifest");
    return *it;
}

VersionManifest VersionManifest::from_json(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        const auto& list = doc.is_array() ? doc : doc.at("entries");
        std::vector<VersionEntry> entries;
        for (const auto& e : list)
            entries.push_back({e.at("project").get<std::string>(), e.at("version_id").get<std::string>(),
                               parse_language(e.at("language").get<std::string>()),
                               e.at("timestamp").get<std::string>()});
        return VersionManifest(std::move(entries));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    }
}

std::string VersionManifest::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : entries_)
        list.push_back({{"project", e.project},
                        {"version_id", e.version_id},
                        {"language", to_string(e.language)},
                        {"timestamp", e.timestamp}});
    return nlohmann::json{{"entries", std::move(list)}}.dump(2);
}

std::vector<std::string> cross_project_split(const VersionManifest& manifest, std::string_view target) {
    const auto& t = manifest.find(target);
    std::vector<std::string> out;
    for (const auto& e : manifest.entries())
        if (e.project != t.project && e.language == t.language && e.timestamp < t.timestamp)
            out.push_back(e.version_id);
    if (out.empty()) throw DataError("no eligible prior versions for '" + std::string(target) + "'");
    return out;
}

}  // namespace hyloc
