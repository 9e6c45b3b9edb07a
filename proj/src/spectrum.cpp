#include "hyloc/spectrum.hpp"

#include <set>
#include <unordered_set>

#include "json.hpp"

#include "hyloc/io.hpp"

namespace hyloc {

SpectraMatrix::SpectraMatrix(long long passed, long long failed, std::vector<LineKey> lines,
                             std::vector<Counters> counters)
    : passed_(passed), failed_(failed), lines_(std::move(lines)), counters_(std::move(counters)) {
    if (lines_.size() != counters_.size()) throw InvariantError("spectra: lines and counters are not aligned");
    for (std::size_t i = 0; i < lines_.size(); ++i) {
        const auto& c = counters_[i];
        if (c.e_p + c.n_p != passed_ || c.e_f + c.n_f != failed_ || c.e_p < 0 || c.e_f < 0 || c.n_p < 0 ||
            c.n_f < 0)
            throw DataError("spectra: counters of " + lines_[i].file + ":" + std::to_string(lines_[i].line_no) +
                            " do not add up to the suite totals");
        if (!index_.emplace(lines_[i], i).second)
            throw DataError("spectra: duplicate line " + lines_[i].file + ":" + std::to_string(lines_[i].line_no));
    }
}

std::optional<Counters> SpectraMatrix::find(const LineKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return counters_[it->second];
}

IngestResult ingest_coverage(const std::vector<TestTrace>& traces, const std::vector<LineKey>& universe) {
    std::unordered_map<LineKey, std::size_t, LineKeyHash> index;
    for (std::size_t i = 0; i < universe.size(); ++i) {
        if (!index.emplace(universe[i], i).second)
            throw DataError("duplicate line in universe: " + universe[i].file + ":" +
                            std::to_string(universe[i].line_no));
    }
    long long passed = 0;
    long long failed = 0;
    std::vector<long long> ep(universe.size(), 0);
    std::vector<long long> ef(universe.size(), 0);
    std::unordered_set<std::string> seen_ids;
    std::set<LineKey> unknown;
    for (const auto& trace : traces) {
        if (!seen_ids.insert(trace.test_id).second) throw DataError("duplicate test id '" + trace.test_id + "'");
        const bool fail = trace.outcome == Outcome::fail;
        (fail ? failed : passed) += 1;
        std::unordered_set<std::size_t> hit;
        for (const auto& key : trace.covered) {
            auto it = index.find(key);
            if (it == index.end()) {
                unknown.insert(key);
                continue;
            }
            if (hit.insert(it->second).second) ++(fail ? ef : ep)[it->second];
        }
    }
    if (failed == 0) throw DataError("no bug-reproducing test");
    std::vector<Counters> counters(universe.size());
    for (std::size_t i = 0; i < universe.size(); ++i)
        counters[i] = {ep[i], ef[i], passed - ep[i], failed - ef[i]};
    return {SpectraMatrix(passed, failed, universe, std::move(counters)),
            std::vector<LineKey>(unknown.begin(), unknown.end())};
}

IngestResult ingest_coverage(const std::vector<TestTrace>& traces, const std::vector<LineRecord>& universe) {
    std::vector<LineKey> keys;
    keys.reserve(universe.size());
    for (const auto& line : universe) keys.push_back(line.key());
    return ingest_coverage(traces, keys);
}

std::string_view to_string(SpectraGroup group) {
    switch (group) {
        case SpectraGroup::fail_only: return "fail_only";
        case SpectraGroup::pass_only: return "pass_only";
        case SpectraGroup::both: return "both";
        case SpectraGroup::uncovered: return "uncovered";
    }
    return "uncovered";
}

SpectraGroup spectra_group(const Counters& c) {
    if (c.e_f > 0 && c.e_p == 0) return SpectraGroup::fail_only;
    if (c.e_p > 0 && c.e_f == 0) return SpectraGroup::pass_only;
    if (c.e_p > 0 && c.e_f > 0) return SpectraGroup::both;
    return SpectraGroup::uncovered;
}

std::vector<SpectraGroup> group_by_spectra(const SpectraMatrix& matrix) {
    std::vector<SpectraGroup> groups;
    groups.reserve(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) groups.push_back(spectra_group(matrix.counters(i)));
    return groups;
}

namespace {

Outcome parse_outcome(const std::string& text) {
    if (text == "pass") return Outcome::pass;
    if (text == "fail") return Outcome::fail;
    throw DataError("unknown test outcome '" + text + "'");
}

}  // namespace

std::vector<TestTrace> parse_coverage_jsonl(std::string_view text) {
    std::vector<TestTrace> traces;
    std::size_t pos = 0;
    int row = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const auto line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const auto obj = nlohmann::json::parse(line);
            TestTrace trace;
            trace.test_id = obj.at("test_id").get<std::string>();
            trace.outcome = parse_outcome(obj.at("outcome").get<std::string>());
            for (const auto& block : obj.at("covered")) {
                const auto file = block.at("file").get<std::string>();
                for (const auto& n : block.at("lines")) trace.covered.push_back({file, n.get<int>()});
            }
            traces.push_back(std::move(trace));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("coverage row " + std::to_string(row) + ": " + e.what());
        }
    }
    return traces;
}

std::string coverage_to_jsonl(const std::vector<TestTrace>& traces) {
    std::string out;
    for (const auto& trace : traces) {
        std::map<std::string, std::vector<int>> by_file;
        for (const auto& key : trace.covered) by_file[key.file].push_back(key.line_no);
        nlohmann::json covered = nlohmann::json::array();
        for (const auto& [file, lines] : by_file) covered.push_back({{"file", file}, {"lines", lines}});
        nlohmann::json obj = {{"test_id", trace.test_id},
                              {"outcome", trace.outcome == Outcome::fail ? "fail" : "pass"},
                              {"covered", std::move(covered)}};
        out += obj.dump();
        out += '\n';
    }
    return out;
}

std::map<std::string, std::vector<LineKey>> parse_lcov(std::string_view text, const std::string& default_test) {
    std::map<std::string, std::vector<LineKey>> out;
    std::string test = default_test;
    std::string file;
    std::size_t pos = 0;
    int row = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++row;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.starts_with("TN:")) {
            test = std::string(line.substr(3));
            if (test.empty()) test = default_test;
        } else if (line.starts_with("SF:")) {
            file = std::string(line.substr(3));
        } else if (line.starts_with("DA:")) {
            if (file.empty()) throw DataError("lcov line " + std::to_string(row) + ": DA record outside SF block");
            const auto body = line.substr(3);
            const auto comma = body.find(',');
            if (comma == std::string_view::npos) throw DataError("lcov line " + std::to_string(row) + ": bad DA record");
            const auto line_no = io::parse_int(body.substr(0, comma));
            auto rest = body.substr(comma + 1);
            if (auto c2 = rest.find(','); c2 != std::string_view::npos) rest = rest.substr(0, c2);  // checksum
            const auto hits = io::parse_int(rest);
            auto& covered = out[test];
            if (hits > 0) covered.push_back({file, static_cast<int>(line_no)});
        } else if (line == "end_of_record") {
            file.clear();
        }
    }
    return out;
}

std::vector<TestTrace> traces_from_lcov(std::string_view lcov_text, std::string_view outcomes_json,
                                        const std::string& default_test) {
    const auto coverage = parse_lcov(lcov_text, default_test);
    nlohmann::json outcomes;
    try {
        outcomes = nlohmann::json::parse(outcomes_json);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("outcome map: ") + e.what());
    }
    std::vector<TestTrace> traces;
    for (const auto& [test, lines] : coverage) {
        if (!outcomes.contains(test)) throw DataError("outcome map has no entry for test '" + test + "'");
        traces.push_back({test, parse_outcome(outcomes.at(test).get<std::string>()), lines});
    }
    return traces;
}

std::string spectra_csv(const SpectraMatrix& matrix, const MetricOptions& options) {
    std::string out = "file,line_no,e_p,e_f,n_p,n_f";
    for (auto name : kMetricNames) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        const auto& key = matrix.lines()[i];
        const auto& c = matrix.counters(i);
        out += io::csv_escape(key.file) + ',' + std::to_string(key.line_no) + ',' + std::to_string(c.e_p) + ',' +
               std::to_string(c.e_f) + ',' + std::to_string(c.n_p) + ',' + std::to_string(c.n_f);
        for (double v : suspiciousness_vector(c, options)) out += ',' + io::format_double(v);
        out += '\n';
    }
    return out;
}

SpectraMatrix parse_spectra_csv(std::string_view text) {
    const auto table = io::parse_csv(text);
    const auto file = table.column("file");
    const auto line = table.column("line_no");
    const auto ep = table.column("e_p");
    const auto ef = table.column("e_f");
    const auto np = table.column("n_p");
    const auto nf = table.column("n_f");
    std::vector<LineKey> keys;
    std::vector<Counters> counters;
    for (const auto& row : table.rows) {
        keys.push_back({row[file], static_cast<int>(io::parse_int(row[line]))});
        counters.push_back({io::parse_int(row[ep]), io::parse_int(row[ef]), io::parse_int(row[np]),
                            io::parse_int(row[nf])});
    }
    if (counters.empty()) throw DataError("spectra CSV has no rows");
    const long long passed = counters.front().e_p + counters.front().n_p;
    const long long failed = counters.front().e_f + counters.front().n_f;
    return SpectraMatrix(passed, failed, std::move(keys), std::move(counters));
}

}  // namespace hyloc
