#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hyloc/code_model.hpp"
#include "hyloc/common.hpp"
#include "hyloc/metrics.hpp"

namespace hyloc {

enum class Outcome { pass, fail };

struct TestTrace {
    std::string test_id;
    Outcome outcome = Outcome::pass;
    std::vector<LineKey> covered;
};

// Per-line counters with suite totals. Immutable after ingestion.
class SpectraMatrix {
public:
    SpectraMatrix() = default;
    SpectraMatrix(long long passed, long long failed, std::vector<LineKey> lines, std::vector<Counters> counters);

    long long passed() const noexcept { return passed_; }
    long long failed() const noexcept { return failed_; }
    std::size_t size() const noexcept { return lines_.size(); }
    const std::vector<LineKey>& lines() const noexcept { return lines_; }
    const Counters& counters(std::size_t i) const { return counters_.at(i); }
    std::optional<Counters> find(const LineKey& key) const;

private:
    long long passed_ = 0;
    long long failed_ = 0;
    std::vector<LineKey> lines_;
    std::vector<Counters> counters_;
    std::unordered_map<LineKey, std::size_t, LineKeyHash> index_;
};

struct IngestResult {
    SpectraMatrix matrix;
    // covered lines that are not in the universe; ignored
    std::vector<LineKey> unknown;
};

// Throws DataError "no bug-reproducing test" when no trace failed.
IngestResult ingest_coverage(const std::vector<TestTrace>& traces, const std::vector<LineKey>& universe);
IngestResult ingest_coverage(const std::vector<TestTrace>& traces, const std::vector<LineRecord>& universe);

enum class SpectraGroup { fail_only, pass_only, both, uncovered };

std::string_view to_string(SpectraGroup group);
SpectraGroup spectra_group(const Counters& c);
// Aligned with matrix.lines().
std::vector<SpectraGroup> group_by_spectra(const SpectraMatrix& matrix);

// {"test_id": str, "outcome": "pass"|"fail", "covered": [{"file": str, "lines": [int...]}...]}
std::vector<TestTrace> parse_coverage_jsonl(std::string_view text);
std::string coverage_to_jsonl(const std::vector<TestTrace>& traces);

// LCOV tracefile: returns covered lines (DA count > 0) per TN: test name.
// Records without a TN: line use `default_test`.
std::map<std::string, std::vector<LineKey>> parse_lcov(std::string_view text, const std::string& default_test);

// Joins LCOV coverage with a JSON outcome map {"test": "pass"|"fail"}.
std::vector<TestTrace> traces_from_lcov(std::string_view lcov_text, std::string_view outcomes_json,
                                        const std::string& default_test = "default");

// file,line_no,e_p,e_f,n_p,n_f then the 25 metric columns in feature order.
std::string spectra_csv(const SpectraMatrix& matrix, const MetricOptions& options = {});
SpectraMatrix parse_spectra_csv(std::string_view text);

}  // namespace hyloc
