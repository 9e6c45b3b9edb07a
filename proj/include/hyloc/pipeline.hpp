#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hyloc/code_model.hpp"
#include "hyloc/diff.hpp"
#include "hyloc/entropy.hpp"
#include "hyloc/evaluation.hpp"
#include "hyloc/features.hpp"
#include "hyloc/forest.hpp"
#include "hyloc/ngram.hpp"
#include "hyloc/ranker.hpp"
#include "hyloc/spectrum.hpp"

namespace hyloc {

// Tokenizes every source file below `root`; file names are relative to it.
// Lines without tokens are dropped.
std::vector<LineRecord> tokenize_tree(const std::filesystem::path& root, Language lang);

struct VersionSpec {
    std::string id;
    std::string project;
    std::string timestamp;
    std::optional<Language> language;  // defaults to RunConfig::language
    std::filesystem::path sources;
    // coverage: either a JSONL trace file or an LCOV file plus outcome map
    std::filesystem::path coverage;
    std::filesystem::path lcov;
    std::filesystem::path outcomes;
    // buggy lines: either a unified diff (buggy -> fixed) or annotation JSON
    std::filesystem::path diff;
    std::filesystem::path annotation;
};

struct RunConfig {
    Language language = Language::java_like;
    std::vector<VersionSpec> versions;
    std::vector<std::string> train;
    std::vector<std::string> test;
    // extra LM training roots; when empty the training versions' sources are used
    std::vector<std::filesystem::path> lm_corpus;
    LmParams lm;
    ForestParams forest;
    double undersample_ratio = 10.0;
    Relevance relevance;
    std::vector<double> budgets = {100.0, 20.0, 5.0};
    FeatureMode mode = FeatureMode::sbbl_plus_entropy;
    // also run the spectrum-only model and report gains against it
    bool baseline = true;
    // rank only lines executed by at least one test
    bool exclude_uncovered = true;
    MetricOptions metrics;
    std::filesystem::path output = "hyloc-out";

    void validate() const;
    const VersionSpec& version(std::string_view id) const;
    Language language_of(const VersionSpec& v) const { return v.language.value_or(language); }

    // Relative paths resolve against `base_dir`.
    static RunConfig from_json(std::string_view text, const std::filesystem::path& base_dir);
    static RunConfig load(const std::filesystem::path& path);
};

// Everything about one version that does not depend on the seed or mode.
struct VersionData {
    std::string id;
    std::vector<LineRecord> lines;  // lines with at least one token
    std::vector<LineEntropy> entropies;
    std::vector<EntropyFeatures> entropy_features;
    SpectraMatrix matrix;  // restricted to the ranked universe
    BugAnnotation annotation;
    std::set<LineKey> buggy;  // annotated lines present in `matrix`
};

struct PreparedExperiment {
    RunConfig config;
    NgramModel forward{LmParams{}, Direction::forward};
    NgramModel backward{LmParams{}, Direction::backward};
    EntropyNormalizer normalizer;
    std::map<std::string, VersionData> versions;
    std::vector<std::string> notices;
};

// Stages tokenize, lm, entropy, spectrum and annotate. Errors carry the
// stage name.
PreparedExperiment prepare_experiment(const RunConfig& config);

struct VersionResult {
    std::string id;
    RankedReport ranking;
    CECurve curve;
    std::map<double, double> aucec;  // budget percent -> area
};

struct ModeResult {
    FeatureMode mode = FeatureMode::sbbl_plus_entropy;
    std::vector<std::pair<std::string, double>> importances;  // ranked
    std::vector<VersionResult> versions;                      // config.test order
};

// Stages features, train, rank and evaluate for one mode and master seed.
ModeResult evaluate_mode(const PreparedExperiment& prepared, FeatureMode mode, std::uint64_t seed);

// Output bundle: file name -> contents. Bytes depend only on inputs and config.
struct RunReport {
    std::map<std::string, std::string> files;
    std::vector<std::string> notices;
    ModeResult primary;
    std::optional<ModeResult> baseline;
};

RunReport run_experiment(const RunConfig& config);
RunReport run_prepared(const PreparedExperiment& prepared);
void write_bundle(const RunReport& report, const std::filesystem::path& out_dir);

// Buggy-vs-clean comparison of average entropy within each spectra group
// (groups with fewer than two lines on either side are left out), as JSON.
std::string entropy_group_stats(const SpectraMatrix& matrix, const std::vector<LineEntropy>& entropies,
                                const std::set<LineKey>& buggy);

struct CrossProjectOutcome {
    std::map<std::string, RunReport> reports;  // by target version id
    std::vector<std::string> skipped;          // notices for targets without eligible predecessors
};

VersionManifest manifest_of(const RunConfig& config);

// Each configured version is a target; it is trained on the versions picked by
// cross_project_split and skipped when there are none.
CrossProjectOutcome run_cross_project(const RunConfig& config);

}  // namespace hyloc
