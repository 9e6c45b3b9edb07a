#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyloc/code_model.hpp"
#include "hyloc/ngram.hpp"

namespace hyloc {

// Per-line cross-entropy in bits under the forward and backward models.
struct LineEntropy {
    std::string file;
    int line_no = 0;
    double forward = 0.0;
    double backward = 0.0;
    double average = 0.0;

    LineKey key() const { return {file, line_no}; }
};

enum class EntropyChannel { forward, backward, average };

double channel_value(const LineEntropy& e, EntropyChannel channel);

// Mean of -log2 p over the per-token probabilities of one line; 0 for an
// empty line.
double mean_surprisal(std::span<const double> probabilities);

// Mean of -log2 P(token | context) over `tokens`, which must already be in
// the model's direction. Each token is scored before the line's n-grams are
// added to the cache; history advances token by token.
double directional_entropy(const NgramModel& model, const std::vector<Token>& tokens, CacheState& cache);

// Scores one line with both models. The caller drives the forward cache in
// ascending line order and the backward cache in descending line order.
LineEntropy line_entropies(const NgramModel& forward, const NgramModel& backward, const LineRecord& line,
                           CacheState& forward_cache, CacheState& backward_cache);

// Entropies for every line of a corpus, aligned with `lines`. Caches reset at
// each file boundary; files are identified by LineRecord::file.
std::vector<LineEntropy> corpus_entropies(const NgramModel& forward, const NgramModel& backward,
                                          const std::vector<LineRecord>& lines);

struct TypeMoments {
    double mean = 0.0;
    double sd = 0.0;  // population standard deviation
    std::size_t count = 0;
};

struct TypeStats {
    std::map<LineType, TypeMoments> by_type;

    std::optional<TypeMoments> find(LineType type) const;
};

TypeStats compute_type_stats(const std::vector<LineEntropy>& entropies, const std::vector<LineRecord>& lines,
                             EntropyChannel channel);

// (entropy - mean) / sd for the line type; 0 when sd is 0 or the type is
// absent from the stats.
double zscore_normalize(double entropy, LineType type, const TypeStats& stats);

// Type statistics for all three channels, estimated on one corpus and
// applied to others.
struct EntropyNormalizer {
    std::array<TypeStats, 3> channels;

    static EntropyNormalizer fit(const std::vector<LineEntropy>& entropies, const std::vector<LineRecord>& lines);
    std::array<double, 3> normalize(const LineEntropy& e, LineType type) const;
};

// CSV with columns file,line_no,line_type,E_f,E_b,E_a,z_f,z_b,z_a.
std::string entropy_csv(const std::vector<LineRecord>& lines, const std::vector<LineEntropy>& entropies,
                        const EntropyNormalizer& normalizer);

struct EntropyRow {
    LineEntropy entropy;
    LineType line_type = LineType::other;
    std::array<double, 3> z{};
};

std::vector<EntropyRow> parse_entropy_csv(std::string_view text);

}  // namespace hyloc
