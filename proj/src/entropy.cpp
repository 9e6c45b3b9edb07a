#include "hyloc/entropy.hpp"

#include <cmath>
#include <unordered_map>

#include "hyloc/io.hpp"

namespace hyloc {

double channel_value(const LineEntropy& e, EntropyChannel channel) {
    switch (channel) {
        case EntropyChannel::forward: return e.forward;
        case EntropyChannel::backward: return e.backward;
        case EntropyChannel::average: return e.average;
    }
    throw InvariantError("bad entropy channel");
}

double mean_surprisal(std::span<const double> probabilities) {
    if (probabilities.empty()) return 0.0;
    double bits = 0.0;
    for (double p : probabilities) {
        if (!(p > 0.0 && p <= 1.0)) throw InvariantError("token probability outside (0, 1]");
        bits -= std::log2(p);
    }
    return bits / static_cast<double>(probabilities.size());
}

double directional_entropy(const NgramModel& model, const std::vector<Token>& tokens, CacheState& cache) {
    if (tokens.empty()) return 0.0;
    std::vector<std::pair<std::vector<TokenId>, TokenId>> pending;
    pending.reserve(tokens.size());
    std::vector<double> probs;
    probs.reserve(tokens.size());
    for (const auto& token : tokens) {
        const TokenId id = model.id_of(token.text);
        const auto context = cache.context();
        probs.push_back(model.probability(context, id, &cache));
        pending.emplace_back(std::vector<TokenId>(context.begin(), context.end()), id);
        cache.push_history(id);
    }
    for (const auto& [context, id] : pending) cache.insert(context, id);
    return mean_surprisal(probs);
}

LineEntropy line_entropies(const NgramModel& forward, const NgramModel& backward, const LineRecord& line,
                           CacheState& forward_cache, CacheState& backward_cache) {
    LineEntropy e{line.file, line.line_no, 0.0, 0.0, 0.0};
    if (line.tokens.empty()) return e;
    e.forward = directional_entropy(forward, line.tokens, forward_cache);
    const std::vector<Token> reversed(line.tokens.rbegin(), line.tokens.rend());
    e.backward = directional_entropy(backward, reversed, backward_cache);
    e.average = (e.forward + e.backward) / 2.0;
    return e;
}

std::vector<LineEntropy> corpus_entropies(const NgramModel& forward, const NgramModel& backward,
                                          const std::vector<LineRecord>& lines) {
    std::vector<LineEntropy> out(lines.size());
    // contiguous-or-not, lines of one file are scored together in file order
    std::vector<std::string> file_order;
    std::unordered_map<std::string, std::vector<std::size_t>> by_file;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto [it, inserted] = by_file.try_emplace(lines[i].file);
        if (inserted) file_order.push_back(lines[i].file);
        it->second.push_back(i);
    }
    CacheState fwd_cache(forward.order(), forward.params().cache_window);
    CacheState bwd_cache(backward.order(), backward.params().cache_window);
    for (const auto& file : file_order) {
        const auto& idx = by_file[file];
        fwd_cache.reset();
        bwd_cache.reset();
        for (std::size_t i : idx) {
            out[i].file = lines[i].file;
            out[i].line_no = lines[i].line_no;
            out[i].forward = directional_entropy(forward, lines[i].tokens, fwd_cache);
        }
        for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
            const auto& tokens = lines[*it].tokens;
            const std::vector<Token> reversed(tokens.rbegin(), tokens.rend());
            out[*it].backward = directional_entropy(backward, reversed, bwd_cache);
        }
        for (std::size_t i : idx) out[i].average = (out[i].forward + out[i].backward) / 2.0;
    }
    return out;
}

std::optional<TypeMoments> TypeStats::find(LineType type) const {
    auto it = by_type.find(type);
    if (it == by_type.end()) return std::nullopt;
    return it->second;
}

TypeStats compute_type_stats(const std::vector<LineEntropy>& entropies, const std::vector<LineRecord>& lines,
                             EntropyChannel channel) {
    if (entropies.empty()) throw DataError("cannot compute line-type statistics from an empty corpus");
    if (entropies.size() != lines.size()) throw InvariantError("entropies and lines are not aligned");
    std::map<LineType, std::vector<double>> groups;
    for (std::size_t i = 0; i < lines.size(); ++i)
        groups[lines[i].line_type].push_back(channel_value(entropies[i], channel));
    TypeStats stats;
    for (const auto& [type, values] : groups) {
        const auto n = static_cast<double>(values.size());
        double sum = 0.0;
        for (double v : values) sum += v;
        const double mean = sum / n;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        stats.by_type[type] = {mean, std::sqrt(ss / n), values.size()};
    }
    return stats;
}

double zscore_normalize(double entropy, LineType type, const TypeStats& stats) {
    const auto moments = stats.find(type);
    if (!moments || moments->sd == 0.0) return 0.0;
    return (entropy - moments->mean) / moments->sd;
}

EntropyNormalizer EntropyNormalizer::fit(const std::vector<LineEntropy>& entropies,
                                         const std::vector<LineRecord>& lines) {
    EntropyNormalizer n;
    n.channels[0] = compute_type_stats(entropies, lines, EntropyChannel::forward);
    n.channels[1] = compute_type_stats(entropies, lines, EntropyChannel::backward);
    n.channels[2] = compute_type_stats(entropies, lines, EntropyChannel::average);
    return n;
}

std::array<double, 3> EntropyNormalizer::normalize(const LineEntropy& e, LineType type) const {
    return {zscore_normalize(e.forward, type, channels[0]), zscore_normalize(e.backward, type, channels[1]),
            zscore_normalize(e.average, type, channels[2])};
}

std::string entropy_csv(const std::vector<LineRecord>& lines, const std::vector<LineEntropy>& entropies,
                        const EntropyNormalizer& normalizer) {
    if (lines.size() != entropies.size()) throw InvariantError("entropies and lines are not aligned");
    std::string out = "file,line_no,line_type,E_f,E_b,E_a,z_f,z_b,z_a\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& e = entropies[i];
        const auto z = normalizer.normalize(e, lines[i].line_type);
        out += io::csv_escape(e.file) + ',' + std::to_string(e.line_no) + ',' +
               std::string(to_string(lines[i].line_type)) + ',' + io::format_double(e.forward) + ',' +
               io::format_double(e.backward) + ',' + io::format_double(e.average) + ',' + io::format_double(z[0]) +
               ',' + io::format_double(z[1]) + ',' + io::format_double(z[2]) + '\n';
    }
    return out;
}

std::vector<EntropyRow> parse_entropy_csv(std::string_view text) {
    const auto table = io::parse_csv(text);
    const std::size_t file = table.column("file");
    const std::size_t line = table.column("line_no");
    const std::size_t type = table.column("line_type");
    const std::size_t cols[6] = {table.column("E_f"), table.column("E_b"), table.column("E_a"),
                                 table.column("z_f"), table.column("z_b"), table.column("z_a")};
    std::vector<EntropyRow> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        EntropyRow r;
        r.entropy.file = row[file];
        r.entropy.line_no = static_cast<int>(io::parse_int(row[line]));
        r.entropy.forward = io::parse_double(row[cols[0]]);
        r.entropy.backward = io::parse_double(row[cols[1]]);
        r.entropy.average = io::parse_double(row[cols[2]]);
        r.line_type = parse_line_type(row[type]);
        for (int k = 0; k < 3; ++k) r.z[k] = io::parse_double(row[cols[3 + k]]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace hyloc
