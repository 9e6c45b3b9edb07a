#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hyloc/code_model.hpp"

namespace hyloc {

enum class Direction { forward, backward };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

struct LmParams {
    int order = 3;
    // weight of the cache component against the global model
    double cache_lambda = 0.5;
    // number of most recent n-gram events kept per file; 0 disables the cache
    std::size_t cache_window = 5000;
    // Jelinek-Mercer weight given to each order's ML estimate
    double order_weight = 0.5;

    void validate() const;
};

using TokenId = std::uint32_t;

// Count table for one order: context key -> continuation counts.
struct ContextCounts {
    std::uint64_t total = 0;
    std::unordered_map<TokenId, std::uint64_t> next;
};

class CacheState;

// Smoothed n-gram counts over token texts. Immutable once trained; share
// freely across threads. Out-of-vocabulary tokens map to a single UNK id,
// `unk_id() == vocab_size()`.
class NgramModel {
public:
    NgramModel(LmParams params, Direction direction);

    const LmParams& params() const noexcept { return params_; }
    int order() const noexcept { return params_.order; }
    Direction direction() const noexcept { return direction_; }
    std::size_t vocab_size() const noexcept { return vocab_.size(); }
    TokenId unk_id() const noexcept { return static_cast<TokenId>(vocab_.size()); }
    const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }

    TokenId id_of(std::string_view text) const;

    // Raw count of `token` after `context` (context length k-1 selects order k).
    std::uint64_t count(std::span<const TokenId> context, TokenId token) const;
    std::uint64_t count(const std::vector<std::string>& context, std::string_view token) const;

    // Interpolated global estimate; the context is truncated to the most
    // recent order-1 tokens.
    double global_probability(std::span<const TokenId> context, TokenId token) const;

    // lambda * P_cache + (1 - lambda) * P_global. A null cache, or one with no
    // mass for the context, reduces to P_global.
    double probability(std::span<const TokenId> context, TokenId token, const CacheState* cache) const;

    // Training interface: feed one file's token stream in model direction.
    void add_stream(std::span<const std::string> tokens);

    std::string to_json() const;
    static NgramModel from_json(std::string_view text);

private:
    TokenId intern(const std::string& text);

    LmParams params_;
    Direction direction_;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, TokenId> ids_;
    // tables_[k-1] holds order-k counts keyed by the packed (k-1)-token context
    std::vector<std::unordered_map<std::string, ContextCounts>> tables_;
};

// Packs a context into a byte string key (4 bytes per id).
std::string pack_context(std::span<const TokenId> context);

// Per-file scoring state: recent-token history plus the n-gram cache. Not
// thread-safe; use one per scoring session.
class CacheState {
public:
    CacheState(int order, std::size_t window);

    void reset();

    // Context for the next token: at most order-1 most recent ids.
    std::span<const TokenId> context() const noexcept { return history_; }
    void push_history(TokenId token);

    void insert(std::span<const TokenId> context, TokenId token);
    // Cache ML estimate; negative when the context has no cache mass.
    double ml_estimate(std::span<const TokenId> context, TokenId token) const;
    std::size_t size() const noexcept { return events_.size(); }
    std::size_t window() const noexcept { return window_; }

private:
    int order_;
    std::size_t window_;
    std::vector<TokenId> history_;
    std::deque<std::pair<std::string, TokenId>> events_;
    std::unordered_map<std::string, ContextCounts> counts_;
};

// Builds a model from a line corpus. Lines are grouped per file in first
// appearance order; for Direction::backward each file's stream is reversed.
NgramModel train_ngram(const std::vector<LineRecord>& corpus, Direction direction, const LmParams& params);

// String-level convenience wrapper around NgramModel::probability.
double token_probability(const NgramModel& model, const std::vector<std::string>& context, std::string_view token,
                         const CacheState* cache = nullptr);

}  // namespace hyloc
