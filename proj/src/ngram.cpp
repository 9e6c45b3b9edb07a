#include "hyloc/ngram.hpp"

#include <algorithm>
#include <cstring>
#include <map>

#include "json.hpp"

namespace hyloc {

namespace {

constexpr int kModelFormatVersion = 1;

std::span<const TokenId> truncate(std::span<const TokenId> context, std::size_t max_len) {
    if (context.size() <= max_len) return context;
    return context.subspan(context.size() - max_len);
}

std::vector<TokenId> unpack_context(const std::string& key) {
    std::vector<TokenId> ids(key.size() / sizeof(TokenId));
    std::memcpy(ids.data(), key.data(), ids.size() * sizeof(TokenId));
    return ids;
}

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

Direction parse_direction(std::string_view text) {
    if (text == "forward") return Direction::forward;
    if (text == "backward") return Direction::backward;
    throw DataError("unknown direction '" + std::string(text) + "'");
}

void LmParams::validate() const {
    if (order < 1) throw UsageError("n-gram order must be >= 1");
    if (!(cache_lambda >= 0.0 && cache_lambda < 1.0)) throw UsageError("cache lambda must lie in [0, 1)");
    if (!(order_weight >= 0.0 && order_weight < 1.0)) throw UsageError("order weight must lie in [0, 1)");
}

std::string pack_context(std::span<const TokenId> context) {
    std::string key(context.size() * sizeof(TokenId), '\0');
    if (!context.empty()) std::memcpy(key.data(), context.data(), key.size());
    return key;
}

// ---- NgramModel ----

NgramModel::NgramModel(LmParams params, Direction direction)
    : params_(params), direction_(direction), tables_(static_cast<std::size_t>(std::max(params.order, 1))) {
    params_.validate();
}

TokenId NgramModel::id_of(std::string_view text) const {
    auto it = ids_.find(std::string(text));
    return it == ids_.end() ? unk_id() : it->second;
}

TokenId NgramModel::intern(const std::string& text) {
    auto [it, inserted] = ids_.try_emplace(text, static_cast<TokenId>(vocab_.size()));
    if (inserted) vocab_.push_back(text);
    return it->second;
}

void NgramModel::add_stream(std::span<const std::string> tokens) {
    std::vector<TokenId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(intern(t));
    const auto n = static_cast<std::size_t>(params_.order);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t k = 1; k <= n && k <= i + 1; ++k) {
            const std::span<const TokenId> ctx(ids.data() + (i + 1 - k), k - 1);
            auto& entry = tables_[k - 1][pack_context(ctx)];
            ++entry.total;
            ++entry.next[ids[i]];
        }
    }
}

std::uint64_t NgramModel::count(std::span<const TokenId> context, TokenId token) const {
    if (context.size() >= tables_.size()) return 0;
    const auto& table = tables_[context.size()];
    auto it = table.find(pack_context(context));
    if (it == table.end()) return 0;
    auto jt = it->second.next.find(token);
    return jt == it->second.next.end() ? 0 : jt->second;
}

std::uint64_t NgramModel::count(const std::vector<std::string>& context, std::string_view token) const {
    std::vector<TokenId> ids;
    for (const auto& c : context) ids.push_back(id_of(c));
    return count(ids, id_of(token));
}

double NgramModel::global_probability(std::span<const TokenId> context, TokenId token) const {
    const double w = params_.order_weight;
    double p = 1.0 / static_cast<double>(vocab_.size() + 1);
    const std::size_t max_order = std::min(tables_.size(), context.size() + 1);
    for (std::size_t k = 1; k <= max_order; ++k) {
        const auto ctx = truncate(context, k - 1);
        const auto& table = tables_[k - 1];
        auto it = table.find(pack_context(ctx));
        if (it == table.end() || it->second.total == 0) continue;
        std::uint64_t c = 0;
        if (auto jt = it->second.next.find(token); jt != it->second.next.end()) c = jt->second;
        p = w * (static_cast<double>(c) / static_cast<double>(it->second.total)) + (1.0 - w) * p;
    }
    return p;
}

double NgramModel::probability(std::span<const TokenId> context, TokenId token, const CacheState* cache) const {
    const double global = global_probability(context, token);
    if (cache == nullptr || params_.cache_lambda == 0.0) return global;
    double local = cache->ml_estimate(truncate(context, tables_.size() - 1), token);
    if (local < 0.0) local = global;
    return params_.cache_lambda * local + (1.0 - params_.cache_lambda) * global;
}

std::string NgramModel::to_json() const {
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& table : tables_) {
        // sorted for a stable file layout
        std::map<std::vector<TokenId>, const ContextCounts*> ordered;
        for (const auto& [key, counts] : table) ordered.emplace(unpack_context(key), &counts);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& [ctx, counts] : ordered) {
            std::map<TokenId, std::uint64_t> next(counts->next.begin(), counts->next.end());
            nlohmann::json pairs = nlohmann::json::array();
            for (const auto& [id, c] : next) pairs.push_back({id, c});
            rows.push_back({{"context", ctx}, {"next", std::move(pairs)}});
        }
        tables.push_back(std::move(rows));
    }
    nlohmann::json doc = {
        {"format", "hyloc-ngram"},
        {"version", kModelFormatVersion},
        {"n", params_.order},
        {"direction", to_string(direction_)},
        {"lambda", params_.cache_lambda},
        {"vocab_size", vocab_.size()},
        {"order_weight", params_.order_weight},
        {"cache_window", params_.cache_window},
        {"vocab", vocab_},
        {"tables", std::move(tables)},
    };
    return doc.dump();
}

NgramModel NgramModel::from_json(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format") != "hyloc-ngram") throw DataError("not an n-gram model file");
        if (doc.at("version").get<int>() != kModelFormatVersion)
            throw DataError("unsupported n-gram model version " + doc.at("version").dump());
        LmParams params;
        params.order = doc.at("n").get<int>();
        params.cache_lambda = doc.at("lambda").get<double>();
        params.order_weight = doc.at("order_weight").get<double>();
        params.cache_window = doc.at("cache_window").get<std::size_t>();
        NgramModel model(params, parse_direction(doc.at("direction").get<std::string>()));
        for (const auto& word : doc.at("vocab")) model.intern(word.get<std::string>());
        if (model.vocab_size() != doc.at("vocab_size").get<std::size_t>())
            throw DataError("vocabulary size mismatch in model header");
        const auto& tables = doc.at("tables");
        if (tables.size() != model.tables_.size()) throw DataError("table count does not match n");
        for (std::size_t k = 0; k < tables.size(); ++k) {
            for (const auto& row : tables[k]) {
                const auto ctx = row.at("context").get<std::vector<TokenId>>();
                if (ctx.size() != k) throw DataError("context length does not match its order");
                auto& entry = model.tables_[k][pack_context(ctx)];
                for (const auto& pair : row.at("next")) {
                    const auto id = pair.at(0).get<TokenId>();
                    const auto c = pair.at(1).get<std::uint64_t>();
                    if (id >= model.vocab_size() || c == 0) throw DataError("invalid count entry");
                    entry.next[id] = c;
                    entry.total += c;
                }
            }
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed n-gram model: ") + e.what());
    }
}

// ---- CacheState ----

CacheState::CacheState(int order, std::size_t window) : order_(std::max(order, 1)), window_(window) {}

void CacheState::reset() {
    history_.clear();
    events_.clear();
    counts_.clear();
}

void CacheState::push_history(TokenId token) {
    if (order_ <= 1) return;
    history_.push_back(token);
    if (history_.size() > static_cast<std::size_t>(order_ - 1)) history_.erase(history_.begin());
}

void CacheState::insert(std::span<const TokenId> context, TokenId token) {
    if (window_ == 0) return;
    std::string key = pack_context(truncate(context, static_cast<std::size_t>(order_ - 1)));
    auto& entry = counts_[key];
    ++entry.total;
    ++entry.next[token];
    events_.emplace_back(std::move(key), token);
    while (events_.size() > window_) {
        const auto& [old_key, old_token] = events_.front();
        auto it = counts_.find(old_key);
        if (--it->second.total == 0) {
            counts_.erase(it);
        } else if (--it->second.next[old_token] == 0) {
            it->second.next.erase(old_token);
        }
        events_.pop_front();
    }
}

double CacheState::ml_estimate(std::span<const TokenId> context, TokenId token) const {
    auto it = counts_.find(pack_context(truncate(context, static_cast<std::size_t>(order_ - 1))));
    if (it == counts_.end() || it->second.total == 0) return -1.0;
    auto jt = it->second.next.find(token);
    const double c = jt == it->second.next.end() ? 0.0 : static_cast<double>(jt->second);
    return c / static_cast<double>(it->second.total);
}

// ---- training ----

NgramModel train_ngram(const std::vector<LineRecord>& corpus, Direction direction, const LmParams& params) {
    if (corpus.empty()) throw DataError("cannot train a language model on an empty corpus");
    NgramModel model(params, direction);
    std::vector<std::string> file_order;
    std::unordered_map<std::string, std::vector<std::string>> streams;
    for (const auto& line : corpus) {
        auto [it, inserted] = streams.try_emplace(line.file);
        if (inserted) file_order.push_back(line.file);
        for (const auto& t : line.tokens) it->second.push_back(t.text);
    }
    for (const auto& file : file_order) {
        auto& stream = streams[file];
        if (direction == Direction::backward) std::reverse(stream.begin(), stream.end());
        model.add_stream(stream);
    }
    return model;
}

double token_probability(const NgramModel& model, const std::vector<std::string>& context, std::string_view token,
                         const CacheState* cache) {
    std::vector<TokenId> ids;
    ids.reserve(context.size());
    for (const auto& c : context) ids.push_back(model.id_of(c));
    return model.probability(ids, model.id_of(token), cache);
}

}  // namespace hyloc
