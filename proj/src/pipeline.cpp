#include "hyloc/pipeline.hpp"

#include <algorithm>
#include <unordered_set>

#include "json.hpp"

#include "hyloc/io.hpp"
#include "hyloc/random.hpp"
#include "hyloc/stats.hpp"

namespace hyloc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <class F>
auto in_stage(std::string_view name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const UsageError&) {
        throw;
    } catch (const DataError& e) {
        throw StageError(std::string(name), e.what());
    } catch (const json::exception& e) {
        throw StageError(std::string(name), e.what());
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::string budget_key(double b) { return io::format_double(b); }

std::vector<TestTrace> load_traces(const VersionSpec& v) {
    if (!v.coverage.empty()) return parse_coverage_jsonl(io::read_file(v.coverage));
    if (!v.lcov.empty()) {
        if (v.outcomes.empty()) throw DataError("version '" + v.id + "': lcov coverage needs an outcomes file");
        return traces_from_lcov(io::read_file(v.lcov), io::read_file(v.outcomes));
    }
    throw DataError("version '" + v.id + "' has no coverage");
}

BugAnnotation load_annotation(const VersionSpec& v) {
    if (!v.diff.empty()) return annotate_from_diff(io::read_file(v.diff), v.id);
    if (!v.annotation.empty()) {
        auto a = parse_annotation_json(io::read_file(v.annotation));
        if (a.bug_id.empty()) a.bug_id = v.id;
        return a;
    }
    throw DataError("version '" + v.id + "' has neither a diff nor an annotation");
}

SpectraMatrix covered_only(const SpectraMatrix& m) {
    std::vector<LineKey> lines;
    std::vector<Counters> counters;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& c = m.counters(i);
        if (c.e_p + c.e_f == 0) continue;
        lines.push_back(m.lines()[i]);
        counters.push_back(c);
    }
    return SpectraMatrix(m.passed(), m.failed(), std::move(lines), std::move(counters));
}

std::vector<LabeledInstance> labeled_rows(const VersionData& v, FeatureMode mode, const RunConfig& config) {
    auto rows = join_features(v.matrix, v.entropy_features, mode, config.metrics);
    const auto labels = label_lines(v.matrix.lines(), v.buggy, config.relevance);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].relevance = labels[i].relevance;
        rows[i].buggy = labels[i].buggy;
    }
    return rows;
}

bool evaluable(const VersionData& v) { return !v.annotation.omission_only && !v.buggy.empty(); }

json aucec_object(const std::map<double, double>& areas) {
    json o = json::object();
    for (const auto& [b, a] : areas) o[budget_key(b)] = a;
    return o;
}

json importance_array(const std::vector<std::pair<std::string, double>>& ranked) {
    json a = json::array();
    for (const auto& [name, value] : ranked) a.push_back({{"feature", name}, {"importance", value}});
    return a;
}

std::vector<std::pair<std::string, double>> top3(const ModeResult& r) {
    std::vector<std::pair<std::string, double>> out(r.importances.begin(),
                                                     r.importances.begin() + std::min<std::size_t>(3, r.importances.size()));
    return out;
}

}  // namespace

std::vector<LineRecord> tokenize_tree(const std::filesystem::path& root, Language lang) {
    if (!fs::is_directory(root)) throw DataError("source directory not found: " + root.string());
    const auto files = io::list_sources(root, lang);
    if (files.empty()) throw DataError("no source files under " + root.string());
    std::vector<LineRecord> out;
    for (const auto& file : files) {
        const auto rel = fs::relative(file, root).generic_string();
        for (auto& line : tokenize(io::read_file(file), lang, rel))
            if (!line.tokens.empty()) out.push_back(std::move(line));
    }
    return out;
}

// ---- config ----

void RunConfig::validate() const {
    lm.validate();
    forest.validate();
    relevance.validate();
    if (!(undersample_ratio > 0.0)) throw UsageError("undersample_ratio must be > 0");
    if (budgets.empty()) throw UsageError("at least one inspection budget is required");
    for (double b : budgets)
        if (!(b > 0.0 && b <= 100.0)) throw UsageError("inspection budget must lie in (0, 100]");
    std::unordered_set<std::string> ids;
    for (const auto& v : versions) {
        if (v.id.empty()) throw UsageError("every version needs an id");
        if (!ids.insert(v.id).second) throw UsageError("duplicate version id '" + v.id + "'");
    }
    for (const auto* list : {&train, &test})
        for (const auto& id : *list)
            if (!ids.contains(id)) throw UsageError("unknown version id '" + id + "'");
}

const VersionSpec& RunConfig::version(std::string_view id) const {
    for (const auto& v : versions)
        if (v.id == id) return v;
    throw UsageError("unknown version id '" + std::string(id) + "'");
}

RunConfig RunConfig::from_json(std::string_view text, const fs::path& base_dir) {
    RunConfig c;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        if (doc.contains("language")) c.language = parse_language(doc["language"].get<std::string>());
        if (doc.contains("seed")) c.forest.master_seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("mode")) c.mode = parse_feature_mode(doc["mode"].get<std::string>());
        c.baseline = doc.value("baseline", c.baseline);
        c.exclude_uncovered = doc.value("exclude_uncovered", c.exclude_uncovered);
        c.undersample_ratio = doc.value("undersample_ratio", c.undersample_ratio);
        if (doc.contains("budgets")) c.budgets = doc["budgets"].get<std::vector<double>>();
        if (doc.contains("relevance")) {
            c.relevance.buggy = doc["relevance"].value("buggy", c.relevance.buggy);
            c.relevance.clean = doc["relevance"].value("clean", c.relevance.clean);
        }
        if (doc.contains("rogers_tanimoto")) {
            const auto rt = doc["rogers_tanimoto"].get<std::string>();
            if (rt != "table" && rt != "textbook") throw UsageError("rogers_tanimoto must be 'table' or 'textbook'");
            c.metrics.textbook_rogers_tanimoto = rt == "textbook";
        }
        if (doc.contains("lm")) {
            const auto& lm = doc["lm"];
            c.lm.order = lm.value("order", c.lm.order);
            c.lm.cache_lambda = lm.value("lambda", c.lm.cache_lambda);
            c.lm.cache_window = lm.value("cache_window", c.lm.cache_window);
            c.lm.order_weight = lm.value("order_weight", c.lm.order_weight);
            if (lm.contains("corpus"))
                for (const auto& p : lm["corpus"]) c.lm_corpus.push_back(resolve(base_dir, p.get<std::string>()));
        }
        if (doc.contains("forest")) {
            const auto& f = doc["forest"];
            c.forest.trees = f.value("trees", c.forest.trees);
            c.forest.max_depth = f.value("max_depth", c.forest.max_depth);
            c.forest.min_leaf = f.value("min_leaf", c.forest.min_leaf);
            c.forest.feature_subset_size = f.value("feature_subset_size", c.forest.feature_subset_size);
            c.forest.threads = f.value("threads", c.forest.threads);
        }
        if (doc.contains("output")) c.output = resolve(base_dir, doc["output"].get<std::string>());
        for (const auto& v : doc.value("versions", json::array())) {
            VersionSpec s;
            s.id = v.at("id").get<std::string>();
            s.project = v.value("project", std::string());
            s.timestamp = v.value("timestamp", std::string());
            if (v.contains("language")) s.language = parse_language(v["language"].get<std::string>());
            s.sources = resolve(base_dir, v.at("sources").get<std::string>());
            s.coverage = resolve(base_dir, v.value("coverage", std::string()));
            s.lcov = resolve(base_dir, v.value("lcov", std::string()));
            s.outcomes = resolve(base_dir, v.value("outcomes", std::string()));
            s.diff = resolve(base_dir, v.value("diff", std::string()));
            s.annotation = resolve(base_dir, v.value("annotation", std::string()));
            c.versions.push_back(std::move(s));
        }
        if (doc.contains("train")) c.train = doc["train"].get<std::vector<std::string>>();
        if (doc.contains("test")) c.test = doc["test"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("invalid config: ") + e.what());
    } catch (const DataError& e) {
        throw UsageError(std::string("invalid config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const fs::path& path) {
    if (!fs::exists(path)) throw UsageError("config not found: " + path.string());
    return from_json(io::read_file(path), path.parent_path());
}

// ---- stages ----

PreparedExperiment prepare_experiment(const RunConfig& config) {
    config.validate();
    if (config.train.empty() || config.test.empty()) throw UsageError("config needs non-empty train and test lists");
    PreparedExperiment p;
    p.config = config;

    std::vector<std::string> ids = config.train;
    for (const auto& id : config.test)
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);

    in_stage("tokenize", [&] {
        for (const auto& id : ids) {
            const auto& spec = config.version(id);
            auto& v = p.versions[id];
            v.id = id;
            v.lines = tokenize_tree(spec.sources, config.language_of(spec));
        }
    });

    // Training versions are scored by models that never saw them; test
    // versions by the model trained on every training version.
    std::map<std::string, std::pair<NgramModel, NgramModel>> held_out;
    in_stage("lm", [&] {
        auto prefixed = [](std::vector<LineRecord> lines, const std::string& prefix) {
            // keep files of different versions apart
            for (auto& line : lines) line.file = prefix + "/" + line.file;
            return lines;
        };
        std::vector<LineRecord> corpus;
        if (config.lm_corpus.empty()) {
            for (const auto& id : config.train) {
                auto lines = prefixed(p.versions.at(id).lines, id);
                corpus.insert(corpus.end(), lines.begin(), lines.end());
            }
        } else {
            for (const auto& root : config.lm_corpus) {
                auto lines = prefixed(tokenize_tree(root, config.language), root.generic_string());
                corpus.insert(corpus.end(), lines.begin(), lines.end());
            }
        }
        p.forward = train_ngram(corpus, Direction::forward, config.lm);
        p.backward = train_ngram(corpus, Direction::backward, config.lm);
        if (!config.lm_corpus.empty()) return;
        if (config.train.size() < 2) {
            p.notices.push_back("lm: a single training version is scored by a model trained on itself");
            return;
        }
        for (const auto& id : config.train) {
            std::vector<LineRecord> rest;
            for (const auto& other : config.train) {
                if (other == id) continue;
                auto lines = prefixed(p.versions.at(other).lines, other);
                rest.insert(rest.end(), lines.begin(), lines.end());
            }
            held_out.emplace(id, std::pair{train_ngram(rest, Direction::forward, config.lm),
                                           train_ngram(rest, Direction::backward, config.lm)});
        }
    });

    in_stage("entropy", [&] {
        std::vector<LineEntropy> fit_entropies;
        std::vector<LineRecord> fit_lines;
        for (auto& [id, v] : p.versions) {
            auto it = held_out.find(id);
            v.entropies = it == held_out.end() ? corpus_entropies(p.forward, p.backward, v.lines)
                                               : corpus_entropies(it->second.first, it->second.second, v.lines);
            if (std::find(config.train.begin(), config.train.end(), id) != config.train.end()) {
                fit_entropies.insert(fit_entropies.end(), v.entropies.begin(), v.entropies.end());
                fit_lines.insert(fit_lines.end(), v.lines.begin(), v.lines.end());
            }
        }
        p.normalizer = EntropyNormalizer::fit(fit_entropies, fit_lines);
        for (auto& [id, v] : p.versions) {
            v.entropy_features.reserve(v.lines.size());
            for (std::size_t i = 0; i < v.lines.size(); ++i)
                v.entropy_features.push_back({v.lines[i].key(), p.normalizer.normalize(v.entropies[i], v.lines[i].line_type)});
        }
    });

    in_stage("spectrum", [&] {
        for (auto& [id, v] : p.versions) {
            std::vector<LineKey> universe;
            universe.reserve(v.lines.size());
            for (const auto& l : v.lines) universe.push_back(l.key());
            auto ingested = ingest_coverage(load_traces(config.version(id)), universe);
            if (!ingested.unknown.empty())
                p.notices.push_back(id + ": " + std::to_string(ingested.unknown.size()) +
                                    " covered lines without tokens ignored");
            v.matrix = config.exclude_uncovered ? covered_only(ingested.matrix) : std::move(ingested.matrix);
        }
    });

    in_stage("annotate", [&] {
        for (auto& [id, v] : p.versions) {
            v.annotation = load_annotation(config.version(id));
            if (v.annotation.omission_only) {
                p.notices.push_back(id + ": omission-only bug excluded");
                continue;
            }
            std::size_t outside = 0;
            for (const auto& key : v.annotation.buggy_lines) {
                if (v.matrix.find(key))
                    v.buggy.insert(key);
                else
                    ++outside;
            }
            if (outside > 0)
                p.notices.push_back(id + ": " + std::to_string(outside) + " buggy lines outside the ranked universe");
            if (v.buggy.empty()) p.notices.push_back(id + ": no rankable buggy lines, excluded");
        }
    });
    return p;
}

ModeResult evaluate_mode(const PreparedExperiment& prepared, FeatureMode mode, std::uint64_t seed) {
    const auto& config = prepared.config;
    ModeResult result;
    result.mode = mode;

    const auto model = in_stage("train", [&] {
        std::vector<LabeledInstance> rows;
        for (const auto& id : config.train) {
            const auto& v = prepared.versions.at(id);
            if (!evaluable(v)) continue;
            auto r = labeled_rows(v, mode, config);
            rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
        }
        const auto sample = undersample(rows, config.undersample_ratio, derive_seed(seed, kUndersampleStream));
        auto params = config.forest;
        params.master_seed = seed;
        return train_forest(sample, params, feature_names(mode));
    });
    result.importances = model.ranked_importances();

    in_stage("rank", [&] {
        for (const auto& id : config.test) {
            const auto& v = prepared.versions.at(id);
            if (!evaluable(v)) continue;
            const auto rows = join_features(v.matrix, v.entropy_features, mode, config.metrics);
            std::vector<std::pair<LineKey, double>> scored;
            scored.reserve(rows.size());
            for (const auto& row : rows)
                scored.emplace_back(row.key, hybrid_suspiciousness(model, row.features, config.relevance));
            VersionResult vr;
            vr.id = id;
            vr.ranking = rank_lines(std::move(scored));
            result.versions.push_back(std::move(vr));
        }
        if (result.versions.empty()) throw DataError("no test version with rankable buggy lines");
    });

    in_stage("evaluate", [&] {
        for (auto& vr : result.versions) {
            vr.curve = ce_curve(vr.ranking, prepared.versions.at(vr.id).buggy);
            for (double b : config.budgets) vr.aucec[b] = aucec(vr.curve, b);
        }
    });
    return result;
}

RunReport run_prepared(const PreparedExperiment& prepared) {
    const auto& config = prepared.config;
    RunReport report;
    report.notices = prepared.notices;
    const std::uint64_t seed = config.forest.master_seed;
    report.primary = evaluate_mode(prepared, config.mode, seed);
    if (config.baseline && config.mode == FeatureMode::sbbl_plus_entropy)
        report.baseline = evaluate_mode(prepared, FeatureMode::sbbl_only, seed);

    auto& files = report.files;
    const auto tag = [](FeatureMode m) { return m == FeatureMode::sbbl_only ? std::string("sbbl") : std::string("hybrid"); };

    json aucec_doc = {{"mode", to_string(config.mode)}, {"seed", seed}, {"budgets", config.budgets}};
    json version_list = json::array();
    std::map<double, std::vector<std::pair<double, double>>> gain_pairs;
    for (std::size_t i = 0; i < report.primary.versions.size(); ++i) {
        const auto& vr = report.primary.versions[i];
        const auto& data = prepared.versions.at(vr.id);
        json entry = {{"id", vr.id},
                      {"lines", vr.curve.lines},
                      {"buggy", vr.curve.buggy},
                      {tag(config.mode), aucec_object(vr.aucec)}};

        files["ranked_" + vr.id + "." + tag(config.mode) + ".csv"] = ranked_csv(vr.ranking, top3(report.primary));
        files["ce_" + vr.id + "." + tag(config.mode) + ".csv"] = ce_csv(vr.curve);
        std::vector<std::pair<std::string, const CECurve*>> curves = {{tag(config.mode), &vr.curve}};

        if (report.baseline) {
            const auto& base = report.baseline->versions[i];
            entry["sbbl"] = aucec_object(base.aucec);
            json gains = json::object();
            for (double b : config.budgets) {
                const double sp = base.aucec.at(b);
                const double en = vr.aucec.at(b);
                gains[budget_key(b)] = sp > 0.0 ? json(gain(en, sp)) : json(nullptr);
                gain_pairs[b].emplace_back(en, sp);
            }
            entry["gain"] = std::move(gains);
            files["ranked_" + vr.id + ".sbbl.csv"] = ranked_csv(base.ranking, top3(*report.baseline));
            files["ce_" + vr.id + ".sbbl.csv"] = ce_csv(base.curve);
            curves.emplace_back("sbbl", &base.curve);
        }
        files["ce_" + vr.id + ".svg"] = ce_svg(curves, "CE curve " + vr.id);
        files["spectra_" + vr.id + ".csv"] = spectra_csv(data.matrix, config.metrics);
        files["entropy_" + vr.id + ".csv"] = entropy_csv(data.lines, data.entropies, prepared.normalizer);
        files["entropy_stats_" + vr.id + ".json"] = entropy_group_stats(data.matrix, data.entropies, data.buggy);
        version_list.push_back(std::move(entry));
    }
    aucec_doc["versions"] = std::move(version_list);
    if (report.baseline) {
        json overall = json::object();
        for (const auto& [b, pairs] : gain_pairs) {
            double base_sum = 0.0;
            for (const auto& pr : pairs) base_sum += pr.second;
            overall[budget_key(b)] = base_sum > 0.0 ? json(overall_gain(pairs)) : json(nullptr);
        }
        aucec_doc["overall_gain"] = std::move(overall);
    }
    files["aucec.json"] = aucec_doc.dump(2) + "\n";

    json importance = {{tag(config.mode), importance_array(report.primary.importances)}};
    if (report.baseline) importance["sbbl"] = importance_array(report.baseline->importances);
    files["feature_importance.json"] = importance.dump(2) + "\n";

    if (!report.notices.empty()) {
        std::string text;
        for (const auto& n : report.notices) text += n + '\n';
        files["notices.txt"] = std::move(text);
    }
    return report;
}

std::string entropy_group_stats(const SpectraMatrix& matrix, const std::vector<LineEntropy>& entropies,
                                const std::set<LineKey>& buggy) {
    std::map<SpectraGroup, std::pair<std::vector<double>, std::vector<double>>> groups;
    std::unordered_map<LineKey, double, LineKeyHash> avg;
    for (const auto& e : entropies) avg.emplace(e.key(), e.average);
    const auto membership = group_by_spectra(matrix);
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        const auto& key = matrix.lines()[i];
        auto it = avg.find(key);
        if (it == avg.end()) throw DataError("no entropy for " + key.file + ":" + std::to_string(key.line_no));
        auto& [in_bug, clean] = groups[membership[i]];
        (buggy.contains(key) ? in_bug : clean).push_back(it->second);
    }
    std::vector<GroupComparison> rows;
    for (const auto& [group, samples] : groups) {
        if (samples.first.size() < 2 || samples.second.size() < 2) continue;
        rows.push_back(compare_groups(std::string(to_string(group)), samples.first, samples.second));
    }
    return comparison_json(rows);
}

RunReport run_experiment(const RunConfig& config) { return run_prepared(prepare_experiment(config)); }

void write_bundle(const RunReport& report, const fs::path& out_dir) {
    for (const auto& [name, contents] : report.files) io::write_file(out_dir / name, contents);
}

VersionManifest manifest_of(const RunConfig& config) {
    std::vector<VersionEntry> entries;
    for (const auto& v : config.versions) {
        if (v.project.empty() || v.timestamp.empty())
            throw UsageError("version '" + v.id + "' needs project and timestamp for cross-project runs");
        entries.push_back({v.project, v.id, config.language_of(v), v.timestamp});
    }
    return VersionManifest(std::move(entries));
}

CrossProjectOutcome run_cross_project(const RunConfig& config) {
    const auto manifest = manifest_of(config);
    CrossProjectOutcome out;
    for (const auto& entry : manifest.entries()) {
        std::vector<std::string> train;
        try {
            train = cross_project_split(manifest, entry.version_id);
        } catch (const DataError& e) {
            out.skipped.push_back(entry.version_id + ": skipped, " + e.what());
            continue;
        }
        RunConfig c = config;
        c.train = std::move(train);
        c.test = {entry.version_id};
        c.output = config.output / entry.version_id;
        c.language = entry.language;
        out.reports.emplace(entry.version_id, run_experiment(c));
    }
    return out;
}

}  // namespace hyloc
