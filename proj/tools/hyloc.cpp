// hyloc: command-line driver for hybrid spectrum + naturalness bug localization.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyloc/code_model.hpp"
#include "hyloc/diff.hpp"
#include "hyloc/entropy.hpp"
#include "hyloc/evaluation.hpp"
#include "hyloc/features.hpp"
#include "hyloc/forest.hpp"
#include "hyloc/io.hpp"
#include "hyloc/ngram.hpp"
#include "hyloc/pipeline.hpp"
#include "hyloc/random.hpp"
#include "hyloc/ranker.hpp"
#include "hyloc/spectrum.hpp"
#include "hyloc/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hyloc;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string mode;
    std::vector<double> budgets;
    std::string out;
};

// Single-output commands print to stdout unless --out names a directory.
void emit(const Globals& g, const std::string& name, const std::string& contents) {
    if (g.out.empty()) {
        std::cout << contents;
        return;
    }
    io::write_file(fs::path(g.out) / name, contents);
}

std::vector<LineRecord> load_lines(const std::string& tokens, const std::string& sources, Language lang) {
    if (!tokens.empty()) return from_jsonl(io::read_file(tokens));
    if (!sources.empty()) return tokenize_tree(sources, lang);
    throw UsageError("either --tokens or --sources is required");
}

std::vector<LineKey> keys_of(const std::vector<LineRecord>& lines) {
    std::vector<LineKey> keys;
    keys.reserve(lines.size());
    for (const auto& l : lines)
        if (!l.tokens.empty()) keys.push_back(l.key());
    return keys;
}

std::vector<double> read_sample(const std::string& path) {
    std::istringstream in(io::read_file(path));
    std::vector<double> out;
    std::string word;
    while (in >> word) out.push_back(io::parse_double(word));
    return out;
}

json stat_json(const StatResult& r) {
    return {{"statistic", r.statistic}, {"p_value", r.p_value}, {"effect_size_d", r.effect_size_d},
            {"n1", r.n1},               {"n2", r.n2}};
}

std::vector<double> budgets_or_default(const Globals& g) {
    return g.budgets.empty() ? std::vector<double>{100.0, 20.0, 5.0} : g.budgets;
}

RunConfig load_config(const Globals& g) {
    if (g.config.empty()) throw UsageError("--config is required");
    auto c = RunConfig::load(g.config);
    if (g.seed) c.forest.master_seed = *g.seed;
    if (!g.mode.empty()) c.mode = parse_feature_mode(g.mode);
    if (!g.budgets.empty()) c.budgets = g.budgets;
    if (!g.out.empty()) c.output = g.out;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid spectrum + entropy line-level bug localization"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Run configuration (JSON)");
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--mode", g.mode, "Feature set: sbbl or hybrid")->check(CLI::IsMember({"sbbl", "hybrid", "sbbl_only", "sbbl_plus_entropy"}));
    app.add_option("--budget", g.budgets, "Inspection budget in percent (repeatable)");
    app.add_option("--out", g.out, "Output directory");

    std::string lang_text = "java_like";
    std::string tokens_path, sources_path;
    auto add_input = [&](CLI::App* sub) {
        sub->add_option("--lang", lang_text, "java_like or c_like");
        sub->add_option("--tokens", tokens_path, "Token dump (JSONL)");
        sub->add_option("--sources", sources_path, "Source root");
    };

    // tokenize
    auto* tok = app.add_subcommand("tokenize", "Tokenize a source file or tree into a JSONL token dump");
    std::string tok_input;
    tok->add_option("input", tok_input, "Source file or directory")->required();
    tok->add_option("--lang", lang_text, "java_like or c_like");

    // train-lm
    auto* tlm = app.add_subcommand("train-lm", "Train forward and backward cache n-gram models");
    add_input(tlm);
    LmParams lm;
    tlm->add_option("--order", lm.order);
    tlm->add_option("--lambda", lm.cache_lambda);
    tlm->add_option("--window", lm.cache_window);
    tlm->add_option("--order-weight", lm.order_weight);

    // entropy
    auto* ent = app.add_subcommand("entropy", "Per-line entropies and line-type z-scores");
    add_input(ent);
    std::string fwd_path, bwd_path;
    ent->add_option("--forward", fwd_path)->required();
    ent->add_option("--backward", bwd_path)->required();

    // spectra
    auto* spc = app.add_subcommand("spectra", "Build the spectra matrix with the 25 metrics");
    add_input(spc);
    std::string coverage_path, lcov_path, outcomes_path;
    bool textbook_rt = false;
    spc->add_option("--coverage", coverage_path, "Coverage traces (JSONL)");
    spc->add_option("--lcov", lcov_path, "LCOV tracefile");
    spc->add_option("--outcomes", outcomes_path, "Test outcomes for LCOV (JSON)");
    spc->add_flag("--textbook-rogers-tanimoto", textbook_rt);

    // features
    auto* fea = app.add_subcommand("features", "Join spectra metrics and entropy z-scores");
    std::string spectra_path, entropy_path;
    fea->add_option("--spectra", spectra_path)->required();
    fea->add_option("--entropy", entropy_path);
    fea->add_flag("--textbook-rogers-tanimoto", textbook_rt);

    // annotate
    auto* ann = app.add_subcommand("annotate", "Buggy lines from a buggy->fixed unified diff");
    std::string diff_path, bug_id;
    ann->add_option("diff", diff_path)->required();
    ann->add_option("--bug-id", bug_id);

    // train
    auto* trn = app.add_subcommand("train", "Train the random forest on labelled features");
    std::vector<std::string> feature_paths, annotation_paths;
    ForestParams fp;
    double ratio = 10.0;
    Relevance rel;
    trn->add_option("--features", feature_paths, "Features CSV (repeatable, paired with --annotation)")->required();
    trn->add_option("--annotation", annotation_paths, "Annotation JSON (repeatable)")->required();
    trn->add_option("--ratio", ratio, "Clean-to-buggy undersampling ratio");
    trn->add_option("--trees", fp.trees);
    trn->add_option("--max-depth", fp.max_depth);
    trn->add_option("--min-leaf", fp.min_leaf);
    trn->add_option("--subset", fp.feature_subset_size);
    trn->add_option("--threads", fp.threads);
    trn->add_option("--rb", rel.buggy);
    trn->add_option("--rg", rel.clean);

    // rank
    auto* rnk = app.add_subcommand("rank", "Score and rank lines with a trained forest");
    std::string model_path, rank_features;
    rnk->add_option("--model", model_path)->required();
    rnk->add_option("--features", rank_features)->required();
    rnk->add_option("--rb", rel.buggy);
    rnk->add_option("--rg", rel.clean);

    // eval
    auto* evl = app.add_subcommand("eval", "CE curve, AUCEC and gain for a ranking");
    std::string ranked_path, eval_annotation, baseline_path;
    evl->add_option("--ranked", ranked_path)->required();
    evl->add_option("--annotation", eval_annotation)->required();
    evl->add_option("--baseline", baseline_path, "Ranking to compute gains against");

    // stats
    auto* sts = app.add_subcommand("stats", "Welch t-test, Cohen's d and rank-sum test");
    std::string sample_a, sample_b, stats_spectra, stats_entropy, stats_annotation;
    sts->add_option("--sample-a", sample_a, "Whitespace-separated numbers");
    sts->add_option("--sample-b", sample_b);
    sts->add_option("--spectra", stats_spectra, "Spectra CSV for the per-group entropy comparison");
    sts->add_option("--entropy", stats_entropy);
    sts->add_option("--annotation", stats_annotation);

    // split
    auto* spl = app.add_subcommand("split", "Cross-project training versions for a target");
    std::string manifest_path, target;
    spl->add_option("--manifest", manifest_path)->required();
    spl->add_option("--target", target)->required();

    auto* run = app.add_subcommand("run", "End-to-end experiment from --config");
    auto* runx = app.add_subcommand("run-cross", "Cross-project experiment over every configured version");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        const Language lang = parse_language(lang_text);
        if (!g.mode.empty()) parse_feature_mode(g.mode);

        if (*tok) {
            std::vector<LineRecord> lines;
            if (fs::is_directory(tok_input)) {
                lines = tokenize_tree(tok_input, lang);
            } else {
                std::vector<Diagnostic> diags;
                lines = tokenize(io::read_file(tok_input), lang, fs::path(tok_input).filename().string(), &diags);
                for (const auto& d : diags) std::cerr << d.file << ':' << d.line_no << ": " << d.message << '\n';
            }
            emit(g, "tokens.jsonl", to_jsonl(lines));
        } else if (*tlm) {
            const auto lines = load_lines(tokens_path, sources_path, lang);
            const auto out = g.out.empty() ? fs::path(".") : fs::path(g.out);
            io::write_file(out / "lm_forward.json", train_ngram(lines, Direction::forward, lm).to_json());
            io::write_file(out / "lm_backward.json", train_ngram(lines, Direction::backward, lm).to_json());
        } else if (*ent) {
            const auto lines = load_lines(tokens_path, sources_path, lang);
            const auto fwd = NgramModel::from_json(io::read_file(fwd_path));
            const auto bwd = NgramModel::from_json(io::read_file(bwd_path));
            if (fwd.direction() != Direction::forward || bwd.direction() != Direction::backward)
                throw UsageError("--forward/--backward models have the wrong direction");
            std::vector<LineRecord> nonempty;
            for (const auto& l : lines)
                if (!l.tokens.empty()) nonempty.push_back(l);
            const auto entropies = corpus_entropies(fwd, bwd, nonempty);
            emit(g, "entropy.csv", entropy_csv(nonempty, entropies, EntropyNormalizer::fit(entropies, nonempty)));
        } else if (*spc) {
            const auto lines = load_lines(tokens_path, sources_path, lang);
            std::vector<TestTrace> traces;
            if (!coverage_path.empty())
                traces = parse_coverage_jsonl(io::read_file(coverage_path));
            else if (!lcov_path.empty() && !outcomes_path.empty())
                traces = traces_from_lcov(io::read_file(lcov_path), io::read_file(outcomes_path));
            else
                throw UsageError("either --coverage or --lcov with --outcomes is required");
            const auto result = ingest_coverage(traces, keys_of(lines));
            for (const auto& k : result.unknown)
                std::cerr << "warning: coverage for unknown line " << k.file << ':' << k.line_no << '\n';
            emit(g, "spectra.csv", spectra_csv(result.matrix, MetricOptions{textbook_rt}));
        } else if (*fea) {
            const FeatureMode mode = g.mode.empty() ? FeatureMode::sbbl_plus_entropy : parse_feature_mode(g.mode);
            const auto matrix = parse_spectra_csv(io::read_file(spectra_path));
            std::vector<EntropyFeatures> z;
            if (mode == FeatureMode::sbbl_plus_entropy) {
                if (entropy_path.empty()) throw UsageError("--entropy is required in hybrid mode");
                for (const auto& row : parse_entropy_csv(io::read_file(entropy_path)))
                    z.push_back({row.entropy.key(), row.z});
            }
            emit(g, "features.csv", features_csv(join_features(matrix, z, mode, MetricOptions{textbook_rt}), mode));
        } else if (*ann) {
            const auto a = annotate_from_diff(io::read_file(diff_path), bug_id);
            if (a.omission_only) std::cerr << "notice: omission-only bug, no buggy lines\n";
            emit(g, "annotation.json", annotation_json(a));
        } else if (*trn) {
            if (feature_paths.size() != annotation_paths.size())
                throw UsageError("--features and --annotation must be given the same number of times");
            std::vector<LabeledInstance> rows;
            std::optional<FeatureMode> mode;
            for (std::size_t i = 0; i < feature_paths.size(); ++i) {
                FeatureMode m{};
                auto part = parse_features_csv(io::read_file(feature_paths[i]), m);
                if (mode && *mode != m) throw DataError("feature files mix sbbl and hybrid layouts");
                mode = m;
                const auto a = parse_annotation_json(io::read_file(annotation_paths[i]));
                std::vector<LineKey> universe;
                for (const auto& r : part) universe.push_back(r.key);
                std::set<LineKey> buggy;
                for (const auto& k : a.buggy_lines)
                    if (std::find(universe.begin(), universe.end(), k) != universe.end()) buggy.insert(k);
                const auto labels = label_lines(universe, buggy, rel);
                for (std::size_t j = 0; j < part.size(); ++j) {
                    part[j].relevance = labels[j].relevance;
                    part[j].buggy = labels[j].buggy;
                }
                rows.insert(rows.end(), part.begin(), part.end());
            }
            fp.master_seed = g.seed.value_or(0);
            const auto sample = undersample(rows, ratio, derive_seed(fp.master_seed, kUndersampleStream));
            emit(g, "forest.json", train_forest(sample, fp, feature_names(*mode)).to_json());
        } else if (*rnk) {
            const auto model = ForestModel::from_json(io::read_file(model_path));
            FeatureMode mode{};
            const auto rows = parse_features_csv(io::read_file(rank_features), mode);
            if (feature_names(mode) != model.feature_names())
                throw DataError("feature layout does not match the model");
            std::vector<std::pair<LineKey, double>> scored;
            for (const auto& r : rows) scored.emplace_back(r.key, hybrid_suspiciousness(model, r.features, rel));
            auto top = model.ranked_importances();
            top.resize(std::min<std::size_t>(3, top.size()));
            emit(g, "ranked.csv", ranked_csv(rank_lines(std::move(scored)), top));
        } else if (*evl) {
            const auto ranking = parse_ranked_csv(io::read_file(ranked_path));
            const auto a = parse_annotation_json(io::read_file(eval_annotation));
            if (a.omission_only) throw DataError("omission-only bug cannot be evaluated");
            const auto curve = ce_curve(ranking, a.buggy_lines);
            json doc = {{"lines", curve.lines}, {"buggy", curve.buggy}};
            std::optional<CECurve> base;
            if (!baseline_path.empty()) base = ce_curve(parse_ranked_csv(io::read_file(baseline_path)), a.buggy_lines);
            for (double b : budgets_or_default(g)) {
                const auto key = io::format_double(b);
                doc["aucec"][key] = aucec(curve, b);
                if (base) {
                    const double sp = aucec(*base, b);
                    doc["baseline_aucec"][key] = sp;
                    doc["gain"][key] = sp > 0.0 ? json(gain(aucec(curve, b), sp)) : json(nullptr);
                }
            }
            emit(g, "aucec.json", doc.dump(2) + "\n");
            if (!g.out.empty()) {
                io::write_file(fs::path(g.out) / "ce.csv", ce_csv(curve));
                std::vector<std::pair<std::string, const CECurve*>> curves = {{"ranking", &curve}};
                if (base) curves.emplace_back("baseline", &*base);
                io::write_file(fs::path(g.out) / "ce.svg", ce_svg(curves, "CE curve"));
            }
        } else if (*sts) {
            if (!sample_a.empty() || !sample_b.empty()) {
                const auto a = read_sample(sample_a);
                const auto b = read_sample(sample_b);
                json doc = {{"welch_t", stat_json(welch_t_test(a, b))},
                            {"rank_sum", stat_json(rank_sum_test(a, b))},
                            {"cohens_d", cohens_d(a, b)},
                            {"label", cohen_label(cohens_d(a, b))}};
                emit(g, "stats.json", doc.dump(2) + "\n");
            } else {
                if (stats_spectra.empty() || stats_entropy.empty() || stats_annotation.empty())
                    throw UsageError("stats needs --sample-a/--sample-b or --spectra, --entropy and --annotation");
                const auto matrix = parse_spectra_csv(io::read_file(stats_spectra));
                std::vector<LineEntropy> entropies;
                for (const auto& row : parse_entropy_csv(io::read_file(stats_entropy))) entropies.push_back(row.entropy);
                const auto a = parse_annotation_json(io::read_file(stats_annotation));
                emit(g, "stats.json", entropy_group_stats(matrix, entropies, a.buggy_lines));
            }
        } else if (*spl) {
            const auto manifest = VersionManifest::from_json(io::read_file(manifest_path));
            emit(g, "split.json", json(cross_project_split(manifest, target)).dump(2) + "\n");
        } else if (*run) {
            const auto config = load_config(g);
            const auto report = run_experiment(config);
            write_bundle(report, config.output);
            for (const auto& n : report.notices) std::cerr << "notice: " << n << '\n';
            std::cout << report.files.at("aucec.json");
        } else if (*runx) {
            const auto config = load_config(g);
            const auto outcome = run_cross_project(config);
            for (const auto& s : outcome.skipped) std::cerr << "notice: " << s << '\n';
            json summary = json::object();
            for (const auto& [id, report] : outcome.reports) {
                write_bundle(report, config.output / id);
                summary[id] = json::parse(report.files.at("aucec.json"));
            }
            std::cout << summary.dump(2) << '\n';
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
