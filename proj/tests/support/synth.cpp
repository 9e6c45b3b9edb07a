#include "synth.hpp"

#include <random>
#include <set>

#include "json.hpp"

#include "hyloc/diff.hpp"
#include "hyloc/io.hpp"
#include "hyloc/random.hpp"
#include "hyloc/spectrum.hpp"

namespace hyloc::synth {
namespace {

namespace fs = std::filesystem;

enum class Block { fail_only, pass_only, both, uncovered };

struct GenLine {
    std::string text;
    int block = -1;  // method index, -1 outside methods
    bool statement = false;
};

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t index(std::uint64_t n) { return uniform_index(rng_, n); }
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    std::string var() { return "v" + std::to_string(index(12)); }
    std::string fn() { return "f" + std::to_string(index(8)); }
    std::string num() { return std::to_string(index(10)); }

    std::string statement() {
        switch (index(9)) {
            case 0: return "int " + var() + " = " + var() + " + " + var() + ";";
            case 1: return var() + " = " + var() + " * " + num() + ";";
            case 2: return var() + " += " + var() + ";";
            case 3: return fn() + "(" + var() + ", " + var() + ");";
            case 4: return "if (" + var() + " > " + var() + ") " + var() + " = " + var() + ";";
            case 5: return "int " + var() + " = " + fn() + "(" + var() + ");";
            case 6: return "for (int i = 0; i < " + var() + "; i++) " + var() + " += i;";
            case 7: return "while (" + var() + " > " + num() + ") " + var() + " = " + var() + " - " + var() + ";";
            default: return "this.count = " + var() + ";";
        }
    }

    std::string rare_name(char prefix) {
        static constexpr char kHex[] = "0123456789abcdef";
        std::string s(1, prefix);
        for (int i = 0; i < 6; ++i) s += kHex[index(16)];
        return s;
    }

    std::string planted() {
        static constexpr const char* kOps[] = {"^", ">>>", "%", "<<"};
        const std::string a = rare_name('q');
        const std::string b = rare_name('z');
        const std::string op1 = kOps[index(4)];
        const std::string op2 = kOps[index(4)];
        if (index(2) == 0) return "int " + var() + " = " + a + " " + op1 + " " + b + " " + op2 + " " + num() + ";";
        return var() + " = " + a + "." + b + " " + op1 + " " + rare_name('k') + ";";
    }

private:
    std::mt19937_64 rng_;
};

Block draw_block(Gen& g, const Options& o) {
    const double u = g.unit();
    if (u < o.fail_only_share) return Block::fail_only;
    if (u < o.fail_only_share + o.pass_only_share) return Block::pass_only;
    if (u < o.fail_only_share + o.pass_only_share + o.both_share) return Block::both;
    return Block::uncovered;
}

std::vector<int> passing_subset(Gen& g, int passing) {
    std::vector<int> out;
    for (int t = 0; t < passing; ++t)
        if (g.index(2) == 0) out.push_back(t);
    if (out.empty()) out.push_back(static_cast<int>(g.index(static_cast<std::uint64_t>(passing))));
    return out;
}

template <class T>
std::vector<T> sample(Gen& g, std::vector<T> pool, std::size_t k) {
    k = std::min(k, pool.size());
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + g.index(pool.size() - i)]);
    pool.resize(k);
    return pool;
}

void write_version(const fs::path& root, const std::string& id, const Options& o, std::uint64_t seed) {
    Gen g(seed);
    std::vector<TestTrace> tests;
    for (int t = 0; t < o.failing_tests; ++t) tests.push_back({"fail" + std::to_string(t), Outcome::fail, {}});
    for (int t = 0; t < o.passing_tests; ++t) tests.push_back({"pass" + std::to_string(t), Outcome::pass, {}});

    struct FileLines {
        std::string name;
        std::vector<GenLine> lines;
    };
    std::vector<FileLines> files;
    std::vector<Block> blocks;
    std::vector<std::vector<int>> block_passers;
    for (int f = 0; f < o.files; ++f) {
        FileLines file{"synth/C" + std::to_string(f) + ".java", {}};
        file.lines.push_back({"package synth;", -1, false});
        file.lines.push_back({"public class C" + std::to_string(f) + " {", -1, false});
        for (int m = 0; m < o.methods_per_file; ++m) {
            const int block = static_cast<int>(blocks.size());
            blocks.push_back(draw_block(g, o));
            block_passers.push_back(passing_subset(g, o.passing_tests));
            file.lines.push_back({"    public int m" + std::to_string(m) + "(int a, int b) {", block, false});
            for (int s = 0; s < o.statements_per_method; ++s) file.lines.push_back({"        " + g.statement(), block, true});
            file.lines.push_back({"        return " + g.var() + ";", block, false});
            file.lines.push_back({"    }", block, false});
        }
        file.lines.push_back({"}", -1, false});
        files.push_back(std::move(file));
    }

    std::vector<std::pair<std::size_t, std::size_t>> planted_pool;
    std::vector<std::pair<std::size_t, std::size_t>> random_pool;
    for (std::size_t f = 0; f < files.size(); ++f) {
        for (std::size_t i = 0; i < files[f].lines.size(); ++i) {
            const auto& l = files[f].lines[i];
            if (l.block < 0) continue;
            const Block b = blocks[static_cast<std::size_t>(l.block)];
            if (b == Block::fail_only && l.statement) planted_pool.emplace_back(f, i);
            if (b == Block::pass_only) random_pool.emplace_back(f, i);
        }
    }
    BugAnnotation annotation;
    annotation.bug_id = id;
    for (auto [f, i] : sample(g, planted_pool, static_cast<std::size_t>(o.planted_per_version))) {
        files[f].lines[i].text = "        " + g.planted();
        annotation.buggy_lines.insert({files[f].name, static_cast<int>(i) + 1});
    }
    for (auto [f, i] : sample(g, random_pool, static_cast<std::size_t>(o.random_per_version)))
        annotation.buggy_lines.insert({files[f].name, static_cast<int>(i) + 1});
    annotation.omission_only = annotation.buggy_lines.empty();

    for (const auto& file : files) {
        std::string text;
        for (std::size_t i = 0; i < file.lines.size(); ++i) {
            text += file.lines[i].text;
            text += '\n';
            const int block = file.lines[i].block;
            if (block < 0) continue;
            const LineKey key{file.name, static_cast<int>(i) + 1};
            const Block b = blocks[static_cast<std::size_t>(block)];
            if (b == Block::fail_only || b == Block::both)
                for (int t = 0; t < o.failing_tests; ++t) tests[static_cast<std::size_t>(t)].covered.push_back(key);
            if (b == Block::pass_only || b == Block::both)
                for (int t : block_passers[static_cast<std::size_t>(block)])
                    tests[static_cast<std::size_t>(o.failing_tests + t)].covered.push_back(key);
        }
        io::write_file(root / "sources" / id / file.name, text);
    }
    io::write_file(root / "coverage" / (id + ".jsonl"), coverage_to_jsonl(tests));
    io::write_file(root / "annotations" / (id + ".json"), annotation_json(annotation));
}

}  // namespace

Project write_project(const fs::path& root, const Options& options) {
    Project p;
    p.root = root;
    nlohmann::json versions = nlohmann::json::array();
    nlohmann::json train = nlohmann::json::array();
    nlohmann::json test = nlohmann::json::array();
    for (int v = 0; v < options.versions; ++v) {
        const std::string id = options.project + "-v" + std::to_string(v + 1);
        write_version(root, id, options, derive_seed(options.seed, static_cast<std::uint64_t>(v)));
        p.version_ids.push_back(id);
        versions.push_back({{"id", id},
                            {"project", options.project},
                            {"timestamp", std::to_string(options.first_year + v) + "-01-01"},
                            {"sources", "sources/" + id},
                            {"coverage", "coverage/" + id + ".jsonl"},
                            {"annotation", "annotations/" + id + ".json"}});
        (v < options.train_versions ? train : test).push_back(id);
    }
    const nlohmann::json config = {{"language", "java_like"},
                                   {"seed", 0},
                                   {"mode", "hybrid"},
                                   {"baseline", true},
                                   {"budgets", {100, 20, 5}},
                                   {"output", "out"},
                                   {"forest", {{"trees", 100}}},
                                   {"versions", versions},
                                   {"train", train},
                                   {"test", test}};
    p.config_path = root / "config.json";
    io::write_file(p.config_path, config.dump(2) + "\n");
    p.config = RunConfig::load(p.config_path);
    return p;
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hyloc-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace hyloc::synth
