#include "doctest.h"

#include <cmath>
#include <random>

#include "json.hpp"

#include "hyloc/evaluation.hpp"
#include "hyloc/stats.hpp"

using namespace hyloc;

namespace {

RankedReport ranking(int n) {
    std::vector<std::pair<LineKey, double>> scored;
    for (int i = 1; i <= n; ++i) scored.push_back({{"F", i}, static_cast<double>(n - i)});
    return rank_lines(scored);
}

std::set<LineKey> lines(std::initializer_list<int> ids) {
    std::set<LineKey> out;
    for (int i : ids) out.insert({"F", i});
    return out;
}

double area(int n, const std::set<LineKey>& buggy, double budget = 100.0) {
    return aucec(ce_curve(ranking(n), buggy), budget);
}

VersionEntry entry(std::string project, std::string id, Language lang, std::string ts) {
    return {std::move(project), std::move(id), lang, std::move(ts)};
}

}  // namespace

TEST_CASE("CE curve examples") {
    auto first = ce_curve(ranking(4), lines({1}));
    REQUIRE(first.points.size() == 5);
    const double xs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const double ys[] = {0.0, 1.0, 1.0, 1.0, 1.0};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(first.points[i].inspected == xs[i]);
        CHECK(first.points[i].bugs_found == ys[i]);
    }
    auto last = ce_curve(ranking(4), lines({4}));
    for (std::size_t i = 0; i < 4; ++i) CHECK(last.points[i].bugs_found == 0.0);
    CHECK(last.points[4].bugs_found == 1.0);

    auto all = ce_curve(ranking(5), lines({1, 2, 3, 4, 5}));
    for (const auto& p : all.points) CHECK(p.bugs_found == doctest::Approx(p.inspected));

    CHECK_THROWS_WITH_AS(ce_curve(ranking(3), {}), "no buggy lines to evaluate", DataError);
    CHECK_THROWS_AS(ce_curve(ranking(3), lines({9})), DataError);
}

TEST_CASE("AUCEC examples") {
    CHECK(area(10, lines({1})) == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(area(10, lines({1, 2})) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(area(4, lines({1, 2, 3, 4})) == doctest::Approx(0.5));
    // budget window [0, 0.2] with the single bug found at x = 0.1
    CHECK(area(10, lines({1}), 20.0) == doctest::Approx(0.05 + 0.1));
    CHECK(aucec(ce_curve(ranking(10), lines({1})), 20.0, true) == doctest::Approx(0.75));
    // clip point between two samples
    CHECK(area(4, lines({4}), 90.0) == doctest::Approx(0.5 * 0.15 * 0.6));
    CHECK_THROWS_AS(area(4, lines({1}), 0.0), UsageError);
    CHECK_THROWS_AS(area(4, lines({1}), 120.0), UsageError);
}

TEST_CASE("AUCEC lies between the worst and the optimal ranking") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 40);
        const int b = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        std::set<LineKey> buggy;
        while (static_cast<int>(buggy.size()) < b) buggy.insert({"F", 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n))});
        auto c = ce_curve(ranking(n), buggy);
        for (std::size_t i = 1; i < c.points.size(); ++i) {
            CHECK(c.points[i].inspected >= c.points[i - 1].inspected);
            CHECK(c.points[i].bugs_found >= c.points[i - 1].bugs_found);
        }
        CHECK(c.points.back().inspected == 1.0);
        CHECK(c.points.back().bugs_found == 1.0);
        const double a = aucec(c, 100.0);
        const double half = static_cast<double>(b) / (2.0 * n);
        CHECK(a >= half - 1e-12);
        CHECK(a <= 1.0 - half + 1e-12);
    }
}

TEST_CASE("moving a buggy line up never lowers AUCEC") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 30);
        std::set<LineKey> buggy;
        for (int i = 1; i <= n; ++i)
            if (rng() % 3 == 0) buggy.insert({"F", i});
        if (buggy.empty()) buggy.insert({"F", n});
        // find a buggy line with a clean line above it and swap them
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
        const int pos = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        if (!buggy.contains({"F", order[static_cast<std::size_t>(pos)]})) continue;
        int up = pos - 1;
        while (up >= 0 && buggy.contains({"F", order[static_cast<std::size_t>(up)]})) --up;
        if (up < 0) continue;
        auto before = ce_curve(ranking(n), buggy);
        std::vector<std::pair<LineKey, double>> scored;
        auto swapped = order;
        std::swap(swapped[static_cast<std::size_t>(pos)], swapped[static_cast<std::size_t>(up)]);
        for (int i = 0; i < n; ++i) scored.push_back({{"F", swapped[static_cast<std::size_t>(i)]}, static_cast<double>(n - i)});
        auto after = ce_curve(rank_lines(scored), buggy);
        for (double budget : {100.0, 50.0, 20.0, 5.0}) CHECK(aucec(after, budget) >= aucec(before, budget) - 1e-12);
    }
}

TEST_CASE("gain arithmetic") {
    CHECK(gain(0.956, 0.908) == doctest::Approx(5.2863).epsilon(1e-4));
    CHECK(gain(0.5, 0.5) == 0.0);
    CHECK(gain(0.6, 0.5) == doctest::Approx(20.0));
    CHECK_THROWS_AS(gain(0.5, 0.0), DataError);
    CHECK(overall_gain({{0.6, 0.5}}) == doctest::Approx(gain(0.6, 0.5)));
    CHECK(overall_gain({{1.0, 0.5}, {0.5, 0.5}}) == doctest::Approx(50.0));
    CHECK(overall_gain({{0.3, 0.3}, {0.7, 0.7}}) == 0.0);
    CHECK_THROWS_AS(overall_gain({}), DataError);
}

TEST_CASE("gains are scale invariant") {
    const std::vector<std::pair<double, double>> pairs = {{0.8, 0.7}, {0.4, 0.45}, {0.9, 0.6}};
    for (double c : {0.5, 2.0, 17.0}) {
        auto scaled = pairs;
        for (auto& [en, sp] : scaled) {
            en *= c;
            sp *= c;
        }
        CHECK(overall_gain(scaled) == doctest::Approx(overall_gain(pairs)).epsilon(1e-12));
        CHECK(gain(0.8 * c, 0.7 * c) == doctest::Approx(gain(0.8, 0.7)).epsilon(1e-12));
    }
}

TEST_CASE("CE exports") {
    auto c = ce_curve(ranking(4), lines({2}));
    const auto csv = ce_csv(c);
    CHECK(csv.rfind("x,y\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    const auto svg = ce_svg({{"hybrid", &c}}, "demo");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("hybrid") != std::string::npos);
}

TEST_CASE("cross-project split") {
    SUBCASE("same language, other project, earlier") {
        VersionManifest m({entry("P1", "v1", Language::java_like, "2010-01-01"),
                           entry("P2", "v2", Language::c_like, "2011-01-01"),
                           entry("P3", "v3", Language::java_like, "2012-01-01")});
        CHECK(cross_project_split(m, "v3") == std::vector<std::string>{"v1"});
    }
    SUBCASE("only later versions") {
        VersionManifest m({entry("P1", "v1", Language::java_like, "2015-01-01"),
                           entry("P3", "v3", Language::java_like, "2012-01-01")});
        CHECK_THROWS_WITH_AS(cross_project_split(m, "v3"), doctest::Contains("no eligible prior versions"), DataError);
    }
    SUBCASE("two eligible versions, chronological") {
        VersionManifest m({entry("P2", "b", Language::java_like, "2011-01-01"),
                           entry("P1", "a", Language::java_like, "2010-01-01"),
                           entry("P3", "t", Language::java_like, "2012-01-01")});
        CHECK(cross_project_split(m, "t") == std::vector<std::string>{"a", "b"});
    }
    SUBCASE("same timestamp and own project are excluded") {
        VersionManifest m({entry("P1", "a", Language::java_like, "2012-01-01"),
                           entry("P3", "old", Language::java_like, "2001-01-01"),
                           entry("P3", "t", Language::java_like, "2012-01-01")});
        CHECK_THROWS_AS(cross_project_split(m, "t"), DataError);
    }
    SUBCASE("unknown target and duplicates") {
        VersionManifest m({entry("P1", "a", Language::java_like, "2010-01-01")});
        CHECK_THROWS_AS(cross_project_split(m, "zz"), DataError);
        CHECK_THROWS_AS(VersionManifest({entry("P1", "a", Language::java_like, "2010"),
                                         entry("P2", "a", Language::java_like, "2011")}),
                        DataError);
    }
}

TEST_CASE("cross-project split never includes the target's project") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<VersionEntry> es;
        for (int i = 0; i < 12; ++i)
            es.push_back(entry("P" + std::to_string(rng() % 4), "v" + std::to_string(i),
                               rng() % 2 ? Language::java_like : Language::c_like,
                               "20" + std::to_string(10 + rng() % 10) + "-01-01"));
        VersionManifest m(es);
        for (const auto& target : m.entries()) {
            std::vector<std::string> split;
            try {
                split = cross_project_split(m, target.version_id);
            } catch (const DataError&) {
                continue;
            }
            for (const auto& id : split) {
                const auto& e = m.find(id);
                CHECK(e.project != target.project);
                CHECK(e.language == target.language);
                CHECK(e.timestamp < target.timestamp);
            }
        }
    }
}

TEST_CASE("manifest JSON round-trip") {
    VersionManifest m({entry("P1", "a", Language::java_like, "2010-01-01"), entry("P2", "b", Language::c_like, "2009-05-01")});
    auto back = VersionManifest::from_json(m.to_json());
    REQUIRE(back.entries().size() == 2);
    CHECK(back.entries()[0].version_id == "b");
    CHECK(back.entries()[0].language == Language::c_like);
    CHECK_THROWS_AS(VersionManifest::from_json("[{\"project\": 1}]"), DataError);
}

TEST_CASE("Cohen's d and the Welch test") {
    const std::vector<double> a = {1, 2, 3, 4, 5};
    const std::vector<double> b = {2, 3, 4, 5, 6};
    CHECK(cohens_d(a, b) == doctest::Approx(-0.6325).epsilon(1e-4));
    auto same = welch_t_test(a, a);
    CHECK(same.p_value == doctest::Approx(1.0));
    CHECK(same.effect_size_d == 0.0);

    const std::vector<double> flat = {2, 2, 2};
    auto flat_test = welch_t_test(flat, flat);
    CHECK(flat_test.statistic == 0.0);
    CHECK(flat_test.p_value == 1.0);
    CHECK(cohens_d(flat, flat) == 0.0);
    const std::vector<double> other = {3, 3, 3};
    CHECK(welch_t_test(flat, other).p_value == 0.0);

    const std::vector<double> tiny = {1.0};
    CHECK_THROWS(welch_t_test(tiny, a));
}

TEST_CASE("effect labels") {
    CHECK(cohen_label(0.1) == "negligible");
    CHECK(cohen_label(-0.3) == "small");
    CHECK(cohen_label(0.6) == "medium");
    CHECK(cohen_label(1.2) == "large");
}

TEST_CASE("rank-sum test") {
    const std::vector<double> a = {1, 2, 3};
    const std::vector<double> b = {4, 5, 6};
    auto r = rank_sum_test(a, b);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(0.1));  // 2 / C(6,3)
    auto mirror = rank_sum_test(b, a);
    CHECK(mirror.statistic == 9.0);
    CHECK(mirror.p_value == doctest::Approx(r.p_value));
}

TEST_CASE("a one-SD shift is detected in most trials") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> normal(0.0, 1.0);
    int welch_hits = 0, rank_hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a, b;
        for (int i = 0; i < 100; ++i) {
            a.push_back(normal(rng) + 1.0);
            b.push_back(normal(rng));
        }
        welch_hits += welch_t_test(a, b).p_value < 0.05;
        rank_hits += rank_sum_test(a, b).p_value < 0.05;
    }
    CHECK(welch_hits >= 95);
    CHECK(rank_hits >= 95);
}

TEST_CASE("group comparison JSON") {
    const std::vector<double> buggy = {3, 4, 5, 6};
    const std::vector<double> clean = {1, 2, 2, 3, 1};
    auto g = compare_groups("fail_only", buggy, clean);
    CHECK(g.diff_ci_low < g.diff_ci_high);
    CHECK(g.diff_ci_low > 0.0);
    CHECK(g.n_buggy == 4);
    CHECK(g.label == "large");
    auto doc = nlohmann::json::parse(comparison_json(std::span<const GroupComparison>(&g, 1)));
    REQUIRE(doc.is_array());
    for (const char* key : {"group", "n_buggy", "n_nonbuggy", "diff_ci_low", "diff_ci_high", "p_value", "cohens_d", "label"})
        CHECK(doc[0].contains(key));
}
