#include "doctest.h"

#include <cmath>
#include <random>

#include "hyloc/features.hpp"
#include "hyloc/spectrum.hpp"
#include "metric_oracle.hpp"

using namespace hyloc;

namespace {

double metric(const SuspiciousnessVector& v, Metric m) { return v[static_cast<std::size_t>(m)]; }

std::vector<LineKey> keys(int n, const std::string& file = "F.java") {
    std::vector<LineKey> out;
    for (int i = 1; i <= n; ++i) out.push_back({file, i});
    return out;
}

}  // namespace

TEST_CASE("counter examples") {
    const LineKey L{"F.java", 1};
    SUBCASE("one failing test") {
        auto r = ingest_coverage(std::vector<TestTrace>{{"t1", Outcome::fail, {L}}}, keys(1));
        CHECK(r.matrix.counters(0) == Counters{0, 1, 0, 0});
    }
    SUBCASE("two passing and one failing") {
        auto r = ingest_coverage(
            std::vector<TestTrace>{{"p1", Outcome::pass, {L}}, {"p2", Outcome::pass, {L}}, {"f1", Outcome::fail, {L}}},
            keys(1));
        CHECK(r.matrix.counters(0) == Counters{2, 1, 0, 0});
    }
    SUBCASE("uncovered line") {
        auto r = ingest_coverage(
            std::vector<TestTrace>{{"p1", Outcome::pass, {}}, {"p2", Outcome::pass, {}}, {"f1", Outcome::fail, {}}},
            keys(1));
        CHECK(r.matrix.counters(0) == Counters{0, 0, 2, 1});
    }
}

TEST_CASE("ingestion errors and unknown lines") {
    CHECK_THROWS_WITH_AS(ingest_coverage(std::vector<TestTrace>{{"p", Outcome::pass, {{"F.java", 1}}}}, keys(2)),
                         "no bug-reproducing test", DataError);
    auto r = ingest_coverage(std::vector<TestTrace>{{"f", Outcome::fail, {{"F.java", 1}, {"G.java", 9}}}}, keys(2));
    REQUIRE(r.unknown.size() == 1);
    CHECK(r.unknown[0] == LineKey{"G.java", 9});
    CHECK(r.matrix.size() == 2);
    CHECK_THROWS_AS(ingest_coverage(std::vector<TestTrace>{{"f", Outcome::fail, {}}, {"f", Outcome::pass, {}}}, keys(1)),
                    DataError);
}

TEST_CASE("counter conservation on random suites") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto universe = keys(20);
        std::vector<TestTrace> traces;
        const int tests = 2 + static_cast<int>(rng() % 10);
        for (int t = 0; t < tests; ++t) {
            TestTrace tr{"t" + std::to_string(t), (t == 0 || rng() % 3 == 0) ? Outcome::fail : Outcome::pass, {}};
            for (const auto& k : universe)
                if (rng() % 2) tr.covered.push_back(k);
            traces.push_back(tr);
        }
        auto m = ingest_coverage(traces, universe).matrix;
        auto groups = group_by_spectra(m);
        CHECK(groups.size() == m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            const auto& c = m.counters(i);
            CHECK(c.e_p + c.n_p == m.passed());
            CHECK(c.e_f + c.n_f == m.failed());
        }
    }
}

TEST_CASE("spectra groups") {
    CHECK(spectra_group({0, 3, 5, 0}) == SpectraGroup::fail_only);
    CHECK(spectra_group({4, 0, 1, 3}) == SpectraGroup::pass_only);
    CHECK(spectra_group({1, 1, 4, 2}) == SpectraGroup::both);
    CHECK(spectra_group({0, 0, 5, 3}) == SpectraGroup::uncovered);
}

TEST_CASE("metric examples") {
    auto v = suspiciousness_vector({0, 2, 3, 0});
    CHECK(metric(v, Metric::Tarantula) == 1.0);
    CHECK(metric(v, Metric::Ochiai) == 1.0);

    auto w = suspiciousness_vector({4, 0, 1, 2});
    CHECK(metric(w, Metric::Ochiai) == 0.0);
    CHECK(metric(w, Metric::Wong1) == 0.0);
    CHECK(metric(w, Metric::Wong2) == -4.0);

    auto h = suspiciousness_vector({5, 3, 0, 0});
    CHECK(metric(h, Metric::Wong3) == doctest::Approx(3.0 - 2.3).epsilon(1e-12));
}

TEST_CASE("Wong3 branches") {
    CHECK(wong3_h(0) == 0.0);
    CHECK(wong3_h(2) == 2.0);
    CHECK(wong3_h(5) == doctest::Approx(2.3));
    CHECK(wong3_h(10) == doctest::Approx(2.8));
    CHECK(wong3_h(11) == doctest::Approx(2.81));
    CHECK(wong3_h(110) == doctest::Approx(3.8));
}

TEST_CASE("zero denominators give 0") {
    // no test executes the line: most ratios divide by zero
    auto v = suspiciousness_vector({0, 0, 3, 2});
    CHECK(metric(v, Metric::Tarantula) == 0.0);
    CHECK(metric(v, Metric::Ochiai) == 0.0);
    CHECK(metric(v, Metric::Overlap) == 0.0);
    CHECK(metric(v, Metric::Zoltar) == 0.0);
    for (double x : v) CHECK(std::isfinite(x));
}

TEST_CASE("library matches the independent oracle, including large pass counts") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 3000; ++trial) {
        const long long P = static_cast<long long>(rng() % 40);
        const long long F = 1 + static_cast<long long>(rng() % 8);
        const long long ep = static_cast<long long>(rng() % (P + 1));
        const long long ef = static_cast<long long>(rng() % (F + 1));
        for (bool textbook : {false, true}) {
            auto got = suspiciousness_vector({ep, ef, P - ep, F - ef}, MetricOptions{textbook});
            auto want = oracle::metrics(ep, ef, P - ep, F - ef, textbook);
            for (std::size_t i = 0; i < kMetricCount; ++i) CHECK(std::fabs(got[i] - want[i]) <= 1e-12);
        }
    }
}

TEST_CASE("bounded metrics stay in [0, 1]") {
    for (long long P = 0; P <= 6; ++P)
        for (long long F = 1; F <= 6; ++F)
            for (long long ep = 0; ep <= P; ++ep)
                for (long long ef = 0; ef <= F; ++ef) {
                    auto v = suspiciousness_vector({ep, ef, P - ep, F - ef}, MetricOptions{true});
                    for (Metric m : {Metric::Tarantula, Metric::Ochiai, Metric::Jaccard, Metric::RusselRao,
                                     Metric::SimpleMatching, Metric::RogersTanimoto}) {
                        CHECK(metric(v, m) >= 0.0);
                        CHECK(metric(v, m) <= 1.0 + 1e-15);
                    }
                }
}

TEST_CASE("Tarantula and Ochiai are non-decreasing in e_f") {
    for (long long P = 0; P <= 8; ++P)
        for (long long F = 1; F <= 8; ++F)
            for (long long ep = 0; ep <= P; ++ep) {
                double t = -1.0, o = -1.0;
                for (long long ef = 0; ef <= F; ++ef) {
                    auto v = suspiciousness_vector({ep, ef, P - ep, F - ef});
                    CHECK(metric(v, Metric::Tarantula) >= t);
                    CHECK(metric(v, Metric::Ochiai) >= o);
                    t = metric(v, Metric::Tarantula);
                    o = metric(v, Metric::Ochiai);
                }
            }
}

TEST_CASE("coverage JSONL round-trip") {
    std::vector<TestTrace> traces = {{"a", Outcome::fail, {{"X.java", 3}, {"X.java", 4}, {"Y.java", 1}}},
                                     {"b", Outcome::pass, {}}};
    auto back = parse_coverage_jsonl(coverage_to_jsonl(traces));
    REQUIRE(back.size() == 2);
    CHECK(back[0].test_id == "a");
    CHECK(back[0].outcome == Outcome::fail);
    CHECK(back[0].covered == traces[0].covered);
    CHECK(back[1].covered.empty());
    CHECK_THROWS_AS(parse_coverage_jsonl("{\"test_id\": \"x\", \"outcome\": \"maybe\", \"covered\": []}\n"), DataError);
}

TEST_CASE("LCOV ingestion") {
    const std::string lcov = "TN:t1\nSF:src/A.c\nDA:1,3\nDA:2,0\nDA:3,1\nend_of_record\n"
                             "TN:t2\nSF:src/A.c\nDA:2,5\nend_of_record\n";
    auto cov = parse_lcov(lcov, "default");
    REQUIRE(cov.size() == 2);
    CHECK(cov["t1"] == std::vector<LineKey>{{"src/A.c", 1}, {"src/A.c", 3}});
    CHECK(cov["t2"] == std::vector<LineKey>{{"src/A.c", 2}});

    auto traces = traces_from_lcov(lcov, R"({"t1": "fail", "t2": "pass"})");
    auto m = ingest_coverage(traces, std::vector<LineKey>{{"src/A.c", 1}, {"src/A.c", 2}, {"src/A.c", 3}}).matrix;
    CHECK(m.counters(0) == Counters{0, 1, 1, 0});
    CHECK(m.counters(1) == Counters{1, 0, 0, 1});
    CHECK_THROWS_AS(traces_from_lcov(lcov, R"({"t1": "fail"})"), DataError);
    CHECK_THROWS_AS(parse_lcov("DA:1,1\n", "d"), DataError);
}

TEST_CASE("spectra CSV round-trip") {
    std::vector<TestTrace> traces = {{"f", Outcome::fail, {{"F.java", 1}, {"F.java", 2}}},
                                     {"p", Outcome::pass, {{"F.java", 2}, {"F.java", 3}}}};
    auto m = ingest_coverage(traces, keys(4)).matrix;
    auto back = parse_spectra_csv(spectra_csv(m));
    CHECK(back.passed() == 1);
    CHECK(back.failed() == 1);
    REQUIRE(back.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(back.lines()[i] == m.lines()[i]);
        CHECK(back.counters(i) == m.counters(i));
    }
}

TEST_CASE("feature join") {
    std::vector<TestTrace> traces = {{"f", Outcome::fail, {{"F.java", 1}}}, {"p", Outcome::pass, {{"F.java", 2}}}};
    auto m = ingest_coverage(traces, keys(2)).matrix;
    std::vector<EntropyFeatures> ent = {{{"F.java", 2}, {0.5, -0.5, 0.0}}, {{"F.java", 1}, {1.0, 2.0, 1.5}}};

    auto sbbl = join_features(m, {}, FeatureMode::sbbl_only);
    REQUIRE(sbbl.size() == 2);
    CHECK(sbbl[0].features.size() == 25);

    auto hybrid = join_features(m, ent, FeatureMode::sbbl_plus_entropy);
    REQUIRE(hybrid.size() == 2);
    CHECK(hybrid[0].features.size() == 28);
    CHECK(hybrid[0].features[27] == 1.5);
    CHECK(hybrid[1].features[25] == 0.5);
    // spectra columns agree across modes
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 25; ++j) CHECK(hybrid[i].features[j] == sbbl[i].features[j]);

    CHECK_THROWS(join_features(m, {ent[0]}, FeatureMode::sbbl_plus_entropy));
    CHECK(feature_names(FeatureMode::sbbl_plus_entropy).back() == "AverageEntropy");
    CHECK(parse_feature_mode("sbbl") == FeatureMode::sbbl_only);
    CHECK(parse_feature_mode("hybrid") == FeatureMode::sbbl_plus_entropy);

    FeatureMode mode{};
    auto back = parse_features_csv(features_csv(hybrid, FeatureMode::sbbl_plus_entropy), mode);
    CHECK(mode == FeatureMode::sbbl_plus_entropy);
    REQUIRE(back.size() == 2);
    CHECK(back[1].features == hybrid[1].features);
}
