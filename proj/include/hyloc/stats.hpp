#pragma once

#include <span>
#include <string>
#include <string_view>

namespace hyloc {

struct StatResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double effect_size_d = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

// Welch unequal-variance t-test, two-sided. Needs two samples of size >= 2.
// Two zero-variance samples give t = 0, p = 1 when the means agree and
// p = 0 otherwise.
StatResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Mean difference over the pooled SD. 0 when the pooled SD is 0.
double cohens_d(std::span<const double> a, std::span<const double> b);

// Mann-Whitney U, two-sided. `statistic` is U of the first sample. Exact
// null distribution when n1 + n2 <= 20 and there are no ties, otherwise the
// tie-corrected normal approximation with continuity correction.
StatResult rank_sum_test(std::span<const double> a, std::span<const double> b);

// negligible / small / medium / large
std::string_view cohen_label(double d);

// Buggy-vs-nonbuggy comparison for one group of lines: Welch t-test plus a
// 95% confidence interval on the difference of means.
struct GroupComparison {
    std::string group;
    std::size_t n_buggy = 0;
    std::size_t n_nonbuggy = 0;
    double diff_ci_low = 0.0;
    double diff_ci_high = 0.0;
    double p_value = 1.0;
    double cohens_d = 0.0;
    std::string label;
};

GroupComparison compare_groups(std::string group, std::span<const double> buggy, std::span<const double> nonbuggy,
                               double confidence = 0.95);
std::string comparison_json(std::span<const GroupComparison> rows);

}  // namespace hyloc
