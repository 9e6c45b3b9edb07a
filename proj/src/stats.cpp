#include "hyloc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"

#include "hyloc/common.hpp"

namespace hyloc {
namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // unbiased
};

Moments moments(std::span<const double> x) {
    Moments m;
    m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m.mean) * (v - m.mean);
    m.var = x.size() > 1 ? ss / static_cast<double>(x.size() - 1) : 0.0;
    return m;
}

void require_size(std::span<const double> a, std::span<const double> b, std::size_t min, std::string_view what) {
    if (a.size() < min || b.size() < min)
        throw DataError(std::string(what) + " needs at least " + std::to_string(min) + " values per sample");
    for (auto s : {a, b})
        for (double v : s)
            if (!std::isfinite(v)) throw DataError(std::string(what) + ": non-finite sample value");
}

struct WelchParts {
    double diff = 0.0;
    double se = 0.0;
    double df = 0.0;
};

WelchParts welch_parts(std::span<const double> a, std::span<const double> b) {
    const auto ma = moments(a);
    const auto mb = moments(b);
    const double va = ma.var / static_cast<double>(a.size());
    const double vb = mb.var / static_cast<double>(b.size());
    WelchParts w;
    w.diff = ma.mean - mb.mean;
    w.se = std::sqrt(va + vb);
    if (w.se > 0.0)
        w.df = (va + vb) * (va + vb) /
               (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    return w;
}

double normal_sf(double z) {
    return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<>(), z));
}

// Number of ways to reach each U value for sizes (m, n); index = U.
std::vector<double> u_distribution(std::size_t m, std::size_t n) {
    // f[i][j][u] built by the recurrence f(i,j,u) = f(i-1,j,u-j) + f(i,j-1,u)
    const std::size_t max_u = m * n;
    std::vector<std::vector<std::vector<double>>> f(m + 1, std::vector<std::vector<double>>(n + 1));
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            f[i][j].assign(i * j + 1, 0.0);
            if (i == 0 || j == 0) {
                f[i][j][0] = 1.0;
                continue;
            }
            for (std::size_t u = 0; u <= i * j; ++u) {
                double v = 0.0;
                if (u >= j && u - j <= (i - 1) * j) v += f[i - 1][j][u - j];
                if (u <= i * (j - 1)) v += f[i][j - 1][u];
                f[i][j][u] = v;
            }
        }
    }
    auto out = f[m][n];
    out.resize(max_u + 1, 0.0);
    return out;
}

}  // namespace

StatResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    require_size(a, b, 2, "t-test");
    StatResult r;
    r.n1 = a.size();
    r.n2 = b.size();
    r.effect_size_d = cohens_d(a, b);
    const auto w = welch_parts(a, b);
    if (w.se == 0.0) {
        r.statistic = w.diff == 0.0 ? 0.0 : std::copysign(INFINITY, w.diff);
        r.p_value = w.diff == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.statistic = w.diff / w.se;
    const boost::math::students_t_distribution<> t(w.df);
    r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(t, std::abs(r.statistic))));
    return r;
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
    require_size(a, b, 2, "Cohen's d");
    const auto ma = moments(a);
    const auto mb = moments(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double pooled = std::sqrt(((na - 1.0) * ma.var + (nb - 1.0) * mb.var) / (na + nb - 2.0));
    if (pooled == 0.0) return 0.0;
    return (ma.mean - mb.mean) / pooled;
}

StatResult rank_sum_test(std::span<const double> a, std::span<const double> b) {
    require_size(a, b, 1, "rank-sum test");
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    const std::size_t n = n1 + n2;

    std::vector<std::pair<double, bool>> all;  // (value, from a)
    all.reserve(n);
    for (double v : a) all.push_back({v, true});
    for (double v : b) all.push_back({v, false});
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && all[j].first == all[i].first) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second) rank_sum_a += avg;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }

    const double fn1 = static_cast<double>(n1);
    const double fn2 = static_cast<double>(n2);
    const double u1 = rank_sum_a - fn1 * (fn1 + 1.0) / 2.0;
    const double u2 = fn1 * fn2 - u1;
    const double u = std::max(u1, u2);

    StatResult r;
    r.statistic = u1;
    r.n1 = n1;
    r.n2 = n2;
    if (n1 >= 2 && n2 >= 2) r.effect_size_d = cohens_d(a, b);

    if (n <= 20 && tie_term == 0.0) {
        const auto dist = u_distribution(n1, n2);
        const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
        double tail = 0.0;
        for (auto k = static_cast<std::size_t>(u); k < dist.size(); ++k) tail += dist[k];
        r.p_value = std::min(1.0, 2.0 * tail / total);
        return r;
    }

    const double fn = static_cast<double>(n);
    const double mu = fn1 * fn2 / 2.0;
    const double sigma = std::sqrt(fn1 * fn2 / 12.0 * ((fn + 1.0) - tie_term / (fn * (fn - 1.0))));
    if (!(sigma > 0.0)) {
        r.p_value = 1.0;
        return r;
    }
    const double z = (u - mu - 0.5) / sigma;
    r.p_value = std::clamp(2.0 * normal_sf(z), 0.0, 1.0);
    return r;
}

std::string_view cohen_label(double d) {
    const double m = std::abs(d);
    if (m < 0.2) return "negligible";
    if (m < 0.5) return "small";
    if (m < 0.8) return "medium";
    return "large";
}

GroupComparison compare_groups(std::string group, std::span<const double> buggy, std::span<const double> nonbuggy,
                               double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw UsageError("confidence level must lie in (0, 1)");
    const auto test = welch_t_test(buggy, nonbuggy);
    const auto w = welch_parts(buggy, nonbuggy);
    GroupComparison g;
    g.group = std::move(group);
    g.n_buggy = buggy.size();
    g.n_nonbuggy = nonbuggy.size();
    g.p_value = test.p_value;
    g.cohens_d = test.effect_size_d;
    g.label = cohen_label(g.cohens_d);
    double half = 0.0;
    if (w.se > 0.0) {
        const boost::math::students_t_distribution<> t(w.df);
        half = boost::math::quantile(t, 0.5 + confidence / 2.0) * w.se;
    }
    g.diff_ci_low = w.diff - half;
    g.diff_ci_high = w.diff + half;
    return g;
}

std::string comparison_json(std::span<const GroupComparison> rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& g : rows)
        out.push_back({{"group", g.group},
                       {"n_buggy", g.n_buggy},
                       {"n_nonbuggy", g.n_nonbuggy},
                       {"diff_ci_low", g.diff_ci_low},
                       {"diff_ci_high", g.diff_ci_high},
                       {"p_value", g.p_value},
                       {"cohens_d", g.cohens_d},
                       {"label", g.label}});
    return out.dump(2) + "\n";
}

}  // namespace hyloc
