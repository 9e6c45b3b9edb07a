#include "hyloc/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hyloc {

namespace {

// Tracks whether any division inside one metric had a zero denominator.
class Guard {
public:
    double div(double num, double den) {
        if (den == 0.0) {
            defined_ = false;
            return 0.0;
        }
        return num / den;
    }
    double result(double value) const { return defined_ ? value : 0.0; }

private:
    bool defined_ = true;
};

}  // namespace

double wong3_h(long long e_p) {
    const auto ep = static_cast<double>(e_p);
    if (e_p <= 2) return ep;
    if (e_p <= 10) return 2.0 + 0.1 * (ep - 2.0);
    return 2.8 + 0.01 * (ep - 10.0);
}

SuspiciousnessVector suspiciousness_vector(const Counters& c, const MetricOptions& options) {
    const auto ef = static_cast<double>(c.e_f);
    const auto ep = static_cast<double>(c.e_p);
    const auto nf = static_cast<double>(c.n_f);
    const auto np = static_cast<double>(c.n_p);

    SuspiciousnessVector v{};
    auto set = [&v](Metric m, double value) { v[static_cast<std::size_t>(m)] = value; };

    {
        Guard g;
        const double fail_ratio = g.div(ef, ef + nf);
        const double pass_ratio = g.div(ep, ep + np);
        set(Metric::Tarantula, g.result(g.div(fail_ratio, fail_ratio + pass_ratio)));
    }
    {
        Guard g;
        set(Metric::Ochiai, g.result(g.div(ef, std::sqrt((ef + ep) * (ef + nf)))));
    }
    {
        Guard g;
        set(Metric::Jaccard, g.result(g.div(ef, ef + ep + nf)));
    }
    {
        Guard g;
        set(Metric::SimpleMatching, g.result(g.div(ef + np, ef + ep + nf + np)));
    }
    {
        Guard g;
        set(Metric::SorensenDice, g.result(g.div(2 * ef, 2 * ef + ep + nf)));
    }
    {
        Guard g;
        set(Metric::Kulczynski1, g.result(g.div(ef, ep + nf)));
    }
    {
        Guard g;
        set(Metric::RusselRao, g.result(g.div(ef, ef + ep + nf + np)));
    }
    {
        Guard g;
        const double den = options.textbook_rogers_tanimoto ? ef + np + 2 * (nf + ep) : ef + ep + 2 * nf + ep;
        set(Metric::RogersTanimoto, g.result(g.div(ef + np, den)));
    }
    {
        Guard g;
        set(Metric::M1, g.result(g.div(ef + np, ep + nf)));
    }
    {
        Guard g;
        set(Metric::M2, g.result(g.div(ef, ef + np + 2 * ep + 2 * ef)));
    }
    {
        Guard g;
        set(Metric::Overlap, g.result(g.div(ef, std::min({ef, ep, nf}))));
    }
    {
        Guard g;
        set(Metric::Ochiai2, g.result(g.div(ef * np, std::sqrt((ef + ep) * (nf + np) * (ef + np) * (ep + nf)))));
    }
    {
        Guard g;
        set(Metric::Dice, g.result(g.div(2 * ef, ef + ep + nf)));
    }
    {
        Guard g;
        set(Metric::Ample, g.result(std::abs(g.div(ef, ef + nf) - g.div(ep, ep + np))));
    }
    {
        Guard g;
        set(Metric::Hamann, g.result(g.div(ef + np - ep - nf, ef + ep + nf + np)));
    }
    {
        Guard g;
        const double penalty = g.div(10000.0 * nf * ep, ef);
        set(Metric::Zoltar, g.result(g.div(ef, ef + ep + nf + penalty)));
    }
    {
        Guard g;
        set(Metric::Goodman, g.result(g.div(2 * ef - nf - ep, 2 * ef + nf + ep)));
    }
    {
        Guard g;
        set(Metric::Sokal, g.result(g.div(2 * ef + 2 * ep, 2 * ef + 2 * ep + nf + np)));
    }
    set(Metric::Hamming, ef + np);
    {
        Guard g;
        set(Metric::Kulczynski2, g.result(0.5 * (g.div(ef, ef + nf) + g.div(ef, ef + np))));
    }
    set(Metric::Euclid, std::sqrt(ef + np));
    {
        Guard g;
        set(Metric::Anderberg, g.result(g.div(ef, ef + 2 * ep + 2 * nf)));
    }
    set(Metric::Wong1, ef);
    set(Metric::Wong2, ef - ep);
    set(Metric::Wong3, ef - wong3_h(c.e_p));
    return v;
}

}  // namespace hyloc
