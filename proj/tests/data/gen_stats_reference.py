"""Regenerates stats_reference.json from scipy.

    python3 tests/data/gen_stats_reference.py > tests/data/stats_reference.json
"""
import json

import numpy as np
from scipy import stats


def cohens_d(a, b):
    na, nb = len(a), len(b)
    pooled = np.sqrt(((na - 1) * np.var(a, ddof=1) + (nb - 1) * np.var(b, ddof=1)) / (na + nb - 2))
    return 0.0 if pooled == 0 else float((np.mean(a) - np.mean(b)) / pooled)


def main():
    rng = np.random.default_rng(20240611)
    cases = []
    for i in range(50):
        kind = i % 5
        if kind == 0:  # small, tie-free: exact rank-sum distribution
            n1, n2 = rng.integers(2, 11, size=2)
            a = rng.normal(0.0, 1.0, n1)
            b = rng.normal(0.5, 1.5, n2)
        elif kind == 1:  # moderate sizes, unequal variances
            n1, n2 = rng.integers(15, 80, size=2)
            a = rng.normal(1.0, 2.0, n1)
            b = rng.normal(0.7, 0.5, n2)
        elif kind == 2:  # heavy ties
            n1, n2 = rng.integers(10, 60, size=2)
            a = np.round(rng.normal(3.0, 1.0, n1))
            b = np.round(rng.normal(3.4, 1.0, n2))
        elif kind == 3:  # skewed, entropy-like
            n1, n2 = rng.integers(20, 120, size=2)
            a = rng.gamma(2.0, 2.5, n1)
            b = rng.gamma(2.0, 2.0, n2)
        else:  # small with ties
            n1, n2 = rng.integers(3, 10, size=2)
            a = np.round(rng.normal(0.0, 1.0, n1), 1)
            b = np.round(rng.normal(0.3, 1.0, n2), 1)
        a = [float(x) for x in a]
        b = [float(x) for x in b]
        t = stats.ttest_ind(a, b, equal_var=False)
        has_ties = len(set(a + b)) < len(a) + len(b)
        method = "exact" if len(a) + len(b) <= 20 and not has_ties else "asymptotic"
        u = stats.mannwhitneyu(a, b, alternative="two-sided", use_continuity=True, method=method)
        cases.append({
            "a": a,
            "b": b,
            "welch_t": float(t.statistic),
            "welch_p": float(t.pvalue),
            "cohens_d": cohens_d(np.array(a), np.array(b)),
            "rank_sum_u": float(u.statistic),
            "rank_sum_p": float(u.pvalue),
            "rank_sum_method": method,
        })
    print(json.dumps({"generator": "scipy " + __import__("scipy").__version__, "cases": cases}, indent=1))


if __name__ == "__main__":
    main()
