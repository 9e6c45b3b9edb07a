#pragma once

#include <array>
#include <string_view>

namespace hyloc {

// Execution counters for one program element.
struct Counters {
    long long e_p = 0;  // passing tests that execute the line
    long long e_f = 0;  // failing tests that execute the line
    long long n_p = 0;  // passing tests that do not
    long long n_f = 0;  // failing tests that do not

    bool operator==(const Counters&) const = default;
};

// The 25 suspiciousness metrics, in feature order.
enum class Metric {
    Tarantula,
    Ochiai,
    Jaccard,
    SimpleMatching,
    SorensenDice,
    Kulczynski1,
    RusselRao,
    RogersTanimoto,
    M1,
    M2,
    Overlap,
    Ochiai2,
    Dice,
    Ample,
    Hamann,
    Zoltar,
    Goodman,
    Sokal,
    Hamming,
    Kulczynski2,
    Euclid,
    Anderberg,
    Wong1,
    Wong2,
    Wong3,
};

inline constexpr std::size_t kMetricCount = 25;

inline constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "Tarantula", "Ochiai",    "Jaccard",   "SimpleMatching", "SorensenDice", "Kulczynski1", "RusselRao",
    "RogersTanimoto", "M1",   "M2",        "Overlap",        "Ochiai2",      "Dice",        "Ample",
    "Hamann",    "Zoltar",    "Goodman",   "Sokal",          "Hamming",      "Kulczynski2", "Euclid",
    "Anderberg", "Wong1",     "Wong2",     "Wong3",
};

using SuspiciousnessVector = std::array<double, kMetricCount>;

struct MetricOptions {
    // Default Rogers-Tanimoto denominator: e_f + e_p + 2n_f + e_p.
    // The textbook form is e_f + n_p + 2(n_f + e_p).
    bool textbook_rogers_tanimoto = false;
};

// Any metric whose formula divides by zero, anywhere, evaluates to 0.
SuspiciousnessVector suspiciousness_vector(const Counters& c, const MetricOptions& options = {});

double wong3_h(long long e_p);

}  // namespace hyloc
