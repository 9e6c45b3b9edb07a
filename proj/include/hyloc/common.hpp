#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hyloc {

// Identifies one physical source line. `file` is relative to the version's
// source root so that coverage, diffs and token dumps agree on it.
struct LineKey {
    std::string file;
    int line_no = 0;

    auto operator<=>(const LineKey&) const = default;
    bool operator==(const LineKey&) const = default;
};

struct LineKeyHash {
    std::size_t operator()(const LineKey& k) const noexcept {
        std::size_t h = std::hash<std::string>{}(k.file);
        return h ^ (std::hash<int>{}(k.line_no) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
};

enum class Language { java_like, c_like };

std::string_view to_string(Language lang);
Language parse_language(std::string_view text);

// Error hierarchy. The CLI maps these onto exit codes:
// UsageError -> 1, DataError -> 2, InvariantError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class InvariantError : public Error {
public:
    using Error::Error;
};

// Wraps a module error with the pipeline stage it came from, e.g.
// "spectrum: no bug-reproducing test".
class StageError : public DataError {
public:
    StageError(std::string stage, const std::string& what)
        : DataError(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace hyloc
