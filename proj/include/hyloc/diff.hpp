#pragma once

#include <set>
#include <string>
#include <string_view>

#include "hyloc/common.hpp"

namespace hyloc {

struct BugAnnotation {
    std::string bug_id;
    std::set<LineKey> buggy_lines;  // old-file (buggy version) numbering
    bool omission_only = false;     // the fix only adds lines
};

// Parses a unified diff in the buggy -> fixed direction. Every '-' line is
// buggy at its old line number. File names lose a leading "a/" or "b/".
// A malformed hunk header throws DataError naming the 1-based hunk index.
BugAnnotation annotate_from_diff(std::string_view unified_diff, std::string bug_id = {});

// Single-file unified diff from `before` to `after` with `context` lines of
// context, built from a longest-common-subsequence alignment. Returns an
// empty string when the texts are equal.
std::string unified_diff(std::string_view before, std::string_view after, std::string_view file,
                         int context = 3);

// Applies a single-file unified diff to `before`. Throws DataError when a
// context or deleted line does not match.
std::string apply_unified_diff(std::string_view before, std::string_view diff);

std::string annotation_json(const BugAnnotation& annotation);
BugAnnotation parse_annotation_json(std::string_view text);

}  // namespace hyloc
