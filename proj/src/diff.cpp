#include "hyloc/diff.hpp"

#include <algorithm>
#include <charconv>
#include <vector>

#include "json.hpp"

namespace hyloc {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        start = nl + 1;
    }
    return out;
}

std::string strip_path(std::string_view raw) {
    // "--- a/src/Foo.java\t2020-01-01 ..." -> "src/Foo.java"
    auto tab = raw.find('\t');
    if (tab != std::string_view::npos) raw = raw.substr(0, tab);
    while (!raw.empty() && raw.back() == ' ') raw.remove_suffix(1);
    if (raw.starts_with("a/") || raw.starts_with("b/")) raw.remove_prefix(2);
    return std::string(raw);
}

struct HunkHeader {
    int old_start = 0;
    int old_count = 1;
    int new_start = 0;
    int new_count = 1;
};

bool parse_range(std::string_view& s, char sign, int& start, int& count) {
    if (s.empty() || s.front() != sign) return false;
    s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), start);
    if (ec != std::errc() || start < 0) return false;
    s.remove_prefix(static_cast<std::size_t>(p - s.data()));
    count = 1;
    if (!s.empty() && s.front() == ',') {
        s.remove_prefix(1);
        auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), count);
        if (ec2 != std::errc() || count < 0) return false;
        s.remove_prefix(static_cast<std::size_t>(q - s.data()));
    }
    return true;
}

bool parse_hunk_header(std::string_view line, HunkHeader& h) {
    if (!line.starts_with("@@ ")) return false;
    line.remove_prefix(3);
    if (!parse_range(line, '-', h.old_start, h.old_count)) return false;
    if (!line.starts_with(" ")) return false;
    line.remove_prefix(1);
    if (!parse_range(line, '+', h.new_start, h.new_count)) return false;
    return line.starts_with(" @@");
}

std::string range_text(int start, int count) {
    return count == 1 ? std::to_string(start) : std::to_string(start) + "," + std::to_string(count);
}

}  // namespace

BugAnnotation annotate_from_diff(std::string_view unified_diff, std::string bug_id) {
    BugAnnotation out;
    out.bug_id = std::move(bug_id);
    const auto lines = split_lines(unified_diff);
    std::string old_file;
    std::string new_file;
    int hunk_index = 0;
    for (std::size_t i = 0; i < lines.size();) {
        const auto line = lines[i];
        if (line.starts_with("--- ") && i + 1 < lines.size() && lines[i + 1].starts_with("+++ ")) {
            old_file = strip_path(line.substr(4));
            new_file = strip_path(lines[i + 1].substr(4));
            i += 2;
            continue;
        }
        if (!line.starts_with("@@")) {
            ++i;
            continue;
        }
        ++hunk_index;
        HunkHeader h;
        if (!parse_hunk_header(line, h))
            throw DataError("malformed hunk header (hunk " + std::to_string(hunk_index) + "): " + std::string(line));
        if (old_file.empty() && new_file.empty())
            throw DataError("hunk " + std::to_string(hunk_index) + " has no file header");
        const std::string& file = old_file == "/dev/null" ? new_file : old_file;
        int old_line = h.old_start;
        int old_left = h.old_count;
        int new_left = h.new_count;
        ++i;
        while (i < lines.size() && (old_left > 0 || new_left > 0)) {
            const auto body = lines[i];
            const char tag = body.empty() ? ' ' : body.front();
            if (tag == ' ') {
                ++old_line;
                --old_left;
                --new_left;
            } else if (tag == '-') {
                out.buggy_lines.insert({file, old_line});
                ++old_line;
                --old_left;
            } else if (tag == '+') {
                --new_left;
            } else if (tag != '\\') {
                throw DataError("hunk " + std::to_string(hunk_index) + " ends early: " + std::string(body));
            }
            ++i;
        }
        if (old_left < 0 || new_left < 0)
            throw DataError("hunk " + std::to_string(hunk_index) + " does not match its header counts");
        // a trailing "\ No newline at end of file" belongs to this hunk
        while (i < lines.size() && lines[i].starts_with("\\")) ++i;
    }
    out.omission_only = out.buggy_lines.empty();
    return out;
}

std::string unified_diff(std::string_view before, std::string_view after, std::string_view file, int context) {
    const auto a = split_lines(before);
    const auto b = split_lines(after);
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    // lcs[i][j] = LCS length of a[i..] and b[j..]
    std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

    struct Op {
        char tag;
        std::size_t ai;  // index into a (for ' ' and '-')
        std::size_t bi;  // index into b (for ' ' and '+')
    };
    std::vector<Op> ops;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && a[i] == b[j]) {
            ops.push_back({' ', i++, j++});
        } else if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
            ops.push_back({'+', i, j++});
        } else {
            ops.push_back({'-', i++, j});
        }
    }
    if (std::all_of(ops.begin(), ops.end(), [](const Op& o) { return o.tag == ' '; })) return {};

    std::string out = "--- a/" + std::string(file) + "\n+++ b/" + std::string(file) + "\n";
    const auto ctx = static_cast<std::size_t>(std::max(context, 0));
    std::size_t k = 0;
    while (k < ops.size()) {
        while (k < ops.size() && ops[k].tag == ' ') ++k;
        if (k == ops.size()) break;
        std::size_t begin = k >= ctx ? k - ctx : 0;
        // extend the hunk while the next change is within 2*ctx context lines
        std::size_t end = k;
        while (end < ops.size()) {
            if (ops[end].tag != ' ') {
                ++end;
                continue;
            }
            std::size_t run = end;
            while (run < ops.size() && ops[run].tag == ' ') ++run;
            if (run == ops.size() || run - end > 2 * ctx) {
                end = std::min(end + ctx, ops.size());
                break;
            }
            end = run;
        }
        int old_count = 0;
        int new_count = 0;
        for (std::size_t x = begin; x < end; ++x) {
            old_count += ops[x].tag != '+';
            new_count += ops[x].tag != '-';
        }
        const int old_start = static_cast<int>(ops[begin].ai) + (old_count > 0 ? 1 : 0);
        const int new_start = static_cast<int>(ops[begin].bi) + (new_count > 0 ? 1 : 0);
        out += "@@ -" + range_text(old_start, old_count) + " +" + range_text(new_start, new_count) + " @@\n";
        for (std::size_t x = begin; x < end; ++x) {
            out += ops[x].tag;
            out += ops[x].tag == '+' ? b[ops[x].bi] : a[ops[x].ai];
            out += '\n';
        }
        k = end;
    }
    return out;
}

std::string apply_unified_diff(std::string_view before, std::string_view diff) {
    const auto src = split_lines(before);
    const auto lines = split_lines(diff);
    std::string out;
    std::size_t cursor = 0;  // next unconsumed source line (0-based)
    auto copy_until = [&](std::size_t stop) {
        for (; cursor < stop && cursor < src.size(); ++cursor) {
            out += src[cursor];
            out += '\n';
        }
    };
    int hunk_index = 0;
    for (std::size_t i = 0; i < lines.size();) {
        if (!lines[i].starts_with("@@")) {
            ++i;
            continue;
        }
        ++hunk_index;
        HunkHeader h;
        if (!parse_hunk_header(lines[i], h))
            throw DataError("malformed hunk header (hunk " + std::to_string(hunk_index) + ")");
        const std::size_t first = h.old_count == 0 ? static_cast<std::size_t>(h.old_start)
                                                   : static_cast<std::size_t>(h.old_start - 1);
        if (first < cursor || first > src.size())
            throw DataError("hunk " + std::to_string(hunk_index) + " is out of order or out of range");
        copy_until(first);
        ++i;
        int old_left = h.old_count;
        int new_left = h.new_count;
        while (i < lines.size() && (old_left > 0 || new_left > 0)) {
            const auto body = lines[i];
            const char tag = body.empty() ? ' ' : body.front();
            const auto text = body.empty() ? body : body.substr(1);
            if (tag == ' ' || tag == '-') {
                if (cursor >= src.size() || src[cursor] != text)
                    throw DataError("hunk " + std::to_string(hunk_index) + " does not apply at line " +
                                    std::to_string(cursor + 1));
                if (tag == ' ') {
                    out += text;
                    out += '\n';
                    --new_left;
                }
                ++cursor;
                --old_left;
            } else if (tag == '+') {
                out += text;
                out += '\n';
                --new_left;
            }
            ++i;
        }
    }
    copy_until(src.size());
    return out;
}

std::string annotation_json(const BugAnnotation& annotation) {
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& k : annotation.buggy_lines) lines.push_back({{"file", k.file}, {"line_no", k.line_no}});
    return nlohmann::json{{"bug_id", annotation.bug_id},
                          {"omission_only", annotation.omission_only},
                          {"buggy_lines", std::move(lines)}}
               .dump(2) +
           "\n";
}

BugAnnotation parse_annotation_json(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        BugAnnotation a;
        a.bug_id = doc.value("bug_id", std::string());
        for (const auto& l : doc.at("buggy_lines"))
            a.buggy_lines.insert({l.at("file").get<std::string>(), l.at("line_no").get<int>()});
        a.omission_only = a.buggy_lines.empty();
        if (doc.contains("omission_only") && doc["omission_only"].get<bool>() != a.omission_only)
            throw DataError("annotation '" + a.bug_id + "': omission_only disagrees with buggy_lines");
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed annotation: ") + e.what());
    }
}

}  // namespace hyloc
