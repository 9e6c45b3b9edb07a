#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hyloc/common.hpp"

namespace hyloc::io {

// Shortest round-trip decimal form. Output is stable across runs, which the
// report bundles rely on for byte-identical reruns.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Source files below `root` whose extension belongs to `lang`, sorted by
// relative path.
std::vector<std::filesystem::path> list_sources(const std::filesystem::path& root, Language lang);

// Minimal CSV support: comma-separated, fields quoted only when they contain
// a comma, quote or newline. Lines starting with '#' are comments.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split(std::string_view line);

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column; throws DataError if missing.
    std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);

}  // namespace hyloc::io
