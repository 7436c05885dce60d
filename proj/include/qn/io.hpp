#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace qn {

/// Formats with 6 significant digits, '.' decimal separator, no locale.
std::string format_g6(double v);

/// One CSV cell: numbers via format_g6, everything else passed through.
struct CsvCell {
    std::string text;

    CsvCell(double v) : text(format_g6(v)) {}
    CsvCell(int v) : text(std::to_string(v)) {}
    CsvCell(long long v) : text(std::to_string(v)) {}
    CsvCell(std::size_t v) : text(std::to_string(v)) {}
    CsvCell(const char* s) : text(s) {}
    CsvCell(std::string s) : text(std::move(s)) {}
};

/// Writes header plus rows, comma separated, LF line endings.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<CsvCell>>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
void ensure_dir(const std::filesystem::path& dir);

/**
 * Loads a configuration file as JSON.  *.json parses directly; *.toml
 * accepts the flat subset key = value with strings, numbers, booleans,
 * and one-level arrays, plus # comments.
 */
nlohmann::json parse_config_file(const std::filesystem::path& path);

/// Parses flat TOML text (the subset described above) into a JSON object.
nlohmann::json parse_flat_toml(const std::string& text);

} // namespace qn
