#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace viseme {

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`, so readers never
/// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
/// Fixed-point text with exactly `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Whole-token numeric parsing; `what` names the field in error messages.
double parse_double(std::string_view token, std::string_view what);
long long parse_int(std::string_view token, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
/// Splits on runs of spaces and tabs.
std::vector<std::string_view> split_ws(std::string_view s);

/// One `key = value` entry from a key-value text file.
struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// `key = value` (or `key=value`) lines; blank lines and `#` comments skipped.
/// Order is preserved so repeated keys can express lists.
class KeyValueFile {
public:
    static KeyValueFile parse(std::string_view text, std::string_view source_name = "<input>");

    const std::vector<KeyValue>& entries() const noexcept { return entries_; }
    std::optional<std::string> get(std::string_view key) const;
    double get_double(std::string_view key, double fallback) const;
    long long get_int(std::string_view key, long long fallback) const;
    const std::string& source_name() const noexcept { return source_; }

private:
    std::vector<KeyValue> entries_;
    std::string source_;
};

}  // namespace viseme
