#include "viseme/text_io.hpp"

#include "viseme/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

namespace viseme {

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view data)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), res.ptr};
}

std::string format_fixed(double value, int decimals)
{
    if (value == 0.0) {
        value = 0.0;  // drop the sign of -0.0
    }
    std::array<char, 128> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
    std::string s(buf.data(), res.ptr);
    // Rounding tiny negatives can still print "-0.000000".
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, 1);
    }
    return s;
}

double parse_double(std::string_view token, std::string_view what)
{
    token = trim(token);
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError("expected a number for " + std::string(what) + ", got '" + std::string(token) + "'");
    }
    return value;
}

long long parse_int(std::string_view token, std::string_view what)
{
    token = trim(token);
    long long value = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError("expected an integer for " + std::string(what) + ", got '" + std::string(token) + "'");
    }
    return value;
}

std::string_view trim(std::string_view s)
{
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) {
            ++i;
        }
        const auto start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

KeyValueFile KeyValueFile::parse(std::string_view text, std::string_view source_name)
{
    KeyValueFile kv;
    kv.source_ = std::string(source_name);
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(kv.source_ + ":" + std::to_string(line_no) + ": expected key=value");
        }
        auto key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ParseError(kv.source_ + ":" + std::to_string(line_no) + ": empty key");
        }
        kv.entries_.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
    }
    return kv;
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const
{
    std::optional<std::string> found;
    for (const auto& e : entries_) {
        if (e.key == key) {
            found = e.value;  // last one wins
        }
    }
    return found;
}

double KeyValueFile::get_double(std::string_view key, double fallback) const
{
    auto v = get(key);
    return v ? parse_double(*v, std::string(source_) + ":" + std::string(key)) : fallback;
}

long long KeyValueFile::get_int(std::string_view key, long long fallback) const
{
    auto v = get(key);
    return v ? parse_int(*v, std::string(source_) + ":" + std::string(key)) : fallback;
}

}  // namespace viseme
