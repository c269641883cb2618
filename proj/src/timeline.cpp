#include "viseme/timeline.hpp"

#include "viseme/error.hpp"
#include "viseme/text_io.hpp"

#include <algorithm>
#include <cmath>

namespace viseme {

Timeline parse_alignment(std::string_view text, std::string_view source_name)
{
    struct Row {
        PhonemeSegment seg;
        std::size_t line;
    };
    const std::string src(source_name);
    std::vector<Row> rows;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto where = src + ":" + std::to_string(line_no);
        auto fields = split(line, '\t');
        if (fields.size() != 3) {
            throw ParseError(where + ": expected phoneme<TAB>start<TAB>end");
        }
        PhonemeSegment seg{std::string(trim(fields[0])), parse_double(fields[1], where + " start"),
                           parse_double(fields[2], where + " end")};
        if (seg.phoneme.empty()) {
            throw ParseError(where + ": empty phoneme token");
        }
        if (!std::isfinite(seg.start) || !std::isfinite(seg.end) || seg.start < 0.0) {
            throw ParseError(where + ": timestamps must be finite and non-negative");
        }
        if (!(seg.end > seg.start)) {
            throw ParseError(where + ": end must be greater than start");
        }
        rows.push_back({std::move(seg), line_no});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.seg.start < b.seg.start; });

    Timeline t;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].seg.start < rows[i - 1].seg.end) {
            throw ParseError(src + ": segments on lines " + std::to_string(rows[i - 1].line) + " and " +
                             std::to_string(rows[i].line) + " overlap");
        }
        t.duration = std::max(t.duration, rows[i].seg.end);
        t.segments.push_back(std::move(rows[i].seg));
    }
    return t;
}

std::string serialize_alignment(const Timeline& timeline)
{
    std::string out;
    for (const auto& s : timeline.segments) {
        out += s.phoneme + "\t" + format_double(s.start) + "\t" + format_double(s.end) + "\n";
    }
    return out;
}

Timeline load_alignment(const std::filesystem::path& path)
{
    return parse_alignment(read_text_file(path), path.string());
}

std::size_t frame_count(double duration, double fps)
{
    if (!(fps > 0.0)) {
        throw ConfigError("fps must be positive");
    }
    if (duration <= 0.0) {
        return 0;
    }
    return static_cast<std::size_t>(std::ceil(duration * fps - 1e-9));
}

std::vector<std::optional<std::string>> sample_frames(const Timeline& timeline, double fps)
{
    const auto n = frame_count(timeline.duration, fps);
    std::vector<std::optional<std::string>> out(n);
    std::size_t seg = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = (static_cast<double>(j) + 0.5) / fps;
        while (seg < timeline.segments.size() && timeline.segments[seg].end <= t) {
            ++seg;
        }
        if (seg < timeline.segments.size() && timeline.segments[seg].start <= t) {
            out[j] = timeline.segments[seg].phoneme;
        }
    }
    return out;
}

PhonemeVisemeMap::PhonemeVisemeMap(std::unordered_map<std::string, std::size_t> entries,
                                   std::unordered_set<std::string> silence, std::size_t viseme_count)
    : entries_(std::move(entries)), silence_(std::move(silence)), viseme_count_(viseme_count)
{
    for (const auto& [token, idx] : entries_) {
        if (idx >= viseme_count_) {
            throw ConfigError("phoneme '" + token + "' maps to viseme index " + std::to_string(idx) +
                              " but only " + std::to_string(viseme_count_) + " visemes exist");
        }
        if (silence_.count(token) != 0) {
            throw ConfigError("phoneme '" + token + "' is both mapped and listed as silence");
        }
    }
}

PhonemeVisemeMap PhonemeVisemeMap::parse(std::string_view text, std::span<const std::string> labels,
                                         std::string_view source_name)
{
    const auto kv = KeyValueFile::parse(text, source_name);
    std::unordered_map<std::string, std::size_t> entries;
    std::unordered_set<std::string> silence;
    for (const auto& e : kv.entries()) {
        const auto where = kv.source_name() + ":" + std::to_string(e.line);
        if (e.key == "silence") {
            for (auto tok : split_ws(e.value)) {
                silence.emplace(tok);
            }
            continue;
        }
        const auto it = std::find(labels.begin(), labels.end(), e.value);
        if (it == labels.end()) {
            throw ParseError(where + ": unknown viseme label '" + e.value + "'");
        }
        if (!entries.emplace(e.key, static_cast<std::size_t>(it - labels.begin())).second) {
            throw ParseError(where + ": phoneme '" + e.key + "' mapped twice");
        }
    }
    return PhonemeVisemeMap(std::move(entries), std::move(silence), labels.size());
}

PhonemeVisemeMap PhonemeVisemeMap::load(const std::filesystem::path& path, std::span<const std::string> labels)
{
    return parse(read_text_file(path), labels, path.string());
}

bool PhonemeVisemeMap::is_silence(std::string_view phoneme) const
{
    return silence_.count(std::string(phoneme)) != 0;
}

std::optional<std::size_t> PhonemeVisemeMap::viseme_of(std::string_view phoneme) const
{
    const auto it = entries_.find(std::string(phoneme));
    if (it != entries_.end()) {
        return it->second;
    }
    if (is_silence(phoneme)) {
        return std::nullopt;
    }
    throw UnmappedPhonemeError(std::string(phoneme));
}

std::optional<std::size_t> viseme_of(std::string_view phoneme, const PhonemeVisemeMap& map)
{
    return map.viseme_of(phoneme);
}

}  // namespace viseme
