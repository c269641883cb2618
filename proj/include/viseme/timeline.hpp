#pragma once

#include "viseme/error.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace viseme {

struct PhonemeSegment {
    std::string phoneme;
    double start = 0.0;  ///< seconds
    double end = 0.0;    ///< seconds, > start

    bool operator==(const PhonemeSegment&) const = default;
};

/// Non-overlapping phoneme segments sorted by start time.
struct Timeline {
    std::vector<PhonemeSegment> segments;
    double duration = 0.0;  ///< seconds, >= last segment end

    bool operator==(const Timeline&) const = default;
};

/// Parses `phoneme<TAB>start_sec<TAB>end_sec` lines (`#` comments allowed).
/// Segments are sorted by start; overlaps, non-numeric times and end <= start
/// raise ParseError naming the offending line(s).
Timeline parse_alignment(std::string_view text, std::string_view source_name = "<alignment>");
std::string serialize_alignment(const Timeline& timeline);
Timeline load_alignment(const std::filesystem::path& path);

/// Number of frames covering `duration` seconds at `fps`: ceil(duration * fps),
/// with a 1e-9 guard so 100/30 s at 30 fps gives 100 frames rather than 101.
std::size_t frame_count(double duration, double fps);

/// Phoneme covering the center time (j + 0.5) / fps of each frame, or nullopt
/// where no segment does. Segments are half-open [start, end).
std::vector<std::optional<std::string>> sample_frames(const Timeline& timeline, double fps);

/// Raised for a phoneme missing from the map; a ParseError so callers treat
/// it as a data error.
class UnmappedPhonemeError : public ParseError {
public:
    explicit UnmappedPhonemeError(std::string token)
        : ParseError("unmapped phoneme '" + token + "'"), token_(std::move(token))
    {
    }
    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

/// Phoneme token -> viseme index, plus the set of tokens meaning silence.
class PhonemeVisemeMap {
public:
    /// Lines `phoneme=viseme_label` and `silence=<token list>`; labels resolve
    /// against `labels` (the rig's viseme order).
    static PhonemeVisemeMap parse(std::string_view text, std::span<const std::string> labels,
                                  std::string_view source_name = "<map>");
    static PhonemeVisemeMap load(const std::filesystem::path& path, std::span<const std::string> labels);

    PhonemeVisemeMap() = default;
    PhonemeVisemeMap(std::unordered_map<std::string, std::size_t> entries, std::unordered_set<std::string> silence,
                     std::size_t viseme_count);

    /// Viseme index for a phoneme; nullopt for silence tokens. Throws
    /// UnmappedPhonemeError for anything else.
    std::optional<std::size_t> viseme_of(std::string_view phoneme) const;
    bool is_silence(std::string_view phoneme) const;
    std::size_t viseme_count() const noexcept { return viseme_count_; }
    const std::unordered_map<std::string, std::size_t>& entries() const noexcept { return entries_; }

private:
    std::unordered_map<std::string, std::size_t> entries_;
    std::unordered_set<std::string> silence_;
    std::size_t viseme_count_ = 0;
};

std::optional<std::size_t> viseme_of(std::string_view phoneme, const PhonemeVisemeMap& map);

}  // namespace viseme
