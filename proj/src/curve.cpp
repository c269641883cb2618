#include "viseme/curve.hpp"

#include "viseme/error.hpp"
#include "viseme/text_io.hpp"

#include <cmath>

namespace viseme {

Curve::Curve(double fps_, std::vector<std::string> labels_, std::size_t frame_count)
    : fps(fps_), labels(std::move(labels_)), frames(frame_count, std::vector<double>(labels.size(), 0.0))
{
}

std::string serialize_curve(const Curve& curve)
{
    std::string out = "# fps=" + format_double(curve.fps) + "\nframe";
    for (const auto& l : curve.labels) {
        out += "," + l;
    }
    out += '\n';
    for (std::size_t j = 0; j < curve.frames.size(); ++j) {
        const auto& row = curve.frames[j];
        if (row.size() != curve.labels.size()) {
            throw DimensionError("curve frame " + std::to_string(j) + " has the wrong width");
        }
        out += std::to_string(j);
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw NumericError("curve frame " + std::to_string(j) + " holds a non-finite value");
            }
            out += "," + format_fixed(v, 6);
        }
        out += '\n';
    }
    return out;
}

Curve parse_curve(std::string_view text, std::string_view source_name)
{
    const std::string src(source_name);
    Curve curve;
    bool have_fps = false;
    bool have_header = false;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        const auto where = src + ":" + std::to_string(line_no);
        if (line.front() == '#') {
            auto body = trim(line.substr(1));
            if (body.substr(0, 4) == "fps=") {
                curve.fps = parse_double(body.substr(4), where + " fps");
                if (!(curve.fps > 0.0)) {
                    throw ParseError(where + ": fps must be positive");
                }
                have_fps = true;
            }
            continue;
        }
        auto fields = split(line, ',');
        if (!have_header) {
            if (trim(fields[0]) != "frame" || fields.size() < 2) {
                throw ParseError(where + ": expected header 'frame,<labels>'");
            }
            for (std::size_t i = 1; i < fields.size(); ++i) {
                curve.labels.emplace_back(trim(fields[i]));
            }
            have_header = true;
            continue;
        }
        if (fields.size() != curve.labels.size() + 1) {
            throw ParseError(where + ": expected " + std::to_string(curve.labels.size() + 1) + " fields");
        }
        if (parse_int(fields[0], where + " frame") != static_cast<long long>(curve.frames.size())) {
            throw ParseError(where + ": frame indices must be consecutive from 0");
        }
        std::vector<double> row;
        row.reserve(curve.labels.size());
        for (std::size_t i = 1; i < fields.size(); ++i) {
            row.push_back(parse_double(fields[i], where));
        }
        curve.frames.push_back(std::move(row));
    }
    if (!have_fps) {
        throw ParseError(src + ": missing '# fps=' line");
    }
    if (!have_header) {
        throw ParseError(src + ": missing header");
    }
    return curve;
}

void write_curve(const std::filesystem::path& path, const Curve& curve)
{
    write_file_atomic(path, serialize_curve(curve));
}

Curve read_curve(const std::filesystem::path& path) { return parse_curve(read_text_file(path), path.string()); }

}  // namespace viseme
