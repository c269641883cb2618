#include "viseme/observation.hpp"

#include "viseme/error.hpp"
#include "viseme/text_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

namespace viseme {

Image::Image(int width, int height, Vec3 fill) : width_(width), height_(height)
{
    if (width < 0 || height < 0) {
        throw DimensionError("image dimensions must be non-negative");
    }
    rgb_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < rgb_.size(); i += 3) {
        rgb_[i] = static_cast<float>(fill.x());
        rgb_[i + 1] = static_cast<float>(fill.y());
        rgb_[i + 2] = static_cast<float>(fill.z());
    }
}

Vec3 Image::pixel(int x, int y) const
{
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
}

void Image::set_pixel(int x, int y, const Vec3& rgb)
{
    if (x < 0 || y < 0 || x >= width_ || y >= height_) {
        throw DimensionError("pixel out of range");
    }
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    rgb_[i] = static_cast<float>(rgb.x());
    rgb_[i + 1] = static_cast<float>(rgb.y());
    rgb_[i + 2] = static_cast<float>(rgb.z());
}

bool Image::contains(const Vec2& p) const noexcept
{
    return width_ >= 2 && height_ >= 2 && p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= width_ - 1 &&
           p.y() <= height_ - 1;
}

ImageSample sample_bilinear(const Image& image, const Vec2& p)
{
    const int x0 = std::min(static_cast<int>(std::floor(p.x())), image.width() - 2);
    const int y0 = std::min(static_cast<int>(std::floor(p.y())), image.height() - 2);
    const double fx = p.x() - x0;
    const double fy = p.y() - y0;
    const Vec3 c00 = image.pixel(x0, y0);
    const Vec3 c10 = image.pixel(x0 + 1, y0);
    const Vec3 c01 = image.pixel(x0, y0 + 1);
    const Vec3 c11 = image.pixel(x0 + 1, y0 + 1);
    ImageSample s;
    s.value = (1 - fx) * (1 - fy) * c00 + fx * (1 - fy) * c10 + (1 - fx) * fy * c01 + fx * fy * c11;
    s.d_dx = (1 - fy) * (c10 - c00) + fy * (c11 - c01);
    s.d_dy = (1 - fx) * (c01 - c00) + fx * (c11 - c10);
    return s;
}

namespace {

// Skips whitespace and '#' comments in a PPM header, then reads one integer.
int ppm_header_int(std::span<const std::uint8_t> b, std::size_t& pos, const std::string& src)
{
    while (pos < b.size()) {
        if (b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') {
                ++pos;
            }
        } else if (std::isspace(b[pos])) {
            ++pos;
        } else {
            break;
        }
    }
    long value = 0;
    std::size_t digits = 0;
    while (pos < b.size() && b[pos] >= '0' && b[pos] <= '9') {
        value = value * 10 + (b[pos] - '0');
        ++pos;
        if (++digits > 9) {
            throw ParseError(src + ": PPM header value too large");
        }
    }
    if (digits == 0) {
        throw ParseError(src + ": malformed PPM header");
    }
    return static_cast<int>(value);
}

std::uint32_t read_u32_le(std::span<const std::uint8_t> b, std::size_t pos)
{
    return static_cast<std::uint32_t>(b[pos]) | (static_cast<std::uint32_t>(b[pos + 1]) << 8) |
           (static_cast<std::uint32_t>(b[pos + 2]) << 16) | (static_cast<std::uint32_t>(b[pos + 3]) << 24);
}

void append_u32_le(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
}

float read_f32_le(std::span<const std::uint8_t> b, std::size_t pos)
{
    return std::bit_cast<float>(read_u32_le(b, pos));
}

void append_f32_le(std::string& out, float f) { append_u32_le(out, std::bit_cast<std::uint32_t>(f)); }

}  // namespace

Image parse_ppm(std::span<const std::uint8_t> bytes, std::string_view source_name)
{
    const std::string src(source_name);
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
        throw ParseError(src + ": not a binary PPM (P6)");
    }
    std::size_t pos = 2;
    const int w = ppm_header_int(bytes, pos, src);
    const int h = ppm_header_int(bytes, pos, src);
    const int maxval = ppm_header_int(bytes, pos, src);
    if (maxval != 255) {
        throw ParseError(src + ": only maxval 255 is supported");
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw ParseError(src + ": malformed PPM header");
    }
    ++pos;
    const auto need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
    if (bytes.size() - pos < need) {
        throw ParseError(src + ": truncated PPM pixel data");
    }
    Image img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto i = pos + (static_cast<std::size_t>(y) * w + x) * 3;
            img.set_pixel(x, y, Vec3(bytes[i], bytes[i + 1], bytes[i + 2]) / 255.0);
        }
    }
    return img;
}

std::string serialize_ppm(const Image& image)
{
    std::string out = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    out.reserve(out.size() + image.data().size());
    for (float v : image.data()) {
        const long q = std::lround(std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(q)));
    }
    return out;
}

Image read_ppm(const std::filesystem::path& path)
{
    const auto bytes = read_binary_file(path);
    return parse_ppm(bytes, path.string());
}

void write_ppm(const std::filesystem::path& path, const Image& image)
{
    write_file_atomic(path, serialize_ppm(image));
}

std::map<std::size_t, std::vector<LandmarkObservation>> parse_landmark_csv(std::string_view text,
                                                                            std::string_view source_name)
{
    const std::string src(source_name);
    std::map<std::size_t, std::vector<LandmarkObservation>> table;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto f = split(line, ',');
        if (trim(f[0]) == "frame") {
            continue;
        }
        const auto where = src + ":" + std::to_string(line_no);
        if (f.size() != 4 && f.size() != 5) {
            throw ParseError(where + ": expected frame,landmark_id,x,y[,beta]");
        }
        const auto frame = parse_int(f[0], where + " frame");
        if (frame < 0) {
            throw ParseError(where + ": negative frame index");
        }
        LandmarkObservation o;
        o.landmark_id = static_cast<int>(parse_int(f[1], where + " landmark_id"));
        o.position = Vec2(parse_double(f[2], where + " x"), parse_double(f[3], where + " y"));
        o.beta = std::numeric_limits<double>::quiet_NaN();
        if (f.size() == 5 && !trim(f[4]).empty()) {
            o.beta = parse_double(f[4], where + " beta");
            if (!(o.beta > 0.0)) {
                throw ParseError(where + ": beta must be positive");
            }
        }
        if (!o.position.allFinite()) {
            throw ParseError(where + ": non-finite landmark position");
        }
        table[static_cast<std::size_t>(frame)].push_back(o);
    }
    return table;
}

std::string serialize_landmark_csv(const std::map<std::size_t, std::vector<LandmarkObservation>>& table)
{
    std::string out = "frame,landmark_id,x,y,beta\n";
    for (const auto& [frame, obs] : table) {
        for (const auto& o : obs) {
            out += std::to_string(frame) + "," + std::to_string(o.landmark_id) + "," + format_double(o.position.x()) +
                   "," + format_double(o.position.y()) + "," + (std::isnan(o.beta) ? "" : format_double(o.beta)) +
                   "\n";
        }
    }
    return out;
}

FlowGrid::FlowGrid(std::uint32_t width, std::uint32_t height, Vec2 fill)
    : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height * 2)
{
    for (std::size_t i = 0; i < data_.size(); i += 2) {
        data_[i] = static_cast<float>(fill.x());
        data_[i + 1] = static_cast<float>(fill.y());
    }
}

Vec2 FlowGrid::at(std::uint32_t x, std::uint32_t y) const
{
    const auto i = (static_cast<std::size_t>(y) * width_ + x) * 2;
    return {data_[i], data_[i + 1]};
}

void FlowGrid::set(std::uint32_t x, std::uint32_t y, const Vec2& d)
{
    if (x >= width_ || y >= height_) {
        throw DimensionError("flow cell out of range");
    }
    const auto i = (static_cast<std::size_t>(y) * width_ + x) * 2;
    data_[i] = static_cast<float>(d.x());
    data_[i + 1] = static_cast<float>(d.y());
}

bool FlowGrid::contains(const Vec2& p) const noexcept
{
    return width_ >= 2 && height_ >= 2 && p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= width_ - 1.0 &&
           p.y() <= height_ - 1.0;
}

Vec2 FlowGrid::sample(const Vec2& p) const
{
    const auto x0 = std::min(static_cast<std::uint32_t>(std::floor(p.x())), width_ - 2);
    const auto y0 = std::min(static_cast<std::uint32_t>(std::floor(p.y())), height_ - 2);
    const double fx = p.x() - x0;
    const double fy = p.y() - y0;
    return (1 - fx) * (1 - fy) * at(x0, y0) + fx * (1 - fy) * at(x0 + 1, y0) + (1 - fx) * fy * at(x0, y0 + 1) +
           fx * fy * at(x0 + 1, y0 + 1);
}

FlowPair parse_flow(std::span<const std::uint8_t> bytes, std::string_view source_name)
{
    const std::string src(source_name);
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "FLO1", 4) != 0) {
        throw ParseError(src + ": missing FLO1 header");
    }
    const auto w = read_u32_le(bytes, 4);
    const auto h = read_u32_le(bytes, 8);
    const auto cells = static_cast<std::uint64_t>(w) * h * 2;
    if (bytes.size() != 12 + cells * 2 * 4) {
        throw ParseError(src + ": flow payload size does not match " + std::to_string(w) + "x" + std::to_string(h));
    }
    FlowPair pair{FlowGrid(w, h), FlowGrid(w, h)};
    std::size_t pos = 12;
    for (FlowGrid* g : {&pair.forward, &pair.backward}) {
        for (std::uint32_t y = 0; y < h; ++y) {
            for (std::uint32_t x = 0; x < w; ++x) {
                const float dx = read_f32_le(bytes, pos);
                const float dy = read_f32_le(bytes, pos + 4);
                pos += 8;
                g->set(x, y, Vec2(dx, dy));
            }
        }
    }
    return pair;
}

std::string serialize_flow(const FlowPair& flow)
{
    if (flow.forward.width() != flow.backward.width() || flow.forward.height() != flow.backward.height()) {
        throw DimensionError("forward and backward flow grids differ in size");
    }
    std::string out = "FLO1";
    append_u32_le(out, flow.forward.width());
    append_u32_le(out, flow.forward.height());
    out.reserve(out.size() + flow.forward.data().size() * 8);
    for (const FlowGrid* g : {&flow.forward, &flow.backward}) {
        for (float v : g->data()) {
            append_f32_le(out, v);
        }
    }
    return out;
}

FlowPair read_flow(const std::filesystem::path& path)
{
    const auto bytes = read_binary_file(path);
    return parse_flow(bytes, path.string());
}

void write_flow(const std::filesystem::path& path, const FlowPair& flow)
{
    write_file_atomic(path, serialize_flow(flow));
}

std::string image_file_name(std::size_t frame)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%05zu.ppm", frame);
    return buf;
}

std::string flow_file_name(std::size_t frame)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "flow_%05zu.flo", frame);
    return buf;
}

std::vector<FrameObservation> load_observations(const std::filesystem::path& dir, std::optional<std::size_t> frames,
                                                ObservationLoadReport* report)
{
    std::map<std::size_t, std::vector<LandmarkObservation>> table;
    const auto lmk_path = dir / "landmarks.csv";
    if (std::filesystem::exists(lmk_path)) {
        table = parse_landmark_csv(read_text_file(lmk_path), lmk_path.string());
    }
    std::size_t n = frames.value_or(table.empty() ? 0 : table.rbegin()->first + 1);
    std::vector<FrameObservation> obs(n);
    ObservationLoadReport rep;
    rep.frames = n;
    for (auto& [frame, lm] : table) {
        if (frame < n) {
            obs[frame].landmarks = std::move(lm);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto img = dir / image_file_name(j);
        if (std::filesystem::exists(img)) {
            obs[j].image = read_ppm(img);
        } else {
            rep.missing_image.push_back(j);
        }
        if (j == 0) {
            continue;
        }
        const auto flo = dir / flow_file_name(j);
        if (std::filesystem::exists(flo)) {
            obs[j].flow = read_flow(flo);
        } else {
            rep.missing_flow.push_back(j);
        }
    }
    if (report) {
        *report = std::move(rep);
    }
    return obs;
}

}  // namespace viseme
