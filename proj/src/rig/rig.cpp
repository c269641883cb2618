#include "viseme/rig.hpp"

#include "viseme/error.hpp"
#include "viseme/kernels.hpp"
#include "viseme/text_io.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

namespace viseme {

namespace {

void append_flat(const Mesh& m, std::vector<double>& out)
{
    for (const auto& v : m.vertices) {
        out.push_back(v.x());
        out.push_back(v.y());
        out.push_back(v.z());
    }
}

std::uint32_t parse_vertex_index(std::string_view tok, const std::string& where)
{
    const auto v = parse_int(tok, where);
    if (v < 0) {
        throw ParseError(where + ": vertex index must be non-negative");
    }
    return static_cast<std::uint32_t>(v);
}

}  // namespace

Rig::Rig(Mesh neutral, std::vector<Mesh> visemes, std::vector<std::string> labels,
         std::vector<LandmarkBinding> bindings, std::optional<LipPairs> lips, std::vector<int> mouth_landmarks)
    : neutral_(std::move(neutral)),
      visemes_(std::move(visemes)),
      labels_(std::move(labels)),
      bindings_(std::move(bindings)),
      lips_(lips),
      mouth_landmarks_(std::move(mouth_landmarks))
{
    neutral_.validate();
    if (visemes_.empty()) {
        throw ConfigError("a rig needs at least one viseme");
    }
    if (labels_.size() != visemes_.size()) {
        throw DimensionError("rig has " + std::to_string(visemes_.size()) + " visemes but " +
                             std::to_string(labels_.size()) + " labels");
    }
    std::set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) {
            throw ConfigError("duplicate viseme label '" + l + "'");
        }
    }
    for (std::size_t i = 0; i < visemes_.size(); ++i) {
        const auto& m = visemes_[i];
        if (m.vertices.size() != neutral_.vertices.size()) {
            throw TopologyError("viseme '" + labels_[i] + "' has " + std::to_string(m.vertices.size()) +
                                " vertices, neutral has " + std::to_string(neutral_.vertices.size()));
        }
        if (m.triangles != neutral_.triangles) {
            throw TopologyError("viseme '" + labels_[i] + "' triangle list differs from the neutral");
        }
    }
    const auto n = neutral_.vertices.size();
    std::set<int> ids;
    for (const auto& b : bindings_) {
        if (b.vertex >= n) {
            throw TopologyError("landmark " + std::to_string(b.landmark_id) + " bound to missing vertex " +
                                std::to_string(b.vertex));
        }
        if (!ids.insert(b.landmark_id).second) {
            throw ConfigError("landmark " + std::to_string(b.landmark_id) + " bound twice");
        }
    }
    if (lips_) {
        for (auto v : {lips_->horizontal[0], lips_->horizontal[1], lips_->vertical[0], lips_->vertical[1]}) {
            if (v >= n) {
                throw TopologyError("lip pair vertex " + std::to_string(v) + " out of range");
            }
        }
    }

    neutral_flat_.reserve(3 * n);
    append_flat(neutral_, neutral_flat_);
    shapes_flat_.reserve(3 * n * visemes_.size());
    for (const auto& m : visemes_) {
        append_flat(m, shapes_flat_);
    }
    deltas_flat_.resize(shapes_flat_.size());
    for (std::size_t i = 0; i < visemes_.size(); ++i) {
        for (std::size_t k = 0; k < 3 * n; ++k) {
            deltas_flat_[i * 3 * n + k] = shapes_flat_[i * 3 * n + k] - neutral_flat_[k];
        }
    }
}

std::optional<std::size_t> Rig::label_index(std::string_view label) const
{
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::uint32_t> Rig::vertex_for_landmark(int landmark_id) const
{
    for (const auto& b : bindings_) {
        if (b.landmark_id == landmark_id) {
            return b.vertex;
        }
    }
    return std::nullopt;
}

bool Rig::is_mouth_landmark(int landmark_id) const
{
    return std::find(mouth_landmarks_.begin(), mouth_landmarks_.end(), landmark_id) != mouth_landmarks_.end();
}

std::vector<std::string> default_viseme_labels(std::size_t count)
{
    std::vector<std::string> labels{"MBP", "SSS", "WWW"};
    labels.resize(std::min<std::size_t>(count, labels.size()));
    for (std::size_t i = labels.size(); i < count; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "V%02zu", i);
        labels.emplace_back(buf);
    }
    return labels;
}

Rig load_rig(const std::filesystem::path& neutral_path, const std::vector<std::filesystem::path>& viseme_paths,
             std::vector<std::string> labels, std::vector<LandmarkBinding> bindings)
{
    auto neutral = load_obj(neutral_path);
    std::vector<Mesh> visemes;
    visemes.reserve(viseme_paths.size());
    for (const auto& p : viseme_paths) {
        visemes.push_back(load_obj(p));
    }
    return Rig(std::move(neutral), std::move(visemes), std::move(labels), std::move(bindings));
}

Rig load_rig_manifest(const std::filesystem::path& manifest_path)
{
    const auto kv = KeyValueFile::parse(read_text_file(manifest_path), manifest_path.string());
    const auto dir = manifest_path.parent_path();
    auto resolve = [&](std::string_view p) {
        std::filesystem::path path{std::string(p)};
        return path.is_absolute() ? path : dir / path;
    };

    std::optional<std::filesystem::path> neutral;
    std::vector<std::filesystem::path> viseme_paths;
    std::vector<std::string> labels;
    std::vector<LandmarkBinding> bindings;
    std::vector<int> mouth;
    std::optional<std::array<std::uint32_t, 2>> horiz, vert;

    for (const auto& e : kv.entries()) {
        const auto where = kv.source_name() + ":" + std::to_string(e.line);
        const auto tok = split_ws(e.value);
        if (e.key == "neutral") {
            neutral = resolve(e.value);
        } else if (e.key == "viseme") {
            if (tok.size() != 2) {
                throw ParseError(where + ": expected 'viseme = <label> <path>'");
            }
            labels.emplace_back(tok[0]);
            viseme_paths.push_back(resolve(tok[1]));
        } else if (e.key.size() > 1 && e.key[0] == 'L') {
            const auto id = parse_int(std::string_view(e.key).substr(1), where);
            bindings.push_back({static_cast<int>(id), parse_vertex_index(e.value, where)});
        } else if (e.key == "mouth_landmarks") {
            for (auto t : tok) {
                mouth.push_back(static_cast<int>(parse_int(t, where)));
            }
        } else if (e.key == "lip_horizontal" || e.key == "lip_vertical") {
            if (tok.size() != 2) {
                throw ParseError(where + ": expected two vertex indices");
            }
            std::array<std::uint32_t, 2> pair{parse_vertex_index(tok[0], where), parse_vertex_index(tok[1], where)};
            (e.key == "lip_horizontal" ? horiz : vert) = pair;
        } else {
            throw ParseError(where + ": unknown rig manifest key '" + e.key + "'");
        }
    }
    if (!neutral) {
        throw ParseError(kv.source_name() + ": missing 'neutral'");
    }
    std::optional<LipPairs> lips;
    if (horiz && vert) {
        lips = LipPairs{*horiz, *vert};
    } else if (horiz || vert) {
        throw ParseError(kv.source_name() + ": lip_horizontal and lip_vertical must be given together");
    }

    auto neutral_mesh = load_obj(*neutral);
    std::vector<Mesh> visemes;
    for (const auto& p : viseme_paths) {
        visemes.push_back(load_obj(p));
    }
    return Rig(std::move(neutral_mesh), std::move(visemes), std::move(labels), std::move(bindings), lips,
               std::move(mouth));
}

std::filesystem::path save_rig(const Rig& rig, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::string manifest = "neutral = neutral.obj\n";
    write_obj(dir / "neutral.obj", rig.neutral());
    for (std::size_t i = 0; i < rig.viseme_count(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "viseme_%02zu.obj", i);
        write_obj(dir / name, rig.visemes()[i]);
        manifest += "viseme = " + rig.labels()[i] + " " + name + "\n";
    }
    for (const auto& b : rig.bindings()) {
        manifest += "L" + std::to_string(b.landmark_id) + " = " + std::to_string(b.vertex) + "\n";
    }
    if (!rig.mouth_landmarks().empty()) {
        manifest += "mouth_landmarks =";
        for (int id : rig.mouth_landmarks()) {
            manifest += " " + std::to_string(id);
        }
        manifest += "\n";
    }
    if (const auto& lips = rig.lip_pairs()) {
        manifest += "lip_horizontal = " + std::to_string(lips->horizontal[0]) + " " +
                    std::to_string(lips->horizontal[1]) + "\n";
        manifest += "lip_vertical = " + std::to_string(lips->vertical[0]) + " " + std::to_string(lips->vertical[1]) +
                    "\n";
    }
    const auto path = dir / "rig.txt";
    write_file_atomic(path, manifest);
    return path;
}

void blend_vertices(const Rig& rig, std::span<const double> weights, std::span<double> out)
{
    if (weights.size() != rig.viseme_count()) {
        throw DimensionError("expected " + std::to_string(rig.viseme_count()) + " weights, got " +
                             std::to_string(weights.size()));
    }
    if (out.size() != 3 * rig.vertex_count()) {
        throw DimensionError("blend output buffer has the wrong size");
    }
    // (1 - sum w) B0 + sum w_i B_i keeps zero and one-hot weights bit-exact.
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    kernels::blend(rig.neutral_flat(), 1.0 - sum, rig.shapes_flat(), weights, out);
}

Mesh blend_mesh(const Rig& rig, std::span<const double> weights)
{
    std::vector<double> flat(3 * rig.vertex_count());
    blend_vertices(rig, weights, flat);
    Mesh out;
    out.triangles = rig.neutral().triangles;
    out.colors = rig.neutral().colors;
    out.vertices.resize(rig.vertex_count());
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
        out.vertices[v] = Vec3(flat[3 * v], flat[3 * v + 1], flat[3 * v + 2]);
    }
    return out;
}

}  // namespace viseme
