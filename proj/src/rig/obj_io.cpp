#include "viseme/error.hpp"
#include "viseme/mesh.hpp"
#include "viseme/text_io.hpp"

#include <limits>

namespace viseme {

void Mesh::validate() const
{
    const auto n = vertices.size();
    for (const auto& t : triangles) {
        for (auto idx : t) {
            if (idx >= n) {
                throw TopologyError("triangle index " + std::to_string(idx) + " out of range for " +
                                    std::to_string(n) + " vertices");
            }
        }
    }
    if (!colors.empty() && colors.size() != n) {
        throw TopologyError("color count " + std::to_string(colors.size()) + " does not match vertex count " +
                            std::to_string(n));
    }
}

Mesh parse_obj(std::string_view text, std::string_view source_name)
{
    Mesh mesh;
    const std::string src(source_name);
    std::size_t line_no = 0;
    std::size_t colored = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto where = src + ":" + std::to_string(line_no);
        const auto tok = split_ws(line);
        if (tok[0] == "v") {
            if (tok.size() != 4 && tok.size() != 7) {
                throw ParseError(where + ": vertex needs 3 coordinates and optionally 3 colors");
            }
            mesh.vertices.emplace_back(parse_double(tok[1], where), parse_double(tok[2], where),
                                       parse_double(tok[3], where));
            if (tok.size() == 7) {
                mesh.colors.emplace_back(parse_double(tok[4], where), parse_double(tok[5], where),
                                         parse_double(tok[6], where));
                ++colored;
            }
        } else if (tok[0] == "f") {
            if (tok.size() != 4) {
                throw ParseError(where + ": only triangle faces are supported");
            }
            Triangle t{};
            for (int c = 0; c < 3; ++c) {
                const auto idx = parse_int(tok[c + 1], where);
                if (idx < 1 || idx > std::numeric_limits<std::uint32_t>::max()) {
                    throw ParseError(where + ": face index must be a positive 1-based integer");
                }
                t[c] = static_cast<std::uint32_t>(idx - 1);
            }
            mesh.triangles.push_back(t);
        } else {
            throw ParseError(where + ": unsupported directive '" + std::string(tok[0]) + "'");
        }
    }
    if (colored != 0 && colored != mesh.vertices.size()) {
        throw ParseError(src + ": either all or no vertices must carry colors");
    }
    mesh.validate();
    return mesh;
}

std::string serialize_obj(const Mesh& mesh)
{
    std::string out;
    out.reserve(mesh.vertices.size() * 48 + mesh.triangles.size() * 20);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        out += "v " + format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
        if (mesh.has_colors()) {
            const auto& c = mesh.colors[i];
            out += " " + format_double(c.x()) + " " + format_double(c.y()) + " " + format_double(c.z());
        }
        out += '\n';
    }
    for (const auto& t : mesh.triangles) {
        out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
    }
    return out;
}

Mesh load_obj(const std::filesystem::path& path) { return parse_obj(read_text_file(path), path.string()); }

void write_obj(const std::filesystem::path& path, const Mesh& mesh) { write_file_atomic(path, serialize_obj(mesh)); }

}  // namespace viseme
