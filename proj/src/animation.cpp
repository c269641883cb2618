#include "viseme/animation.hpp"

#include "viseme/error.hpp"
#include "viseme/text_io.hpp"
#include "viseme/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace viseme {

std::vector<double> sample_curve_at(const Curve& curve, double t)
{
    const auto n = curve.frame_count();
    if (n == 0) {
        throw DimensionError("cannot sample an empty curve");
    }
    const double pos = t * curve.fps - 0.5;
    if (!(pos > 0.0)) {
        return curve.frames.front();
    }
    if (pos >= static_cast<double>(n - 1)) {
        return curve.frames.back();
    }
    const auto j = static_cast<std::size_t>(std::floor(pos));
    const double a = pos - static_cast<double>(j);
    const auto& lo = curve.frames[j];
    const auto& hi = curve.frames[j + 1];
    std::vector<double> out(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        out[i] = a == 0.0 ? lo[i] : lo[i] + a * (hi[i] - lo[i]);
    }
    return out;
}

Curve resample_curve(const Curve& curve, double fps_out)
{
    if (!(fps_out > 0.0) || !std::isfinite(fps_out)) {
        throw ConfigError("output fps must be positive");
    }
    if (curve.frame_count() == 0) {
        throw DimensionError("cannot resample an empty curve");
    }
    if (fps_out == curve.fps) {
        return curve;
    }
    const double duration = static_cast<double>(curve.frame_count()) / curve.fps;
    const auto n = std::max<std::size_t>(1, frame_count(duration, fps_out));
    Curve out(fps_out, curve.labels, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.frames[k] = sample_curve_at(curve, (static_cast<double>(k) + 0.5) / fps_out);
    }
    return out;
}

namespace {

Quat scaled(const Quat& q, double s) { return {q.w * s, q.x * s, q.y * s, q.z * s}; }

Quat added(const Quat& a, const Quat& b) { return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z}; }

}  // namespace

Quat slerp(const Quat& q0_in, const Quat& q1_in, double t)
{
    const Quat q0 = q0_in.normalized();
    Quat q1 = q1_in.normalized();
    double d = dot(q0, q1);
    if (d < 0.0) {
        q1 = -q1;
        d = -d;
    }
    d = std::min(d, 1.0);
    const double theta = std::acos(d);
    if (theta < 1e-6) {
        return added(scaled(q0, 1.0 - t), scaled(q1, t)).normalized();
    }
    const double s = std::sin(theta);
    const double a = std::sin((1.0 - t) * theta) / s;
    const double b = std::sin(t * theta) / s;
    return added(scaled(q0, a), scaled(q1, b)).normalized();
}

void BonePoseAssets::validate() const
{
    auto check = [&](const BonePose& pose, const std::string& name) {
        if (pose.size() != bones.size()) {
            throw DimensionError("pose '" + name + "' has " + std::to_string(pose.size()) + " bones, expected " +
                                 std::to_string(bones.size()));
        }
        for (std::size_t b = 0; b < pose.size(); ++b) {
            if (std::abs(pose[b].rotation.norm() - 1.0) > 1e-6) {
                throw ConfigError("pose '" + name + "' bone '" + bones[b] + "': rotation is not unit length");
            }
            if (!(pose[b].scale.array() > 0.0).all()) {
                throw ConfigError("pose '" + name + "' bone '" + bones[b] + "': scale must be positive");
            }
        }
    };
    check(rest, "rest");
    if (viseme_labels.size() != viseme_poses.size()) {
        throw DimensionError("viseme label and pose counts differ");
    }
    for (std::size_t i = 0; i < viseme_poses.size(); ++i) {
        check(viseme_poses[i], viseme_labels[i]);
    }
}

BonePoseAssets parse_bone_assets(std::string_view text, std::span<const std::string> labels,
                                 std::string_view source_name)
{
    const std::string src(source_name);
    std::vector<std::string> bone_order;
    std::map<std::string, std::size_t> bone_index;
    std::vector<std::string> pose_order;
    std::map<std::string, std::map<std::size_t, BoneTransform>> poses;

    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto f = split(line, ',');
        if (trim(f[0]) == "bone") {
            continue;
        }
        const auto where = src + ":" + std::to_string(line_no);
        if (f.size() != 12) {
            throw ParseError(where + ": expected 12 comma-separated fields");
        }
        const std::string bone(trim(f[0]));
        const std::string pose(trim(f[1]));
        if (bone.empty() || pose.empty()) {
            throw ParseError(where + ": empty bone or pose name");
        }
        double v[10];
        for (int i = 0; i < 10; ++i) {
            v[i] = parse_double(f[i + 2], where);
        }
        auto [it, inserted] = bone_index.try_emplace(bone, bone_order.size());
        if (inserted) {
            bone_order.push_back(bone);
        }
        if (!poses.contains(pose)) {
            pose_order.push_back(pose);
        }
        BoneTransform tr;
        tr.rotation = Quat{v[3], v[0], v[1], v[2]};
        tr.translation = Vec3(v[4], v[5], v[6]);
        tr.scale = Vec3(v[7], v[8], v[9]);
        if (!poses[pose].emplace(it->second, tr).second) {
            throw ParseError(where + ": bone '" + bone + "' repeated in pose '" + pose + "'");
        }
    }
    if (!poses.contains("rest")) {
        throw ParseError(src + ": no rest pose");
    }

    auto collect = [&](const std::string& name) {
        const auto& m = poses.at(name);
        if (m.size() != bone_order.size()) {
            throw DimensionError(src + ": pose '" + name + "' lists " + std::to_string(m.size()) + " of " +
                                 std::to_string(bone_order.size()) + " bones");
        }
        BonePose p;
        p.reserve(m.size());
        for (const auto& [idx, tr] : m) {
            p.push_back(tr);
        }
        return p;
    };

    BonePoseAssets assets;
    assets.bones = bone_order;
    assets.rest = collect("rest");
    if (labels.empty()) {
        for (const auto& p : pose_order) {
            if (p != "rest") {
                assets.viseme_labels.push_back(p);
            }
        }
    } else {
        assets.viseme_labels.assign(labels.begin(), labels.end());
        for (const auto& p : pose_order) {
            if (p != "rest" && std::find(labels.begin(), labels.end(), p) == labels.end()) {
                throw ParseError(src + ": pose '" + p + "' is not a rig viseme label");
            }
        }
    }
    for (const auto& label : assets.viseme_labels) {
        if (!poses.contains(label)) {
            throw DimensionError(src + ": no pose for viseme '" + label + "'");
        }
        assets.viseme_poses.push_back(collect(label));
    }
    assets.validate();
    return assets;
}

namespace {

void append_pose(std::string& out, const std::vector<std::string>& bones, const std::string& label,
                 const BonePose& pose)
{
    for (std::size_t b = 0; b < bones.size(); ++b) {
        const auto& tr = pose[b];
        out += bones[b] + "," + label;
        for (double v : {tr.rotation.x, tr.rotation.y, tr.rotation.z, tr.rotation.w, tr.translation.x(),
                         tr.translation.y(), tr.translation.z(), tr.scale.x(), tr.scale.y(), tr.scale.z()}) {
            out += "," + format_double(v);
        }
        out += '\n';
    }
}

constexpr const char* kBoneHeader = "bone,pose_label,qx,qy,qz,qw,tx,ty,tz,sx,sy,sz\n";

}  // namespace

std::string serialize_bone_assets(const BonePoseAssets& assets)
{
    std::string out = kBoneHeader;
    append_pose(out, assets.bones, "rest", assets.rest);
    for (std::size_t i = 0; i < assets.viseme_poses.size(); ++i) {
        append_pose(out, assets.bones, assets.viseme_labels[i], assets.viseme_poses[i]);
    }
    return out;
}

BonePoseAssets load_bone_assets(const std::filesystem::path& path, std::span<const std::string> labels)
{
    return parse_bone_assets(read_text_file(path), labels, path.string());
}

BonePose blend_bone_pose(const BonePoseAssets& assets, std::span<const double> weights)
{
    if (weights.size() != assets.viseme_poses.size()) {
        throw DimensionError("weight vector has " + std::to_string(weights.size()) + " entries, assets have " +
                             std::to_string(assets.viseme_poses.size()) + " viseme poses");
    }
    double sum = 0.0;
    for (double w : weights) {
        sum += w;
    }
    const double rest_w = std::max(0.0, 1.0 - sum);
    const double lin_rest = 1.0 - sum;

    BonePose out(assets.bones.size());
    for (std::size_t b = 0; b < out.size(); ++b) {
        const auto& rest = assets.rest[b];
        Vec3 t = lin_rest * rest.translation;
        Vec3 s = lin_rest * rest.scale;
        Quat q = rest_w > 0.0 ? scaled(rest.rotation, rest_w) : Quat{0.0, 0.0, 0.0, 0.0};
        std::size_t contributors = rest_w > 0.0 ? 1 : 0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double w = weights[i];
            if (w == 0.0) {
                continue;
            }
            const auto& p = assets.viseme_poses[i][b];
            t += w * p.translation;
            s += w * p.scale;
            const Quat r = dot(p.rotation, rest.rotation) < 0.0 ? -p.rotation : p.rotation;
            q = added(q, scaled(r, w));
            ++contributors;
            last = i;
        }
        out[b].translation = t;
        out[b].scale = s;
        if (contributors == 0 || (contributors == 1 && rest_w > 0.0)) {
            out[b].rotation = rest.rotation;
        } else if (contributors == 1 && weights[last] > 0.0) {
            out[b].rotation = assets.viseme_poses[last][b].rotation;
        } else if (q.norm() < 1e-12) {
            out[b].rotation = rest.rotation;
        } else {
            out[b].rotation = q.normalized();
        }
    }
    return out;
}

std::string serialize_bone_sequence(const BonePoseAssets& assets, std::span<const BonePose> frames)
{
    std::string out = kBoneHeader;
    for (std::size_t j = 0; j < frames.size(); ++j) {
        append_pose(out, assets.bones, "f" + std::to_string(j), frames[j]);
    }
    return out;
}

std::vector<Mesh> bake_mesh_sequence(const Rig& rig, const Curve& curve)
{
    if (curve.viseme_count() != rig.viseme_count()) {
        throw DimensionError("curve has " + std::to_string(curve.viseme_count()) + " visemes, rig has " +
                             std::to_string(rig.viseme_count()));
    }
    std::vector<Mesh> out;
    out.reserve(curve.frame_count());
    for (const auto& row : curve.frames) {
        out.push_back(blend_mesh(rig, row));
    }
    return out;
}

}  // namespace viseme
