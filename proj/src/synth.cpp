#include "viseme/synth.hpp"

#include "viseme/error.hpp"
#include "viseme/fit.hpp"
#include "viseme/guidance.hpp"
#include "viseme/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace viseme {

namespace {

constexpr int kCols = 11;   // x in [-1, 1]
constexpr int kRows = 10;   // y in [-0.6, 1.2], +y points down the face
constexpr double kSpacing = 0.2;
constexpr double kTop = -0.6;
constexpr int kUpperLipRow = 5;  // y = 0.4
constexpr int kLowerLipRow = 6;  // y = 0.6
constexpr double kFocal = 1200.0;
constexpr double kDepth = 5.0;
constexpr double kCenterY = 0.3;  // face center placed on the optical axis

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal()
    {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

private:
    std::mt19937_64 engine_;
};

std::uint32_t vid(int row, int col) { return static_cast<std::uint32_t>(row * kCols + col); }

double grid_x(int col) { return -1.0 + kSpacing * col; }
double grid_y(int row) { return kTop + kSpacing * row; }

double lip_taper(int col) { return std::max(0.0, 1.0 - std::abs(col - 5) / 6.0); }

struct RigLayout {
    std::vector<LandmarkBinding> bindings;
    std::vector<int> mouth_ids;
};

RigLayout landmark_layout()
{
    RigLayout l;
    int id = 0;
    for (int r = 3; r <= 8; ++r) {
        for (int c = 1; c <= 9; ++c) {
            l.bindings.push_back({id, vid(r, c)});
            l.mouth_ids.push_back(id);
            ++id;
        }
    }
    const int rigid[][2] = {{0, 0}, {0, 3}, {0, 7}, {0, 10}, {1, 1}, {1, 5}, {1, 9}, {2, 0}, {2, 3}, {2, 7}, {2, 10}, {9, 0}, {9, 10}};
    for (const auto& rc : rigid) {
        l.bindings.push_back({id++, vid(rc[0], rc[1])});
    }
    return l;
}

Mesh neutral_mesh(Rng& rng)
{
    Mesh m;
    for (int r = 0; r < kRows; ++r) {
        for (int c = 0; c < kCols; ++c) {
            const double x = grid_x(c);
            const double y = grid_y(r);
            const double gap = r == kUpperLipRow ? -0.08 : (r == kLowerLipRow ? 0.08 : 0.0);
            m.vertices.emplace_back(x, y + gap * lip_taper(c), 0.25 * (x * x + y * y));
            // Colors on the 8-bit grid so images round-trip exactly.
            m.colors.emplace_back(std::round(rng.uniform(25, 230)) / 255.0, std::round(rng.uniform(25, 230)) / 255.0,
                                  std::round(rng.uniform(25, 230)) / 255.0);
        }
    }
    for (int r = 0; r + 1 < kRows; ++r) {
        // The lip gap stays open: no faces between the two lip rows inside the mouth.
        for (int c = 0; c + 1 < kCols; ++c) {
            if (r == kUpperLipRow && c >= 2 && c < 8) {
                continue;
            }
            m.triangles.push_back({vid(r, c), vid(r + 1, c), vid(r, c + 1)});
            m.triangles.push_back({vid(r, c + 1), vid(r + 1, c), vid(r + 1, c + 1)});
        }
    }
    return m;
}


using Field = std::vector<Vec3>;

Field closure_field(double amount)
{
    Field d(kRows * kCols, Vec3::Zero());
    for (int c = 0; c < kCols; ++c) {
        const double t = lip_taper(c);
        d[vid(kUpperLipRow, c)].y() += amount * t;
        d[vid(kLowerLipRow, c)].y() -= amount * t;
    }
    return d;
}

Field sss_field()
{
    Field d = closure_field(0.05);
    for (int c = 0; c < kCols; ++c) {
        for (int r : {kUpperLipRow, kLowerLipRow}) {
            d[vid(r, c)].x() += 0.35 * grid_x(c);
        }
    }
    return d;
}

Field www_field()
{
    Field d(kRows * kCols, Vec3::Zero());
    for (int c = 0; c < kCols; ++c) {
        const double t = lip_taper(c);
        d[vid(kUpperLipRow - 1, c)].y() -= 0.35 * t;
        d[vid(kLowerLipRow + 1, c)].y() += 0.35 * t;
        d[vid(kUpperLipRow - 2, c)].x() -= 0.4 * grid_x(c);
        d[vid(kLowerLipRow + 2, c)].x() -= 0.4 * grid_x(c);
        d[vid(kUpperLipRow, c)].z() -= 0.25 * t;
        d[vid(kLowerLipRow, c)].z() -= 0.25 * t;
    }
    return d;
}

/// Mouth vertices on a checkerboard, used as bump centers.
std::vector<std::pair<int, int>> bump_sites()
{
    std::vector<std::pair<int, int>> sites;
    for (int r = 4; r <= 7; ++r) {
        for (int c = 2; c <= 8; ++c) {
            if ((r + c) % 2 == 0) {
                sites.emplace_back(r, c);
            }
        }
    }
    return sites;
}

Field bump_field(Rng& rng, std::pair<int, int> site)
{
    const Vec2 center(grid_x(site.second), grid_y(site.first));
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Vec3 amp = Vec3(std::cos(angle), std::sin(angle), rng.uniform(-0.3, 0.3)) * rng.uniform(0.5, 0.6);
    const double sigma = 0.13;
    Field d(kRows * kCols, Vec3::Zero());
    for (int r = 0; r < kRows; ++r) {
        if (grid_y(r) < 0.0) {
            continue;  // upper face stays rigid
        }
        for (int c = 0; c < kCols; ++c) {
            const Vec2 p(grid_x(c), grid_y(r));
            d[vid(r, c)] = amp * std::exp(-(p - center).squaredNorm() / (2.0 * sigma * sigma));
        }
    }
    return d;
}

Mesh displaced(const Mesh& base, const Field& d)
{
    Mesh m = base;
    for (std::size_t k = 0; k < m.vertices.size(); ++k) {
        m.vertices[k] += d[k];
    }
    return m;
}

}  // namespace

Rig make_synth_rig(std::uint64_t seed, bool ambiguous_sss)
{
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const Mesh neutral = neutral_mesh(rng);
    const auto labels = default_viseme_labels(16);
    const auto layout = landmark_layout();

    std::vector<Field> fields;
    fields.push_back(closure_field(0.18));
    fields.push_back(sss_field());
    fields.push_back(www_field());
    auto sites = bump_sites();
    for (std::size_t i = sites.size(); i > 1; --i) {
        std::swap(sites[i - 1], sites[rng.index(i)]);
    }
    for (std::size_t i = 3; i < labels.size(); ++i) {
        fields.push_back(bump_field(rng, sites[(i - 3) % sites.size()]));
    }
    if (ambiguous_sss) {
        // Same as MBP wherever a landmark is bound; a different motion elsewhere.
        Field f = fields[0];
        std::vector<bool> bound(f.size(), false);
        for (const auto& b : layout.bindings) {
            bound[b.vertex] = true;
        }
        for (std::size_t k = 0; k < f.size(); ++k) {
            if (!bound[k] && neutral.vertices[k].y() > 0.0) {
                f[k] += Vec3(0.0, 0.0, -0.1);
            }
        }
        fields[1] = f;
    }

    std::vector<Mesh> visemes;
    for (const auto& f : fields) {
        visemes.push_back(displaced(neutral, f));
    }
    LipPairs lips;
    lips.horizontal = {vid(kUpperLipRow, 1), vid(kUpperLipRow, 9)};
    lips.vertical = {vid(kUpperLipRow, 5), vid(kLowerLipRow, 5)};
    return Rig(neutral, std::move(visemes), labels, layout.bindings, lips, layout.mouth_ids);
}

std::string synth_phoneme_map_text()
{
    return "# phoneme = viseme label\n"
           "m = MBP\nb = MBP\np = MBP\n"
           "s = SSS\nz = SSS\n"
           "w = WWW\n"
           "f = V03\nv = V03\n"
           "th = V04\ndh = V04\n"
           "t = V05\nd = V05\nn = V05\n"
           "k = V06\ng = V06\nng = V06\n"
           "sh = V07\nzh = V07\nch = V07\njh = V07\n"
           "r = V08\n"
           "l = V09\n"
           "aa = V10\nah = V10\n"
           "eh = V11\nae = V11\n"
           "ih = V12\niy = V12\n"
           "ao = V13\now = V13\n"
           "uh = V14\nuw = V14\n"
           "er = V15\n"
           "silence = sil sp\n";
}

namespace {

const std::vector<std::string>& phoneme_inventory()
{
    static const std::vector<std::string> inv = {"m",  "b",  "p",  "s",  "z",  "w",  "f",  "v",  "th", "dh", "t",
                                                 "d",  "n",  "k",  "g",  "ng", "sh", "zh", "ch", "jh", "r",  "l",
                                                 "aa", "ah", "eh", "ae", "ih", "iy", "ao", "ow", "uh", "uw", "er"};
    return inv;
}

Timeline make_timeline(Rng& rng, const SynthOptions& opts)
{
    const double duration = static_cast<double>(opts.frames) / opts.fps;
    Timeline tl;
    tl.duration = duration;
    const double lead = std::min(0.15, 0.1 * duration);
    tl.segments.push_back({"sil", 0.0, lead});
    double t = lead;
    const double tail_start = duration - lead;
    if (!opts.phonemes.empty()) {
        const double share = (tail_start - lead) / static_cast<double>(opts.phonemes.size());
        for (std::size_t i = 0; i < opts.phonemes.size(); ++i) {
            const double end = i + 1 == opts.phonemes.size() ? tail_start : lead + share * static_cast<double>(i + 1);
            tl.segments.push_back({opts.phonemes[i], t, end});
            t = end;
        }
    } else {
        const auto& inv = phoneme_inventory();
        while (t < tail_start - 0.07) {
            double d = rng.uniform(0.07, 0.2);
            if (tail_start - (t + d) < 0.07) {
                d = tail_start - t;
            }
            const bool pause = rng.uniform() < 0.08;
            tl.segments.push_back({pause ? "sp" : inv[rng.index(inv.size())], t, t + d});
            t += d;
        }
        if (t < tail_start) {
            tl.segments.back().end = tail_start;
        }
        t = tail_start;
    }
    tl.segments.push_back({"sil", t, duration});
    return tl;
}

Curve make_truth(Rng& rng, const Curve& procedural, const FitConfig& cfg)
{
    const auto n = procedural.frame_count();
    const auto v = procedural.viseme_count();
    Curve truth(procedural.fps, procedural.labels, n);
    const double kernel[5] = {std::exp(-2.0), std::exp(-0.5), 1.0, std::exp(-0.5), std::exp(-2.0)};
    std::vector<double> period(v), phase(v);
    for (std::size_t i = 0; i < v; ++i) {
        period[i] = rng.uniform(40.0, 90.0);
        phase[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto sets = guidance_sets(procedural, j, cfg);
        for (std::size_t i = 0; i < v; ++i) {
            double acc = 0.0, norm = 0.0;
            for (int o = -2; o <= 2; ++o) {
                const auto jj = static_cast<std::ptrdiff_t>(j) + o;
                if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(n)) {
                    continue;
                }
                acc += kernel[o + 2] * procedural.frames[jj][i];
                norm += kernel[o + 2];
            }
            const double scale =
                0.8 + 0.2 * std::sin(2.0 * std::numbers::pi * static_cast<double>(j) / period[i] + phase[i]);
            truth.frames[j][i] = std::clamp(acc / norm * scale, 0.0, 1.0);
        }
        for (auto i : sets.suppress) {
            truth.frames[j][i] = 0.0;
        }
    }
    return truth;
}

std::vector<Pose> make_poses(Rng& rng, std::size_t frames, const Intrinsics& k)
{
    const Vec3 phase(rng.uniform(0, 6.28), rng.uniform(0, 6.28), rng.uniform(0, 6.28));
    std::vector<Pose> poses;
    for (std::size_t j = 0; j < frames; ++j) {
        const double t = static_cast<double>(j);
        const Vec3 aa(0.04 * std::sin(t / 17.0 + phase.x()), 0.05 * std::sin(t / 23.0 + phase.y()),
                      0.03 * std::sin(t / 29.0 + phase.z()));
        const double angle = aa.norm();
        Quat q = angle > 0.0 ? Quat::from_axis_angle(aa / angle, angle) : Quat::identity();
        const Vec3 tr(0.05 * std::sin(t / 19.0 + phase.y()), -kCenterY + 0.04 * std::sin(t / 13.0 + phase.z()),
                      kDepth + 0.15 * std::sin(t / 31.0 + phase.x()));
        poses.push_back(Pose{q, tr, k});
    }
    return poses;
}

std::vector<Vec2> project_mesh(const std::vector<double>& flat, const Pose& pose)
{
    std::vector<Vec2> out(flat.size() / 3);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = project(Vec3(flat[3 * k], flat[3 * k + 1], flat[3 * k + 2]), pose);
    }
    return out;
}

/// Index of the nearest projected point within `radius` pixels of each pixel, or -1.
std::vector<int> nearest_map(const std::vector<Vec2>& pts, int w, int h, double radius)
{
    std::vector<int> owner(static_cast<std::size_t>(w) * h, -1);
    std::vector<double> best(owner.size(), std::numeric_limits<double>::infinity());
    const double r2 = radius * radius;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const auto& p = pts[k];
        const int x0 = std::max(0, static_cast<int>(std::floor(p.x() - radius)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(p.x() + radius)));
        const int y0 = std::max(0, static_cast<int>(std::floor(p.y() - radius)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(p.y() + radius)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d2 = (Vec2(x, y) - p).squaredNorm();
                const auto idx = static_cast<std::size_t>(y) * w + x;
                if (d2 <= r2 && d2 < best[idx]) {
                    best[idx] = d2;
                    owner[idx] = static_cast<int>(k);
                }
            }
        }
    }
    return owner;
}

Image render(const std::vector<Vec2>& px, const std::vector<Vec3>& colors)
{
    Image img(kSynthWidth, kSynthHeight, Vec3::Constant(0.5));
    const auto owner = nearest_map(px, kSynthWidth, kSynthHeight, 12.0);
    for (int y = 0; y < kSynthHeight; ++y) {
        for (int x = 0; x < kSynthWidth; ++x) {
            const int o = owner[static_cast<std::size_t>(y) * kSynthWidth + x];
            if (o >= 0) {
                img.set_pixel(x, y, colors[o]);
            }
        }
    }
    return img;
}

FlowGrid flow_field(const std::vector<Vec2>& anchor, const std::vector<Vec2>& moved, double sign)
{
    FlowGrid g(kSynthWidth, kSynthHeight);
    const auto owner = nearest_map(anchor, kSynthWidth, kSynthHeight, 20.0);
    for (int y = 0; y < kSynthHeight; ++y) {
        for (int x = 0; x < kSynthWidth; ++x) {
            const int o = owner[static_cast<std::size_t>(y) * kSynthWidth + x];
            if (o >= 0) {
                g.set(x, y, sign * (moved[o] - anchor[o]));
            }
        }
    }
    return g;
}

BonePoseAssets make_bones(Rng& rng, const std::vector<std::string>& labels)
{
    BonePoseAssets a;
    a.bones = {"jaw", "lip_upper", "lip_lower", "corner_l", "corner_r"};
    a.rest.assign(a.bones.size(), BoneTransform{});
    for (std::size_t b = 0; b < a.bones.size(); ++b) {
        a.rest[b].translation = Vec3(0.0, 0.2 * static_cast<double>(b), 0.0);
    }
    a.viseme_labels = labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        BonePose p = a.rest;
        for (auto& tr : p) {
            const Vec3 axis = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
            tr.rotation = Quat::from_axis_angle(axis, rng.uniform(0.0, 0.35));
            tr.translation += Vec3(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));
            tr.scale = Vec3::Constant(rng.uniform(0.9, 1.1));
        }
        a.viseme_poses.push_back(std::move(p));
    }
    return a;
}

}  // namespace

SynthClip make_synth_clip(const SynthOptions& opts)
{
    if (!(opts.fps > 0.0) || opts.frames == 0) {
        throw ConfigError("synthetic clip needs fps > 0 and at least one frame");
    }
    Rng rng(opts.seed);
    Rig rig = make_synth_rig(opts.seed, opts.ambiguous_sss);
    const auto& labels = rig.labels();

    FitConfig cfg;
    cfg.intrinsics = Intrinsics{kFocal, kSynthWidth / 2.0, kSynthHeight / 2.0};
    cfg.init_depth = kDepth;

    auto map_text = synth_phoneme_map_text();
    auto map = PhonemeVisemeMap::parse(map_text, labels);
    auto timeline = make_timeline(rng, opts);
    ProceduralRules rules;
    auto procedural = generate_procedural(timeline, opts.fps, map, labels, rules, opts.frames);
    auto truth = make_truth(rng, procedural, cfg);
    auto poses = make_poses(rng, opts.frames, cfg.intrinsics);

    std::vector<FrameObservation> obs(opts.frames);
    std::vector<double> flat(3 * rig.vertex_count());
    std::vector<Vec2> prev_px;
    for (std::size_t j = 0; j < opts.frames; ++j) {
        blend_vertices(rig, truth.frames[j], flat);
        const auto px = project_mesh(flat, poses[j]);
        for (const auto& b : rig.bindings()) {
            Vec2 p = px[b.vertex];
            if (opts.landmark_noise > 0.0) {
                p += opts.landmark_noise * Vec2(rng.normal(), rng.normal());
            }
            obs[j].landmarks.push_back({b.landmark_id, p, std::numeric_limits<double>::quiet_NaN()});
        }
        if (opts.images) {
            obs[j].image = render(px, rig.neutral().colors);
        }
        if (opts.flow && j > 0) {
            obs[j].flow = FlowPair{flow_field(prev_px, px, 1.0), flow_field(px, prev_px, 1.0)};
        }
        prev_px = px;
    }

    auto bones = make_bones(rng, labels);
    return SynthClip{std::move(rig),       std::move(map_text), std::move(map),   std::move(timeline),
                     rules,                std::move(procedural), std::move(truth), std::move(poses),
                     std::move(obs),       cfg,                 std::move(bones)};
}

void write_synth_clip(const SynthClip& clip, const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir / "obs");
    save_rig(clip.rig, dir / "rig");
    write_file_atomic(dir / "alignment.tsv", serialize_alignment(clip.timeline));
    write_file_atomic(dir / "map.txt", clip.map_text);
    write_file_atomic(dir / "fit.cfg", serialize_fit_config(clip.config));
    write_curve(dir / "truth.csv", clip.truth);
    write_curve(dir / "procedural.csv", clip.procedural);
    write_file_atomic(dir / "truth_poses.csv", serialize_poses(clip.poses));
    write_file_atomic(dir / "bones.csv", serialize_bone_assets(clip.bones));

    std::map<std::size_t, std::vector<LandmarkObservation>> table;
    for (std::size_t j = 0; j < clip.observations.size(); ++j) {
        const auto& o = clip.observations[j];
        table[j] = o.landmarks;
        if (o.image) {
            write_ppm(dir / "obs" / image_file_name(j), *o.image);
        }
        if (o.flow) {
            write_flow(dir / "obs" / flow_file_name(j), *o.flow);
        }
    }
    write_file_atomic(dir / "obs" / "landmarks.csv", serialize_landmark_csv(table));
}

}  // namespace viseme
