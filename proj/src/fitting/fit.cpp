#include "viseme/fit.hpp"

#include "viseme/adam.hpp"
#include "viseme/error.hpp"
#include "viseme/flow.hpp"
#include "viseme/guidance.hpp"
#include "viseme/text_io.hpp"

#include <algorithm>
#include <cmath>

namespace viseme {

std::vector<ResolvedLandmark> resolve_landmarks(const Rig& rig, std::span<const LandmarkObservation> observed,
                                                const FitConfig& cfg)
{
    std::vector<ResolvedLandmark> out;
    out.reserve(observed.size());
    for (const auto& o : observed) {
        const auto v = rig.vertex_for_landmark(o.landmark_id);
        if (!v) {
            continue;
        }
        double beta = o.beta;
        if (std::isnan(beta)) {
            beta = rig.is_mouth_landmark(o.landmark_id) ? cfg.mouth_beta : cfg.default_beta;
        }
        out.push_back({*v, o.position, beta});
    }
    return out;
}

Pose estimate_initial_pose(const Rig& rig, std::span<const double> weights,
                           std::span<const ResolvedLandmark> landmarks, const FitConfig& cfg)
{
    Pose pose{Quat::identity(), Vec3(0.0, 0.0, cfg.init_depth), cfg.intrinsics};
    if (landmarks.size() < 2) {
        return pose;
    }
    const auto mesh = blend_mesh(rig, weights);
    Vec3 mc = Vec3::Zero();
    Vec2 pc = Vec2::Zero();
    for (const auto& l : landmarks) {
        mc += mesh.vertices[l.vertex];
        pc += l.target;
    }
    const double inv = 1.0 / static_cast<double>(landmarks.size());
    mc *= inv;
    pc *= inv;
    double ms = 0.0, ps = 0.0;
    for (const auto& l : landmarks) {
        ms += (mesh.vertices[l.vertex].head<2>() - mc.head<2>()).squaredNorm();
        ps += (l.target - pc).squaredNorm();
    }
    if (!(ms > 0.0) || !(ps > 0.0)) {
        return pose;
    }
    const double depth = cfg.intrinsics.focal * std::sqrt(ms / ps);
    pose.translation = Vec3((pc.x() - cfg.intrinsics.cx) * depth / cfg.intrinsics.focal - mc.x(),
                            (pc.y() - cfg.intrinsics.cy) * depth / cfg.intrinsics.focal - mc.y(), depth - mc.z());
    return pose;
}

FrameParams optimize_frame(FrameEvaluator& evaluator, const FrameProblem& problem, FrameParams params,
                           const FitConfig& cfg, LossTerms* final_terms)
{
    AdamState state(params.weights.size() + 7);
    FrameGradient grad;
    for (std::size_t it = 0; it < cfg.iters; ++it) {
        evaluator.evaluate(problem, params, &grad);
        adam_step(state, params, grad, scheduled_lr(it, cfg.lr0, cfg.decay_every, cfg.decay_factor));
    }
    if (final_terms) {
        *final_terms = evaluator.evaluate(problem, params, nullptr);
    }
    return params;
}

FitResult fit_clip(const Rig& rig, const Curve& procedural, std::span<const FrameObservation> observations,
                   const FitConfig& cfg)
{
    cfg.validate();
    const auto frames = observations.size();
    if (procedural.frame_count() != frames) {
        throw DimensionError("procedural curve has " + std::to_string(procedural.frame_count()) + " frames but " +
                             std::to_string(frames) + " observations were given");
    }
    if (procedural.viseme_count() != rig.viseme_count()) {
        throw DimensionError("procedural curve and rig disagree on the viseme count");
    }

    FitResult result;
    result.curve = Curve(procedural.fps, rig.labels(), frames);
    if (frames == 0) {
        return result;
    }

    FrameEvaluator evaluator(rig);
    std::vector<FrameParams> solution(frames);
    std::vector<LossTerms> terms(frames);

    auto base_problem = [&](std::size_t j) {
        FrameProblem p;
        p.rig = &rig;
        p.intrinsics = cfg.intrinsics;
        p.weights = cfg.weights;
        p.landmarks = resolve_landmarks(rig, observations[j].landmarks, cfg);
        p.image = observations[j].image ? &*observations[j].image : nullptr;
        p.guidance = guidance_sets(procedural, j, cfg);
        return p;
    };

    auto run_frame = [&](std::size_t j, auto&& body) {
        try {
            body();
        } catch (const NumericError& e) {
            throw NumericError("frame " + std::to_string(j) + ": " + e.what());
        }
    };

    // Pass 1: forward, initialized from the procedural weights and the previous pose.
    for (std::size_t j = 0; j < frames; ++j) {
        run_frame(j, [&] {
            auto problem = base_problem(j);
            FrameParams init;
            init.weights = procedural.frames[j];
            if (j == 0) {
                const auto pose = estimate_initial_pose(rig, init.weights, problem.landmarks, cfg);
                init.rotation = pose.rotation;
                init.translation = pose.translation;
            } else {
                const auto& prev = solution[j - 1];
                init.rotation = prev.rotation;
                init.translation = prev.translation;
                problem.neighbor = prev.weights;

                const auto& obs = observations[j];
                if (obs.flow) {
                    const auto prev_px = evaluator.project_all(prev, cfg.intrinsics);
                    const std::vector<Vec2> prev_proj(prev_px.begin(), prev_px.end());
                    for (const auto& c : screen_flow(obs.flow->forward, obs.flow->backward, cfg.tau_flow, prev_proj)) {
                        problem.flow.push_back({c.vertex, prev_proj[c.vertex] + c.displacement});
                    }
                } else if (!obs.flow_correspondences.empty()) {
                    const auto prev_px = evaluator.project_all(prev, cfg.intrinsics);
                    const std::vector<Vec2> prev_proj(prev_px.begin(), prev_px.end());
                    for (const auto& c : obs.flow_correspondences) {
                        if (c.vertex < prev_proj.size() && prev_proj[c.vertex].allFinite()) {
                            problem.flow.push_back({c.vertex, prev_proj[c.vertex] + c.displacement});
                        }
                    }
                }
            }
            solution[j] = optimize_frame(evaluator, problem, std::move(init), cfg, &terms[j]);
        });
    }

    // Pass 2: backward, temporal term tied to the already-refined frame j+1, no flow.
    for (std::size_t r = frames; r-- > 0;) {
        run_frame(r, [&] {
            auto problem = base_problem(r);
            if (r + 1 < frames) {
                problem.neighbor = solution[r + 1].weights;
            }
            solution[r] = optimize_frame(evaluator, problem, solution[r], cfg, &terms[r]);
        });
    }

    result.poses.reserve(frames);
    for (std::size_t j = 0; j < frames; ++j) {
        auto& row = result.curve.frames[j];
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = std::clamp(solution[j].weights[i], 0.0, 1.0);
        }
        result.poses.push_back(solution[j].pose(cfg.intrinsics));
    }
    result.final_terms = std::move(terms);
    return result;
}

FitResult fit_clip(const Rig& rig, const Timeline& timeline, const PhonemeVisemeMap& map,
                   const ProceduralRules& rules, double fps, std::span<const FrameObservation> observations,
                   const FitConfig& cfg)
{
    const auto procedural = generate_procedural(timeline, fps, map, rig.labels(), rules, observations.size());
    return fit_clip(rig, procedural, observations, cfg);
}

std::string serialize_poses(std::span<const Pose> poses)
{
    std::string out = "frame,qw,qx,qy,qz,tx,ty,tz\n";
    for (std::size_t j = 0; j < poses.size(); ++j) {
        const auto& q = poses[j].rotation;
        const auto& t = poses[j].translation;
        out += std::to_string(j);
        for (double v : {q.w, q.x, q.y, q.z, t.x(), t.y(), t.z()}) {
            out += "," + format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<Pose> parse_poses(std::string_view text, const Intrinsics& k, std::string_view source_name)
{
    const std::string src(source_name);
    std::vector<Pose> poses;
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
        if (f.size() != 8) {
            throw ParseError(where + ": expected frame,qw,qx,qy,qz,tx,ty,tz");
        }
        if (parse_int(f[0], where) != static_cast<long long>(poses.size())) {
            throw ParseError(where + ": frame indices must be consecutive from 0");
        }
        double v[7];
        for (int i = 0; i < 7; ++i) {
            v[i] = parse_double(f[i + 1], where);
        }
        Quat q{v[0], v[1], v[2], v[3]};
        if (std::abs(q.norm() - 1.0) > 1e-12) {
            q = q.normalized();
        }
        poses.push_back(Pose{q, Vec3(v[4], v[5], v[6]), k});
    }
    return poses;
}

}  // namespace viseme
