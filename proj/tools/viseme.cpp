#include "viseme/animation.hpp"
#include "viseme/error.hpp"
#include "viseme/evaluation.hpp"
#include "viseme/fit.hpp"
#include "viseme/procedural.hpp"
#include "viseme/rig.hpp"
#include "viseme/synth.hpp"
#include "viseme/text_io.hpp"
#include "viseme/timeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace viseme;

namespace {

struct Options {
    std::string config;
    std::string rig;
    std::vector<std::string> align;
    std::string map;
    std::vector<std::string> obs;
    std::string out;
    double fps = 30.0;
    std::size_t workers = 1;
    std::uint64_t seed = 7;
    std::string rules;
    std::string curve;
    std::string poses;
    std::string assets;
    std::size_t frames = 100;
    double noise = 0.0;
    bool no_images = false;
    bool no_flow = false;
};

std::vector<std::string> rig_labels(const Options& o)
{
    return o.rig.empty() ? default_viseme_labels(16) : load_rig_manifest(o.rig).labels();
}

ProceduralRules load_rules(const Options& o)
{
    return o.rules.empty() ? ProceduralRules{} : ProceduralRules::load(o.rules);
}

FitConfig load_config(const Options& o) { return o.config.empty() ? FitConfig{} : FitConfig::load(o.config); }

void require(const std::string& value, const char* flag)
{
    if (value.empty()) {
        throw CLI::RequiredError(flag);
    }
}

std::size_t run_gen_proc(const Options& o)
{
    require(o.align.empty() ? "" : o.align.front(), "--align");
    require(o.map, "--map");
    require(o.out, "--out");
    const auto labels = rig_labels(o);
    const auto timeline = load_alignment(o.align.front());
    const auto map = PhonemeVisemeMap::load(o.map, labels);
    const auto curve = generate_procedural(timeline, o.fps, map, labels, load_rules(o));
    write_curve(o.out, curve);
    return curve.frame_count();
}

struct ClipJob {
    fs::path obs_dir;
    std::optional<fs::path> align;
    std::vector<FrameObservation> observations;
    ObservationLoadReport report;
    Curve procedural;
    std::optional<FitResult> result;
    std::exception_ptr error;
};

std::size_t run_fit(const Options& o)
{
    require(o.rig, "--rig");
    require(o.out, "--out");
    if (o.obs.empty()) {
        throw CLI::RequiredError("--obs");
    }
    const bool from_curve = !o.curve.empty();
    if (!from_curve) {
        require(o.map, "--map");
        if (o.align.size() != o.obs.size()) {
            throw CLI::ValidationError("--align", "give one --align per --obs");
        }
    } else if (o.obs.size() != 1) {
        throw CLI::ValidationError("--curve", "--curve fits a single clip");
    }
    if (o.workers == 0) {
        throw CLI::ValidationError("--workers", "must be at least 1");
    }

    const Rig rig = load_rig_manifest(o.rig);
    const FitConfig cfg = load_config(o);
    cfg.validate();
    const auto rules = load_rules(o);
    std::optional<PhonemeVisemeMap> map;
    if (!from_curve) {
        map = PhonemeVisemeMap::load(o.map, rig.labels());
    }

    // Everything is read and validated before any fitting starts.
    std::vector<ClipJob> jobs(o.obs.size());
    std::size_t missing_flow = 0;
    for (std::size_t c = 0; c < jobs.size(); ++c) {
        auto& job = jobs[c];
        job.obs_dir = o.obs[c];
        job.observations = load_observations(job.obs_dir, std::nullopt, &job.report);
        missing_flow += job.report.missing_flow.size();
        if (from_curve) {
            job.procedural = read_curve(o.curve);
            if (job.procedural.labels != rig.labels()) {
                throw DimensionError(o.curve + ": curve labels do not match the rig");
            }
        } else {
            const auto timeline = load_alignment(o.align[c]);
            job.procedural =
                generate_procedural(timeline, o.fps, *map, rig.labels(), rules, job.observations.size());
        }
    }
    if (missing_flow > 0) {
        std::cerr << "warning: " << missing_flow << " frame(s) have no flow file; the flow term is off there\n";
    }

    const auto workers = std::min(o.workers, jobs.size());
    auto work = [&](std::size_t first) {
        for (std::size_t c = first; c < jobs.size(); c += workers) {
            try {
                jobs[c].result = fit_clip(rig, jobs[c].procedural, jobs[c].observations, cfg);
            } catch (...) {
                jobs[c].error = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back(work, w);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    for (const auto& job : jobs) {
        if (job.error) {
            std::rethrow_exception(job.error);
        }
    }

    std::size_t frames = 0;
    const fs::path out(o.out);
    for (std::size_t c = 0; c < jobs.size(); ++c) {
        const auto dir = jobs.size() == 1 ? out : out / ("clip" + std::to_string(c));
        fs::create_directories(dir);
        write_curve(dir / "curve.csv", jobs[c].result->curve);
        write_file_atomic(dir / "poses.csv", serialize_poses(jobs[c].result->poses));
        frames += jobs[c].result->curve.frame_count();
    }
    return frames;
}

std::size_t run_bake(const Options& o)
{
    require(o.rig, "--rig");
    require(o.curve, "--curve");
    require(o.out, "--out");
    const Rig rig = load_rig_manifest(o.rig);
    const auto curve = read_curve(o.curve);
    const auto meshes = bake_mesh_sequence(rig, curve);
    fs::create_directories(o.out);
    for (std::size_t j = 0; j < meshes.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof name, "mesh_%05zu.obj", j);
        write_obj(fs::path(o.out) / name, meshes[j]);
    }
    return meshes.size();
}

std::size_t run_bones(const Options& o)
{
    require(o.assets, "--assets");
    require(o.curve, "--curve");
    require(o.out, "--out");
    const auto curve = read_curve(o.curve);
    const auto assets = load_bone_assets(o.assets, curve.labels);
    std::vector<BonePose> frames;
    frames.reserve(curve.frame_count());
    for (const auto& row : curve.frames) {
        frames.push_back(blend_bone_pose(assets, row));
    }
    write_file_atomic(o.out, serialize_bone_sequence(assets, frames));
    return frames.size();
}

std::size_t run_resample(const Options& o, bool fps_given)
{
    require(o.curve, "--curve");
    require(o.out, "--out");
    if (!fps_given) {
        throw CLI::RequiredError("--fps");
    }
    const auto out = resample_curve(read_curve(o.curve), o.fps);
    write_curve(o.out, out);
    return out.frame_count();
}

std::size_t run_eval(const Options& o)
{
    require(o.rig, "--rig");
    require(o.curve, "--curve");
    require(o.out, "--out");
    const Rig rig = load_rig_manifest(o.rig);
    const auto curve = read_curve(o.curve);
    if (curve.labels != rig.labels()) {
        throw DimensionError(o.curve + ": curve labels do not match the rig");
    }

    std::vector<std::pair<std::string, std::string>> outputs;
    if (!o.poses.empty() || !o.obs.empty()) {
        require(o.poses, "--poses");
        if (o.obs.size() != 1) {
            throw CLI::ValidationError("--obs", "eval takes one observation directory");
        }
        const FitConfig cfg = load_config(o);
        const auto poses = parse_poses(read_text_file(o.poses), cfg.intrinsics, o.poses);
        const auto observations = load_observations(o.obs.front(), curve.frame_count());
        std::vector<std::vector<LandmarkObservation>> landmarks;
        for (const auto& ob : observations) {
            landmarks.push_back(ob.landmarks);
        }
        const auto series = keypoint_error(rig, curve, poses, landmarks, rig.mouth_landmarks());
        outputs.emplace_back("keypoint_error.csv", serialize_metric(series));
    }
    if (rig.lip_pairs()) {
        const auto lips = lip_distance_curves(rig, curve);
        outputs.emplace_back("lip_horizontal.csv", serialize_metric(lips.horizontal));
        outputs.emplace_back("lip_vertical.csv", serialize_metric(lips.vertical));
    }
    std::string tv_text = "viseme,total_variation\n";
    const auto tv = total_variation(curve);
    for (std::size_t i = 0; i < tv.size(); ++i) {
        tv_text += curve.labels[i] + "," + format_double(tv[i]) + "\n";
    }
    outputs.emplace_back("total_variation.csv", tv_text);

    fs::create_directories(o.out);
    for (const auto& [name, text] : outputs) {
        write_file_atomic(fs::path(o.out) / name, text);
    }
    return curve.frame_count();
}

std::size_t run_synth(const Options& o)
{
    require(o.out, "--out");
    SynthOptions s;
    s.seed = o.seed;
    s.frames = o.frames;
    s.fps = o.fps;
    s.landmark_noise = o.noise;
    s.images = !o.no_images;
    s.flow = !o.no_flow;
    const auto clip = make_synth_clip(s);
    write_synth_clip(clip, o.out);
    return clip.truth.frame_count();
}

int fail(int code, const std::string& msg)
{
    std::cerr << "error: " << msg << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Viseme curve generation, fitting and baking"};
    app.require_subcommand(1);
    Options o;

    auto add_out = [&](CLI::App* s, const char* what) { s->add_option("--out", o.out, what); };
    auto add_fps = [&](CLI::App* s) { return s->add_option("--fps", o.fps, "Frame rate")->check(CLI::PositiveNumber); };

    auto* gen = app.add_subcommand("gen-proc", "Procedural curve from a phoneme alignment");
    gen->add_option("--align", o.align, "Alignment TSV")->expected(1);
    gen->add_option("--map", o.map, "Phoneme-to-viseme map");
    gen->add_option("--rig", o.rig, "Rig manifest (for viseme labels)");
    gen->add_option("--rules", o.rules, "Envelope rules file");
    add_fps(gen);
    add_out(gen, "Output curve CSV");

    auto* fit = app.add_subcommand("fit", "Fit viseme weights and head pose to observations");
    fit->add_option("--config", o.config, "Fit config file");
    fit->add_option("--rig", o.rig, "Rig manifest");
    fit->add_option("--align", o.align, "Alignment TSV, one per clip");
    fit->add_option("--map", o.map, "Phoneme-to-viseme map");
    fit->add_option("--obs", o.obs, "Observation directory, one per clip");
    fit->add_option("--rules", o.rules, "Envelope rules file");
    fit->add_option("--curve", o.curve, "Precomputed procedural curve (single clip, replaces --align)");
    fit->add_option("--workers", o.workers, "Clips fitted concurrently");
    add_fps(fit);
    add_out(fit, "Output directory");

    auto* bake = app.add_subcommand("bake", "Per-frame meshes from a curve");
    bake->add_option("--rig", o.rig, "Rig manifest");
    bake->add_option("--curve", o.curve, "Curve CSV");
    add_out(bake, "Output directory");

    auto* bones = app.add_subcommand("bones", "Per-frame bone poses from a curve");
    bones->add_option("--assets", o.assets, "Bone-pose asset file");
    bones->add_option("--curve", o.curve, "Curve CSV");
    add_out(bones, "Output CSV");

    auto* resample = app.add_subcommand("resample", "Resample a curve to another frame rate");
    resample->add_option("--curve", o.curve, "Curve CSV");
    auto* resample_fps = add_fps(resample);
    add_out(resample, "Output curve CSV");

    auto* eval = app.add_subcommand("eval", "Keypoint error, lip distances and total variation");
    eval->add_option("--rig", o.rig, "Rig manifest");
    eval->add_option("--curve", o.curve, "Curve CSV");
    eval->add_option("--poses", o.poses, "Pose CSV written by fit");
    eval->add_option("--obs", o.obs, "Observation directory")->expected(1);
    eval->add_option("--config", o.config, "Fit config (camera intrinsics)");
    add_out(eval, "Output directory");

    auto* synth = app.add_subcommand("synth", "Write a synthetic benchmark clip");
    synth->add_option("--seed", o.seed, "Random seed");
    synth->add_option("--frames", o.frames, "Frame count")->check(CLI::PositiveNumber);
    synth->add_option("--noise", o.noise, "Landmark noise sigma in pixels")->check(CLI::NonNegativeNumber);
    synth->add_flag("--no-images", o.no_images, "Skip image frames");
    synth->add_flag("--no-flow", o.no_flow, "Skip flow files");
    add_fps(synth);
    add_out(synth, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    std::size_t frames = 0;
    try {
        if (sub == gen) {
            frames = run_gen_proc(o);
        } else if (sub == fit) {
            frames = run_fit(o);
        } else if (sub == bake) {
            frames = run_bake(o);
        } else if (sub == bones) {
            frames = run_bones(o);
        } else if (sub == resample) {
            frames = run_resample(o, resample_fps->count() > 0);
        } else if (sub == eval) {
            frames = run_eval(o);
        } else {
            frames = run_synth(o);
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << name << ": " << e.what() << "\n" << sub->help();
        return 1;
    } catch (const NumericError& e) {
        return fail(3, e.what());
    } catch (const Error& e) {
        return fail(2, e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(2, e.what());
    } catch (const std::exception& e) {
        return fail(2, e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    std::cout << "OK " << name << " frames=" << frames << " ms=" << ms.count() << "\n";
    return 0;
}
