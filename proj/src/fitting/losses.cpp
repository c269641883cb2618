#include "viseme/losses.hpp"

#include "viseme/error.hpp"
#include "viseme/kernels.hpp"

#include <cmath>
#include <limits>

namespace viseme {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void add_weight_grad(FrameGradient* grad, std::size_t i, double g)
{
    if (grad) {
        grad->weights[i] += g;
    }
}

void check_grad(FrameGradient* grad, std::size_t v)
{
    if (grad && grad->weights.size() != v) {
        throw DimensionError("gradient has " + std::to_string(grad->weights.size()) + " weight slots, expected " +
                             std::to_string(v));
    }
}

/// Partial derivatives of the quaternion's rotation matrix, one per component (w, x, y, z).
std::array<Mat3, 4> rotation_partials(const Quat& q)
{
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    std::array<Mat3, 4> d;
    d[0] << 0, -z, y, z, 0, -x, -y, x, 0;
    d[1] << 0, y, z, y, -2 * x, -w, z, w, -2 * x;
    d[2] << -2 * y, x, w, x, 0, z, -w, z, -2 * y;
    d[3] << -2 * z, -w, x, w, -2 * z, y, x, y, 0;
    for (auto& m : d) {
        m *= 2.0;
    }
    return d;
}

double term_weight_sum(std::span<const double> w, std::span<const std::size_t> set, double sign, double offset,
                       FrameGradient* grad)
{
    if (set.empty()) {
        return 0.0;
    }
    const double inv = 1.0 / static_cast<double>(set.size());
    double acc = 0.0;
    for (auto i : set) {
        if (i >= w.size()) {
            throw DimensionError("guidance index out of range");
        }
        const double d = w[i] - offset;
        acc += d * d;
        add_weight_grad(grad, i, sign * 2.0 * d * inv);
    }
    return sign * acc * inv;
}

struct SingleTerm {
    FrameProblem problem;
    FrameParams params;
};

SingleTerm single_term_setup(const Pose& pose, std::span<const double> w, const Rig& rig)
{
    SingleTerm s;
    s.problem.rig = &rig;
    s.problem.intrinsics = pose.intrinsics;
    s.problem.weights = LossWeights{0, 0, 0, 0, 0, 0, 0};
    s.params = FrameParams{std::vector<double>(w.begin(), w.end()), pose.rotation, pose.translation};
    return s;
}

void accumulate(FrameGradient* into, const FrameGradient& g)
{
    if (!into) {
        return;
    }
    for (std::size_t i = 0; i < g.weights.size(); ++i) {
        into->weights[i] += g.weights[i];
    }
    for (int c = 0; c < 4; ++c) {
        into->rotation[c] += g.rotation[c];
    }
    into->translation += g.translation;
}

}  // namespace

std::vector<double> FrameGradient::flatten() const
{
    std::vector<double> out(weights);
    out.insert(out.end(), rotation.begin(), rotation.end());
    out.push_back(translation.x());
    out.push_back(translation.y());
    out.push_back(translation.z());
    return out;
}

std::vector<double> flatten(const FrameParams& p)
{
    std::vector<double> out(p.weights);
    out.insert(out.end(), {p.rotation.w, p.rotation.x, p.rotation.y, p.rotation.z, p.translation.x(),
                           p.translation.y(), p.translation.z()});
    return out;
}

FrameParams unflatten(std::span<const double> flat, std::size_t viseme_count)
{
    if (flat.size() != viseme_count + 7) {
        throw DimensionError("flat parameter vector has the wrong length");
    }
    FrameParams p;
    p.weights.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(viseme_count));
    const auto* q = flat.data() + viseme_count;
    p.rotation = Quat{q[0], q[1], q[2], q[3]};
    p.translation = Vec3(q[4], q[5], q[6]);
    return p;
}

FrameEvaluator::FrameEvaluator(const Rig& rig)
    : rig_(rig),
      model_(3 * rig.vertex_count()),
      cam_(rig.vertex_count()),
      px_(rig.vertex_count()),
      dpx_(rig.vertex_count()),
      adjoint_(3 * rig.vertex_count())
{
}

std::span<const Vec2> FrameEvaluator::project_all(const FrameParams& params, const Intrinsics& k)
{
    blend_vertices(rig_, params.weights, model_);
    const Mat3 r = params.rotation.to_matrix();
    for (std::size_t v = 0; v < cam_.size(); ++v) {
        cam_[v] = r * Vec3(model_[3 * v], model_[3 * v + 1], model_[3 * v + 2]) + params.translation;
        const auto& c = cam_[v];
        px_[v] = c.z() > 0.0 ? Vec2(k.focal * c.x() / c.z() + k.cx, k.focal * c.y() / c.z() + k.cy) : Vec2(kNaN, kNaN);
    }
    return px_;
}

LossTerms FrameEvaluator::evaluate(const FrameProblem& problem, const FrameParams& params, FrameGradient* grad)
{
    const auto nv = rig_.viseme_count();
    if (params.weights.size() != nv) {
        throw DimensionError("expected " + std::to_string(nv) + " weights, got " + std::to_string(params.weights.size()));
    }
    if (grad) {
        *grad = FrameGradient(nv);
    }
    const auto& k = problem.intrinsics;
    const auto& lw = problem.weights;
    project_all(params, k);
    std::fill(dpx_.begin(), dpx_.end(), Vec2::Zero());
    bool any_pixel_adjoint = false;

    LossTerms terms;

    if (!problem.landmarks.empty()) {
        const double inv = 1.0 / static_cast<double>(problem.landmarks.size());
        for (const auto& l : problem.landmarks) {
            if (!(cam_[l.vertex].z() > 0.0)) {
                throw NumericError("landmark vertex " + std::to_string(l.vertex) + " is behind the camera");
            }
            const Vec2 r = px_[l.vertex] - l.target;
            terms.lmk += l.beta * r.squaredNorm() * inv;
            if (grad && lw.lmk != 0.0) {
                dpx_[l.vertex] += (lw.lmk * 2.0 * l.beta * inv) * r;
                any_pixel_adjoint = true;
            }
        }
    }

    if (problem.image && rig_.neutral().has_colors()) {
        const auto& img = *problem.image;
        const auto& colors = rig_.neutral().colors;
        std::size_t count = 0;
        for (std::size_t v = 0; v < px_.size(); ++v) {
            if (cam_[v].z() > 0.0 && img.contains(px_[v])) {
                ++count;
            }
        }
        if (count > 0) {
            const double inv = 1.0 / static_cast<double>(count);
            for (std::size_t v = 0; v < px_.size(); ++v) {
                if (!(cam_[v].z() > 0.0) || !img.contains(px_[v])) {
                    continue;
                }
                const auto s = sample_bilinear(img, px_[v]);
                const Vec3 r = s.value - colors[v];
                terms.rgb += r.squaredNorm() * inv;
                if (grad && lw.rgb != 0.0) {
                    const double c = lw.rgb * 2.0 * inv;
                    dpx_[v] += c * Vec2(r.dot(s.d_dx), r.dot(s.d_dy));
                    any_pixel_adjoint = true;
                }
            }
        }
    }

    if (!problem.flow.empty()) {
        const double inv = 1.0 / static_cast<double>(problem.flow.size());
        for (const auto& f : problem.flow) {
            if (!(cam_[f.vertex].z() > 0.0)) {
                throw NumericError("flow vertex " + std::to_string(f.vertex) + " is behind the camera");
            }
            const Vec2 r = px_[f.vertex] - f.target;
            terms.flow += r.squaredNorm() * inv;
            if (grad && lw.flow != 0.0) {
                dpx_[f.vertex] += (lw.flow * 2.0 * inv) * r;
                any_pixel_adjoint = true;
            }
        }
    }

    if (grad && any_pixel_adjoint) {
        // Pixel adjoints -> camera-space -> (rotation, translation, model-space) adjoints.
        const Mat3 r = params.rotation.to_matrix();
        const Mat3 rt = r.transpose();
        Mat3 outer = Mat3::Zero();
        Vec3 dt = Vec3::Zero();
        for (std::size_t v = 0; v < cam_.size(); ++v) {
            const Vec2& g = dpx_[v];
            if (g.x() == 0.0 && g.y() == 0.0) {
                adjoint_[3 * v] = adjoint_[3 * v + 1] = adjoint_[3 * v + 2] = 0.0;
                continue;
            }
            const Vec3& c = cam_[v];
            const double iz = 1.0 / c.z();
            const Vec3 a(k.focal * iz * g.x(), k.focal * iz * g.y(),
                         -k.focal * iz * iz * (c.x() * g.x() + c.y() * g.y()));
            dt += a;
            const Vec3 m(model_[3 * v], model_[3 * v + 1], model_[3 * v + 2]);
            outer += a * m.transpose();
            const Vec3 am = rt * a;
            adjoint_[3 * v] = am.x();
            adjoint_[3 * v + 1] = am.y();
            adjoint_[3 * v + 2] = am.z();
        }
        std::vector<double> gw(nv);
        kernels::row_dots(rig_.deltas_flat(), adjoint_, gw);
        for (std::size_t i = 0; i < nv; ++i) {
            grad->weights[i] += gw[i];
        }
        const auto partials = rotation_partials(params.rotation);
        std::array<double, 4> gq{};
        for (int c = 0; c < 4; ++c) {
            gq[c] = partials[c].cwiseProduct(outer).sum();
        }
        const auto& q = params.rotation;
        const double radial = gq[0] * q.w + gq[1] * q.x + gq[2] * q.y + gq[3] * q.z;
        grad->rotation = {gq[0] - radial * q.w, gq[1] - radial * q.x, gq[2] - radial * q.y, gq[3] - radial * q.z};
        grad->translation = dt;
    }

    // Terms acting on the weights alone: compute each with a scratch gradient, then scale.
    const std::span<const double> w = params.weights;
    FrameGradient scratch(nv);
    auto weighted_into = [&](double weight) {
        if (grad && weight != 0.0) {
            for (std::size_t i = 0; i < nv; ++i) {
                grad->weights[i] += weight * scratch.weights[i];
            }
        }
        std::fill(scratch.weights.begin(), scratch.weights.end(), 0.0);
    };
    FrameGradient* sg = grad ? &scratch : nullptr;
    terms.sup = loss_sup(w, problem.guidance, sg);
    weighted_into(lw.sup);
    terms.act = loss_act(w, problem.guidance, sg);
    weighted_into(lw.act);
    if (problem.neighbor) {
        terms.diff = loss_diff(w, *problem.neighbor, sg);
        weighted_into(lw.diff);
    }
    terms.range = loss_range(w, sg);
    weighted_into(lw.range);
    return terms;
}

double loss_sup(std::span<const double> w, const GuidanceSets& sets, FrameGradient* grad)
{
    check_grad(grad, w.size());
    return term_weight_sum(w, sets.suppress, 1.0, 0.0, grad);
}

double loss_act(std::span<const double> w, const GuidanceSets& sets, FrameGradient* grad)
{
    check_grad(grad, w.size());
    return term_weight_sum(w, sets.activate, -1.0, 0.0, grad);
}

double loss_diff(std::span<const double> w, std::span<const double> neighbor, FrameGradient* grad)
{
    check_grad(grad, w.size());
    if (neighbor.size() != w.size()) {
        throw DimensionError("temporal neighbor has a different viseme count");
    }
    if (w.empty()) {
        return 0.0;
    }
    const double inv = 1.0 / static_cast<double>(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = w[i] - neighbor[i];
        acc += d * d;
        add_weight_grad(grad, i, 2.0 * d * inv);
    }
    return acc * inv;
}

double loss_range(std::span<const double> w, FrameGradient* grad)
{
    check_grad(grad, w.size());
    std::vector<std::size_t> upper, lower;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 1.0) {
            upper.push_back(i);
        } else if (w[i] < 0.0) {
            lower.push_back(i);
        }
    }
    return term_weight_sum(w, upper, 1.0, 1.0, grad) + term_weight_sum(w, lower, 1.0, 0.0, grad);
}

double loss_lmk(const Pose& pose, std::span<const double> w, const Rig& rig,
                std::span<const LandmarkObservation> landmarks, FrameGradient* grad)
{
    check_grad(grad, rig.viseme_count());
    auto s = single_term_setup(pose, w, rig);
    for (const auto& l : landmarks) {
        if (auto v = rig.vertex_for_landmark(l.landmark_id)) {
            s.problem.landmarks.push_back({*v, l.position, std::isnan(l.beta) ? 1.0 : l.beta});
        }
    }
    if (s.problem.landmarks.empty()) {
        throw ConfigError("no observed landmark is bound to a rig vertex");
    }
    s.problem.weights.lmk = 1.0;
    FrameEvaluator ev(rig);
    FrameGradient g;
    const auto terms = ev.evaluate(s.problem, s.params, grad ? &g : nullptr);
    accumulate(grad, g);
    return terms.lmk;
}

double loss_rgb(const Pose& pose, std::span<const double> w, const Rig& rig, const Image& image, FrameGradient* grad)
{
    check_grad(grad, rig.viseme_count());
    if (!rig.neutral().has_colors()) {
        throw ConfigError("the photometric term needs per-vertex colors");
    }
    if (image.empty()) {
        throw ConfigError("the photometric term needs a non-empty image");
    }
    auto s = single_term_setup(pose, w, rig);
    s.problem.image = &image;
    s.problem.weights.rgb = 1.0;
    FrameEvaluator ev(rig);
    bool inside = false;
    for (const auto& p : ev.project_all(s.params, pose.intrinsics)) {
        inside = inside || image.contains(p);
    }
    if (!inside) {
        throw NumericError("every vertex projects outside the image");
    }
    FrameGradient g;
    const auto terms = ev.evaluate(s.problem, s.params, grad ? &g : nullptr);
    accumulate(grad, g);
    return terms.rgb;
}

double loss_flow(const Pose& pose, std::span<const double> w, const Pose& prev_pose, std::span<const double> prev_w,
                 const Rig& rig, std::span<const FlowCorrespondence> correspondences, FrameGradient* grad)
{
    check_grad(grad, rig.viseme_count());
    if (correspondences.empty()) {
        return 0.0;
    }
    FrameEvaluator prev(rig);
    const FrameParams prev_params{std::vector<double>(prev_w.begin(), prev_w.end()), prev_pose.rotation,
                                  prev_pose.translation};
    const auto prev_px = prev.project_all(prev_params, prev_pose.intrinsics);
    auto s = single_term_setup(pose, w, rig);
    for (const auto& c : correspondences) {
        if (c.vertex >= rig.vertex_count()) {
            throw DimensionError("flow correspondence vertex out of range");
        }
        const Vec2 p = prev_px[c.vertex];
        if (!p.allFinite()) {
            throw NumericError("flow vertex " + std::to_string(c.vertex) + " is behind the camera in the previous frame");
        }
        s.problem.flow.push_back({c.vertex, p + c.displacement});
    }
    s.problem.weights.flow = 1.0;
    FrameEvaluator ev(rig);
    FrameGradient g;
    const auto terms = ev.evaluate(s.problem, s.params, grad ? &g : nullptr);
    accumulate(grad, g);
    return terms.flow;
}

double total_loss(const FrameProblem& problem, const FrameParams& params)
{
    FrameEvaluator ev(*problem.rig);
    return ev.evaluate(problem, params, nullptr).weighted(problem.weights);
}

FrameGradient grad_total(const FrameProblem& problem, const FrameParams& params)
{
    FrameEvaluator ev(*problem.rig);
    FrameGradient g;
    ev.evaluate(problem, params, &g);
    return g;
}

}  // namespace viseme
