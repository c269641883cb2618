#include "viseme/fit_config.hpp"

#include "viseme/error.hpp"
#include "viseme/text_io.hpp"

#include <cmath>
#include <string>

namespace viseme {

void FitConfig::validate() const
{
    const double w[] = {weights.lmk, weights.rgb, weights.sup, weights.act, weights.flow, weights.diff, weights.range};
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("loss weights must be finite and non-negative");
        }
    }
    if (n > m) {
        throw ConfigError("guidance requires n <= m");
    }
    if (iters < 1) {
        throw ConfigError("iters must be at least 1");
    }
    if (!(lr0 > 0.0) || decay_every < 1 || !(decay_factor > 0.0) || decay_factor > 1.0) {
        throw ConfigError("learning-rate schedule needs lr0 > 0, decay_every >= 1, decay_factor in (0,1]");
    }
    if (!(tau_flow > 0.0)) {
        throw ConfigError("tau_flow must be positive");
    }
    if (!(eps_act >= 0.0)) {
        throw ConfigError("eps_act must be non-negative");
    }
    if (!(intrinsics.focal > 0.0) || !(init_depth > 0.0)) {
        throw ConfigError("focal length and init_depth must be positive");
    }
    if (!(mouth_beta > 0.0) || !(default_beta > 0.0)) {
        throw ConfigError("landmark betas must be positive");
    }
}

FitConfig FitConfig::parse(std::string_view text, std::string_view source_name)
{
    const auto kv = KeyValueFile::parse(text, source_name);
    FitConfig c;
    for (const auto& e : kv.entries()) {
        const auto where = kv.source_name() + ":" + std::to_string(e.line);
        auto as_size = [&] {
            const auto v = parse_int(e.value, where);
            if (v < 0) {
                throw ConfigError(where + ": must be non-negative");
            }
            return static_cast<std::size_t>(v);
        };
        const auto& k = e.key;
        if (k == "w1") c.weights.lmk = parse_double(e.value, where);
        else if (k == "w2") c.weights.rgb = parse_double(e.value, where);
        else if (k == "w3") c.weights.sup = parse_double(e.value, where);
        else if (k == "w4") c.weights.act = parse_double(e.value, where);
        else if (k == "w5") c.weights.flow = parse_double(e.value, where);
        else if (k == "w6") c.weights.diff = parse_double(e.value, where);
        else if (k == "w7") c.weights.range = parse_double(e.value, where);
        else if (k == "m") c.m = as_size();
        else if (k == "n") c.n = as_size();
        else if (k == "radius") c.radius = as_size();
        else if (k == "iters") c.iters = as_size();
        else if (k == "lr0") c.lr0 = parse_double(e.value, where);
        else if (k == "decay_every") c.decay_every = as_size();
        else if (k == "decay_factor") c.decay_factor = parse_double(e.value, where);
        else if (k == "tau_flow") c.tau_flow = parse_double(e.value, where);
        else if (k == "eps_act") c.eps_act = parse_double(e.value, where);
        else if (k == "focal") c.intrinsics.focal = parse_double(e.value, where);
        else if (k == "cx") c.intrinsics.cx = parse_double(e.value, where);
        else if (k == "cy") c.intrinsics.cy = parse_double(e.value, where);
        else if (k == "init_depth") c.init_depth = parse_double(e.value, where);
        else if (k == "mouth_beta") c.mouth_beta = parse_double(e.value, where);
        else if (k == "default_beta") c.default_beta = parse_double(e.value, where);
        else throw ParseError(where + ": unknown config key '" + k + "'");
    }
    c.validate();
    return c;
}

FitConfig FitConfig::load(const std::filesystem::path& path) { return parse(read_text_file(path), path.string()); }

std::string serialize_fit_config(const FitConfig& c)
{
    std::string out;
    auto put = [&](const char* key, const std::string& v) { out += std::string(key) + " = " + v + "\n"; };
    put("w1", format_double(c.weights.lmk));
    put("w2", format_double(c.weights.rgb));
    put("w3", format_double(c.weights.sup));
    put("w4", format_double(c.weights.act));
    put("w5", format_double(c.weights.flow));
    put("w6", format_double(c.weights.diff));
    put("w7", format_double(c.weights.range));
    put("m", std::to_string(c.m));
    put("n", std::to_string(c.n));
    put("radius", std::to_string(c.radius));
    put("iters", std::to_string(c.iters));
    put("lr0", format_double(c.lr0));
    put("decay_every", std::to_string(c.decay_every));
    put("decay_factor", format_double(c.decay_factor));
    put("tau_flow", format_double(c.tau_flow));
    put("eps_act", format_double(c.eps_act));
    put("focal", format_double(c.intrinsics.focal));
    put("cx", format_double(c.intrinsics.cx));
    put("cy", format_double(c.intrinsics.cy));
    put("init_depth", format_double(c.init_depth));
    put("mouth_beta", format_double(c.mouth_beta));
    put("default_beta", format_double(c.default_beta));
    return out;
}

}  // namespace viseme
