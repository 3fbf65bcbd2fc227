#include "rollkit/config.hpp"

#include <fstream>
#include <set>

namespace rollkit {

namespace {

using nlohmann::json;

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw ConfigError(std::string(where) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw ConfigError(std::string(where) + ": unknown key \"" + key + "\"");
    }
}

double need_num(const json& j, const char* key, const char* where) {
    if (!j.contains(key))
        throw ConfigError(std::string(where) + ": missing \"" + key + "\"");
    const auto& v = j.at(key);
    if (!v.is_number())
        throw ConfigError(std::string(where) + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

std::optional<double> opt_num(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_number())
        throw ConfigError(std::string(where) + ": \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

double opt_num_or(const json& j, const char* key, const char* where, double dflt) {
    return opt_num(j, key, where).value_or(dflt);
}

} // namespace

SceneConfig SceneConfig::from_json(const nlohmann::json& j) {
    SceneConfig c;
    check_keys(j, "config",
               {"surface", "body", "initial", "integrator", "equilibria", "plot",
                "verify", "output"});

    if (!j.contains("surface")) throw ConfigError("config: missing \"surface\"");
    {
        const json& s = j.at("surface");
        check_keys(s, "surface",
                   {"kind", "R", "r", "h0", "f0", "override_standard_position",
                    "curvature", "theta_min", "theta_max"});
        if (!s.contains("kind") || !s.at("kind").is_string())
            throw ConfigError("surface: missing string \"kind\"");
        c.surface.kind = s.at("kind").get<std::string>();
        if (c.surface.kind == "torus") {
            c.surface.R = need_num(s, "R", "surface");
            c.surface.r = need_num(s, "r", "surface");
            c.surface.h0 = opt_num(s, "h0", "surface");
            c.surface.f0 = opt_num(s, "f0", "surface");
            c.surface.override_standard_position =
                s.value("override_standard_position", false);
            if ((c.surface.h0 || c.surface.f0) && !c.surface.override_standard_position)
                throw ConfigError("surface: torus h0/f0 need override_standard_position=true");
            if (s.contains("curvature"))
                throw ConfigError("surface: \"curvature\" is for kind=general");
        } else if (c.surface.kind == "general") {
            c.surface.h0 = need_num(s, "h0", "surface");
            c.surface.f0 = need_num(s, "f0", "surface");
            if (!s.contains("curvature") || !s.at("curvature").is_array())
                throw ConfigError("surface: general kind needs a \"curvature\" array");
            for (const auto& pair : s.at("curvature")) {
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
                    !pair[1].is_number())
                    throw ConfigError("surface: curvature entries must be [theta, r] pairs");
                c.surface.curvature.push_back({pair[0].get<double>(), pair[1].get<double>()});
            }
        } else {
            throw ConfigError("surface: kind must be \"torus\" or \"general\"");
        }
        c.surface.theta_min = opt_num(s, "theta_min", "surface");
        c.surface.theta_max = opt_num(s, "theta_max", "surface");
    }

    if (!j.contains("body")) throw ConfigError("config: missing \"body\"");
    {
        const json& b = j.at("body");
        check_keys(b, "body", {"m", "g", "inertia"});
        c.body.m = need_num(b, "m", "body");
        c.body.g = need_num(b, "g", "body");
        if (!(c.body.m > 0.0) || !(c.body.g > 0.0))
            throw ConfigError("body: m and g must be positive");
        if (!b.contains("inertia")) throw ConfigError("body: missing \"inertia\"");
        const json& in = b.at("inertia");
        if (in.is_string()) {
            c.body.preset = in.get<std::string>();
            if (c.body.preset != "solid" && c.body.preset != "hollow")
                throw ConfigError("body: inertia preset must be \"solid\" or \"hollow\"");
            if (c.surface.kind != "torus")
                throw ConfigError("body: inertia presets require a torus surface");
        } else {
            check_keys(in, "body.inertia", {"I1", "I3"});
            c.body.I1 = need_num(in, "I1", "body.inertia");
            c.body.I3 = need_num(in, "I3", "body.inertia");
            if (!(*c.body.I1 > 0.0) || !(*c.body.I3 > 0.0))
                throw ConfigError("body: inertias must be positive");
        }
    }

    if (j.contains("initial")) {
        const json& i = j.at("initial");
        check_keys(i, "initial",
                   {"theta0", "p_theta0", "ell", "theta_dot0", "psi_dot0", "psi0",
                    "phi0", "x0", "y0"});
        c.initial.present = true;
        c.initial.theta0 = need_num(i, "theta0", "initial");
        c.initial.p_theta0 = opt_num(i, "p_theta0", "initial");
        c.initial.ell = opt_num(i, "ell", "initial");
        c.initial.theta_dot0 = opt_num(i, "theta_dot0", "initial");
        c.initial.psi_dot0 = opt_num(i, "psi_dot0", "initial");
        c.initial.psi0 = opt_num_or(i, "psi0", "initial", 0.0);
        c.initial.phi0 = opt_num_or(i, "phi0", "initial", 0.0);
        c.initial.x0 = opt_num_or(i, "x0", "initial", 0.0);
        c.initial.y0 = opt_num_or(i, "y0", "initial", 0.0);
        const bool reduced_style = c.initial.ell.has_value();
        const bool rate_style = c.initial.theta_dot0 || c.initial.psi_dot0;
        if (reduced_style == rate_style)
            throw ConfigError("initial: give either {ell, p_theta0} or "
                              "{theta_dot0, psi_dot0}, not both");
        if (rate_style && (!c.initial.theta_dot0 || !c.initial.psi_dot0))
            throw ConfigError("initial: rate style needs both theta_dot0 and psi_dot0");
    }

    if (j.contains("integrator")) {
        const json& g = j.at("integrator");
        check_keys(g, "integrator",
                   {"method", "dt", "t_end", "output_every", "oracle_dt"});
        c.integrator.method = g.value("method", "rk4");
        if (c.integrator.method != "rk4" && c.integrator.method != "rk45")
            throw ConfigError("integrator: method must be \"rk4\" or \"rk45\"");
        c.integrator.dt = opt_num_or(g, "dt", "integrator", 1e-3);
        c.integrator.t_end = opt_num_or(g, "t_end", "integrator", 10.0);
        if (!(c.integrator.dt > 0.0) || !(c.integrator.t_end >= 0.0))
            throw ConfigError("integrator: dt must be positive and t_end nonnegative");
        c.integrator.output_every =
            static_cast<int>(opt_num_or(g, "output_every", "integrator", 10.0));
        if (c.integrator.output_every < 1)
            throw ConfigError("integrator: output_every must be >= 1");
        c.integrator.oracle_dt = opt_num(g, "oracle_dt", "integrator");
    }

    if (j.contains("equilibria")) {
        const json& e = j.at("equilibria");
        check_keys(e, "equilibria", {"ell", "ell_min", "ell_max", "samples"});
        c.equilibria.present = true;
        c.equilibria.ell = opt_num(e, "ell", "equilibria");
        c.equilibria.ell_min = opt_num(e, "ell_min", "equilibria");
        c.equilibria.ell_max = opt_num(e, "ell_max", "equilibria");
        c.equilibria.samples =
            static_cast<int>(opt_num_or(e, "samples", "equilibria", 400.0));
        const bool single = c.equilibria.ell.has_value();
        const bool range = c.equilibria.ell_min && c.equilibria.ell_max;
        if (!single && !range)
            throw ConfigError("equilibria: give \"ell\" or \"ell_min\"+\"ell_max\"");
    }

    if (j.contains("plot")) {
        const json& p = j.at("plot");
        check_keys(p, "plot",
                   {"kind", "ell", "levels", "theta_min", "theta_max", "p_min",
                    "p_max", "n_theta", "n_p"});
        c.plot.present = true;
        c.plot.kind = p.value("kind", "");
        static const std::set<std::string> kinds{"potential", "phase", "bifurcation",
                                                 "track"};
        if (!kinds.count(c.plot.kind))
            throw ConfigError("plot: kind must be potential|phase|bifurcation|track");
        c.plot.ell = opt_num(p, "ell", "plot");
        if (p.contains("levels"))
            for (const auto& v : p.at("levels")) c.plot.levels.push_back(v.get<double>());
        c.plot.theta_min = opt_num(p, "theta_min", "plot");
        c.plot.theta_max = opt_num(p, "theta_max", "plot");
        c.plot.p_min = opt_num(p, "p_min", "plot");
        c.plot.p_max = opt_num(p, "p_max", "plot");
        c.plot.n_theta = static_cast<int>(opt_num_or(p, "n_theta", "plot", 200.0));
        c.plot.n_p = static_cast<int>(opt_num_or(p, "n_p", "plot", 200.0));
    }

    if (j.contains("verify")) {
        const json& v = j.at("verify");
        check_keys(v, "verify", {"grid", "random_samples"});
        c.verify.grid = static_cast<int>(opt_num_or(v, "grid", "verify", 1000.0));
        c.verify.random_samples =
            static_cast<int>(opt_num_or(v, "random_samples", "verify", 1000.0));
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, "output", {"prefix"});
        c.output_prefix = o.value("prefix", "run");
    }

    return c;
}

SceneConfig SceneConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

nlohmann::json SceneConfig::canonical_json() const {
    nlohmann::json j;
    j["surface"]["kind"] = surface.kind;
    if (surface.kind == "torus") {
        j["surface"]["R"] = surface.R;
        j["surface"]["r"] = surface.r;
        if (surface.override_standard_position) {
            j["surface"]["override_standard_position"] = true;
            if (surface.h0) j["surface"]["h0"] = *surface.h0;
            if (surface.f0) j["surface"]["f0"] = *surface.f0;
        }
    } else {
        j["surface"]["h0"] = *surface.h0;
        j["surface"]["f0"] = *surface.f0;
        j["surface"]["curvature"] = surface.curvature;
    }
    if (surface.theta_min) j["surface"]["theta_min"] = *surface.theta_min;
    if (surface.theta_max) j["surface"]["theta_max"] = *surface.theta_max;
    j["body"]["m"] = body.m;
    j["body"]["g"] = body.g;
    if (!body.preset.empty()) {
        j["body"]["inertia"] = body.preset;
    } else {
        j["body"]["inertia"]["I1"] = *body.I1;
        j["body"]["inertia"]["I3"] = *body.I3;
    }
    if (initial.present) {
        j["initial"]["theta0"] = initial.theta0;
        if (initial.ell) {
            j["initial"]["ell"] = *initial.ell;
            j["initial"]["p_theta0"] = initial.p_theta0.value_or(0.0);
        } else {
            j["initial"]["theta_dot0"] = *initial.theta_dot0;
            j["initial"]["psi_dot0"] = *initial.psi_dot0;
        }
        j["initial"]["psi0"] = initial.psi0;
        j["initial"]["phi0"] = initial.phi0;
        j["initial"]["x0"] = initial.x0;
        j["initial"]["y0"] = initial.y0;
    }
    j["integrator"]["method"] = integrator.method;
    j["integrator"]["dt"] = integrator.dt;
    j["integrator"]["t_end"] = integrator.t_end;
    j["integrator"]["output_every"] = integrator.output_every;
    if (integrator.oracle_dt) j["integrator"]["oracle_dt"] = *integrator.oracle_dt;
    if (equilibria.present) {
        if (equilibria.ell) j["equilibria"]["ell"] = *equilibria.ell;
        if (equilibria.ell_min) j["equilibria"]["ell_min"] = *equilibria.ell_min;
        if (equilibria.ell_max) j["equilibria"]["ell_max"] = *equilibria.ell_max;
        j["equilibria"]["samples"] = equilibria.samples;
    }
    if (plot.present) {
        j["plot"]["kind"] = plot.kind;
        if (plot.ell) j["plot"]["ell"] = *plot.ell;
        if (!plot.levels.empty()) j["plot"]["levels"] = plot.levels;
        if (plot.theta_min) j["plot"]["theta_min"] = *plot.theta_min;
        if (plot.theta_max) j["plot"]["theta_max"] = *plot.theta_max;
        if (plot.p_min) j["plot"]["p_min"] = *plot.p_min;
        if (plot.p_max) j["plot"]["p_max"] = *plot.p_max;
        j["plot"]["n_theta"] = plot.n_theta;
        j["plot"]["n_p"] = plot.n_p;
    }
    j["verify"]["grid"] = verify.grid;
    j["verify"]["random_samples"] = verify.random_samples;
    j["output"]["prefix"] = output_prefix;
    return j;
}

std::string SceneConfig::hash() const { return hex64(fnv1a64(canonical_json().dump())); }

GeometryCache SceneConfig::make_geometry() const {
    ThetaInterval dom;
    if (surface.theta_min) dom.lo = *surface.theta_min;
    if (surface.theta_max) dom.hi = *surface.theta_max;
    try {
        if (surface.kind == "torus") {
            if (surface.override_standard_position)
                return GeometryCache(SurfaceProfile::torus_custom(
                    surface.R, surface.r, surface.h0.value_or(surface.R),
                    surface.f0.value_or(surface.r), dom));
            return GeometryCache(SurfaceProfile::torus(surface.R, surface.r, dom));
        }
        std::vector<double> th, rr;
        for (const auto& p : surface.curvature) {
            th.push_back(p[0]);
            rr.push_back(p[1]);
        }
        return GeometryCache(
            SurfaceProfile::sampled(std::move(th), std::move(rr), *surface.h0,
                                    *surface.f0, dom));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("surface: ") + e.what());
    }
}

BodyParams SceneConfig::make_body() const {
    if (body.preset == "solid")
        return BodyParams::solid_torus(body.m, surface.R, surface.r, body.g);
    if (body.preset == "hollow")
        return BodyParams::hollow_torus(body.m, surface.R, surface.r, body.g);
    BodyParams b;
    b.m = body.m;
    b.g = body.g;
    b.I1 = *body.I1;
    b.I3 = *body.I3;
    return b;
}

IntegrateOptions SceneConfig::make_integrate_options() const {
    IntegrateOptions o;
    o.method = integrator.method == "rk45" ? Method::rk45 : Method::rk4;
    o.dt = integrator.dt;
    o.t_end = integrator.t_end;
    o.output_every = integrator.output_every;
    return o;
}

ReducedState SceneConfig::make_reduced_state(const ReducedCoefficients& coeffs) const {
    if (!initial.present) throw ConfigError("config: missing \"initial\" section");
    ReducedState s;
    s.theta = initial.theta0;
    if (initial.ell) {
        s.ell = *initial.ell;
        s.p_theta = initial.p_theta0.value_or(0.0);
        return s;
    }
    const CoeffPoint c = coeffs.at(initial.theta0);
    s.p_theta = c.B * (*initial.theta_dot0);
    s.ell = c.N * c.sin_t * c.sin_t * (*initial.psi_dot0);
    return s;
}

PlanarInit SceneConfig::make_planar_init() const {
    return {initial.psi0, initial.phi0, initial.x0, initial.y0};
}

} // namespace rollkit
