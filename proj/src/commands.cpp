#include "rollkit/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "rollkit/certify.hpp"
#include "rollkit/full_system.hpp"
#include "rollkit/svg.hpp"
#include "rollkit/version.hpp"

namespace rollkit::cli {

namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    std::ostringstream os;
    traj.write_csv(os);
    write_text(path, os.str());
}

std::string status_name(IntegrationStatus s) {
    switch (s) {
        case IntegrationStatus::ok: return "ok";
        case IntegrationStatus::singularity: return "singularity";
        case IntegrationStatus::step_failure: return "step_failure";
    }
    return "unknown";
}

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::degenerate: return "degenerate";
    }
    return "unknown";
}

SceneConfig apply_override(const CommandContext& ctx) {
    SceneConfig cfg = ctx.config;
    if (ctx.ell_override) {
        if (cfg.initial.present) {
            if (!cfg.initial.ell)
                throw ConfigError("--ell override needs reduced-style initial conditions");
            cfg.initial.ell = *ctx.ell_override;
        }
        if (cfg.equilibria.present && cfg.equilibria.ell)
            cfg.equilibria.ell = *ctx.ell_override;
        if (cfg.plot.present) cfg.plot.ell = *ctx.ell_override;
    }
    return cfg;
}

void stamp(Trajectory& traj, const SceneConfig& cfg) {
    traj.meta["config_hash"] = cfg.hash();
    traj.meta["version"] = kVersion;
}

struct Scene {
    ReducedCoefficients coeffs;
    SceneConfig cfg;
};

Scene build_scene(const CommandContext& ctx) {
    SceneConfig cfg = apply_override(ctx);
    GeometryCache geom = cfg.make_geometry();
    const BodyParams body = cfg.make_body();
    for (const std::string& w : geom.profile().warnings())
        std::cerr << "warning: " << w << "\n";
    for (const std::string& w : body.physicality_warnings())
        std::cerr << "warning: " << w << "\n";
    return Scene{ReducedCoefficients(std::move(geom), body), std::move(cfg)};
}

int status_exit(IntegrationStatus s) {
    return s == IntegrationStatus::ok ? kExitOk : kExitSingularity;
}

} // namespace

int cmd_simulate(const CommandContext& ctx) {
    const Scene scene = build_scene(ctx);
    const SceneConfig& cfg = scene.cfg;
    const ReducedState init = cfg.make_reduced_state(scene.coeffs);
    const IntegrateOptions opts = cfg.make_integrate_options();

    IntegrationResult reduced = integrate_reduced(scene.coeffs, init, opts);
    IntegrationResult full = reconstruct(scene.coeffs, init, cfg.make_planar_init(), opts);
    stamp(reduced.trajectory, cfg);
    stamp(full.trajectory, cfg);

    const auto base = ctx.out_dir / cfg.output_prefix;
    write_trajectory(base.string() + "_reduced.csv", reduced.trajectory);
    write_trajectory(base.string() + "_full.csv", full.trajectory);

    json summary;
    summary["config_hash"] = cfg.hash();
    summary["version"] = kVersion;
    summary["status"] = status_name(full.status);
    summary["reduced_samples"] = reduced.trajectory.rows();
    summary["full_samples"] = full.trajectory.rows();
    summary["energy_drift_rel"] = reduced.trajectory.rows()
                                      ? reduced.trajectory.relative_drift("energy")
                                      : 0.0;
    if (full.trajectory.rows()) {
        summary["ell_drift_rel"] = full.trajectory.relative_drift("ell");
        summary["res_notwist_max"] = full.trajectory.max_abs("res_notwist");
        summary["res_noslip_max"] = full.trajectory.max_abs("res_noslip");
    }
    if (!full.ok() || !reduced.ok()) {
        summary["abort"] = {{"message", full.ok() ? reduced.message : full.message},
                            {"t_last", full.trajectory.rows()
                                           ? full.trajectory.back("t")
                                           : 0.0}};
    }
    write_text(base.string() + "_summary.json", summary.dump(2) + "\n");
    return status_exit(full.ok() ? reduced.status : full.status);
}

int cmd_oracle_compare(const CommandContext& ctx) {
    const Scene scene = build_scene(ctx);
    const SceneConfig& cfg = scene.cfg;
    const ReducedState init = cfg.make_reduced_state(scene.coeffs);
    const PlanarInit frame = cfg.make_planar_init();
    const IntegrateOptions opts = cfg.make_integrate_options();

    IntegrationResult rec = reconstruct(scene.coeffs, init, frame, opts);

    const double oracle_dt = cfg.integrator.oracle_dt.value_or(opts.dt / 10.0);
    const double out_dt = opts.dt * opts.output_every;
    const double stride = out_dt / oracle_dt;
    if (std::abs(stride - std::round(stride)) > 1e-9)
        throw ConfigError("integrator: oracle_dt must divide dt*output_every");
    IntegrateOptions oracle_opts = opts;
    oracle_opts.dt = oracle_dt;
    oracle_opts.output_every = static_cast<int>(std::llround(stride));

    const ConstrainedSystem system(scene.coeffs.geometry(), scene.coeffs.body());
    const FullState full0 = full_initial_state(scene.coeffs, init, frame);
    IntegrationResult oracle = system.integrate(full0, oracle_opts);

    const std::size_t n = std::min(rec.trajectory.rows(), oracle.trajectory.rows());
    double dtheta = 0.0, dxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dtheta = std::max(dtheta, std::abs(rec.trajectory.at(i, "theta") -
                                           oracle.trajectory.at(i, "theta")));
        dxy = std::max(dxy, std::hypot(rec.trajectory.at(i, "x") - oracle.trajectory.at(i, "x"),
                                       rec.trajectory.at(i, "y") - oracle.trajectory.at(i, "y")));
    }

    json report;
    report["config_hash"] = cfg.hash();
    report["version"] = kVersion;
    report["status"] = status_name(oracle.ok() ? rec.status : oracle.status);
    report["compared_samples"] = n;
    report["max_abs_dtheta"] = dtheta;
    report["max_abs_dxy"] = dxy;
    if (oracle.trajectory.rows()) {
        report["oracle_energy_drift_rel"] = oracle.trajectory.relative_drift("energy");
        report["oracle_ell_drift_rel"] = oracle.trajectory.relative_drift("ell");
        report["oracle_res_notwist_max"] = oracle.trajectory.max_abs("res_notwist");
        report["oracle_res_noslip_max"] = oracle.trajectory.max_abs("res_noslip");
    }
    if (rec.trajectory.rows()) {
        report["reconstruction_res_notwist_max"] = rec.trajectory.max_abs("res_notwist");
        report["reconstruction_res_noslip_max"] = rec.trajectory.max_abs("res_noslip");
    }
    const auto base = ctx.out_dir / cfg.output_prefix;
    write_text(base.string() + "_compare.json", report.dump(2) + "\n");
    return status_exit(oracle.ok() ? rec.status : oracle.status);
}

int cmd_equilibria(const CommandContext& ctx) {
    const Scene scene = build_scene(ctx);
    const SceneConfig& cfg = scene.cfg;
    if (!cfg.equilibria.present)
        throw ConfigError("config: missing \"equilibria\" section");
    const auto base = ctx.out_dir / cfg.output_prefix;

    std::ostringstream csv;
    csv << "# config_hash=" << cfg.hash() << " version=" << kVersion << "\n";
    if (cfg.equilibria.ell) {
        const auto eqs = find_equilibria(scene.coeffs, *cfg.equilibria.ell);
        csv << "ell,theta_star,stability,d2V,energy,residual\n";
        std::printf("%12s %12s %12s %14s\n", "ell", "theta*", "stability", "d2V");
        for (const Equilibrium& e : eqs) {
            csv << fmt_sci(e.ell) << ',' << fmt_sci(e.theta) << ','
                << stability_name(e.stability) << ',' << fmt_sci(e.d2V) << ','
                << fmt_sci(scene.coeffs.potential(e.theta, e.ell)) << ','
                << fmt_sci(e.residual) << '\n';
            std::printf("%12.6g %12.8g %12s %14.6g\n", e.ell, e.theta,
                        stability_name(e.stability), e.d2V);
        }
        write_text(base.string() + "_equilibria.csv", csv.str());
        return kExitOk;
    }

    const BifurcationScan scan =
        bifurcation_scan(scene.coeffs, *cfg.equilibria.ell_min, *cfg.equilibria.ell_max,
                         cfg.equilibria.samples);
    csv << "ell,theta_star,stability,energy\n";
    for (const BifurcationRow& row : scan.rows)
        csv << fmt_sci(row.ell) << ',' << fmt_sci(row.theta) << ','
            << stability_name(row.stability) << ',' << fmt_sci(row.energy) << '\n';
    write_text(base.string() + "_bifurcation.csv", csv.str());
    if (scan.pitchfork_ell)
        std::printf("pitchfork near ell = %.12g\n", *scan.pitchfork_ell);
    std::printf("%zu branch points over [%g, %g]\n", scan.rows.size(),
                *cfg.equilibria.ell_min, *cfg.equilibria.ell_max);
    return kExitOk;
}

int cmd_plot(const CommandContext& ctx) {
    Scene scene = build_scene(ctx);
    SceneConfig& cfg = scene.cfg;
    if (ctx.plot_kind) {
        static const std::set<std::string> kinds{"potential", "phase", "bifurcation",
                                                 "track"};
        if (!kinds.count(*ctx.plot_kind))
            throw ConfigError("--kind must be potential|phase|bifurcation|track");
        cfg.plot.present = true;
        cfg.plot.kind = *ctx.plot_kind;
    }
    if (!cfg.plot.present) throw ConfigError("config: missing \"plot\" section");
    const ThetaInterval dom = scene.coeffs.domain();
    const auto base = ctx.out_dir / cfg.output_prefix;
    const std::string kind = cfg.plot.kind;

    SvgFigure fig("", "", "");
    if (kind == "potential") {
        const double ell = cfg.plot.ell.value_or(0.0);
        SvgFigure f("effective potential, ell=" + std::to_string(ell), "theta", "V");
        const double lo = cfg.plot.theta_min.value_or(dom.lo);
        const double hi = cfg.plot.theta_max.value_or(dom.hi);
        std::vector<std::array<double, 2>> pts;
        double vmin = 1e300;
        for (int i = 0; i <= 800; ++i) {
            const double th = lo + (hi - lo) * i / 800.0;
            const double v = scene.coeffs.potential(th, ell);
            vmin = std::min(vmin, v);
            pts.push_back({th, v});
        }
        // Clip the centrifugal walls so the wells stay visible.
        const double vcap = vmin + 5.0 * (std::abs(vmin) + 1.0);
        for (auto& p : pts) p[1] = std::min(p[1], vcap);
        f.fit_ranges(pts);
        f.add_polyline(std::move(pts), "#1f77b4", 2.0);
        std::vector<std::array<double, 2>> stable, unstable;
        for (const Equilibrium& e : find_equilibria(scene.coeffs, ell))
            (e.stability == Stability::stable ? stable : unstable)
                .push_back({e.theta, scene.coeffs.potential(e.theta, ell)});
        f.add_points(std::move(stable), "#2ca02c", 4.0);
        f.add_points(std::move(unstable), "#d62728", 4.0);
        fig = std::move(f);
    } else if (kind == "phase") {
        const double ell = cfg.plot.ell.value_or(0.0);
        SvgFigure f("phase portrait, ell=" + std::to_string(ell), "theta", "p_theta");
        PhasePortraitOptions po;
        po.theta_min = cfg.plot.theta_min.value_or(dom.lo);
        po.theta_max = cfg.plot.theta_max.value_or(dom.hi);
        po.p_min = cfg.plot.p_min.value_or(-1.0);
        po.p_max = cfg.plot.p_max.value_or(1.0);
        po.n_theta = cfg.plot.n_theta;
        po.n_p = cfg.plot.n_p;
        std::vector<double> levels = cfg.plot.levels;
        if (levels.empty()) {
            // Default: a fan of levels between the potential minimum and the
            // highest frame corner.
            double vmin = 1e300;
            for (int i = 0; i <= 400; ++i)
                vmin = std::min(vmin, scene.coeffs.potential(
                                          po.theta_min + (po.theta_max - po.theta_min) * i / 400.0,
                                          ell));
            const ReducedState corner{po.theta_min, po.p_max, ell, 0.0};
            const double vmax = hamiltonian(scene.coeffs, corner);
            for (int k = 1; k <= 9; ++k) levels.push_back(vmin + (vmax - vmin) * k / 10.0);
        }
        f.set_ranges(po.theta_min, po.theta_max, po.p_min, po.p_max);
        for (const ContourLevel& cl : phase_portrait(scene.coeffs, ell, levels, po))
            for (const auto& seg : cl.segments)
                f.add_polyline({{seg[0], seg[1]}, {seg[2], seg[3]}}, "#1f77b4", 1.0);
        fig = std::move(f);
    } else if (kind == "bifurcation") {
        if (!cfg.equilibria.present || !cfg.equilibria.ell_min)
            throw ConfigError("plot: bifurcation needs an equilibria range");
        SvgFigure f("relative equilibria", "ell", "theta*");
        const BifurcationScan scan =
            bifurcation_scan(scene.coeffs, *cfg.equilibria.ell_min,
                             *cfg.equilibria.ell_max, cfg.equilibria.samples);
        std::vector<std::array<double, 2>> stable, unstable, degen;
        for (const BifurcationRow& row : scan.rows) {
            auto& bucket = row.stability == Stability::stable
                               ? stable
                               : (row.stability == Stability::unstable ? unstable : degen);
            bucket.push_back({row.ell, row.theta});
        }
        std::vector<std::array<double, 2>> all;
        for (auto* v : {&stable, &unstable, &degen})
            all.insert(all.end(), v->begin(), v->end());
        f.fit_ranges(all);
        f.add_points(std::move(stable), "#2ca02c", 1.5);
        f.add_points(std::move(unstable), "#d62728", 1.5);
        f.add_points(std::move(degen), "#ff7f0e", 2.5);
        fig = std::move(f);
    } else { // track
        SvgFigure f("contact-point track", "x", "y");
        const ReducedState init = cfg.make_reduced_state(scene.coeffs);
        const IntegrationResult rec =
            reconstruct(scene.coeffs, init, cfg.make_planar_init(),
                        cfg.make_integrate_options());
        std::vector<std::array<double, 2>> pts;
        for (std::size_t i = 0; i < rec.trajectory.rows(); ++i)
            pts.push_back({rec.trajectory.at(i, "x"), rec.trajectory.at(i, "y")});
        f.fit_ranges(pts);
        f.add_polyline(std::move(pts), "#1f77b4", 1.5);
        fig = std::move(f);
    }

    fig.meta["config_hash"] = cfg.hash();
    fig.meta["version"] = kVersion;
    std::ostringstream os;
    fig.write(os);
    write_text(base.string() + "_" + kind + ".svg", os.str());
    return kExitOk;
}

int cmd_verify(const CommandContext& ctx) {
    const Scene scene = build_scene(ctx);
    const SceneConfig& cfg = scene.cfg;
    CertifyOptions opts;
    opts.grid = cfg.verify.grid;
    opts.random_samples = cfg.verify.random_samples;
    opts.seed = ctx.seed;
    const std::vector<CheckResult> checks = run_certification(scene.coeffs, opts);
    json report = certification_json(checks, opts);
    report["config_hash"] = cfg.hash();
    report["version"] = kVersion;
    const auto base = ctx.out_dir / cfg.output_prefix;
    write_text(base.string() + "_verify.json", report.dump(2) + "\n");
    bool all = true;
    for (const CheckResult& c : checks) {
        std::printf("%-28s %8zu samples  max %.3e  tol %.1e  %s\n", c.name.c_str(),
                    c.samples, c.max_residual, c.tolerance, c.pass ? "pass" : "FAIL");
        all = all && c.pass;
    }
    return all ? kExitOk : kExitVerification;
}

} // namespace rollkit::cli
