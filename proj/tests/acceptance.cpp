// Acceptance suite: every release gate in one binary, one pass/fail line per
// criterion, nonzero exit if anything fails. Each criterion is cheap enough
// for a laptop run.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rollkit/certify.hpp"
#include "rollkit/full_system.hpp"
#include "rollkit/quadrature.hpp"

using namespace rollkit;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* spec, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), spec, a, b, c);
    return buf;
}

GeometryCache torus_geom() { return GeometryCache(SurfaceProfile::torus(1.0, 0.5)); }

BodyParams solid() { return BodyParams::solid_torus(1.0, 1.0, 0.5, 1.0); }
BodyParams hollow() { return BodyParams::hollow_torus(1.0, 1.0, 0.5, 1.0); }

GeometryCache bulged_geom() {
    return GeometryCache(SurfaceProfile::general(
        [](double th) { return 0.5 + 0.2 * std::sin(th); },
        [](double th) { return 0.2 * std::cos(th); }, 1.0, 0.5));
}

GeometryCache sampled_geom() {
    std::vector<double> th, r;
    for (int i = 0; i <= 48; ++i) {
        th.push_back(kPi * i / 48.0);
        r.push_back(0.5 + 0.2 * std::sin(th.back()));
    }
    return GeometryCache(SurfaceProfile::sampled(std::move(th), std::move(r), 1.0, 0.5));
}

// Generic full-system initial data used by criteria 2, 3 and 8.
struct PipelineRun {
    IntegrationResult reconstruction;
    IntegrationResult oracle;
};

PipelineRun matched_runs(const ReducedCoefficients& coeffs) {
    ReducedState init{1.1, 0.3 * coeffs.B(1.1), 0.0, 0.0};
    init.ell = coeffs.nose(1.1) * std::pow(std::sin(1.1), 2) * 0.7;
    const PlanarInit frame{0.3, -0.4, 0.1, -0.2};

    IntegrateOptions rec_opts;
    rec_opts.dt = 1e-3;
    rec_opts.t_end = 10.0;
    rec_opts.output_every = 10;

    IntegrateOptions oracle_opts;
    oracle_opts.dt = 1e-4;
    oracle_opts.t_end = 10.0;
    oracle_opts.output_every = 100;

    const ConstrainedSystem sys(coeffs.geometry(), coeffs.body());
    PipelineRun out;
    out.reconstruction = reconstruct(coeffs, init, frame, rec_opts);
    out.oracle = sys.integrate(full_initial_state(coeffs, init, frame), oracle_opts);
    return out;
}

double nose_identity_residual(const ReducedCoefficients& coeffs) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double th = 0.01 + (kPi - 0.02) * i / 999.0;
        worst = std::max(worst, conformal_residual(coeffs, th, 1e-5));
    }
    return worst;
}

} // namespace

int main() {
    const GeometryCache geom = torus_geom();
    const ReducedCoefficients coeffs(geom, solid());

    // 1. The conserved-density identity n = (log N)' holds for the torus with
    //    both inertia presets and for two quadrature-backed profiles.
    {
        const double r1 = nose_identity_residual(coeffs);
        const double r2 = nose_identity_residual(ReducedCoefficients(geom, hollow()));
        const double r3 = nose_identity_residual(ReducedCoefficients(bulged_geom(), solid()));
        const double r4 = nose_identity_residual(ReducedCoefficients(sampled_geom(), solid()));
        const double worst = std::max({r1, r2, r3, r4});
        report(1, "nose-function identity", worst < 1e-8,
               fmt("max |n - (log N)'| = %.3e (tol 1e-8)", worst));
    }

    const PipelineRun runs = matched_runs(coeffs);

    // 2. The unreduced integrator conserves energy and the level N Omega_3.
    {
        const bool ok = runs.oracle.ok();
        const double de = ok ? runs.oracle.trajectory.relative_drift("energy") : 1.0;
        const double dl = ok ? runs.oracle.trajectory.relative_drift("ell") : 1.0;
        report(2, "unreduced conservation", ok && de < 1e-8 && dl < 1e-8,
               fmt("energy drift %.3e, ell drift %.3e (tol 1e-8)", de, dl));
    }

    // 3. Reduce + reconstruct reproduces the unreduced motion.
    {
        double dth = 0.0, dxy = 0.0;
        const std::size_t n =
            std::min(runs.reconstruction.trajectory.rows(), runs.oracle.trajectory.rows());
        for (std::size_t i = 0; i < n; ++i) {
            dth = std::max(dth, std::abs(runs.reconstruction.trajectory.at(i, "theta") -
                                         runs.oracle.trajectory.at(i, "theta")));
            dxy = std::max(dxy,
                           std::hypot(runs.reconstruction.trajectory.at(i, "x") -
                                          runs.oracle.trajectory.at(i, "x"),
                                      runs.reconstruction.trajectory.at(i, "y") -
                                          runs.oracle.trajectory.at(i, "y")));
        }
        report(3, "reduction correctness", n > 0 && dth < 1e-6 && dxy < 1e-5,
               fmt("max|dtheta| %.3e (tol 1e-6), max|dxy| %.3e (tol 1e-5)", dth, dxy));
    }

    // 4. The reduced flow and B never see I3: bitwise identical outputs.
    {
        BodyParams a;
        a.m = 1.0;
        a.g = 1.0;
        a.I1 = 0.65625;
        a.I3 = 0.6875;
        BodyParams b = a;
        b.I3 = 1.3;
        const ReducedCoefficients ca(geom, a), cb(geom, b);
        IntegrateOptions o;
        o.dt = 1e-3;
        o.t_end = 5.0;
        o.output_every = 10;
        const ReducedState init{1.0, 0.2, 0.3, 0.0};
        const auto ra = integrate_reduced(ca, init, o);
        const auto rb = integrate_reduced(cb, init, o);
        bool identical = ra.ok() && rb.ok() &&
                         ra.trajectory.rows() == rb.trajectory.rows();
        if (identical)
            for (std::size_t i = 0; i < ra.trajectory.rows() && identical; ++i)
                for (std::size_t c = 0; c < ra.trajectory.cols(); ++c)
                    if (ra.trajectory.at(i, c) != rb.trajectory.at(i, c)) identical = false;
        bool b_same = true;
        for (int i = 1; i < 500; ++i) {
            const double th = 1e-3 + (kPi - 2e-3) * i / 500.0;
            if (ca.B(th) != cb.B(th)) b_same = false;
        }
        report(4, "I3 independence (bitwise)", identical && b_same,
               fmt("trajectory rows %.0f, identical=%.0f, B identical=%.0f",
                   static_cast<double>(ra.trajectory.rows()),
                   identical ? 1.0 : 0.0, b_same ? 1.0 : 0.0));
    }

    // 5. Torus relative equilibria at slow and fast levels.
    {
        const auto slow = find_equilibria(coeffs, 0.1);
        const double sin_star = std::cbrt(0.01);
        bool ok = slow.size() == 3;
        double worst = 0.0;
        if (ok) {
            worst = std::max({std::abs(std::sin(slow[0].theta) - sin_star),
                              std::abs(slow[1].theta - kPi / 2),
                              std::abs(std::sin(slow[2].theta) - sin_star)});
            ok = worst < 1e-10 && slow[0].stability == Stability::stable &&
                 slow[1].stability == Stability::unstable &&
                 slow[2].stability == Stability::stable;
            for (const auto& e : slow) ok = ok && e.residual < 1e-10;
        }
        const auto fast = find_equilibria(coeffs, 10.0);
        const bool fast_ok = fast.size() == 1 &&
                             std::abs(fast[0].theta - kPi / 2) < 1e-10 &&
                             fast[0].stability == Stability::stable;
        report(5, "torus equilibria", ok && fast_ok,
               fmt("slow-level root error %.3e (tol 1e-10)", worst) +
                   (fast_ok ? ", fast level ok" : ", fast level wrong"));
    }

    // 6. Pitchfork at ell^2 = m g R, and an inertia-blind diagram.
    {
        const BifurcationScan scan = bifurcation_scan(coeffs, 0.5, 1.5, 400);
        const bool found = scan.pitchfork_ell.has_value();
        const double err =
            found ? std::abs(*scan.pitchfork_ell * *scan.pitchfork_ell - 1.0) : 1.0;
        BodyParams p = solid();
        p.I1 *= 1.21;
        p.I3 *= 0.77;
        const BifurcationScan other =
            bifurcation_scan(ReducedCoefficients(geom, p), 0.5, 1.5, 400);
        bool same = other.rows.size() == scan.rows.size();
        for (std::size_t i = 0; same && i < scan.rows.size(); ++i)
            same = scan.rows[i].theta == other.rows[i].theta &&
                   scan.rows[i].stability == other.rows[i].stability &&
                   scan.rows[i].energy == other.rows[i].energy;
        report(6, "pitchfork detection", found && err < 1e-6 && same,
               fmt("|ell*^2 - mgR| = %.3e (tol 1e-6)", err) +
                   (same ? ", inertia-blind" : ", inertia leaked into the diagram"));
    }

    // 7. The steady track is the circle of radius h/cos(theta*).
    {
        const double th_star = std::asin(std::cbrt(0.01));
        IntegrateOptions o;
        o.dt = 1e-3;
        o.t_end = 10.0;
        o.output_every = 10;
        const auto rec = reconstruct(coeffs, {th_star, 0.0, 0.1, 0.0}, {}, o);
        const CircleFit fit =
            fit_circle(rec.trajectory.column("x"), rec.trajectory.column("y"));
        const double target = steady_circle_radius(geom, th_star);
        const bool ok = rec.ok() && std::abs(fit.radius - target) < 1e-6 &&
                        fit.max_deviation < 1e-6;
        report(7, "steady-circle geometry", ok,
               fmt("|radius - h/cos| = %.3e, fit deviation %.3e (tol 1e-6)",
                   std::abs(fit.radius - target), fit.max_deviation));
    }

    // 8. Reconstructed trajectories satisfy both constraints at every sample.
    {
        const double twist = runs.reconstruction.trajectory.max_abs("res_notwist");
        const double slip = runs.reconstruction.trajectory.max_abs("res_noslip");
        report(8, "constraint residuals", twist < 1e-9 && slip < 1e-8,
               fmt("no-twist %.3e (tol 1e-9), no-slip %.3e (tol 1e-8)", twist, slip));
    }

    // 9. Structural certification: connection curvature and the gyroscopic
    //    tensor potential.
    {
        const ConnectionFrame frame{&geom};
        const ConstrainedSystem sys(geom, solid());
        double bracket_err = 0.0, off_err = 0.0, phi_err = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double th = 0.05 + (kPi - 0.1) * i / 199.0;
            const Vec5 q = (Vec5() << th, 0.4, 0.9 * i / 199.0, 0.2, -0.1).finished();
            const BracketSample s = bracket_curvature(frame, q, 1e-5);
            bracket_err = std::max(bracket_err, std::abs(s.phi_component - std::sin(th)));
            off_err = std::max(off_err, s.off_residual);
            const PhiSimpleSample ps = phi_simple_check(coeffs, sys, th);
            phi_err = std::max({phi_err, ps.dphi_residual, std::abs(ps.f_theta),
                                ps.f_psi_residual});
        }
        report(9, "structure certification",
               bracket_err < 1e-6 && off_err < 1e-6 && phi_err < 1e-8,
               fmt("curvature %.3e, off %.3e (tol 1e-6), phi-simple %.3e (tol 1e-8)",
                   bracket_err, off_err, phi_err));
    }

    // 10. Geometric identities, finite-difference and closed-form routes.
    {
        const GeometryCache quad = bulged_geom();
        double fd_err = 0.0, closed_err = 0.0;
        const double h = 1e-5;
        for (const GeometryCache* g : {&geom, &quad}) {
            for (int i = 0; i < 400; ++i) {
                const double th = 0.01 + (kPi - 0.02) * i / 399.0;
                const MeridianPoint m = g->at(th);
                const auto [hp, fp] = g->meridian(th + h);
                const auto [hm, fm] = g->meridian(th - h);
                fd_err = std::max(fd_err,
                                  std::abs((hp - hm) / (2 * h) - m.r * std::cos(th)));
                fd_err = std::max(fd_err,
                                  std::abs((fp - fm) / (2 * h) - m.r * std::sin(th)));
                fd_err = std::max(fd_err,
                                  std::abs((g->z_center(th + h) - g->z_center(th - h)) /
                                               (2 * h) -
                                           m.lambda));
                closed_err = std::max(closed_err,
                                      std::abs(m.cp_sq - m.lambda * m.lambda -
                                               (m.r - m.dlambda) * (m.r - m.dlambda)));
                closed_err = std::max(closed_err,
                                      std::abs(m.h - m.lambda * std::cos(th) -
                                               m.z_c * std::sin(th)));
            }
        }
        report(10, "geometric identities", fd_err < 1e-6 && closed_err < 1e-10,
               fmt("finite-difference %.3e (tol 1e-6), closed-form %.3e (tol 1e-10)",
                   fd_err, closed_err));
    }

    // 11. Small oscillations about the slow well at the harmonic frequency.
    {
        Equilibrium eq{};
        for (const auto& e : find_equilibria(coeffs, 0.1))
            if (e.theta < kPi / 2 && e.stability == Stability::stable) eq = e;
        const double predicted = 2 * kPi * std::sqrt(coeffs.B(eq.theta) / eq.d2V);
        IntegrateOptions o;
        o.dt = 1e-3;
        o.t_end = 4 * predicted;
        o.output_every = 1;
        const auto res = integrate_reduced(coeffs, {eq.theta + 1e-3, 0.0, 0.1, 0.0}, o);
        std::vector<double> crossings;
        for (std::size_t i = 1; i < res.trajectory.rows(); ++i) {
            const double a = res.trajectory.at(i - 1, "theta") - eq.theta;
            const double b = res.trajectory.at(i, "theta") - eq.theta;
            if (a < 0.0 && b >= 0.0) {
                const double ta = res.trajectory.at(i - 1, "t");
                const double tb = res.trajectory.at(i, "t");
                crossings.push_back(ta + (tb - ta) * (-a) / (b - a));
            }
        }
        double rel = 1.0;
        if (crossings.size() >= 2) {
            const double measured =
                (crossings.back() - crossings.front()) / (crossings.size() - 1);
            rel = std::abs(measured - predicted) / predicted;
        }
        report(11, "harmonic frequency", res.ok() && rel < 0.01,
               fmt("relative period error %.3e (tol 1e-2)", rel));
    }

    // 12. The stretched-time flow maps back onto the original time axis.
    {
        const ReducedState init{0.3, 0.05, 0.1, 0.0};
        IntegrateOptions ot;
        ot.dt = 1e-3;
        ot.t_end = 10.0;
        ot.output_every = 10;
        const auto direct = integrate_reduced(coeffs, init, ot);
        IntegrateOptions otau = ot;
        otau.t_end = 8.0; // tau units; covers t > 10 for this motion
        const auto tau = integrate_tau(coeffs, init, otau);
        double worst = 1.0;
        if (direct.ok() && tau.ok()) {
            std::vector<double> times, truth;
            for (std::size_t i = 0; i < direct.trajectory.rows(); ++i) {
                const double t = direct.trajectory.at(i, "t");
                if (t <= tau.trajectory.back("t")) {
                    times.push_back(t);
                    truth.push_back(direct.trajectory.at(i, "theta"));
                }
            }
            const auto resampled = resample_tau_theta(coeffs, tau.trajectory, times);
            worst = 0.0;
            for (std::size_t i = 0; i < times.size(); ++i)
                worst = std::max(worst, std::abs(resampled[i] - truth[i]));
        }
        report(12, "time reparametrization", worst < 1e-6,
               fmt("max|dtheta| over matched times %.3e (tol 1e-6)", worst));
    }

    if (g_failures == 0) std::printf("all acceptance criteria passed\n");
    else std::printf("%d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
