#include "rollkit/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rollkit/detail/rk.hpp"
#include "rollkit/parallel.hpp"

namespace rollkit {

double hamiltonian(const ReducedCoefficients& coeffs, const ReducedState& s) {
    const CoeffPoint c = coeffs.at(s.theta);
    if (s.ell != 0.0 && c.sin_t == 0.0)
        throw SingularityError("hamiltonian singular at sin(theta) = 0 with ell != 0", s.theta);
    const double centrifugal =
        s.ell == 0.0 ? 0.0 : s.ell * s.ell / (2.0 * c.sin_t * c.sin_t);
    return s.p_theta * s.p_theta / (2.0 * c.B) + centrifugal +
           coeffs.body().m * coeffs.body().g * c.z_c;
}

std::array<double, 2> reduced_rhs(const ReducedCoefficients& coeffs, double theta,
                                  double p_theta, double ell) {
    const CoeffPoint c = coeffs.at(theta);
    const double s = c.sin_t;
    const double centrifugal = ell == 0.0 ? 0.0 : ell * ell * c.cos_t / (s * s * s);
    const double theta_dot = p_theta / c.B;
    const double p_dot = 0.5 * p_theta * p_theta * c.dB / (c.B * c.B) + centrifugal -
                         coeffs.body().m * coeffs.body().g * c.dz_c;
    return {theta_dot, p_dot};
}

namespace {

std::string guard_message(const ReducedCoefficients& coeffs, double t, double theta,
                          double sin_guard) {
    char buf[160];
    if (!coeffs.domain().contains(theta)) {
        std::snprintf(buf, sizeof(buf),
                      "theta left the geometry domain at t=%.*g (theta=%.*g)", 6, t, 9, theta);
        return buf;
    }
    if (std::abs(std::sin(theta)) < sin_guard) {
        std::snprintf(buf, sizeof(buf),
                      "sin(theta) under singularity guard at t=%.*g (theta=%.*g)", 6, t, 9, theta);
        return buf;
    }
    return {};
}

void stamp_meta(Trajectory& traj, const IntegrateOptions& o) {
    traj.meta["method"] = o.method == Method::rk4 ? "rk4" : "rk45";
    traj.meta["dt"] = fmt_sci(o.dt);
}

} // namespace

IntegrationResult integrate_reduced(const ReducedCoefficients& coeffs,
                                    const ReducedState& init,
                                    const IntegrateOptions& opts) {
    IntegrationResult res;
    res.trajectory = Trajectory({"t", "theta", "p_theta", "energy", "ell"});
    stamp_meta(res.trajectory, opts);
    const double ell = init.ell;

    const auto rhs = [&](double, const std::array<double, 2>& y) {
        return reduced_rhs(coeffs, y[0], y[1], ell);
    };
    const auto emit = [&](double t, const std::array<double, 2>& y) {
        const double e = hamiltonian(coeffs, {y[0], y[1], ell, t});
        const double row[5] = {t, y[0], y[1], e, ell};
        res.trajectory.push_row(row);
    };
    const auto guard = [&](double t, const std::array<double, 2>& y) {
        return guard_message(coeffs, t, y[0], opts.sin_guard);
    };
    res.status = detail::integrate_driver<2>(rhs, {init.theta, init.p_theta}, opts,
                                             emit, guard, &res.message);
    return res;
}

IntegrationResult integrate_tau(const ReducedCoefficients& coeffs,
                                const ReducedState& init,
                                const IntegrateOptions& opts) {
    IntegrationResult res;
    res.trajectory = Trajectory({"tau", "theta", "p_tau", "t", "energy", "ell"});
    stamp_meta(res.trajectory, opts);
    const double ell = init.ell;

    // State (theta, p_tau, t): theta' = p_tau, p_tau' = -dV/dtheta,
    // t' = sqrt(B).
    const auto rhs = [&](double, const std::array<double, 3>& y) -> std::array<double, 3> {
        return {y[1], -coeffs.dpotential(y[0], ell), std::sqrt(coeffs.B(y[0]))};
    };
    const auto emit = [&](double tau, const std::array<double, 3>& y) {
        const double e = 0.5 * y[1] * y[1] + coeffs.potential(y[0], ell);
        const double row[6] = {tau, y[0], y[1], y[2], e, ell};
        res.trajectory.push_row(row);
    };
    const auto guard = [&](double tau, const std::array<double, 3>& y) {
        return guard_message(coeffs, tau, y[0], opts.sin_guard);
    };
    const double p_tau0 = init.p_theta / std::sqrt(coeffs.B(init.theta));
    res.status = detail::integrate_driver<3>(rhs, {init.theta, p_tau0, init.t}, opts,
                                             emit, guard, &res.message);
    return res;
}

std::vector<double> resample_tau_theta(const ReducedCoefficients& coeffs,
                                       const Trajectory& tau,
                                       std::span<const double> times) {
    const auto t = tau.column("t");
    const auto th = tau.column("theta");
    const auto pt = tau.column("p_tau");
    std::vector<double> slope(t.size()); // dtheta/dt = p_tau / sqrt(B)
    for (std::size_t i = 0; i < t.size(); ++i)
        slope[i] = pt[i] / std::sqrt(coeffs.B(th[i]));

    std::vector<double> out;
    out.reserve(times.size());
    for (double q : times) {
        if (q < t.front() - 1e-12 || q > t.back() + 1e-12)
            throw std::out_of_range("resample_tau_theta: time outside trajectory span");
        const auto it = std::upper_bound(t.begin(), t.end(), q);
        std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
        if (i + 1 >= t.size()) i = t.size() - 2;
        const double w = t[i + 1] - t[i];
        const double u = (q - t[i]) / w;
        const double m0 = slope[i] * w, m1 = slope[i + 1] * w;
        const double u2 = u * u, u3 = u2 * u;
        out.push_back((2 * u3 - 3 * u2 + 1) * th[i] + (u3 - 2 * u2 + u) * m0 +
                      (-2 * u3 + 3 * u2) * th[i + 1] + (u3 - u2) * m1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Relative equilibria

namespace {

constexpr double kDegenerateEps = 1e-8; // |d2V| below this counts as degenerate
constexpr double kMergeEps = 1e-8;      // roots closer than this are merged

double bisect_root(const ReducedCoefficients& coeffs, double ell, double a,
                   double b, double ga, double gb) {
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = coeffs.dpotential(m, ell);
        if (gm == 0.0) return m;
        if ((ga < 0) != (gm < 0)) {
            b = m;
            gb = gm;
        } else {
            a = m;
            ga = gm;
        }
    }
    (void)gb;
    double root = 0.5 * (a + b);
    // Newton polish with the closed-form second derivative; keep the bracket.
    for (int it = 0; it < 4; ++it) {
        const double g = coeffs.dpotential(root, ell);
        const double dg = coeffs.d2potential(root, ell);
        if (dg == 0.0) break;
        const double next = root - g / dg;
        if (next <= a || next >= b) break;
        root = next;
    }
    return root;
}

Equilibrium classify(const ReducedCoefficients& coeffs, double ell, double theta) {
    Equilibrium e;
    e.theta = theta;
    e.ell = ell;
    // Second derivative by central difference of the closed-form gradient.
    const double h = 1e-6;
    const ThetaInterval dom = coeffs.domain();
    double lo = theta - h, hi = theta + h;
    if (lo < dom.lo) { lo = dom.lo; hi = dom.lo + 2 * h; }
    if (hi > dom.hi) { hi = dom.hi; lo = dom.hi - 2 * h; }
    e.d2V = (coeffs.dpotential(hi, ell) - coeffs.dpotential(lo, ell)) / (hi - lo);
    if (e.d2V > kDegenerateEps) e.stability = Stability::stable;
    else if (e.d2V < -kDegenerateEps) e.stability = Stability::unstable;
    else e.stability = Stability::degenerate;
    const double mg = coeffs.body().m * coeffs.body().g;
    e.residual = std::abs(coeffs.dpotential(theta, ell)) / mg;
    return e;
}

} // namespace

std::vector<Equilibrium> find_equilibria(const ReducedCoefficients& coeffs,
                                         double ell, int grid_points) {
    const ThetaInterval dom = coeffs.domain();
    const int n = std::max(grid_points, 8);
    std::vector<double> roots;

    double prev_theta = dom.lo;
    double prev_g = coeffs.dpotential(prev_theta, ell);
    if (prev_g == 0.0) roots.push_back(prev_theta);
    for (int i = 1; i < n; ++i) {
        const double theta = dom.lo + dom.width() * i / (n - 1);
        const double g = coeffs.dpotential(theta, ell);
        if (g == 0.0) {
            roots.push_back(theta);
        } else if ((prev_g < 0) != (g < 0) && prev_g != 0.0) {
            roots.push_back(bisect_root(coeffs, ell, prev_theta, theta, prev_g, g));
        }
        prev_theta = theta;
        prev_g = g;
    }

    std::sort(roots.begin(), roots.end());
    std::vector<Equilibrium> out;
    for (std::size_t i = 0; i < roots.size();) {
        std::size_t j = i + 1;
        while (j < roots.size() && roots[j] - roots[j - 1] < kMergeEps) ++j;
        if (j - i == 1) {
            out.push_back(classify(coeffs, ell, roots[i]));
        } else {
            // Pitchfork-adjacent cluster: merged and flagged.
            double mid = 0.0;
            for (std::size_t k = i; k < j; ++k) mid += roots[k];
            Equilibrium e = classify(coeffs, ell, mid / (j - i));
            e.stability = Stability::degenerate;
            out.push_back(e);
        }
        i = j;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bifurcation scan

namespace {

// Number of sign changes of dV on a fine grid around theta_ref. At a
// pitchfork the local count drops from three to one; the dense sampling
// resolves branch separations far below the global scan grid.
int local_root_count(const ReducedCoefficients& coeffs, double ell,
                     double theta_ref) {
    const ThetaInterval dom = coeffs.domain();
    const double a = std::max(dom.lo, theta_ref - 0.12);
    const double b = std::min(dom.hi, theta_ref + 0.12);
    const int n = 4800;
    int count = 0;
    double prev = coeffs.dpotential(a, ell);
    for (int i = 1; i <= n; ++i) {
        const double g = coeffs.dpotential(a + (b - a) * i / n, ell);
        if (g == 0.0 || ((prev < 0) != (g < 0))) ++count;
        prev = g;
    }
    return count;
}

} // namespace

BifurcationScan bifurcation_scan(const ReducedCoefficients& coeffs, double ell_min,
                                 double ell_max, int samples, bool parallel) {
    BifurcationScan scan;
    if (samples <= 0) return scan;
    std::vector<std::vector<Equilibrium>> per_ell(samples);
    std::vector<double> ells(samples);
    for (int i = 0; i < samples; ++i)
        ells[i] = samples == 1 ? ell_min
                               : ell_min + (ell_max - ell_min) * i / (samples - 1.0);

    par::fill(static_cast<std::size_t>(samples),
              [&](std::size_t i) { per_ell[i] = find_equilibria(coeffs, ells[i]); },
              parallel);

    for (int i = 0; i < samples; ++i)
        for (const Equilibrium& e : per_ell[i])
            scan.rows.push_back({ells[i], e.theta, e.stability, coeffs.potential(e.theta, ells[i])});

    // Pitchfork: a branch persists across adjacent samples while its
    // stability flips (side branches merge into it). Refined by bisection on
    // the local root count around the flipping branch.
    for (int i = 0; i + 1 < samples && !scan.pitchfork_ell; ++i) {
        for (const Equilibrium& e : per_ell[i]) {
            if (e.stability == Stability::degenerate) continue;
            const Equilibrium* match = nullptr;
            double best = 0.05;
            for (const Equilibrium& f : per_ell[i + 1]) {
                const double d = std::abs(f.theta - e.theta);
                if (d < best) {
                    best = d;
                    match = &f;
                }
            }
            if (!match || match->stability == Stability::degenerate ||
                match->stability == e.stability)
                continue;
            const double theta_ref = e.theta;
            double lo = ells[i], hi = ells[i + 1];
            const int count_lo = local_root_count(coeffs, lo, theta_ref);
            if (count_lo == local_root_count(coeffs, hi, theta_ref)) continue;
            for (int it = 0; it < 60 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (local_root_count(coeffs, mid, theta_ref) == count_lo) lo = mid;
                else hi = mid;
            }
            scan.pitchfork_ell = 0.5 * (lo + hi);
            break;
        }
    }
    return scan;
}

// ---------------------------------------------------------------------------
// Phase portrait

namespace {

double phase_energy(const ReducedCoefficients& coeffs, double theta, double p,
                    double ell) {
    return hamiltonian(coeffs, {theta, p, ell, 0.0});
}

// Bisection along a grid edge for the crossing of H = level.
std::array<double, 2> refine_edge(const ReducedCoefficients& coeffs, double ell,
                                  double level, std::array<double, 2> a, double fa,
                                  std::array<double, 2> b, double fb) {
    (void)fb;
    for (int it = 0; it < 40; ++it) {
        const std::array<double, 2> m = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
        const double fm = phase_energy(coeffs, m[0], m[1], ell) - level;
        if ((fa < 0) != (fm < 0)) b = m;
        else a = m;
    }
    return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

} // namespace

std::vector<ContourLevel> phase_portrait(const ReducedCoefficients& coeffs,
                                         double ell, std::span<const double> levels,
                                         const PhasePortraitOptions& o) {
    const int nt = std::max(o.n_theta, 2), np = std::max(o.n_p, 2);
    std::vector<double> H(static_cast<std::size_t>(nt) * np);
    const auto theta_of = [&](int i) {
        return o.theta_min + (o.theta_max - o.theta_min) * i / (nt - 1.0);
    };
    const auto p_of = [&](int j) { return o.p_min + (o.p_max - o.p_min) * j / (np - 1.0); };
    par::fill(H.size(),
              [&](std::size_t k) {
                  const int i = static_cast<int>(k) / np;
                  const int j = static_cast<int>(k) % np;
                  H[k] = phase_energy(coeffs, theta_of(i), p_of(j), ell);
              },
              o.parallel);
    const auto at = [&](int i, int j) { return H[static_cast<std::size_t>(i) * np + j]; };

    std::vector<ContourLevel> out;
    for (double level : levels) {
        ContourLevel cl{level, {}};
        for (int i = 0; i + 1 < nt; ++i) {
            for (int j = 0; j + 1 < np; ++j) {
                const std::array<double, 2> corner[4] = {
                    {theta_of(i), p_of(j)},
                    {theta_of(i + 1), p_of(j)},
                    {theta_of(i + 1), p_of(j + 1)},
                    {theta_of(i), p_of(j + 1)}};
                const double f[4] = {at(i, j) - level, at(i + 1, j) - level,
                                     at(i + 1, j + 1) - level, at(i, j + 1) - level};
                std::array<double, 2> pts[4];
                int npts = 0;
                for (int e = 0; e < 4; ++e) {
                    const int e2 = (e + 1) % 4;
                    if ((f[e] < 0) != (f[e2] < 0))
                        pts[npts++] = refine_edge(coeffs, ell, level, corner[e], f[e],
                                                  corner[e2], f[e2]);
                }
                if (npts == 2) {
                    cl.segments.push_back({pts[0][0], pts[0][1], pts[1][0], pts[1][1]});
                } else if (npts == 4) {
                    // Saddle cell: split by the center value.
                    const double fc = phase_energy(coeffs,
                                                   0.5 * (corner[0][0] + corner[2][0]),
                                                   0.5 * (corner[0][1] + corner[2][1]),
                                                   ell) - level;
                    const bool flip = (fc < 0) == (f[0] < 0);
                    if (flip) {
                        cl.segments.push_back({pts[0][0], pts[0][1], pts[3][0], pts[3][1]});
                        cl.segments.push_back({pts[1][0], pts[1][1], pts[2][0], pts[2][1]});
                    } else {
                        cl.segments.push_back({pts[0][0], pts[0][1], pts[1][0], pts[1][1]});
                        cl.segments.push_back({pts[2][0], pts[2][1], pts[3][0], pts[3][1]});
                    }
                }
            }
        }
        out.push_back(std::move(cl));
    }
    return out;
}

} // namespace rollkit
