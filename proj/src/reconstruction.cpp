#include "rollkit/reconstruction.hpp"

#include <cmath>
#include <cstdio>

#include "rollkit/detail/rk.hpp"

namespace rollkit {

double psi_rate(const ReducedCoefficients& coeffs, double theta, double ell) {
    const CoeffPoint c = coeffs.at(theta);
    if (ell == 0.0) return 0.0;
    if (c.sin_t == 0.0)
        throw SingularityError("psi_rate singular at sin(theta) = 0", theta);
    return ell / (c.N * c.sin_t * c.sin_t);
}

double phi_rate(double theta, double psi_dot) { return -std::cos(theta) * psi_dot; }

std::array<double, 2> contact_velocity(const GeometryCache& geom, double theta,
                                       double theta_dot, double psi_dot, double phi) {
    const MeridianPoint m = geom.at(theta);
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    // e_N = (cos phi, sin phi), e_N_perp = (-sin phi, cos phi).
    return {-m.h * psi_dot * cphi + m.r * theta_dot * sphi,
            -m.h * psi_dot * sphi - m.r * theta_dot * cphi};
}

Eigen::Matrix3d attitude(double phi, double theta, double psi) {
    const double cf = std::cos(phi), sf = std::sin(phi);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(psi), sp = std::sin(psi);
    Eigen::Matrix3d R;
    R << cf * cp - ct * sp * sf, -cf * sp - sf * ct * cp, sf * st,
         sf * cp + cf * ct * sp, -sf * sp + cf * ct * cp, -cf * st,
         st * sp,                st * cp,                 ct;
    return R;
}

double steady_circle_radius(const GeometryCache& geom, double theta_star) {
    const double c = std::cos(theta_star);
    if (std::abs(c) < 1e-12)
        throw SingularityError("steady circle degenerates to a line at theta = pi/2",
                               theta_star);
    return geom.at(theta_star).h / c;
}

IntegrationResult reconstruct(const ReducedCoefficients& coeffs,
                              const ReducedState& init, const PlanarInit& frame,
                              const IntegrateOptions& opts) {
    IntegrationResult res;
    res.trajectory = Trajectory({"t", "theta", "psi", "phi", "x", "y", "theta_dot",
                                 "psi_dot", "phi_dot", "x_dot", "y_dot", "energy",
                                 "ell", "res_notwist", "res_noslip"});
    res.trajectory.meta["method"] = opts.method == Method::rk4 ? "rk4" : "rk45";
    res.trajectory.meta["dt"] = fmt_sci(opts.dt);
    const double ell = init.ell;

    struct Rates {
        double theta_dot, p_dot, psi_dot, phi_dot, x_dot, y_dot;
    };
    const auto rates = [&](const std::array<double, 6>& y) -> Rates {
        const CoeffPoint c = coeffs.at(y[0]);
        const double s = c.sin_t;
        const double theta_dot = y[1] / c.B;
        const double centrifugal = ell == 0.0 ? 0.0 : ell * ell * c.cos_t / (s * s * s);
        const double p_dot = 0.5 * y[1] * y[1] * c.dB / (c.B * c.B) + centrifugal -
                             coeffs.body().m * coeffs.body().g * c.dz_c;
        const double psi_dot = ell == 0.0 ? 0.0 : ell / (c.N * s * s);
        const double phi_dot = -c.cos_t * psi_dot;
        const double cphi = std::cos(y[3]), sphi = std::sin(y[3]);
        const double x_dot = -c.h * psi_dot * cphi + c.r * theta_dot * sphi;
        const double y_dot = -c.h * psi_dot * sphi - c.r * theta_dot * cphi;
        return {theta_dot, p_dot, psi_dot, phi_dot, x_dot, y_dot};
    };

    const auto rhs = [&](double, const std::array<double, 6>& y) -> std::array<double, 6> {
        const Rates r = rates(y);
        return {r.theta_dot, r.p_dot, r.psi_dot, r.phi_dot, r.x_dot, r.y_dot};
    };
    const auto emit = [&](double t, const std::array<double, 6>& y) {
        const Rates r = rates(y);
        const CoeffPoint c = coeffs.at(y[0]);
        const double energy = hamiltonian(coeffs, {y[0], y[1], ell, t});
        const double ell_now = c.N * c.sin_t * c.sin_t * r.psi_dot;
        const double res_twist = std::abs(r.phi_dot + c.cos_t * r.psi_dot);
        const double cphi = std::cos(y[3]), sphi = std::sin(y[3]);
        const double rx = r.x_dot + c.h * r.psi_dot * cphi - c.r * r.theta_dot * sphi;
        const double ry = r.y_dot + c.h * r.psi_dot * sphi + c.r * r.theta_dot * cphi;
        const double res_slip = std::hypot(rx, ry);
        const double row[15] = {t, y[0], y[2], y[3], y[4], y[5], r.theta_dot,
                                r.psi_dot, r.phi_dot, r.x_dot, r.y_dot, energy,
                                ell_now, res_twist, res_slip};
        res.trajectory.push_row(row);
    };
    const auto guard = [&](double t, const std::array<double, 6>& y) -> std::string {
        char buf[160];
        if (!coeffs.domain().contains(y[0])) {
            std::snprintf(buf, sizeof(buf), "theta left the geometry domain at t=%g", t);
            return buf;
        }
        if (std::abs(std::sin(y[0])) < opts.sin_guard) {
            std::snprintf(buf, sizeof(buf), "sin(theta) under singularity guard at t=%g", t);
            return buf;
        }
        return {};
    };

    res.status = detail::integrate_driver<6>(
        rhs, {init.theta, init.p_theta, frame.psi0, frame.phi0, frame.x0, frame.y0},
        opts, emit, guard, &res.message);
    return res;
}

CircleFit fit_circle(std::span<const double> x, std::span<const double> y) {
    // Kasa fit: x^2 + y^2 + D x + E y + F = 0 in least squares.
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Eigen::Vector3d row(x[i], y[i], 1.0);
        ata += row * row.transpose();
        atb += row * (-(x[i] * x[i] + y[i] * y[i]));
    }
    const Eigen::Vector3d sol = ata.ldlt().solve(atb);
    CircleFit fit;
    fit.cx = -0.5 * sol(0);
    fit.cy = -0.5 * sol(1);
    fit.radius = std::sqrt(std::max(0.0, fit.cx * fit.cx + fit.cy * fit.cy - sol(2)));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::hypot(x[i] - fit.cx, y[i] - fit.cy);
        fit.max_deviation = std::max(fit.max_deviation, std::abs(d - fit.radius));
    }
    return fit;
}

} // namespace rollkit
