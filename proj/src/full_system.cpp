#include "rollkit/full_system.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rollkit/detail/rk.hpp"

namespace rollkit {

namespace {

// Everything the matrices need at one configuration.
struct Frame {
    double s, c;        // sin/cos theta
    double cphi, sphi;  // cos/sin phi
    double h, r, dr;
    double lam, dlam, ddlam; // lambda and its first two derivatives
    double z_c;
};

Frame frame_at(const GeometryCache& geom, const Vec5& q) {
    const MeridianPoint m = geom.at(q[0]);
    Frame f;
    f.s = std::sin(q[0]);
    f.c = std::cos(q[0]);
    f.cphi = std::cos(q[2]);
    f.sphi = std::sin(q[2]);
    f.h = m.h;
    f.r = m.r;
    f.dr = m.dr;
    f.lam = m.lambda;
    f.dlam = m.dlambda;
    // d2(lambda): the h' and f*' contributions cancel against r cos/sin.
    f.ddlam = m.dr + m.fstar * f.s - m.h * f.c;
    f.z_c = m.z_c;
    return f;
}

Mat5 mass_matrix_from(const Frame& f, const BodyParams& b) {
    Mat5 M = Mat5::Zero();
    M(0, 0) = b.I1 + b.m * (f.lam * f.lam + f.dlam * f.dlam);
    M(0, 3) = M(3, 0) = -b.m * f.dlam * f.sphi;
    M(0, 4) = M(4, 0) = b.m * f.dlam * f.cphi;
    M(1, 1) = b.I3;
    M(1, 2) = M(2, 1) = b.I3 * f.c;
    M(2, 2) = b.I1 * f.s * f.s + b.I3 * f.c * f.c + b.m * f.lam * f.lam;
    M(2, 3) = M(3, 2) = -b.m * f.lam * f.cphi;
    M(2, 4) = M(4, 2) = -b.m * f.lam * f.sphi;
    M(3, 3) = b.m;
    M(4, 4) = b.m;
    return M;
}

Mat5 dmass_dtheta(const Frame& f, const BodyParams& b) {
    Mat5 D = Mat5::Zero();
    D(0, 0) = 2.0 * b.m * (f.lam * f.dlam + f.dlam * f.ddlam);
    D(0, 3) = D(3, 0) = -b.m * f.ddlam * f.sphi;
    D(0, 4) = D(4, 0) = b.m * f.ddlam * f.cphi;
    D(1, 2) = D(2, 1) = -b.I3 * f.s;
    D(2, 2) = 2.0 * (b.I1 - b.I3) * f.s * f.c + 2.0 * b.m * f.lam * f.dlam;
    D(2, 3) = D(3, 2) = -b.m * f.dlam * f.cphi;
    D(2, 4) = D(4, 2) = -b.m * f.dlam * f.sphi;
    return D;
}

Mat5 dmass_dphi(const Frame& f, const BodyParams& b) {
    Mat5 D = Mat5::Zero();
    D(0, 3) = D(3, 0) = -b.m * f.dlam * f.cphi;
    D(0, 4) = D(4, 0) = -b.m * f.dlam * f.sphi;
    D(2, 3) = D(3, 2) = b.m * f.lam * f.sphi;
    D(2, 4) = D(4, 2) = -b.m * f.lam * f.cphi;
    return D;
}

} // namespace

ConstrainedSystem::ConstrainedSystem(GeometryCache geometry, BodyParams body)
    : geom_(std::move(geometry)), body_(body) {}

Mat5 ConstrainedSystem::mass_matrix(const Vec5& q) const {
    return mass_matrix_from(frame_at(geom_, q), body_);
}

Mat35 ConstrainedSystem::constraint_jacobian(const Vec5& q) const {
    const Frame f = frame_at(geom_, q);
    Mat35 G = Mat35::Zero();
    G(0, 1) = f.c;
    G(0, 2) = 1.0;
    G(1, 0) = -f.r * f.sphi;
    G(1, 1) = f.h * f.cphi;
    G(1, 3) = 1.0;
    G(2, 0) = f.r * f.cphi;
    G(2, 1) = f.h * f.sphi;
    G(2, 4) = 1.0;
    return G;
}

Eigen::Vector3d ConstrainedSystem::constraint_velocity(const Vec5& q,
                                                       const Vec5& qdot) const {
    return constraint_jacobian(q) * qdot;
}

Eigen::Vector3d ConstrainedSystem::constraint_rate(const Vec5& q, const Vec5& qdot) const {
    const Frame f = frame_at(geom_, q);
    const double td = qdot[0], pd = qdot[1], fd = qdot[2];
    const double dh = f.r * f.c; // h' = r cos
    Eigen::Vector3d out;
    out[0] = -f.s * td * pd;
    out[1] = (-f.dr * td * f.sphi - f.r * fd * f.cphi) * td +
             (dh * td * f.cphi - f.h * fd * f.sphi) * pd;
    out[2] = (f.dr * td * f.cphi - f.r * fd * f.sphi) * td +
             (dh * td * f.sphi + f.h * fd * f.cphi) * pd;
    return out;
}

Vec5 ConstrainedSystem::generalized_force(const Vec5& q, const Vec5& qdot) const {
    const Frame f = frame_at(geom_, q);
    const Mat5 Dth = dmass_dtheta(f, body_);
    const Mat5 Dph = dmass_dphi(f, body_);
    Vec5 out = Vec5::Zero();
    out[0] = 0.5 * qdot.dot(Dth * qdot) - body_.m * body_.g * f.lam;
    out[2] = 0.5 * qdot.dot(Dph * qdot);
    out -= (qdot[0] * Dth + qdot[2] * Dph) * qdot;
    return out;
}

std::pair<double, double> ConstrainedSystem::lagrangian(const Vec5& q,
                                                        const Vec5& qdot) const {
    const Frame f = frame_at(geom_, q);
    const double T = 0.5 * qdot.dot(mass_matrix_from(f, body_) * qdot);
    return {T, body_.m * body_.g * f.z_c};
}

double ConstrainedSystem::ell(const Vec5& q, const Vec5& qdot) const {
    const Frame f = frame_at(geom_, q);
    const double N = std::sqrt(body_.I1 * f.c * f.c + body_.I3 * f.s * f.s +
                               body_.m * f.z_c * f.z_c);
    return N * (qdot[2] * f.c + qdot[1]);
}

std::pair<Vec5, Eigen::Vector3d> ConstrainedSystem::acceleration(const Vec5& q,
                                                                 const Vec5& qdot) const {
    Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
    const Mat5 M = mass_matrix(q);
    const Mat35 G = constraint_jacobian(q);
    K.topLeftCorner<5, 5>() = M;
    K.topRightCorner<5, 3>() = G.transpose();
    K.bottomLeftCorner<3, 5>() = G;
    Eigen::Matrix<double, 8, 1> rhs;
    rhs.head<5>() = generalized_force(q, qdot);
    rhs.tail<3>() = -constraint_rate(q, qdot);
    const Eigen::Matrix<double, 8, 1> sol = K.partialPivLu().solve(rhs);
    if (!sol.allFinite())
        throw std::runtime_error("ConstrainedSystem: singular saddle system");
    return {sol.head<5>(), sol.tail<3>()};
}

Vec5 ConstrainedSystem::project_velocity(const Vec5& q, const Vec5& qdot_raw) const {
    Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
    const Mat5 M = mass_matrix(q);
    const Mat35 G = constraint_jacobian(q);
    K.topLeftCorner<5, 5>() = M;
    K.topRightCorner<5, 3>() = G.transpose();
    K.bottomLeftCorner<3, 5>() = G;
    Eigen::Matrix<double, 8, 1> rhs;
    rhs.head<5>() = M * qdot_raw;
    rhs.tail<3>().setZero();
    const Eigen::Matrix<double, 8, 1> sol = K.partialPivLu().solve(rhs);
    if (!sol.allFinite())
        throw std::runtime_error("ConstrainedSystem: singular projection system");
    return sol.head<5>();
}

namespace {

std::array<double, 10> pack(const Vec5& q, const Vec5& qdot) {
    std::array<double, 10> y;
    for (int i = 0; i < 5; ++i) {
        y[i] = q[i];
        y[5 + i] = qdot[i];
    }
    return y;
}

} // namespace

FullState ConstrainedSystem::step(const FullState& s, double dt) const {
    const auto rhs = [this](double, const std::array<double, 10>& y) {
        Vec5 q, qdot;
        for (int i = 0; i < 5; ++i) {
            q[i] = y[i];
            qdot[i] = y[5 + i];
        }
        const Vec5 qddot = acceleration(q, qdot).first;
        std::array<double, 10> dydt;
        for (int i = 0; i < 5; ++i) {
            dydt[i] = qdot[i];
            dydt[5 + i] = qddot[i];
        }
        return dydt;
    };
    const auto y = detail::rk4_step<10>(rhs, s.t, pack(position_of(s), velocity_of(s)), dt);
    FullState out;
    out.theta = y[0];
    out.psi = y[1];
    out.phi = y[2];
    out.x = y[3];
    out.y = y[4];
    out.theta_dot = y[5];
    out.psi_dot = y[6];
    out.phi_dot = y[7];
    out.x_dot = y[8];
    out.y_dot = y[9];
    out.t = s.t + dt;
    if (constraint_velocity(position_of(out), velocity_of(out)).norm() > 1e-6)
        throw std::runtime_error("ConstrainedSystem::step: constraint drift above 1e-6");
    return out;
}

IntegrationResult ConstrainedSystem::integrate(const FullState& init,
                                               const IntegrateOptions& opts) const {
    IntegrationResult res;
    res.trajectory = Trajectory({"t", "theta", "psi", "phi", "x", "y", "theta_dot",
                                 "psi_dot", "phi_dot", "x_dot", "y_dot", "energy",
                                 "ell", "res_notwist", "res_noslip"});
    res.trajectory.meta["method"] = "rk4";
    res.trajectory.meta["dt"] = fmt_sci(opts.dt);

    {
        const Eigen::Vector3d g0 = constraint_velocity(position_of(init), velocity_of(init));
        if (g0.norm() > 1e-10)
            throw std::invalid_argument(
                "ConstrainedSystem::integrate: initial velocity violates constraints; "
                "project it first");
    }

    const auto rhs = [this](double, const std::array<double, 10>& y) {
        Vec5 q, qdot;
        for (int i = 0; i < 5; ++i) {
            q[i] = y[i];
            qdot[i] = y[5 + i];
        }
        const Vec5 qddot = acceleration(q, qdot).first;
        std::array<double, 10> dydt;
        for (int i = 0; i < 5; ++i) {
            dydt[i] = qdot[i];
            dydt[5 + i] = qddot[i];
        }
        return dydt;
    };
    bool drifted = false;
    std::string drift_msg;
    const auto emit = [&](double t, const std::array<double, 10>& y) {
        Vec5 q, qdot;
        for (int i = 0; i < 5; ++i) {
            q[i] = y[i];
            qdot[i] = y[5 + i];
        }
        const auto [T, V] = lagrangian(q, qdot);
        const Eigen::Vector3d gv = constraint_velocity(q, qdot);
        const double row[15] = {t, y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7],
                                y[8], y[9], T + V, ell(q, qdot), std::abs(gv[0]),
                                std::hypot(gv[1], gv[2])};
        res.trajectory.push_row(row);
    };
    const auto guard = [&](double t, const std::array<double, 10>& y) -> std::string {
        char buf[160];
        if (!geom_.domain().contains(y[0])) {
            std::snprintf(buf, sizeof(buf), "theta left the geometry domain at t=%g", t);
            return buf;
        }
        if (std::abs(std::sin(y[0])) < opts.sin_guard) {
            std::snprintf(buf, sizeof(buf), "sin(theta) under singularity guard at t=%g", t);
            return buf;
        }
        Vec5 q, qdot;
        for (int i = 0; i < 5; ++i) {
            q[i] = y[i];
            qdot[i] = y[5 + i];
        }
        if (constraint_velocity(q, qdot).norm() > 1e-6) {
            // Constraint drift means the oracle itself is broken, not the
            // trajectory; report it as a step failure, not a singularity.
            drifted = true;
            std::snprintf(buf, sizeof(buf), "constraint drift above 1e-6 at t=%g", t);
            drift_msg = buf;
            return drift_msg;
        }
        return {};
    };
    IntegrateOptions o = opts;
    o.method = Method::rk4; // the oracle is fixed-step by design
    res.status = detail::integrate_driver<10>(rhs, pack(position_of(init), velocity_of(init)),
                                              o, emit, guard, &res.message);
    if (drifted && res.status == IntegrationStatus::singularity) {
        res.status = IntegrationStatus::step_failure;
        res.message = drift_msg;
    }
    return res;
}

FullState full_initial_state(const ReducedCoefficients& coeffs,
                             const ReducedState& reduced, const PlanarInit& frame) {
    FullState s;
    s.theta = reduced.theta;
    s.psi = frame.psi0;
    s.phi = frame.phi0;
    s.x = frame.x0;
    s.y = frame.y0;
    s.t = reduced.t;
    const CoeffPoint c = coeffs.at(reduced.theta);
    s.theta_dot = reduced.p_theta / c.B;
    s.psi_dot = reduced.ell == 0.0 ? 0.0 : reduced.ell / (c.N * c.sin_t * c.sin_t);
    s.phi_dot = phi_rate(reduced.theta, s.psi_dot);
    const auto v = contact_velocity(coeffs.geometry(), reduced.theta, s.theta_dot,
                                    s.psi_dot, frame.phi0);
    s.x_dot = v[0];
    s.y_dot = v[1];
    return s;
}

} // namespace rollkit
