#pragma once

#include <Eigen/Dense>
#include <utility>

#include "rollkit/reconstruction.hpp"

namespace rollkit {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat35 = Eigen::Matrix<double, 3, 5>;

// The unreduced constrained system on q = (theta, psi, phi, x, y): the full
// Lagrangian at general phi with the no-twist and no-slip constraints
// enforced through Lagrange multipliers in an index-reduced saddle system.
// No constraint stabilization is applied; drift is monitored and treated as
// an error, so this integrator can serve as an independent ground truth.
class ConstrainedSystem {
public:
    ConstrainedSystem(GeometryCache geometry, BodyParams body);

    const GeometryCache& geometry() const { return geom_; }
    const BodyParams& body() const { return body_; }

    Mat5 mass_matrix(const Vec5& q) const;
    // Rows: no-twist, no-slip x, no-slip y.
    Mat35 constraint_jacobian(const Vec5& q) const;
    Eigen::Vector3d constraint_velocity(const Vec5& q, const Vec5& qdot) const;
    // d(G)/dt * qdot, from closed-form derivatives of h, r and the trig terms.
    Eigen::Vector3d constraint_rate(const Vec5& q, const Vec5& qdot) const;
    // Coriolis/centrifugal plus gravity: M qddot = f + G^T lambda.
    Vec5 generalized_force(const Vec5& q, const Vec5& qdot) const;

    // Kinetic and potential energy.
    std::pair<double, double> lagrangian(const Vec5& q, const Vec5& qdot) const;
    // Conserved level N(theta) (phi_dot cos theta + psi_dot).
    double ell(const Vec5& q, const Vec5& qdot) const;

    // M-orthogonal projection of a raw velocity onto the constraint kernel.
    Vec5 project_velocity(const Vec5& q, const Vec5& qdot_raw) const;

    // Solve the saddle system for (qddot, lambda).
    std::pair<Vec5, Eigen::Vector3d> acceleration(const Vec5& q, const Vec5& qdot) const;

    // One fixed RK4 step.
    FullState step(const FullState& s, double dt) const;

    // Columns: t,theta,psi,phi,x,y,theta_dot,psi_dot,phi_dot,x_dot,y_dot,
    // energy,ell,res_notwist,res_noslip. Requires |G qdot| <= 1e-10 at the
    // initial state; aborts with status step_failure if the monitored drift
    // ever exceeds 1e-6.
    IntegrationResult integrate(const FullState& init, const IntegrateOptions& opts) const;

private:
    GeometryCache geom_;
    BodyParams body_;
};

// Matched initial data: lifts a reduced phase point and a planar pose to a
// full state on the constraint distribution.
FullState full_initial_state(const ReducedCoefficients& coeffs,
                             const ReducedState& reduced, const PlanarInit& frame);

inline Vec5 position_of(const FullState& s) {
    return (Vec5() << s.theta, s.psi, s.phi, s.x, s.y).finished();
}
inline Vec5 velocity_of(const FullState& s) {
    return (Vec5() << s.theta_dot, s.psi_dot, s.phi_dot, s.x_dot, s.y_dot).finished();
}

} // namespace rollkit
