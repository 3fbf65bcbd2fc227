#pragma once

#include <Eigen/Dense>
#include <array>

#include "rollkit/reduced.hpp"

namespace rollkit {

// Configuration and velocity of the unreduced system. Coordinates are the
// ZXZ Euler angles (phi yaw, theta nutation, psi precession) and the planar
// contact point (x, y).
struct FullState {
    double theta = 0.0, psi = 0.0, phi = 0.0, x = 0.0, y = 0.0;
    double theta_dot = 0.0, psi_dot = 0.0, phi_dot = 0.0, x_dot = 0.0, y_dot = 0.0;
    double t = 0.0;
};

// Group part of the initial condition for lifting a reduced trajectory.
struct PlanarInit {
    double psi0 = 0.0, phi0 = 0.0, x0 = 0.0, y0 = 0.0;
};

// Precession rate from the conserved level: psi_dot = ell / (N sin^2 theta).
double psi_rate(const ReducedCoefficients& coeffs, double theta, double ell);

// No-twist: phi_dot = -cos(theta) psi_dot.
double phi_rate(double theta, double psi_dot);

// No-slip: (x_dot, y_dot) = -h psi_dot e_N - r theta_dot e_N_perp with
// e_N = (cos phi, sin phi).
std::array<double, 2> contact_velocity(const GeometryCache& geom, double theta,
                                       double theta_dot, double psi_dot, double phi);

// ZXZ attitude matrix carrying the space frame onto the body frame.
Eigen::Matrix3d attitude(double phi, double theta, double psi);

// Radius of the planar circle traced at a relative equilibrium,
// h(theta)/cos(theta). Signals the straight-line limit at cos = 0.
double steady_circle_radius(const GeometryCache& geom, double theta_star);

// Lift a reduced motion to the full configuration: integrates the reduced
// pair jointly with the rate equations for (psi, phi, x, y) on the same grid
// and method, so the residual channels are meaningful sample by sample.
// Columns: t,theta,psi,phi,x,y,theta_dot,psi_dot,phi_dot,x_dot,y_dot,energy,
// ell,res_notwist,res_noslip.
IntegrationResult reconstruct(const ReducedCoefficients& coeffs,
                              const ReducedState& init, const PlanarInit& frame,
                              const IntegrateOptions& opts);

// Algebraic (Kasa) circle fit; deviation is the worst |distance - radius|.
struct CircleFit {
    double cx = 0.0, cy = 0.0, radius = 0.0;
    double max_deviation = 0.0;
};
CircleFit fit_circle(std::span<const double> x, std::span<const double> y);

} // namespace rollkit
