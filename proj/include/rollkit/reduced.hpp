#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "rollkit/coefficients.hpp"
#include "rollkit/trajectory.hpp"

namespace rollkit {

// Phase point of the one-degree-of-freedom reduced system at a fixed
// conserved level ell.
struct ReducedState {
    double theta = 0.0;   // nutation [rad]
    double p_theta = 0.0; // conjugate momentum B(theta) theta_dot [kg m^2/s]
    double ell = 0.0;     // level N sin^2(theta) psi_dot [sqrt(kg) m/s]; ell^2 is an energy
    double t = 0.0;       // [s]
};

// H = p^2/(2B) + ell^2/(2 sin^2) + m g z_c. Independent of I3.
double hamiltonian(const ReducedCoefficients& coeffs, const ReducedState& s);

// (theta_dot, p_theta_dot) in original time; closed-form derivatives only.
std::array<double, 2> reduced_rhs(const ReducedCoefficients& coeffs, double theta,
                                  double p_theta, double ell);

// Fixed-step RK4 (default) or adaptive RK45, sampled at uniform output times.
// Columns: t,theta,p_theta,energy,ell. Aborts (status singularity) when
// sin(theta) drops under the guard or theta leaves the geometry domain.
IntegrationResult integrate_reduced(const ReducedCoefficients& coeffs,
                                    const ReducedState& init,
                                    const IntegrateOptions& opts);

// Newton form theta'' = -dV/dtheta in the stretched time tau, with the
// original time accumulated alongside via dt = sqrt(B) dtau. Columns:
// tau,theta,p_tau,t,energy,ell. opts.dt and opts.t_end are read in tau.
IntegrationResult integrate_tau(const ReducedCoefficients& coeffs,
                                const ReducedState& init,
                                const IntegrateOptions& opts);

// Evaluate theta(t) of a tau-indexed trajectory at arbitrary times t, by
// per-interval cubic Hermite using dtheta/dt = p_tau / sqrt(B). Times outside
// the covered range are rejected.
std::vector<double> resample_tau_theta(const ReducedCoefficients& coeffs,
                                       const Trajectory& tau_trajectory,
                                       std::span<const double> times);

enum class Stability { stable, unstable, degenerate };

struct Equilibrium {
    double theta = 0.0;
    double ell = 0.0;
    Stability stability = Stability::degenerate;
    double d2V = 0.0;     // d^2 V / dtheta^2 (finite difference, step 1e-6)
    double residual = 0.0; // |dz_c/dtheta - (ell^2/mg) cos/sin^3| at the root
};

// All relative equilibria in the domain at level ell: sign scan on a uniform
// grid, bisection, then Newton polish. Roots closer than 1e-8 are merged and
// flagged degenerate.
std::vector<Equilibrium> find_equilibria(const ReducedCoefficients& coeffs,
                                         double ell, int grid_points = 2000);

struct BifurcationRow {
    double ell;
    double theta;
    Stability stability;
    double energy; // H(theta*, 0; ell)
};

struct BifurcationScan {
    std::vector<BifurcationRow> rows;
    // Level where a tracked branch changes stability (pitchfork); refined by
    // bisection on the closed-form d2V of the persistent branch.
    std::optional<double> pitchfork_ell;
};

BifurcationScan bifurcation_scan(const ReducedCoefficients& coeffs,
                                 double ell_min, double ell_max, int samples,
                                 bool parallel = true);

// Level curves of H in the (theta, p_theta) plane, marching squares with
// bisection-polished edge crossings. Segments are (theta0,p0,theta1,p1).
struct ContourLevel {
    double level;
    std::vector<std::array<double, 4>> segments;
};

struct PhasePortraitOptions {
    double theta_min, theta_max;
    double p_min, p_max;
    int n_theta = 200;
    int n_p = 200;
    bool parallel = true;
};

std::vector<ContourLevel> phase_portrait(const ReducedCoefficients& coeffs,
                                         double ell, std::span<const double> levels,
                                         const PhasePortraitOptions& opts);

} // namespace rollkit
