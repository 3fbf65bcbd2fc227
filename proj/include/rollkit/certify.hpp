#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rollkit/full_system.hpp"

namespace rollkit {

// Horizontal lifts of the base fields d/dtheta and d/dpsi to the total space
// (theta, psi, phi, x, y); they span the constraint distribution.
struct ConnectionFrame {
    const GeometryCache* geom = nullptr;

    Vec5 lift_theta(const Vec5& q) const;
    Vec5 lift_psi(const Vec5& q) const;
};

// Finite-difference Lie bracket of the two lifts. For rolling on the plane
// the bracket must be sin(theta) d/dphi; off_residual collects the norm of
// every other component (their cancellation encodes h' = r cos theta).
struct BracketSample {
    double phi_component;
    double off_residual;
};
BracketSample bracket_curvature(const ConnectionFrame& frame, const Vec5& q,
                                double step);

// The gyroscopic 2-form coefficient on (d/dtheta, d/dpsi), computed two ways:
// from the reduced coefficients as -p_psi n(theta), and through the full
// Legendre transform of the horizontal lift (momentum conjugate to phi).
struct JkSample {
    double via_coefficients;
    double via_legendre;
};
JkSample jk_coefficient(const ReducedCoefficients& coeffs,
                        const ConstrainedSystem& system, double theta, double p_psi);

// Closedness of N^{-1} Omega reduces to the scalar identity
// n(theta) = d(log N)/dtheta; returns |n - FD(log N)|.
double conformal_residual(const ReducedCoefficients& coeffs, double theta,
                          double fd_step = 1e-5);
// Same check against caller-supplied evaluators (negative controls).
double conformal_residual_fn(const std::function<double(double)>& nose_fn,
                             const std::function<double(double)>& n_fn,
                             double theta, double fd_step = 1e-5);

// Gyroscopic-tensor shape: potential Phi = -log N with Phi' = -n, vanishing
// p_theta coefficient, and p_psi coefficient -n(theta).
struct PhiSimpleSample {
    double phi;            // -log N(theta)
    double dphi_residual;  // |FD(Phi) + n|
    double f_theta;        // p_theta coefficient of the 2-form (should be 0)
    double f_psi_residual; // |(p_psi coefficient) + n|
};
PhiSimpleSample phi_simple_check(const ReducedCoefficients& coeffs,
                                 const ConstrainedSystem& system, double theta,
                                 double fd_step = 1e-5);

// One certification line: worst residual over the sampled grid vs the pinned
// tolerance.
struct CheckResult {
    std::string name;
    std::size_t samples = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct CertifyOptions {
    int grid = 1000;           // theta grid for coefficient identities
    int random_samples = 1000; // random configurations for kernel/rank checks
    double fd_step = 1e-5;
    std::uint64_t seed = 12345;
    bool parallel = true;
};

// Every structural identity of the reduction, as a flat list of pass/fail
// residual checks.
std::vector<CheckResult> run_certification(const ReducedCoefficients& coeffs,
                                           const CertifyOptions& opts);

nlohmann::json certification_json(const std::vector<CheckResult>& checks,
                                  const CertifyOptions& opts);

} // namespace rollkit
