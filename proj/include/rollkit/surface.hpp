#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rollkit/common.hpp"

namespace rollkit {

// Meridian description of a convex surface of revolution. The meridian is
// encoded by its curvature radius r(theta) >= 0, the radius h0 of the
// parallel at theta = 0, and the center-of-mass height f0 in standard
// position. Everything else (parallel radius, center-of-mass track, contact
// geometry) follows by single integrations; see GeometryCache.
class SurfaceProfile {
public:
    enum class Kind { torus, general };

    // Standard position for a torus: h0 = R, f0 = r.
    static SurfaceProfile torus(double R, double r, ThetaInterval domain = {});
    // Same closed forms with explicitly overridden anchors. Intended for
    // callers that know they are leaving the standard position.
    static SurfaceProfile torus_custom(double R, double r, double h0, double f0,
                                       ThetaInterval domain = {});
    // Closed-form curvature function and its derivative.
    static SurfaceProfile general(std::function<double(double)> r,
                                  std::function<double(double)> dr,
                                  double h0, double f0, ThetaInterval domain = {});
    // Sampled (theta, r) pairs, interpolated with a shape-preserving
    // monotone cubic. Values are clamped at zero (with a warning) should the
    // interpolant ever undershoot.
    static SurfaceProfile sampled(std::vector<double> thetas,
                                  std::vector<double> radii,
                                  double h0, double f0, ThetaInterval domain = {});

    Kind kind() const { return kind_; }
    bool is_torus() const { return kind_ == Kind::torus; }
    double torus_R() const { return R_; }
    double torus_r() const { return r_; }
    double h0() const { return h0_; }
    double f0() const { return f0_; }
    const ThetaInterval& domain() const { return domain_; }

    double curvature(double theta) const;       // r(theta)
    double curvature_slope(double theta) const; // dr/dtheta

    // Smoothness breakpoints of r (the sample knots); the quadrature cache
    // aligns its panels with these.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    SurfaceProfile() = default;

    Kind kind_ = Kind::torus;
    double R_ = 0.0, r_ = 0.0;
    double h0_ = 0.0, f0_ = 0.0;
    ThetaInterval domain_;
    std::function<double(double)> r_fn_, dr_fn_;
    std::vector<double> breakpoints_;
    std::vector<std::string> warnings_;
};

// All meridian-derived quantities at one nutation angle.
struct MeridianPoint {
    double h;       // parallel radius: distance of the contact point to the axis
    double f;       // meridian height above the pole plane
    double fstar;   // axial offset of the center of mass, f0 - f
    double lambda;  // planar lever arm from contact point to the center-of-mass
                    // projection; equals dz_c/dtheta
    double dlambda; // d(lambda)/dtheta
    double z_c;     // center-of-mass height
    double cp_sq;   // squared distance center of mass -> contact point
    double r;       // meridian curvature radius at theta
    double dr;      // dr/dtheta
};

// Immutable evaluator for the meridian functions. Torus profiles use closed
// forms; general profiles are integrated once (adaptive Gauss-Kronrod, then
// per-panel quintic Hermite in the cumulative values) so that the hot paths
// never re-run quadrature. Safe for concurrent reads after construction.
class GeometryCache {
public:
    explicit GeometryCache(SurfaceProfile profile, double quad_tol = 1e-10);

    const SurfaceProfile& profile() const { return profile_; }
    const ThetaInterval& domain() const { return profile_.domain(); }
    double quad_tol() const { return quad_tol_; }
    // Worst observed interpolant-vs-quadrature mismatch at validation points.
    double achieved_tol() const { return achieved_tol_; }

    MeridianPoint at(double theta) const;

    // Spec surface operations.
    std::pair<double, double> meridian(double theta) const; // (h, f)
    double lambda(double theta) const;
    double dlambda(double theta) const;
    double z_center(double theta) const;
    double cp_distance_sq(double theta) const;

private:
    void build_quadrature_cache();
    void eval_hf(double theta, double& h, double& f) const;

    SurfaceProfile profile_;
    double quad_tol_ = 1e-10;
    double achieved_tol_ = 0.0;

    // Cumulative integrals stored per panel as quintic monomials in the
    // scaled offset u = (theta - a) / w.
    struct Panel {
        double a, w;
        double ch[6];
        double cf[6];
    };
    std::vector<double> knots_;
    std::vector<Panel> panels_;
};

} // namespace rollkit
