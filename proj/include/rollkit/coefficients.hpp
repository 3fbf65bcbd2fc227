#pragma once

#include <string>
#include <vector>

#include "rollkit/surface.hpp"

namespace rollkit {

// Mass and inertia data of the rolling body. I1 is the transverse principal
// inertia (I1 = I2), I3 the axial one. Units are SI throughout: m [kg],
// inertias [kg m^2], g [m/s^2].
struct BodyParams {
    double m = 1.0;
    double I1 = 1.0;
    double I3 = 1.0;
    double g = 9.81;

    // The physically meaningful range is 0 < I1 <= I3 < 2*I1. Violations are
    // reported, not rejected: the reduced dynamics stays well defined.
    std::vector<std::string> physicality_warnings() const;

    static BodyParams solid_torus(double m, double R, double r, double g);
    static BodyParams hollow_torus(double m, double R, double r, double g);
};

// Point values of the compressed kinetic coefficients at one nutation angle.
struct CoeffPoint {
    double A;     // coefficient of psi_dot^2 in the compressed kinetic energy [kg m^2]
    double B;     // coefficient of theta_dot^2 [kg m^2]; independent of I3
    double dB;    // dB/dtheta, closed form 2 m (h h' + f* f*')
    double C;     // gyroscopic coefficient, P_phi = C psi_dot [kg m^2]
    double N;     // conserved-quantity density: sqrt(I1 cos^2 + I3 sin^2 + m z_c^2)
    double N2;    // N^2
    double n;     // d(log N)/dtheta, evaluated as C / (N^2 sin)
    double z_c;   // center-of-mass height [m]
    double dz_c;  // = lambda(theta)
    double h;     // parallel radius, for the no-slip rates
    double r;     // meridian curvature radius
    double sin_t, cos_t;
};

// Evaluators for the compressed coefficients of a body of revolution rubber
// rolling on the plane. Immutable after construction; concurrent reads are
// fine. The square-root closed form is always used for N; the exp-integral
// definition is reserved for test oracles.
class ReducedCoefficients {
public:
    ReducedCoefficients(GeometryCache geometry, BodyParams body);

    const GeometryCache& geometry() const { return geom_; }
    const BodyParams& body() const { return body_; }
    const ThetaInterval& domain() const { return geom_.domain(); }

    CoeffPoint at(double theta) const;

    double A(double theta) const { return at(theta).A; }
    double B(double theta) const { return at(theta).B; }
    double dB(double theta) const { return at(theta).dB; }
    double C(double theta) const { return at(theta).C; }
    double nose(double theta) const { return at(theta).N; }
    // d(log N)/dtheta; singular evaluation (sin = 0) raises SingularityError.
    double n(double theta) const;

    // Effective potential ell^2 / (2 sin^2) + m g z_c and its theta
    // derivatives, all in closed form. Contains neither I1 nor I3.
    double potential(double theta, double ell) const;
    double dpotential(double theta, double ell) const;
    double d2potential(double theta, double ell) const;

private:
    GeometryCache geom_;
    BodyParams body_;
};

} // namespace rollkit
