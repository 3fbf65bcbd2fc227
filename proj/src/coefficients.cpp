#include "rollkit/coefficients.hpp"

#include <cmath>
#include <cstdio>

namespace rollkit {

std::vector<std::string> BodyParams::physicality_warnings() const {
    std::vector<std::string> out;
    char buf[128];
    if (!(m > 0.0)) out.emplace_back("mass m must be positive");
    if (!(g > 0.0)) out.emplace_back("gravity g must be positive");
    if (!(I1 > 0.0)) out.emplace_back("inertia I1 must be positive");
    if (!(I1 <= I3) || !(I3 < 2.0 * I1)) {
        std::snprintf(buf, sizeof(buf),
                      "inertias outside physical range I1 <= I3 < 2*I1 (I1=%g, I3=%g)", I1, I3);
        out.emplace_back(buf);
    }
    return out;
}

BodyParams BodyParams::solid_torus(double m, double R, double r, double g) {
    BodyParams b;
    b.m = m;
    b.g = g;
    b.I3 = m * (4.0 * R * R + 3.0 * r * r) / 4.0;
    b.I1 = m * (4.0 * R * R + 5.0 * r * r) / 8.0;
    return b;
}

BodyParams BodyParams::hollow_torus(double m, double R, double r, double g) {
    BodyParams b;
    b.m = m;
    b.g = g;
    b.I3 = m * (2.0 * R * R + 3.0 * r * r) / 2.0;
    b.I1 = m * (2.0 * R * R + 5.0 * r * r) / 4.0;
    return b;
}

ReducedCoefficients::ReducedCoefficients(GeometryCache geometry, BodyParams body)
    : geom_(std::move(geometry)), body_(body) {}

CoeffPoint ReducedCoefficients::at(double theta) const {
    const MeridianPoint g = geom_.at(theta);
    CoeffPoint c;
    c.sin_t = std::sin(theta);
    c.cos_t = std::cos(theta);
    c.z_c = g.z_c;
    c.dz_c = g.lambda;
    c.h = g.h;
    c.r = g.r;
    c.N2 = body_.I1 * c.cos_t * c.cos_t + body_.I3 * c.sin_t * c.sin_t +
           body_.m * g.z_c * g.z_c;
    c.N = std::sqrt(c.N2);
    c.A = c.N2 * c.sin_t * c.sin_t;
    c.B = body_.I1 + body_.m * g.cp_sq;
    // h' = r cos, f*' = -r sin.
    c.dB = 2.0 * body_.m * (g.h * g.r * c.cos_t + g.fstar * (-g.r * c.sin_t));
    c.C = ((body_.I3 - body_.I1) * c.sin_t * c.cos_t + body_.m * g.lambda * g.z_c) * c.sin_t;
    // The sin^2 cancellation between C sin and A is performed analytically so
    // the evaluation stays clean through theta = pi/2.
    c.n = c.C / (c.N2 * c.sin_t);
    return c;
}

double ReducedCoefficients::n(double theta) const {
    const CoeffPoint c = at(theta);
    if (c.sin_t == 0.0)
        throw SingularityError("n(theta) undefined at sin(theta) = 0", theta);
    return c.n;
}

double ReducedCoefficients::potential(double theta, double ell) const {
    const MeridianPoint g = geom_.at(theta);
    const double s = std::sin(theta);
    if (ell != 0.0 && s == 0.0)
        throw SingularityError("potential singular at sin(theta) = 0 with ell != 0", theta);
    const double centrifugal = ell == 0.0 ? 0.0 : ell * ell / (2.0 * s * s);
    return centrifugal + body_.m * body_.g * g.z_c;
}

double ReducedCoefficients::dpotential(double theta, double ell) const {
    const MeridianPoint g = geom_.at(theta);
    const double s = std::sin(theta), c = std::cos(theta);
    const double centrifugal = ell == 0.0 ? 0.0 : -ell * ell * c / (s * s * s);
    return centrifugal + body_.m * body_.g * g.lambda;
}

double ReducedCoefficients::d2potential(double theta, double ell) const {
    const MeridianPoint g = geom_.at(theta);
    const double s = std::sin(theta), c = std::cos(theta);
    const double s2 = s * s;
    const double centrifugal =
        ell == 0.0 ? 0.0 : ell * ell * (s2 + 3.0 * c * c) / (s2 * s2);
    return centrifugal + body_.m * body_.g * g.dlambda;
}

} // namespace rollkit
