#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rollkit {

inline constexpr double kPi = 3.14159265358979323846;

// Closed interval of nutation angles on which geometry may be evaluated.
// The Euler-angle chart and the Gauss-map inversion both degenerate at the
// poles, so the default keeps a small margin away from 0 and pi.
struct ThetaInterval {
    double lo = 1e-3;
    double hi = kPi - 1e-3;

    bool contains(double theta) const { return theta >= lo && theta <= hi; }
    double width() const { return hi - lo; }
    double clamp(double theta) const {
        return theta < lo ? lo : (theta > hi ? hi : theta);
    }
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by point evaluations at sin(theta) = 0 with a nonzero conserved
// level, where the centrifugal term blows up.
struct SingularityError : std::runtime_error {
    double theta;
    explicit SingularityError(const std::string& what, double theta_)
        : std::runtime_error(what), theta(theta_) {}
};

[[noreturn]] inline void throw_domain(const char* where, double theta,
                                      const ThetaInterval& dom) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: theta=%.17g outside domain [%.17g, %.17g]",
                  where, theta, dom.lo, dom.hi);
    throw std::domain_error(buf);
}

// FNV-1a, used to stamp outputs with a stable hash of the canonical config.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// 17 significant digits: enough to round-trip a double, fixed width for
// byte-stable CSV output.
inline std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

} // namespace rollkit
