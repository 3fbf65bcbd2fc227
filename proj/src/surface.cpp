#include "rollkit/surface.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "rollkit/quadrature.hpp"

namespace rollkit {

namespace {

// Fritsch-Carlson monotone cubic through (x_i, y_i). Shape preserving: no
// overshoot past the data on any interval, derivative zero at interior
// extrema. Provides value and first derivative.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        d_.assign(n, 0.0);
        if (n == 1) return;
        std::vector<double> h(n - 1), s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            if (h[i] <= 0.0)
                throw std::invalid_argument("sampled profile: theta values must be strictly increasing");
            s[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            d_[0] = d_[1] = s[0];
        } else {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                if (s[i - 1] * s[i] <= 0.0) {
                    d_[i] = 0.0;
                } else {
                    const double w1 = 2.0 * h[i] + h[i - 1];
                    const double w2 = h[i] + 2.0 * h[i - 1];
                    d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
                }
            }
            d_[0] = edge_slope(h[0], h[1], s[0], s[1]);
            d_[n - 1] = edge_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
        }
    }

    double value(double x) const { return eval(x).first; }
    double slope(double x) const { return eval(x).second; }

private:
    static double edge_slope(double h0, double h1, double s0, double s1) {
        double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0) return 0.0;
        if (s0 * s1 < 0.0 && std::abs(d) > 3.0 * std::abs(s0)) return 3.0 * s0;
        return d;
    }

    std::pair<double, double> eval(double x) const {
        const std::size_t n = x_.size();
        if (n == 1) return {y_[0], 0.0};
        // Constant extrapolation outside the sampled range.
        if (x <= x_.front()) return {y_.front(), 0.0};
        if (x >= x_.back()) return {y_.back(), 0.0};
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double y0 = y_[i], y1 = y_[i + 1];
        const double m0 = d_[i] * h, m1 = d_[i + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        const double v = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
                         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
        const double dv = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
                           (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h;
        return {v, dv};
    }

    std::vector<double> x_, y_;
    std::vector<double> d_;
};

void check_domain_interval(const ThetaInterval& dom) {
    if (!(dom.lo > 0.0) || !(dom.hi < kPi) || !(dom.lo < dom.hi))
        throw std::invalid_argument("theta domain must satisfy 0 < lo < hi < pi");
}

} // namespace

SurfaceProfile SurfaceProfile::torus(double R, double r, ThetaInterval domain) {
    return torus_custom(R, r, R, r, domain);
}

SurfaceProfile SurfaceProfile::torus_custom(double R, double r, double h0,
                                            double f0, ThetaInterval domain) {
    if (!(R > r) || !(r > 0.0))
        throw std::invalid_argument("torus profile requires R > r > 0");
    check_domain_interval(domain);
    SurfaceProfile p;
    p.kind_ = Kind::torus;
    p.R_ = R;
    p.r_ = r;
    p.h0_ = h0;
    p.f0_ = f0;
    p.domain_ = domain;
    // f(pi) = 2r for the torus meridian.
    if (!(f0 > 0.0) || !(f0 < 2.0 * r))
        throw std::invalid_argument("center-of-mass height must satisfy 0 < f0 < 2r");
    return p;
}

SurfaceProfile SurfaceProfile::general(std::function<double(double)> r,
                                       std::function<double(double)> dr,
                                       double h0, double f0, ThetaInterval domain) {
    if (!r || !dr)
        throw std::invalid_argument("general profile requires r and dr callables");
    check_domain_interval(domain);
    SurfaceProfile p;
    p.kind_ = Kind::general;
    p.h0_ = h0;
    p.f0_ = f0;
    p.domain_ = domain;
    p.r_fn_ = std::move(r);
    p.dr_fn_ = std::move(dr);
    // Convexity: spot-check r >= 0 across the full meridian.
    for (int i = 0; i <= 256; ++i) {
        const double th = kPi * i / 256.0;
        if (p.r_fn_(th) < 0.0)
            throw std::invalid_argument("general profile: curvature r(theta) must be nonnegative");
    }
    const double f_total =
        integrate_adaptive([&](double u) { return p.r_fn_(u) * std::sin(u); }, 0.0, kPi, 1e-12);
    if (!(f0 > 0.0) || !(f0 < f_total))
        throw std::invalid_argument("center-of-mass height must satisfy 0 < f0 < integral of r*sin");
    return p;
}

SurfaceProfile SurfaceProfile::sampled(std::vector<double> thetas,
                                       std::vector<double> radii,
                                       double h0, double f0, ThetaInterval domain) {
    if (thetas.size() != radii.size() || thetas.size() < 2)
        throw std::invalid_argument("sampled profile needs matching (theta, r) lists, size >= 2");
    for (double v : radii)
        if (v < 0.0)
            throw std::invalid_argument("sampled profile: curvature samples must be nonnegative");
    std::vector<double> knots = thetas;
    auto spline = std::make_shared<MonotoneCubic>(std::move(thetas), std::move(radii));

    SurfaceProfile p;
    p.kind_ = Kind::general;
    p.h0_ = h0;
    p.f0_ = f0;
    check_domain_interval(domain);
    p.domain_ = domain;
    p.breakpoints_ = std::move(knots);

    // The clamp protects convexity; Fritsch-Carlson should never undershoot,
    // so a firing warning indicates bad input data.
    p.r_fn_ = [spline](double th) {
        const double v = spline->value(th);
        return v < 0.0 ? 0.0 : v;
    };
    p.dr_fn_ = [spline](double th) {
        return spline->value(th) < 0.0 ? 0.0 : spline->slope(th);
    };
    // Undershoot scan once, at construction, rather than per evaluation.
    for (int i = 0; i <= 1024; ++i) {
        const double th = kPi * i / 1024.0;
        if (spline->value(th) < 0.0) {
            p.warnings_.push_back("sampled profile: interpolant undershoots zero, clamped");
            break;
        }
    }
    const double f_total =
        integrate_adaptive([&](double u) { return p.r_fn_(u) * std::sin(u); }, 0.0, kPi, 1e-12);
    if (!(f0 > 0.0) || !(f0 < f_total))
        throw std::invalid_argument("center-of-mass height must satisfy 0 < f0 < integral of r*sin");
    return p;
}

double SurfaceProfile::curvature(double theta) const {
    return kind_ == Kind::torus ? r_ : r_fn_(theta);
}

double SurfaceProfile::curvature_slope(double theta) const {
    return kind_ == Kind::torus ? 0.0 : dr_fn_(theta);
}

// ---------------------------------------------------------------------------
// GeometryCache

GeometryCache::GeometryCache(SurfaceProfile profile, double quad_tol)
    : profile_(std::move(profile)), quad_tol_(quad_tol) {
    if (profile_.kind() == SurfaceProfile::Kind::general) build_quadrature_cache();
}

namespace {

// Two-point quintic Hermite: value/slope/curvature at both ends, monomial
// coefficients in u = (x - a)/w.
void quintic_coeffs(double w, double p0, double d0v, double dd0v, double p1,
                    double d1v, double dd1v, double c[6]) {
    const double d0 = w * d0v, d1 = w * d1v;
    const double dd0 = w * w * dd0v, dd1 = w * w * dd1v;
    const double A = p1 - p0 - d0 - 0.5 * dd0;
    const double B = d1 - d0 - dd0;
    const double C = dd1 - dd0;
    c[0] = p0;
    c[1] = d0;
    c[2] = 0.5 * dd0;
    c[3] = 10.0 * A - 4.0 * B + 0.5 * C;
    c[4] = -15.0 * A + 7.0 * B - C;
    c[5] = 6.0 * A - 3.0 * B + 0.5 * C;
}

inline double poly5(const double c[6], double u) {
    return c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))));
}

} // namespace

void GeometryCache::build_quadrature_cache() {
    const double hi = profile_.domain().hi;
    auto fh = [this](double u) { return profile_.curvature(u) * std::cos(u); };
    auto ff = [this](double u) { return profile_.curvature(u) * std::sin(u); };
    const double per_width = quad_tol_ / hi;

    // Panel edges: the profile's smoothness breakpoints (the Hermite fill
    // needs r smooth within a panel), then bisect until the Kronrod error
    // estimate of both increments fits the per-panel budget and panels are
    // short.
    std::vector<double> edges{0.0, hi};
    for (double b : profile_.breakpoints())
        if (b > 1e-12 && b < hi - 1e-12) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    struct Seg { double a, b; int depth; };
    std::vector<Seg> work;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        work.push_back({edges[i], edges[i + 1], 0});
    while (!work.empty()) {
        Seg s = work.back();
        work.pop_back();
        const double budget = 0.25 * per_width * (s.b - s.a);
        const double eh = kronrod15(fh, s.a, s.b).second;
        const double ef = kronrod15(ff, s.a, s.b).second;
        const bool too_wide = (s.b - s.a) > kPi / 64.0;
        if ((eh > budget || ef > budget || too_wide) && s.depth < 30 &&
            (s.b - s.a) > 1e-9) {
            const double m = 0.5 * (s.a + s.b);
            work.push_back({s.a, m, s.depth + 1});
            work.push_back({m, s.b, s.depth + 1});
            edges.push_back(m);
        }
    }

    // Assemble and validate; panels whose Hermite fill misses direct
    // quadrature at the midpoint get split and the assembly repeats.
    for (int round = 0;; ++round) {
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        const std::size_t np = edges.size() - 1;
        std::vector<double> hv(np + 1), fv(np + 1);
        hv[0] = profile_.h0();
        fv[0] = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
            const double tol = 0.25 * per_width * (edges[i + 1] - edges[i]);
            hv[i + 1] = hv[i] + integrate_adaptive(fh, edges[i], edges[i + 1], tol);
            fv[i + 1] = fv[i] + integrate_adaptive(ff, edges[i], edges[i + 1], tol);
        }

        knots_ = edges;
        panels_.resize(np);
        for (std::size_t i = 0; i < np; ++i) {
            const double a = edges[i], b = edges[i + 1], w = b - a;
            const double ra = profile_.curvature(a), rb = profile_.curvature(b);
            const double dra = profile_.curvature_slope(a), drb = profile_.curvature_slope(b);
            Panel& p = panels_[i];
            p.a = a;
            p.w = w;
            // h' = r cos, h'' = r' cos - r sin ; f' = r sin, f'' = r' sin + r cos.
            quintic_coeffs(w, hv[i], ra * std::cos(a), dra * std::cos(a) - ra * std::sin(a),
                           hv[i + 1], rb * std::cos(b), drb * std::cos(b) - rb * std::sin(b),
                           p.ch);
            quintic_coeffs(w, fv[i], ra * std::sin(a), dra * std::sin(a) + ra * std::cos(a),
                           fv[i + 1], rb * std::sin(b), drb * std::sin(b) + rb * std::cos(b),
                           p.cf);
        }

        achieved_tol_ = 0.0;
        std::vector<double> splits;
        for (std::size_t i = 0; i < np; ++i) {
            const double a = knots_[i], b = knots_[i + 1];
            const double mid = 0.5 * (a + b);
            double h_i, f_i;
            eval_hf(mid, h_i, f_i);
            const double h_q = hv[i] + integrate_adaptive(fh, a, mid, 1e-13);
            const double f_q = fv[i] + integrate_adaptive(ff, a, mid, 1e-13);
            const double err = std::max(std::abs(h_i - h_q), std::abs(f_i - f_q));
            achieved_tol_ = std::max(achieved_tol_, err);
            if (err > quad_tol_ && (b - a) > 1e-9) splits.push_back(mid);
        }
        if (splits.empty()) return;
        if (round >= 8)
            throw std::runtime_error(
                "GeometryCache: interpolant failed to reach quadrature tolerance");
        edges.insert(edges.end(), splits.begin(), splits.end());
    }
}

void GeometryCache::eval_hf(double theta, double& h, double& f) const {
    if (profile_.kind() == SurfaceProfile::Kind::torus) {
        const double r = profile_.torus_r();
        h = profile_.h0() + r * std::sin(theta);
        f = r * (1.0 - std::cos(theta));
        return;
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), theta);
    std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (i >= panels_.size()) i = panels_.size() - 1;
    const Panel& p = panels_[i];
    const double u = (theta - p.a) / p.w;
    h = poly5(p.ch, u);
    f = poly5(p.cf, u);
}

MeridianPoint GeometryCache::at(double theta) const {
    if (!domain().contains(theta)) throw_domain("GeometryCache::at", theta, domain());
    MeridianPoint m;
    eval_hf(theta, m.h, m.f);
    m.r = profile_.curvature(theta);
    m.dr = profile_.curvature_slope(theta);
    const double s = std::sin(theta), c = std::cos(theta);
    m.fstar = profile_.f0() - m.f;
    m.lambda = m.h * c - m.fstar * s;
    m.dlambda = m.r - m.fstar * c - m.h * s;
    m.z_c = m.h * s + m.fstar * c;
    m.cp_sq = m.h * m.h + m.fstar * m.fstar;
    return m;
}

std::pair<double, double> GeometryCache::meridian(double theta) const {
    const MeridianPoint m = at(theta);
    return {m.h, m.f};
}

double GeometryCache::lambda(double theta) const { return at(theta).lambda; }
double GeometryCache::dlambda(double theta) const { return at(theta).dlambda; }
double GeometryCache::z_center(double theta) const { return at(theta).z_c; }
double GeometryCache::cp_distance_sq(double theta) const { return at(theta).cp_sq; }

} // namespace rollkit
