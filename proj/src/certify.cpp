#include "rollkit/certify.hpp"

#include <cmath>
#include <random>

#include "rollkit/parallel.hpp"

namespace rollkit {

Vec5 ConnectionFrame::lift_theta(const Vec5& q) const {
    const double r = geom->at(q[0]).r;
    const double sphi = std::sin(q[2]), cphi = std::cos(q[2]);
    // d/dtheta - r e_N_perp.
    return (Vec5() << 1.0, 0.0, 0.0, r * sphi, -r * cphi).finished();
}

Vec5 ConnectionFrame::lift_psi(const Vec5& q) const {
    const double h = geom->at(q[0]).h;
    const double sphi = std::sin(q[2]), cphi = std::cos(q[2]);
    // d/dpsi - h e_N - cos(theta) d/dphi.
    return (Vec5() << 0.0, 1.0, -std::cos(q[0]), -h * cphi, -h * sphi).finished();
}

BracketSample bracket_curvature(const ConnectionFrame& frame, const Vec5& q,
                                double step) {
    // [X, Y]^k = X^j d_j Y^k - Y^j d_j X^k with central differences over all
    // five coordinates; no structural knowledge of the fields is assumed.
    const Vec5 X = frame.lift_theta(q);
    const Vec5 Y = frame.lift_psi(q);
    Vec5 bracket = Vec5::Zero();
    for (int j = 0; j < 5; ++j) {
        Vec5 qp = q, qm = q;
        qp[j] += step;
        qm[j] -= step;
        const Vec5 dY = (frame.lift_psi(qp) - frame.lift_psi(qm)) / (2.0 * step);
        const Vec5 dX = (frame.lift_theta(qp) - frame.lift_theta(qm)) / (2.0 * step);
        bracket += X[j] * dY - Y[j] * dX;
    }
    BracketSample out;
    out.phi_component = bracket[2];
    bracket[2] = 0.0;
    out.off_residual = bracket.norm();
    return out;
}

namespace {

// J.K coefficient through the unreduced Legendre transform: invert the
// compressed momenta, lift the base velocity horizontally, and read off the
// momentum conjugate to phi from the full mass matrix.
double jk_via_legendre(const ReducedCoefficients& coeffs,
                       const ConstrainedSystem& system, double theta, double p_theta,
                       double p_psi) {
    const CoeffPoint c = coeffs.at(theta);
    const ConnectionFrame frame{&coeffs.geometry()};
    // Group-identity section: x = y = phi = 0; psi is ignorable.
    const Vec5 q = (Vec5() << theta, 0.7, 0.0, 0.0, 0.0).finished();
    const Vec5 qdot = (p_theta / c.B) * frame.lift_theta(q) +
                      (p_psi / c.A) * frame.lift_psi(q);
    const double P_phi = (system.mass_matrix(q) * qdot)[2];
    return -P_phi * c.sin_t;
}

} // namespace

JkSample jk_coefficient(const ReducedCoefficients& coeffs,
                        const ConstrainedSystem& system, double theta, double p_psi) {
    const CoeffPoint c = coeffs.at(theta);
    if (c.sin_t == 0.0)
        throw SingularityError("jk_coefficient singular at sin(theta) = 0", theta);
    return {-p_psi * c.n, jk_via_legendre(coeffs, system, theta, 0.0, p_psi)};
}

double conformal_residual_fn(const std::function<double(double)>& nose_fn,
                             const std::function<double(double)>& n_fn,
                             double theta, double fd_step) {
    const double d = (std::log(nose_fn(theta + fd_step)) -
                      std::log(nose_fn(theta - fd_step))) /
                     (2.0 * fd_step);
    return std::abs(n_fn(theta) - d);
}

double conformal_residual(const ReducedCoefficients& coeffs, double theta,
                          double fd_step) {
    return conformal_residual_fn([&](double th) { return coeffs.nose(th); },
                                 [&](double th) { return coeffs.n(th); }, theta,
                                 fd_step);
}

PhiSimpleSample phi_simple_check(const ReducedCoefficients& coeffs,
                                 const ConstrainedSystem& system, double theta,
                                 double fd_step) {
    PhiSimpleSample out;
    const CoeffPoint c = coeffs.at(theta);
    out.phi = -std::log(c.N);
    const double dphi = (-std::log(coeffs.nose(theta + fd_step)) +
                         std::log(coeffs.nose(theta - fd_step))) /
                        (2.0 * fd_step);
    out.dphi_residual = std::abs(dphi + c.n);
    out.f_theta = jk_via_legendre(coeffs, system, theta, 1.0, 0.0);
    out.f_psi_residual = std::abs(jk_via_legendre(coeffs, system, theta, 0.0, 1.0) + c.n);
    return out;
}

// ---------------------------------------------------------------------------
// Aggregated certification

namespace {

double unit_uniform(std::mt19937_64& eng) {
    // Portable uniform in [0, 1); distribution classes are not
    // implementation-stable.
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

struct GridSpec {
    double lo, hi;
    int n;
    double at(int i) const { return lo + (hi - lo) * i / (n - 1.0); }
};

} // namespace

std::vector<CheckResult> run_certification(const ReducedCoefficients& coeffs,
                                           const CertifyOptions& opts) {
    std::vector<CheckResult> out;
    const GeometryCache& geom = coeffs.geometry();
    const BodyParams& body = coeffs.body();
    const ConstrainedSystem system(geom, body);
    const ConnectionFrame frame{&geom};
    const double h = opts.fd_step;
    const ThetaInterval dom = geom.domain();
    const GridSpec grid{dom.lo + 10.0 * h, dom.hi - 10.0 * h, std::max(opts.grid, 8)};
    const bool torus = geom.profile().is_torus();

    const auto add = [&](std::string name, std::size_t n, double max_residual,
                         double tol) {
        out.push_back({std::move(name), n, max_residual, tol, max_residual <= tol});
    };
    const auto grid_max = [&](auto&& fn) {
        return par::max_over(static_cast<std::size_t>(grid.n),
                             [&](std::size_t i) { return fn(grid.at(static_cast<int>(i))); },
                             opts.parallel);
    };

    // Meridian slopes h' = r cos, f' = r sin (finite differences).
    add("meridian_slopes", grid.n, grid_max([&](double th) {
            const MeridianPoint m = geom.at(th);
            const auto [hp, fp] = geom.meridian(th + h);
            const auto [hm, fm] = geom.meridian(th - h);
            const double dh = (hp - hm) / (2.0 * h), df = (fp - fm) / (2.0 * h);
            return std::max(std::abs(dh - m.r * std::cos(th)),
                            std::abs(df - m.r * std::sin(th)));
        }),
        1e-6);

    // dz_c/dtheta = lambda (finite differences).
    add("zc_slope_is_lambda", grid.n, grid_max([&](double th) {
            const double d = (geom.z_center(th + h) - geom.z_center(th - h)) / (2.0 * h);
            return std::abs(d - geom.lambda(th));
        }),
        1e-6);

    // |CP|^2 both algebraic routes.
    add("cp_sq_double_route", grid.n, grid_max([&](double th) {
            const MeridianPoint m = geom.at(th);
            const double other = m.lambda * m.lambda +
                                 (m.r - m.dlambda) * (m.r - m.dlambda);
            return std::abs(m.cp_sq - other);
        }),
        1e-10);

    // h - lambda cos = z_c sin.
    add("h_lambda_zc_identity", grid.n, grid_max([&](double th) {
            const MeridianPoint m = geom.at(th);
            return std::abs(m.h - m.lambda * std::cos(th) - m.z_c * std::sin(th));
        }),
        1e-10);

    // n(theta) = d(log N)/dtheta.
    add("nose_identity", grid.n,
        grid_max([&](double th) { return conformal_residual(coeffs, th, h); }), 1e-8);

    // A = N^2 sin^2.
    add("A_equals_N2_sin2", grid.n, grid_max([&](double th) {
            const CoeffPoint c = coeffs.at(th);
            const double lhs = (body.I1 * c.cos_t * c.cos_t + body.I3 * c.sin_t * c.sin_t +
                                body.m * c.z_c * c.z_c) *
                               c.sin_t * c.sin_t;
            return std::abs(lhs - c.N * c.N * c.sin_t * c.sin_t) / std::abs(lhs);
        }),
        1e-12);

    // Compressed coefficients against the unreduced quadratic form on the
    // horizontal lifts.
    add("compressed_vs_unreduced", grid.n, grid_max([&](double th) {
            const Vec5 q = (Vec5() << th, 0.3, 0.0, 0.0, 0.0).finished();
            const Mat5 M = system.mass_matrix(q);
            const Vec5 lt = frame.lift_theta(q);
            const Vec5 lp = frame.lift_psi(q);
            const CoeffPoint c = coeffs.at(th);
            const double scale = std::max(1.0, std::max(c.A, c.B));
            return std::max(std::abs(lt.dot(M * lt) - c.B),
                            std::abs(lp.dot(M * lp) - c.A)) /
                   scale;
        }),
        1e-12);

    // B and the effective potential carry no inertia dependence: outputs must
    // be bit-identical under perturbation.
    {
        BodyParams b2 = body;
        b2.I3 *= 2.0;
        const ReducedCoefficients coeffs_i3(geom, b2);
        add("B_independent_of_I3", grid.n, grid_max([&](double th) {
                return std::abs(coeffs.B(th) - coeffs_i3.B(th));
            }),
            0.0);
        BodyParams b3 = body;
        b3.I1 *= 1.7;
        b3.I3 *= 0.6;
        const ReducedCoefficients coeffs_i13(geom, b3);
        add("potential_no_inertia", grid.n, grid_max([&](double th) {
                return std::abs(coeffs.potential(th, 0.37) -
                                coeffs_i13.potential(th, 0.37));
            }),
            0.0);
    }

    // Conformal closedness of N^{-1} Omega.
    add("conformal_closedness", grid.n,
        grid_max([&](double th) { return conformal_residual(coeffs, th, h); }),
        torus ? 1e-8 : 1e-6);

    // Phi-simple structure.
    add("phi_simple_gradient", grid.n, grid_max([&](double th) {
            return phi_simple_check(coeffs, system, th, h).dphi_residual;
        }),
        1e-8);
    add("gyro_tensor_coefficients", grid.n, grid_max([&](double th) {
            const PhiSimpleSample s = phi_simple_check(coeffs, system, th, h);
            return std::max(std::abs(s.f_theta), s.f_psi_residual);
        }),
        1e-10);

    // J.K double route.
    add("jk_double_route", grid.n, grid_max([&](double th) {
            const JkSample s = jk_coefficient(coeffs, system, th, 0.8);
            return std::abs(s.via_coefficients - s.via_legendre);
        }),
        1e-10);

    // Curvature of the connection: [h_theta, h_psi] = sin(theta) d/dphi.
    {
        std::mt19937_64 eng(opts.seed);
        std::vector<Vec5> qs(static_cast<std::size_t>(grid.n));
        for (auto& q : qs) {
            const double th = grid.lo + (grid.hi - grid.lo) * unit_uniform(eng);
            q = (Vec5() << th, 2.0 * kPi * unit_uniform(eng), 2.0 * kPi * unit_uniform(eng),
                 2.0 * unit_uniform(eng) - 1.0, 2.0 * unit_uniform(eng) - 1.0)
                    .finished();
        }
        add("bracket_coefficient", qs.size(),
            par::max_over(qs.size(),
                          [&](std::size_t i) {
                              const BracketSample s = bracket_curvature(frame, qs[i], h);
                              return std::abs(s.phi_component - std::sin(qs[i][0]));
                          },
                          opts.parallel),
            1e-6);
        add("bracket_off_components", qs.size(),
            par::max_over(qs.size(),
                          [&](std::size_t i) {
                              return bracket_curvature(frame, qs[i], h).off_residual;
                          },
                          opts.parallel),
            1e-6);
    }

    // Kernel and rank checks at random configurations.
    {
        std::mt19937_64 eng(opts.seed + 1);
        const int n = std::max(opts.random_samples, 8);
        std::vector<Vec5> qs(static_cast<std::size_t>(n));
        for (auto& q : qs) {
            const double margin = 0.05;
            const double th = dom.lo + margin +
                              (dom.width() - 2 * margin) * unit_uniform(eng);
            q = (Vec5() << th, 2.0 * kPi * unit_uniform(eng), 2.0 * kPi * unit_uniform(eng),
                 4.0 * unit_uniform(eng) - 2.0, 4.0 * unit_uniform(eng) - 2.0)
                    .finished();
        }
        add("lifts_in_constraint_kernel", qs.size(),
            par::max_over(qs.size(),
                          [&](std::size_t i) {
                              const Mat35 G = system.constraint_jacobian(qs[i]);
                              return std::max((G * frame.lift_theta(qs[i])).norm(),
                                              (G * frame.lift_psi(qs[i])).norm());
                          },
                          opts.parallel),
            1e-12);
        add("constraint_rank_deficiency", qs.size(),
            par::max_over(qs.size(),
                          [&](std::size_t i) {
                              const Mat35 G = system.constraint_jacobian(qs[i]);
                              Eigen::JacobiSVD<Eigen::Matrix<double, 3, 5>> svd(G);
                              const auto& sv = svd.singularValues();
                              int rank = 0;
                              for (int k = 0; k < 3; ++k)
                                  if (sv[k] > 1e-9 * sv[0]) ++rank;
                              return static_cast<double>(3 - rank);
                          },
                          opts.parallel),
            0.5);
    }

    return out;
}

nlohmann::json certification_json(const std::vector<CheckResult>& checks,
                                  const CertifyOptions& opts) {
    nlohmann::json j;
    j["grid"] = opts.grid;
    j["random_samples"] = opts.random_samples;
    j["fd_step"] = opts.fd_step;
    j["seed"] = opts.seed;
    bool all = true;
    j["checks"] = nlohmann::json::array();
    for (const CheckResult& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"samples", c.samples},
                               {"max_residual", c.max_residual},
                               {"tolerance", c.tolerance},
                               {"pass", c.pass}});
        all = all && c.pass;
    }
    j["all_pass"] = all;
    return j;
}

} // namespace rollkit
