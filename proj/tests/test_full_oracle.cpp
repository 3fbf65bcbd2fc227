#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rollkit/certify.hpp"
#include "test_util.hpp"

using namespace rollkit;


namespace {

Vec5 random_q(std::mt19937_64& eng) {
    return (Vec5() << testutil::uniform(eng, 0.1, kPi - 0.1),
            testutil::uniform(eng, 0, 2 * kPi), testutil::uniform(eng, 0, 2 * kPi),
            testutil::uniform(eng, -2, 2), testutil::uniform(eng, -2, 2))
        .finished();
}

} // namespace

TEST_CASE("kinetic energy quadratic form") {
    GeometryCache geom = testutil::torus_geometry();
    const BodyParams body = testutil::solid_body();
    const ConstrainedSystem sys(geom, body);
    const ReducedCoefficients coeffs(geom, body);
    const ConnectionFrame frame{&geom};

    std::mt19937_64 eng(11);
    for (int i = 0; i < 40; ++i) {
        const Vec5 q = random_q(eng);
        // Mass matrix is symmetric positive definite.
        const Mat5 M = sys.mass_matrix(q);
        CHECK((M - M.transpose()).norm() < 1e-15);
        const Eigen::SelfAdjointEigenSolver<Mat5> es(M);
        CHECK(es.eigenvalues().minCoeff() > 0.0);

        // Rest has no kinetic energy; the potential is m g z_c.
        const auto [t_rest, v] = sys.lagrangian(q, Vec5::Zero());
        CHECK(t_rest == 0.0);
        CHECK(v == doctest::Approx(geom.at(q[0]).z_c).epsilon(1e-13));

        // On the constraint distribution the energy compresses to
        // (A psi_dot^2 + B theta_dot^2) / 2, at any phi.
        const double th_dot = testutil::uniform(eng, -1, 1);
        const double ps_dot = testutil::uniform(eng, -1, 1);
        const Vec5 qdot = th_dot * frame.lift_theta(q) + ps_dot * frame.lift_psi(q);
        const auto [t_compr, v2] = sys.lagrangian(q, qdot);
        (void)v2;
        const double expected =
            0.5 * (coeffs.A(q[0]) * ps_dot * ps_dot + coeffs.B(q[0]) * th_dot * th_dot);
        CHECK(t_compr == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("kinetic energy is SE(2) invariant") {
    GeometryCache geom = testutil::torus_geometry();
    const ConstrainedSystem sys(geom, testutil::solid_body());
    std::mt19937_64 eng(12);
    for (int i = 0; i < 30; ++i) {
        Vec5 q = random_q(eng);
        Vec5 qdot = (Vec5() << testutil::uniform(eng, -1, 1), testutil::uniform(eng, -1, 1),
                     testutil::uniform(eng, -1, 1), testutil::uniform(eng, -1, 1),
                     testutil::uniform(eng, -1, 1))
                        .finished();
        const double alpha = testutil::uniform(eng, -3, 3);
        Vec5 q2 = q, qdot2 = qdot;
        q2[2] += alpha;
        q2[3] = testutil::uniform(eng, -5, 5);
        q2[4] = testutil::uniform(eng, -5, 5);
        const double ca = std::cos(alpha), sa = std::sin(alpha);
        qdot2[3] = ca * qdot[3] - sa * qdot[4];
        qdot2[4] = sa * qdot[3] + ca * qdot[4];
        CHECK(sys.lagrangian(q, qdot).first ==
              doctest::Approx(sys.lagrangian(q2, qdot2).first).epsilon(1e-12));
    }
}

TEST_CASE("constraint jacobian") {
    GeometryCache geom = testutil::torus_geometry();
    const ConstrainedSystem sys(geom, testutil::solid_body());
    const ConnectionFrame frame{&geom};

    // At phi = 0 the no-slip rows reduce to x_dot = -h psi_dot and
    // y_dot = -r theta_dot.
    const Vec5 q0 = (Vec5() << 0.9, 0.0, 0.0, 0.0, 0.0).finished();
    const Mat35 G = sys.constraint_jacobian(q0);
    const MeridianPoint m = geom.at(0.9);
    CHECK(G(1, 1) == doctest::Approx(m.h).epsilon(1e-14));
    CHECK(G(1, 0) == 0.0);
    CHECK(G(2, 0) == doctest::Approx(m.r).epsilon(1e-14));
    CHECK(G(0, 1) == doctest::Approx(std::cos(0.9)).epsilon(1e-14));

    std::mt19937_64 eng(13);
    for (int i = 0; i < 1000; ++i) {
        const Vec5 q = random_q(eng);
        const Mat35 Gq = sys.constraint_jacobian(q);
        // Horizontal lifts span the kernel.
        CHECK((Gq * frame.lift_theta(q)).norm() < 1e-12);
        CHECK((Gq * frame.lift_psi(q)).norm() < 1e-12);
        // Full row rank.
        Eigen::JacobiSVD<Mat35> svd(Gq);
        CHECK(svd.singularValues()(2) > 1e-6);
    }
}

TEST_CASE("velocity projection") {
    GeometryCache geom = testutil::torus_geometry();
    const ConstrainedSystem sys(geom, testutil::solid_body());
    const ConnectionFrame frame{&geom};
    std::mt19937_64 eng(14);
    for (int i = 0; i < 30; ++i) {
        const Vec5 q = random_q(eng);
        const Vec5 in_kernel = 0.7 * frame.lift_theta(q) - 0.2 * frame.lift_psi(q);
        CHECK((sys.project_velocity(q, in_kernel) - in_kernel).norm() < 1e-12);

        Vec5 raw;
        for (int k = 0; k < 5; ++k) raw[k] = testutil::uniform(eng, -1, 1);
        const Vec5 proj = sys.project_velocity(q, raw);
        CHECK(sys.constraint_velocity(q, proj).norm() < 1e-12);
        CHECK((sys.project_velocity(q, proj) - proj).norm() < 1e-12);
    }
}

TEST_CASE("conserved quantities along the constrained flow") {
    GeometryCache geom = testutil::torus_geometry();
    const BodyParams body = testutil::solid_body();
    const ConstrainedSystem sys(geom, body);
    const ReducedCoefficients coeffs(geom, body);

    ReducedState init{1.1, 0.3 * coeffs.B(1.1), 0.0, 0.0};
    init.ell = coeffs.nose(1.1) * std::pow(std::sin(1.1), 2) * 0.7;
    const FullState s0 = full_initial_state(coeffs, init, {0.3, -0.4, 0.1, -0.2});

    IntegrateOptions o;
    o.dt = 1e-4;
    o.t_end = 2.0;
    o.output_every = 100;
    const IntegrationResult res = sys.integrate(s0, o);
    REQUIRE(res.ok());
    CHECK(res.trajectory.relative_drift("energy") < 1e-10);
    CHECK(res.trajectory.relative_drift("ell") < 1e-10);
    CHECK(res.trajectory.max_abs("res_notwist") < 1e-10);
    CHECK(res.trajectory.max_abs("res_noslip") < 1e-10);

    // The initial data must sit on the constraint distribution.
    FullState bad = s0;
    bad.psi_dot += 0.1;
    CHECK_THROWS_AS(sys.integrate(bad, o), std::invalid_argument);
}

TEST_CASE("equilibrium data stays stationary and circular") {
    GeometryCache geom = testutil::torus_geometry();
    const BodyParams body = testutil::solid_body();
    const ConstrainedSystem sys(geom, body);
    const ReducedCoefficients coeffs(geom, body);
    const double th_star = std::asin(std::cbrt(0.01));

    const FullState s0 = full_initial_state(coeffs, {th_star, 0.0, 0.1, 0.0}, {});
    IntegrateOptions o;
    o.dt = 1e-4;
    o.t_end = 10.0;
    o.output_every = 100;
    const IntegrationResult res = sys.integrate(s0, o);
    REQUIRE(res.ok());

    double dth = 0.0;
    for (std::size_t i = 0; i < res.trajectory.rows(); ++i)
        dth = std::max(dth, std::abs(res.trajectory.at(i, "theta") - th_star));
    CHECK(dth < 1e-10);

    const CircleFit fit =
        fit_circle(res.trajectory.column("x"), res.trajectory.column("y"));
    CHECK(std::abs(fit.radius - steady_circle_radius(geom, th_star)) < 1e-6);
    CHECK(fit.max_deviation < 1e-6);
}

TEST_CASE("single step matches the integrate loop") {
    GeometryCache geom = testutil::torus_geometry();
    const BodyParams body = testutil::solid_body();
    const ConstrainedSystem sys(geom, body);
    const ReducedCoefficients coeffs(geom, body);
    ReducedState init{1.0, 0.2 * coeffs.B(1.0), 0.0, 0.0};
    init.ell = 0.4;
    const FullState s0 = full_initial_state(coeffs, init, {0.1, 0.2, 0.3, 0.4});

    IntegrateOptions o;
    o.dt = 1e-3;
    o.t_end = 1e-3;
    o.output_every = 1;
    const IntegrationResult res = sys.integrate(s0, o);
    REQUIRE(res.trajectory.rows() == 2);

    const FullState s1 = sys.step(s0, 1e-3);
    CHECK(s1.theta == res.trajectory.at(1, "theta"));
    CHECK(s1.psi == res.trajectory.at(1, "psi"));
    CHECK(s1.x == res.trajectory.at(1, "x"));
    CHECK(s1.theta_dot == res.trajectory.at(1, "theta_dot"));
    CHECK(s1.t == doctest::Approx(1e-3).epsilon(1e-15));
}

TEST_CASE("rest at the critical point stays at rest") {
    GeometryCache geom = testutil::torus_geometry();
    const BodyParams body = testutil::solid_body();
    const ConstrainedSystem sys(geom, body);
    FullState s0;
    s0.theta = kPi / 2;
    IntegrateOptions o;
    o.dt = 1e-3;
    o.t_end = 2.0;
    o.output_every = 10;
    const IntegrationResult res = sys.integrate(s0, o);
    REQUIRE(res.ok());
    CHECK(std::abs(res.trajectory.back("theta") - kPi / 2) < 1e-12);
    CHECK(std::abs(res.trajectory.back("x")) < 1e-12);
}

TEST_CASE("planar libration turns at the energy level") {
    GeometryCache geom = testutil::torus_geometry();
    const BodyParams body = testutil::solid_body();
    const ConstrainedSystem sys(geom, body);
    const ReducedCoefficients coeffs(geom, body);

    // ell = 0: theta climbs toward pi/2, turns where m g z_c matches the
    // energy, then rolls down to the pole and aborts at the chart edge.
    ReducedState init{1.0, 0.3 * coeffs.B(1.0), 0.0, 0.0};
    const FullState s0 = full_initial_state(coeffs, init, {});
    const double energy = 0.5 * coeffs.B(1.0) * 0.3 * 0.3 + coeffs.potential(1.0, 0.0);

    IntegrateOptions o;
    o.dt = 1e-4;
    o.t_end = 30.0;
    o.output_every = 10;
    const IntegrationResult res = sys.integrate(s0, o);
    CHECK(res.status == IntegrationStatus::singularity);

    // Locate the turning point by the sign change of theta_dot.
    double th_turn = 0.0;
    for (std::size_t i = 1; i < res.trajectory.rows(); ++i) {
        const double a = res.trajectory.at(i - 1, "theta_dot");
        const double b = res.trajectory.at(i, "theta_dot");
        if (a > 0.0 && b <= 0.0) {
            const double w = a / (a - b);
            th_turn = (1 - w) * res.trajectory.at(i - 1, "theta") +
                      w * res.trajectory.at(i, "theta");
            break;
        }
    }
    REQUIRE(th_turn > 0.0);
    CHECK(std::abs(coeffs.potential(th_turn, 0.0) - energy) < 1e-6);
    // Precession is frozen at ell = 0.
    CHECK(res.trajectory.max_abs("psi_dot") < 1e-12);
}

TEST_CASE("theta dynamics does not depend on I3 at fixed ell") {
    GeometryCache geom = testutil::torus_geometry();
    BodyParams a = testutil::solid_body();
    BodyParams b = a;
    b.I3 = 1.3;
    const ReducedCoefficients ca(geom, a), cb(geom, b);
    const ConstrainedSystem sa(geom, a), sb(geom, b);

    // Same reduced data; psi_dot differs because N depends on I3.
    ReducedState init{1.0, 0.25 * ca.B(1.0), 0.0, 0.0};
    init.ell = 0.45;
    IntegrateOptions o;
    o.dt = 1e-4;
    o.t_end = 5.0;
    o.output_every = 100;
    const auto ra = sa.integrate(full_initial_state(ca, init, {}), o);
    const auto rb = sb.integrate(full_initial_state(cb, init, {}), o);
    REQUIRE(ra.ok());
    REQUIRE(rb.ok());
    double dth = 0.0;
    for (std::size_t i = 0; i < ra.trajectory.rows(); ++i)
        dth = std::max(dth, std::abs(ra.trajectory.at(i, "theta") -
                                     rb.trajectory.at(i, "theta")));
    CHECK(dth < 1e-6);
}

TEST_CASE("SE(2) equivariance of the track") {
    GeometryCache geom = testutil::torus_geometry();
    const BodyParams body = testutil::solid_body();
    const ConstrainedSystem sys(geom, body);
    const ReducedCoefficients coeffs(geom, body);

    ReducedState init{1.1, 0.2 * coeffs.B(1.1), 0.0, 0.0};
    init.ell = 0.5;
    const double alpha = 0.8, ax = 0.7, ay = -0.3;
    const FullState base = full_initial_state(coeffs, init, {0.2, 0.1, 0.05, -0.4});
    const FullState moved = full_initial_state(
        coeffs, init,
        {0.2, 0.1 + alpha, ax + 0.05 * std::cos(alpha) + 0.4 * std::sin(alpha),
         ay + 0.05 * std::sin(alpha) - 0.4 * std::cos(alpha)});

    IntegrateOptions o;
    o.dt = 1e-3;
    o.t_end = 3.0;
    o.output_every = 10;
    const auto ra = sys.integrate(base, o);
    const auto rb = sys.integrate(moved, o);
    REQUIRE(ra.ok());
    REQUIRE(rb.ok());
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    double worst = 0.0;
    for (std::size_t i = 0; i < ra.trajectory.rows(); ++i) {
        const double x = ra.trajectory.at(i, "x"), y = ra.trajectory.at(i, "y");
        worst = std::max(worst, std::abs(ax + ca * x - sa * y - rb.trajectory.at(i, "x")));
        worst = std::max(worst, std::abs(ay + sa * x + ca * y - rb.trajectory.at(i, "y")));
        worst = std::max(worst, std::abs(ra.trajectory.at(i, "theta") -
                                         rb.trajectory.at(i, "theta")));
    }
    CHECK(worst < 1e-10);
}
