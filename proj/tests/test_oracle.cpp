#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "viscoflow/oracle.hpp"
#include "viscoflow/suites.hpp"
#include "viscoflow/viscous_solver.hpp"

using namespace vf;

TEST_CASE("tiny instance size") {
    const Problem P = tiny_problem(vft::reference_material());
    CHECK(P.space.n_free() == 4);
    CHECK(P.space.n_z() == 6);
    CHECK(P.space.n_p() == 4);
    CHECK(P.space.n_free() + P.space.n_z() + P.space.n_p() <= 16);
}

TEST_CASE("finite-difference gradient of a quadratic") {
    Mat A(3, 3);
    A << 4, 1, 0, 1, 3, -1, 0, -1, 2;
    const Vec b = Vec3(1.0, -2.0, 0.5);
    auto f = [&](const Vec& x) { return 0.5 * x.dot(A * x) - b.dot(x); };
    const Vec x = Vec3(0.3, -0.1, 2.0);
    CHECK((fd_gradient(f, x, 1e-4) - (A * x - b)).norm() < 1e-9);
    CHECK_THROWS(fd_gradient(f, x, 0.0));
}

TEST_CASE("oracle minimiser is no worse than the solver step") {
    const Problem P = tiny_problem(vft::reference_material(), 0.5);
    std::mt19937_64 rng(2);
    const ParamTriple par{0.1, 0.1, 0.1};
    for (int k = 0; k < 3; ++k) {
        State qp = random_state(P, rng, 0.6);
        qp.u *= 0.2;
        const State a = step(P, qp, 0.5, 0.05, par);
        const State b = brute_force_step(P, qp, 0.5, 0.05, par);
        const double fa = incremental_functional(P, qp, a, 0.5, 0.05, par);
        const double fb = incremental_functional(P, qp, b, 0.5, 0.05, par);
        CHECK(std::abs(fa - fb) <= 1e-9 * std::max(1.0, std::abs(fa)));
        CHECK((b.z - qp.z).maxCoeff() <= 0.0);
    }
}

TEST_CASE("manufactured jumps keep their frozen components") {
    const Problem P = tiny_problem(vft::reference_material(), 0.5);
    const State q0 = zero_state(P.space, 0.95);
    const ManufacturedJump z = manufactured_jump(P, q0, 1.0, JumpKind::ViscousZ, 0.0, 0.005);
    REQUIRE(z.traj.size() == 101);
    for (std::size_t i = 0; i < z.traj.size(); ++i) {
        CHECK(z.traj.t[i] == 1.0);
        CHECK((z.traj.q[i].u - q0.u).norm() == 0.0);
        CHECK((z.traj.q[i].p - q0.p).norm() == 0.0);
        CHECK(z.lambda_z[i] == doctest::Approx(0.5 + 0.25 * std::sin(M_PI * z.traj.s[i] / z.traj.S)));
    }
    CHECK(z.traj.q.back().z.minCoeff() < 0.95);
}
