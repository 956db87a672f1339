#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "viscoflow/discretization.hpp"
#include "viscoflow/viscous_solver.hpp"

using namespace vf;

namespace {

Vec affine_field(const Mesh& m, const Mat2& G, const Vec2& b) {
    Vec u(2 * m.nodes());
    for (int n = 0; n < m.nodes(); ++n) u.segment<2>(2 * n) = G * m.node_coord(n) + b;
    return u;
}

}  // namespace

TEST_CASE("strain operator is exact on affine fields and kills rigid motions") {
    const RunConfig cfg = vft::reference_config();
    const Problem P = build_problem(cfg);
    const auto& S = P.space;
    Mat2 G;
    G << 0.3, -0.7, 0.2, 0.1;
    const Vec e = S.strain(affine_field(S.mesh, G, Vec2(1.0, 2.0)));
    const Vec3 expect = sym_from_matrix(0.5 * (G + G.transpose()));
    for (int c = 0; c < S.mesh.cells(); ++c) CHECK((e.segment<3>(3 * c) - expect).norm() < 1e-13);
    Mat2 W;
    W << 0.0, 1.0, -1.0, 0.0;
    CHECK(S.strain(affine_field(S.mesh, W, Vec2(-3.0, 0.5))).norm() < 1e-13);
}

TEST_CASE("quadrature weights and Dirichlet bookkeeping") {
    const Problem P = build_problem(vft::reference_config());
    const auto& S = P.space;
    CHECK(S.cell_areas.sum() == doctest::Approx(1.0));
    CHECK(S.node_mass.sum() == doctest::Approx(1.0));
    CHECK(S.n_u() == 50);
    CHECK(S.n_z() == 25);
    CHECK(S.n_p() == 32);
    // left and right columns clamped: 10 nodes, 20 dofs
    CHECK(S.n_free() == 30);
    Vec u = Vec::Random(S.n_u());
    CHECK((S.restrict_free(S.extend_free(S.restrict_free(u))) - S.restrict_free(u)).norm() == 0.0);
    const Vec uz = S.zero_fixed(u);
    for (int i = 0; i < S.n_u(); ++i)
        if (S.fixed[i]) CHECK(uz[i] == 0.0);
    Eigen::SelfAdjointEigenSolver<Mat> es(S.K_D);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("dual norm is the Riesz dual of the energy norm") {
    const Problem P = build_problem(vft::reference_config());
    const auto& S = P.space;
    Vec eta = S.zero_fixed(Vec::Random(S.n_u()));
    const Vec v = S.extend_free(S.K_D_llt.solve(S.restrict_free(eta)));
    CHECK(S.norm_H1D_dual(eta) == doctest::Approx(S.norm_H1D(v)).epsilon(1e-12));
    CHECK(S.restrict_free(eta).dot(S.restrict_free(v)) ==
          doctest::Approx(S.norm_H1D_dual(eta) * S.norm_H1D(v)).epsilon(1e-12));
}

TEST_CASE("consistent load of a body force integrates to the resultant") {
    const Problem P = build_problem(vft::reference_config());
    const Vec F = total_load(P.space, Vec2(2.0, -1.0), Vec2(0.0, 3.0), {"top"});
    double fx = 0.0, fy = 0.0;
    for (int n = 0; n < P.space.mesh.nodes(); ++n) {
        fx += F[2 * n];
        fy += F[2 * n + 1];
    }
    CHECK(fx == doctest::Approx(2.0));
    CHECK(fy == doctest::Approx(-1.0 + 3.0));
    CHECK_THROWS(total_load(P.space, Vec2::Zero(), Vec2::Zero(), {"north"}));
}

TEST_CASE("loading lift and safe-load rejection") {
    const RunConfig cfg = vft::reference_config();
    const Problem P = build_problem(cfg);
    const auto& L = P.load;
    CHECK(L.a(0.4) == doctest::Approx(0.4));
    CHECK(L.a_dot(0.4) == 1.0);
    const int right = P.space.mesh.node(P.space.mesh.nx, 2);
    CHECK(L.w(1.0)[2 * right] == doctest::Approx(0.5));
    CHECK(L.F0.norm() == 0.0);
    CHECK_THROWS(make_loading(P.space, P.mat, Profile::Ramp, 1.0, 1.0, Vec2::Zero(), Vec3(0.0, 0.0, 20.0), -1.0));
    CHECK_NOTHROW(make_loading(P.space, P.mat, Profile::Ramp, 1.0, 1.0, Vec2::Zero(), Vec3(5.0, 5.0, 5.0), -1.0));
    CHECK_THROWS(make_loading(P.space, P.mat, Profile::Ramp, 0.0, 1.0, Vec2::Zero(), Vec3::Zero(), -1.0));
    CHECK_THROWS(make_loading(build_space(P.space.mesh, Dirichlet::Left, {}, P.mat), P.mat, Profile::Ramp, 1.0, 1.0,
                              Vec2(0.1, 0.0), Vec3::Zero(), -1.0));
}

TEST_CASE("parsers for enums") {
    CHECK(parse_dirichlet("left") == Dirichlet::Left);
    CHECK(to_string(parse_dirichlet("left-right")) == "left-right");
    CHECK_THROWS(parse_dirichlet("top"));
    CHECK(parse_profile("static") == Profile::Static);
    CHECK_THROWS(parse_profile("sine"));
}

TEST_CASE("graded time grid") {
    const auto g = time_grid(1.0, 4, 0);
    REQUIRE(g.size() == 5);
    CHECK(g.back() == 1.0);
    const auto h = time_grid(1.0, 4, 3);
    REQUIRE(h.size() == 8);
    CHECK(h[1] == doctest::Approx(0.25 / 8));
    CHECK(h[3] == doctest::Approx(0.25 / 2));
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] > h[k - 1]);
    CHECK_THROWS(time_grid(1.0, 0, 0));
}
