#include <cmath>
#include <random>

#include "common.hpp"
#include "doctest.h"
#include "viscoflow/discretization.hpp"
#include "viscoflow/material.hpp"
#include "viscoflow/suites.hpp"

using namespace vf;

TEST_CASE("orthonormal sym basis round trip and Frobenius product") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N;
    for (int k = 0; k < 50; ++k) {
        Mat2 a, b;
        a << N(rng), N(rng), 0, N(rng);
        a(1, 0) = a(0, 1);
        b << N(rng), N(rng), 0, N(rng);
        b(1, 0) = b(0, 1);
        const Vec3 ca = sym_from_matrix(a), cb = sym_from_matrix(b);
        CHECK((matrix_from_sym(ca) - a).norm() < 1e-14);
        CHECK(ca.dot(cb) == doctest::Approx((a.array() * b.array()).sum()).epsilon(1e-13));
        CHECK(std::abs(matrix_from_sym(embed_dev(dev_part(ca))).trace()) < 1e-14);
    }
}

TEST_CASE("stiffness profile is a C1 monotone clip") {
    CHECK(Material::profile(0.0) == 0.0);
    CHECK(Material::profile(1.0) == 1.0);
    CHECK(Material::profile(-0.3) == 0.0);
    CHECK(Material::profile(1.7) == 1.0);
    CHECK(Material::profile(0.25) == doctest::Approx(0.15625));
    CHECK(Material::profile_d(0.0) == 0.0);
    CHECK(Material::profile_d(1.0) == 0.0);
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double z = i / 100.0;
        CHECK(Material::profile(z) >= prev);
        prev = Material::profile(z);
        const double h = 1e-6;
        if (z < 1.0 - h)
            CHECK(Material::profile_d(z) ==
                  doctest::Approx((Material::profile(z + h) - Material::profile(z - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("damage potential values and derivatives") {
    const Material m = vft::reference_material();
    CHECK(m.damage_W(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m.damage_Wprime(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    // c_w (2^5 - 1 - 5/2) with c_w = 0.75
    CHECK(m.damage_W(0.5) == doctest::Approx(21.375));
    for (double z : {0.2, 0.5, 0.9, 1.3}) {
        const double h = 1e-6;
        CHECK(m.damage_Wprime(z) == doctest::Approx((m.damage_W(z + h) - m.damage_W(z - h)) / (2 * h)).epsilon(1e-6));
        CHECK(m.damage_Wsecond(z) ==
              doctest::Approx((m.damage_Wprime(z + h) - m.damage_Wprime(z - h)) / (2 * h)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(m.damage_W(0.0), DomainError);
    CHECK_THROWS_AS(m.damage_Wprime(-1.0), DomainError);
}

TEST_CASE("constraint ball: projection, distance, Hausdorff") {
    const Material m = vft::reference_material();
    CHECK(m.radius(0.0) == 30.0);
    CHECK(m.radius(1.0) == 60.0);
    CHECK(m.radius(2.0) == 60.0);
    CHECK(m.radius(0.5) == 45.0);
    const Vec2 s(90.0, 0.0);
    CHECK((m.project_K(1.0, s) - Vec2(60.0, 0.0)).norm() < 1e-12);
    CHECK(m.dist_K(1.0, s) == doctest::Approx(30.0));
    CHECK(m.dist_K(1.0, Vec2(3.0, 4.0)) == 0.0);
    CHECK(m.support_H(0.5, Vec2(3.0, 4.0)) == doctest::Approx(225.0));
    CHECK(m.hausdorff_K(0.2, 0.7) == doctest::Approx(m.C_K() * 0.5));
}

TEST_CASE("damage dissipation is finite only for non-increasing rates") {
    const Material m = vft::reference_material();
    CHECK(m.damage_R(-2.0).value == doctest::Approx(0.5));
    CHECK_FALSE(m.damage_R(0.0).infinite);
    const Extended bad = m.damage_R(1e-3);
    CHECK(bad.infinite);
    CHECK(bad.violation == doctest::Approx(1e-3));
}

TEST_CASE("material validation") {
    Material m = vft::reference_material();
    CHECK_NOTHROW(m.validate());
    m.q_exp = 4.0;
    CHECK_THROWS(m.validate());
    m = vft::reference_material();
    m.R_bar = 10.0;
    CHECK_THROWS(m.validate());
    m = vft::reference_material();
    m.m_exp = 1.0;
    CHECK_THROWS(m.validate());
}

TEST_CASE("nonlocal damage form against an independent evaluation") {
    Mesh mesh;
    mesh.nx = 3;
    mesh.ny = 2;
    mesh.lx = 1.5;
    mesh.ly = 1.0;
    const Mat A = assemble_Am(mesh, 1.5);
    Vec z(mesh.nodes());
    for (int n = 0; n < mesh.nodes(); ++n) z[n] = std::sin(n + 1.0);
    // frozen from a direct double sum over cell pairs (numpy)
    CHECK(z.dot(A * z) == doctest::Approx(94.05953017328515).epsilon(1e-12));
    CHECK((A - A.transpose()).norm() < 1e-12);
    const Vec one = Vec::Ones(mesh.nodes());
    CHECK((A * one).norm() < 1e-10);
    Vec lin(mesh.nodes());
    for (int n = 0; n < mesh.nodes(); ++n) lin[n] = 2.0 * mesh.node_coord(n).x() - mesh.node_coord(n).y();
    CHECK(std::abs(lin.dot(A * lin)) < 1e-9);
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("constitutive suite on the reference material") {
    const SuiteResult r = constitutive_suite(vft::reference_material(), 2000, kDefaultSeed);
    INFO(r.detail);
    CHECK(r.pass);
}
