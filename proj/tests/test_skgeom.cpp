#include <doctest.h>

#include "sklab/error.hpp"
#include "sklab/family.hpp"
#include "sklab/skgeom.hpp"

using namespace sklab;

namespace {

Eigen::MatrixXcd sample_tau() {
    Eigen::MatrixXcd t(2, 2);
    t << cplx(0.3, 1.2), cplx(-0.1, 0.4), cplx(-0.1, 0.4), cplx(0.7, 2.5);
    return t;
}

double K_of(const Eigen::VectorXcd& z, const Eigen::MatrixXcd& tau) {
    // w = tau^T z so that dw_j/dz^i = tau_ij
    SKCoordinates c{z, tau.transpose() * z, 0};
    return potential(c).K;
}

} // namespace

TEST_CASE("potential on homogeneous data") {
    SKCoordinates zero{Eigen::VectorXcd::Zero(2), Eigen::VectorXcd::Zero(2), 0};
    CHECK(potential(zero).K == 0.0);

    const Eigen::MatrixXcd tau = sample_tau();
    Eigen::VectorXcd z(2);
    z << cplx(0.4, -1.0), cplx(2.0, 0.3);
    const SKCoordinates c{z, tau.transpose() * z, 0};
    const PotentialSample s = potential(c);
    const double oracle = 0.5 * (z.adjoint() * tau.imag().cast<cplx>() * z)(0, 0).real();
    CHECK(s.K == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(std::abs(s.imag_residue) < 1e-14);

    // Wirtinger derivative (K_x - i K_y)/2 by central differences
    const Eigen::VectorXcd grad = potential_gradient(c, tau);
    const double h = 1e-5;
    for (int j = 0; j < 2; ++j) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(2);
        e(j) = 1.0;
        const double kx = (K_of(z + h * e, tau) - K_of(z - h * e, tau)) / (2 * h);
        const double ky = (K_of(z + cplx(0, h) * e, tau) - K_of(z - cplx(0, h) * e, tau)) / (2 * h);
        CHECK(std::abs(grad(j) - 0.5 * cplx(kx, -ky)) < 1e-8);
    }
}

TEST_CASE("metric blocks and defects") {
    Eigen::MatrixXcd tau = sample_tau();
    const SKMetricSample m = metric(tau, {false, true});
    CHECK(m.tangential == std::vector<int>{0});
    CHECK(m.transverse == std::vector<int>{1});
    CHECK(m.A(0, 0) == 1.2);
    CHECK(m.D(0, 0) == 2.5);
    CHECK(m.B(0, 0) == 0.4);
    CHECK(m.symmetry_defect == 0.0);
    CHECK(m.min_eig > 0.0);
    tau(0, 1) += 1e-3;
    CHECK(metric(tau, {false, true}).symmetry_defect > 1e-4);
}

TEST_CASE("model comparison") {
    const double zt = 1e-3;
    Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(2, 2);
    tau(0, 0) = cplx(0, 1.0);
    tau(1, 1) = cplx(0, -std::log(zt));
    const SKMetricSample m = metric(tau, {false, true});
    Eigen::VectorXcd z(2);
    z << 1.0, zt;
    const SKCoordinates c{z, z, 0};
    const ModelRatios r = compare_model(m, c);
    CHECK(r.min == doctest::Approx(1.0));
    CHECK(r.max == doctest::Approx(1.0));
    const ModelRatios flat = compare_model(m, c, false);
    CHECK(flat.max == doctest::Approx(-std::log(zt)));
    z(1) = 2.0;
    CHECK_THROWS_AS(compare_model(m, SKCoordinates{z, z, 0}), Error);
}

TEST_CASE("vanishing coordinate on F1 and at the node") {
    const Family f = family_f1();
    const double e = 0.1;
    const CycleBasis B = build_cycle_basis(f.curve(f.at(e)), f.plan);
    const std::vector<bool> tags = vanishing_tags(B);
    CHECK(tags == std::vector<bool>{false, true});
    const SKCoordinates c = coordinates(B);
    // leading term -pi i eps^2 sqrt(R(0)), R(0) = 24, up to the sheet sign
    const double lead = M_PI * e * e * std::sqrt(24.0);
    CHECK(std::abs(std::abs(c.z(1)) - lead) < 0.02 * lead);
    CHECK(std::abs(c.z(1).real()) < 0.02 * lead);

    const HyperellipticCurve node = HyperellipticCurve::from_roots({0.0, 0.0, 1.0, 2.0, 3.0, 4.0}, 1.0, 1e-6);
    const CycleBasis N = build_cycle_basis(node, f.plan);
    CHECK(coordinates(N).z(1) == cplx(0.0));
}

TEST_CASE("radial family: square-root scaling") {
    const Family r1 = family_r1();
    const RadialReport r = radial_scan(r1, r1.at(0.1), {0.5, 1.0, 2.0}, {0.0, 0.5});
    CHECK(r.tau_residual < 1e-9);
    CHECK(r.exponent_defect < 1e-6);
    CHECK(r.k_scaling_residual < 1e-9);
    CHECK(r.C0 == doctest::Approx(r.K1 / 2));
    for (const auto& row : r.rows) {
        if (std::abs(row.l - 2.0) > 1e-12) continue;
        for (const auto& base : r.rows)
            if (std::abs(base.l - 1.0) < 1e-12)
                CHECK((row.z - std::sqrt(2.0) * base.z).cwiseAbs().maxCoeff() < 1e-10);
    }
}
