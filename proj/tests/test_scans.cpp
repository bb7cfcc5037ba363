#include <doctest.h>

#include "sklab/error.hpp"
#include "sklab/scans.hpp"

using namespace sklab;

TEST_CASE("log-rate fits on synthetic rows") {
    std::vector<double> x, y, flat;
    for (double e : geometric_ladder(1e-2, 1e-5)) {
        x.push_back(-std::log(e));
        y.push_back(0.6366 * x.back() + 0.2);
        flat.push_back(1.25);
    }
    const FitResult f = fit_log_rate(x, y);
    CHECK(f.slope == doctest::Approx(0.6366).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(f.divergent);
    const FitResult c = fit_log_rate(x, flat);
    CHECK(std::abs(c.slope) < 1e-14);
    CHECK(!c.divergent);
    x.resize(5);
    y.resize(5);
    CHECK_THROWS_AS(fit_log_rate(x, y), Error);
}

TEST_CASE("geometric ladders and drift") {
    const auto l = geometric_ladder(1e-2, 1e-5);
    REQUIRE(l.size() == 13);
    CHECK(l.front() == 1e-2);
    CHECK(l.back() == doctest::Approx(1e-5).epsilon(1e-12));
    for (std::size_t k = 1; k < l.size(); ++k) CHECK(l[k - 1] / l[k] == doctest::Approx(std::pow(10.0, 0.25)));
    CHECK(drift({1.0, 1.01, 0.99}) == doctest::Approx(0.02));
    CHECK(drift({0.0, 1e-9}, 1e-3) == doctest::Approx(1e-6));
}

TEST_CASE("perturbed roots solve the perturbed polynomial") {
    const HyperellipticCurve c = HyperellipticCurve::from_roots({0.1, -0.1, 1.0, 2.0, 3.0, 4.0});
    for (int k = 0; k < 2; ++k) {
        const cplx t(1e-3, -2e-3);
        const auto r = perturbed_roots(c, k, t);
        for (cplx z : r) CHECK(std::abs(c.eval_Q(z) + t * std::pow(z, k)) < 1e-13);
    }
}

TEST_CASE("monodromy on F1") {
    const Family f = family_f1();
    const MonodromyResult m0 = monodromy(f, 0.05, 64, 0);
    for (long n : m0.n_int) CHECK(n == 0);
    const MonodromyResult m1 = monodromy(f, 0.05, 64, 1);
    const MonodromyResult m2 = monodromy(f, 0.05, 64, 2);
    CHECK(m1.defect <= 1e-6);
    CHECK(m1.a_return <= 1e-8);
    for (std::size_t k = 0; k < m1.n_int.size(); ++k) CHECK(m2.n_int[k] == 2 * m1.n_int[k]);
    CHECK(m1.n_int[1] != 0);
}

TEST_CASE("jacobian identity on random genus 1 and 2 curves") {
    for (int g : {1, 2}) {
        const Family rf = random_family(g, 11 + g);
        const CycleBasis B = build_cycle_basis(rf.curve(FamilyPoint{{}, 1.0}), rf.plan);
        const JacobianResult J = jacobian_check(B);
        CHECK(J.deviation <= 1e-6);
        CHECK(J.gradient_deviation <= 1e-6);
    }
}

TEST_CASE("near-stratum jacobian") {
    const Family f = family_f1();
    const JacobianResult J = jacobian_check(build_cycle_basis(f.curve(f.at(1e-4)), f.plan));
    CHECK(J.deviation <= 1e-2);
}

TEST_CASE("ladder scans do not depend on the thread count") {
    const Family f = family_f1();
    std::vector<FamilyPoint> pts;
    for (double e : geometric_ladder(1e-2, 1e-3)) pts.push_back(f.at(e));
    ScanOptions one, many;
    many.threads = 4;
    const DegenerationReport a = degeneration_scan(f, pts, one), b = degeneration_scan(f, pts, many);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        CHECK(a.rows[k].metric.gram == b.rows[k].metric.gram);
        CHECK(a.rows[k].coords.w == b.rows[k].coords.w);
    }
}
