#include <doctest.h>

#include "sklab/error.hpp"
#include "sklab/quadrature.hpp"

using namespace sklab;

namespace {
const LiftedIntegrand theta = [](cplx, cplx y, std::span<cplx> out) { out[0] = y; };
const LiftedIntegrand inv_y = [](cplx, cplx y, std::span<cplx> out) { out[0] = 1.0 / y; };
} // namespace

TEST_CASE("circle integral of sqrt(z^2 - eps^2)") {
    // Laurent series z - eps^2/(2z) - ...: the loop picks up 2 pi i (-eps^2/2)
    for (double e : {0.1, 1e-2, 1e-3}) {
        const HyperellipticCurve c = HyperellipticCurve::from_roots({e, -e});
        const LiftedPath lp(c, Path::circle(0.0, 1.0), 0, 0.0, std::sqrt(cplx(1.0 - e * e)));
        const QuadResult r = integrate_lifted(lp, 1, theta);
        const cplx exact(0.0, -M_PI * e * e);
        CHECK(std::abs(r.value[0] - exact) < 1e-11 * std::abs(exact) + 1e-14);
        CHECK(r.error[0] < 1e-9);
    }
}

TEST_CASE("segment integrals of dz/sqrt(z^2 - eps^2)") {
    const double e = 1e-2;
    const HyperellipticCurve c = HyperellipticCurve::from_roots({e, -e});
    {
        const LiftedPath lp(c, Path::segment(2 * e, 1.0), 0, 0.5, std::sqrt(c.eval_Q(2 * e + 0.5 * (1 - 2 * e))));
        const QuadResult r = integrate_lifted(lp, 1, inv_y);
        CHECK(std::abs(r.value[0] - (std::acosh(1.0 / e) - std::acosh(2.0))) < 1e-11);
    }
    {
        // endpoint on a simple root: u^2 substitution
        Path p = Path::segment(e, 1.0);
        p.start_at_root = true;
        const LiftedPath lp(c, p, 0, 0.5, std::sqrt(c.eval_Q(e + 0.5 * (1 - e))));
        const QuadResult r = integrate_lifted(lp, 1, inv_y);
        CHECK(std::abs(r.value[0] - std::acosh(1.0 / e)) < 1e-10);
    }
}

TEST_CASE("zero integrand and vector components") {
    const HyperellipticCurve c = HyperellipticCurve::from_roots({1.0, 2.0, 3.0, 4.0});
    const LiftedPath lp(c, Path::circle(1.5, 0.8), 0, 0.0, std::sqrt(c.eval_Q(1.5 + 0.8)));
    const QuadResult r = integrate_lifted(lp, 2, [](cplx z, cplx, std::span<cplx> out) {
        out[0] = 0.0;
        out[1] = z * z; // entire: closed loop integral vanishes
    });
    CHECK(r.value[0] == cplx(0.0));
    CHECK(std::abs(r.value[1]) < 1e-13);
}

TEST_CASE("budget exhaustion reports ToleranceNotMet") {
    const HyperellipticCurve c = HyperellipticCurve::from_roots({1e-3, -1e-3});
    const LiftedPath lp(c, Path::circle(0.0, 1.0), 0, 0.0, std::sqrt(cplx(1.0 - 1e-6)));
    QuadConfig cfg;
    cfg.max_intervals = 2;
    cfg.rel_tol = 1e-15;
    cfg.abs_tol = 0.0;
    try {
        integrate_lifted(lp, 1, [](cplx z, cplx, std::span<cplx> out) { out[0] = 1.0 / (z - 0.999); }, cfg);
        FAIL("expected ToleranceNotMet");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ToleranceNotMet);
    }
}
