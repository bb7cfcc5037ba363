#include <doctest.h>

#include <algorithm>

#include "sklab/error.hpp"
#include "sklab/polyfield.hpp"

using namespace sklab;

namespace {
cplx product_eval(const std::vector<cplx>& roots, cplx z) {
    cplx p = 1.0;
    for (cplx r : roots) p *= z - r;
    return p;
}
} // namespace

TEST_CASE("eval matches hand values and the product form") {
    const cplx i(0, 1);
    CHECK(std::abs(ComplexPoly({1.0, 0.0, 1.0})(i)) < 1e-15);
    CHECK(ComplexPoly({1.0})(cplx(5, 2)) == cplx(1.0));
    const std::vector<cplx> r{1.0, 2.0, 3.0, 4.0};
    const ComplexPoly p = ComplexPoly::from_roots(r);
    CHECK(p(0.0) == cplx(24.0));
    for (cplx z : {cplx(0.3, -1.2), cplx(5.5, 0.1), cplx(-2, 2)})
        CHECK(std::abs(p(z) - product_eval(r, z)) <= 1e-12 * std::abs(product_eval(r, z)));
}

TEST_CASE("arithmetic and degree") {
    const ComplexPoly a({1.0, 2.0});
    const ComplexPoly b({-1.0, 0.0, 3.0});
    const ComplexPoly c = a * b;
    CHECK(c.degree() == 3);
    for (cplx z : {cplx(0.5, 0.25), cplx(-3, 1)}) CHECK(std::abs(c(z) - a(z) * b(z)) < 1e-12);
    ComplexPoly d = b;
    d -= b;
    CHECK(d.is_zero());
}

TEST_CASE("roots of simple polynomials") {
    const RootSet rs = find_roots(ComplexPoly({1.0, 0.0, 1.0}));
    REQUIRE(rs.roots.size() == 2);
    for (const Root& r : rs.roots) {
        CHECK(r.multiplicity == 1);
        CHECK(std::abs(std::abs(r.value.imag()) - 1.0) < 1e-12);
    }
    const RootSet dbl = find_roots(ComplexPoly({1.0, -2.0, 1.0}));
    REQUIRE(dbl.roots.size() == 1);
    CHECK(dbl.roots[0].multiplicity == 2);
    CHECK(std::abs(dbl.roots[0].value - 1.0) < 1e-6);
    CHECK(dbl.total_multiplicity() == 2);

    const double e = 1e-3;
    const RootSet pm = find_roots(ComplexPoly({-e * e, 0.0, 1.0}));
    REQUIRE(pm.roots.size() == 2);
    std::vector<double> v{pm.roots[0].value.real(), pm.roots[1].value.real()};
    std::sort(v.begin(), v.end());
    CHECK(std::abs(v[0] + e) < 1e-15);
    CHECK(std::abs(v[1] - e) < 1e-15);
}

TEST_CASE("roots of a sextic have small backward error") {
    const std::vector<cplx> r{cplx(0.1, 0.2), -0.3, 1.0, cplx(2, -1), 3.0, 4.5};
    const RootSet rs = find_roots(ComplexPoly::from_roots(r, cplx(2, 1)));
    CHECK(rs.total_multiplicity() == 6);
    CHECK(rs.residual < 1e-13);
    for (cplx x : r) {
        double best = 1e9;
        for (cplx y : rs.flat()) best = std::min(best, std::abs(x - y));
        CHECK(best < 1e-11);
    }
}

TEST_CASE("match_roots") {
    const std::vector<cplx> prev{1.0, 2.0}, next{1.01, 2.02};
    CHECK(match_roots(prev, next) == std::vector<int>{0, 1});
    CHECK(match_roots(prev, prev) == std::vector<int>{0, 1});
    // half loop eps -> eps e^{i pi} in small steps: the root that started at
    // +eps ends at -eps, so the endpoints are matched with a swap
    const double e = 0.1;
    const std::vector<cplx> start{e, -e};
    std::vector<cplx> tracked = start;
    for (int s = 1; s <= 16; ++s) {
        const cplx ee = e * std::polar(1.0, M_PI * s / 16.0);
        const std::vector<cplx> nxt{ee, -ee};
        const std::vector<int> m = match_roots(tracked, nxt);
        tracked = {nxt[m[0]], nxt[m[1]]};
    }
    CHECK(match_roots(start, tracked) == std::vector<int>{1, 0});
    CHECK(std::abs(tracked[0] + e) < 1e-15);
}

TEST_CASE("ambiguous matching is refused") {
    const std::vector<cplx> prev{0.0, 1.0}, next{0.5, 0.52};
    CHECK_THROWS_AS(match_roots(prev, next), Error);
}
