#include <doctest.h>

#include "sklab/error.hpp"
#include "sklab/surface.hpp"

using namespace sklab;

namespace {
RootSet roots_of(const std::vector<cplx>& r) { return find_roots(ComplexPoly::from_roots(r)); }
} // namespace

TEST_CASE("branch point classification") {
    const BranchData b = classify_branch_points(roots_of({0.1, -0.1, 1.0, 2.0, 3.0, 4.0}), 1e-9);
    CHECK(b.clusters.size() == 6);
    CHECK(b.r_odd == 6);
    CHECK(genus(b) == 2);

    const BranchData n = classify_branch_points(roots_of({0.0, 0.0, 1.0, 2.0, 3.0, 4.0}), 1e-6);
    CHECK(n.r_odd == 4);
    int even = 0;
    for (const auto& c : n.clusters)
        if (c.parity == Parity::even) {
            ++even;
            CHECK(std::abs(c.center) < 1e-6);
            CHECK(c.multiplicity() == 2);
        }
    CHECK(even == 1);
    CHECK(genus(n) == 1);

    std::vector<cplx> ab;
    for (int k = 1; k <= 4; ++k) ab.insert(ab.end(), {2.0 * k, 2.0 * k});
    const BranchData a = classify_branch_points(roots_of(ab), 1e-6);
    CHECK(a.r_odd == 0);
    CHECK(a.clusters.size() == 4);
    CHECK_THROWS_AS(genus(a), Error);
}

TEST_CASE("genus from odd branch points") {
    auto with = [](int r_odd) {
        BranchData b;
        b.r_odd = r_odd;
        return genus(b);
    };
    CHECK(with(6) == 2);
    CHECK(with(8) == 3);
    CHECK(with(2) == 0);
    CHECK_THROWS_AS(with(5), Error);
}

TEST_CASE("curve evaluation in product form") {
    const HyperellipticCurve c = HyperellipticCurve::from_roots({1.0, 2.0, 3.0, 4.0}, 2.0);
    CHECK(c.eval_Q(0.0) == cplx(48.0));
    CHECK(std::abs(c.eval_Q(cplx(0.5, 0.5)) - c.Q()(cplx(0.5, 0.5))) < 1e-12);
    CHECK(std::abs(c.eval_Q(1.0, 1e-9) - 2.0 * 1e-9 * (1e-9 - 1.0) * (1e-9 - 2.0) * (1e-9 - 3.0)) < 1e-22);
    CHECK(c.arithmetic_genus() == 1);
    const HyperellipticCurve s = c.scaled(cplx(0, 3));
    CHECK(std::abs(s.eval_Q(0.7) - cplx(0, 3) * c.eval_Q(0.7)) < 1e-12);
}

TEST_CASE("sheet tracking around roots") {
    const HyperellipticCurve c = HyperellipticCurve::from_roots({0.0, 0.0, 1.0, 2.0, 3.0, 4.0}, 1.0, 1e-6);
    const HyperellipticCurve g = HyperellipticCurve::from_roots({-0.1, 0.1, 1.0, 2.0, 3.0, 4.0});
    auto sign_around = [](const HyperellipticCurve& cv, cplx center, double r) {
        const Path p = Path::circle(center, r);
        const cplx z0 = p.start();
        return continue_sqrt(cv, p, std::sqrt(cv.eval_Q(z0))).final_sign;
    };
    CHECK(sign_around(g, 5.5, 0.3) == 1);   // no root inside
    CHECK(sign_around(g, 1.0, 0.3) == -1);  // one simple root
    CHECK(sign_around(g, 0.0, 0.5) == 1);   // two simple roots
    CHECK(sign_around(c, 0.0, 0.5) == 1);   // double root
    CHECK(sign_around(c, 1.5, 0.7) == 1);   // roots 1 and 2
}

TEST_CASE("continue_branch keeps the nearer sign") {
    const cplx y = continue_branch(4.0, cplx(-1.0, 0.1));
    CHECK(y == cplx(-2.0));
    CHECK(continue_branch(cplx(0, 4), cplx(1, 1)) == std::sqrt(cplx(0, 4)));
}

TEST_CASE("pullback of a quadratic differential") {
    CHECK(pullback_quadratic(ComplexPoly{}).numerator.is_zero());
    // 2Q / (2y) = y: theta corresponds to f = 2Q
    const HyperellipticCurve c = HyperellipticCurve::from_roots({-0.1, 0.1});
    const ComplexPoly two_q = ComplexPoly({2.0}) * c.Q();
    const MeromorphicForm f = pullback_quadratic(two_q);
    const cplx z(0.4, 0.3);
    const cplx y = std::sqrt(c.eval_Q(z));
    CHECK(std::abs(f.numerator(z) / (2.0 * y) - y) < 1e-14);
}

TEST_CASE("vanishing orders at branch clusters") {
    const HyperellipticCurve g = HyperellipticCurve::from_roots({-0.1, 0.1, 1.0, 2.0, 3.0, 4.0});
    Cluster simple;
    for (const auto& cl : g.branch().clusters)
        if (std::abs(cl.center - 2.0) < 1e-9) simple = cl;
    CHECK(vanishing_order(g, std::nullopt, simple).order == 2);
    CHECK(vanishing_order(g, MeromorphicForm{ComplexPoly({1.0})}, simple).order == 0);

    const HyperellipticCurve n = HyperellipticCurve::from_roots({0.0, 0.0, 1.0, 2.0, 3.0, 4.0}, 1.0, 1e-6);
    Cluster node;
    for (const auto& cl : n.branch().clusters)
        if (cl.parity == Parity::even) node = cl;
    CHECK(vanishing_order(n, std::nullopt, node).order == 1);
    CHECK(vanishing_order(n, MeromorphicForm{ComplexPoly({1.0})}, node).order == -1);
}
