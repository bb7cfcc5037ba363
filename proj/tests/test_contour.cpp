#include <doctest.h>

#include "sklab/contour.hpp"
#include "sklab/error.hpp"
#include "sklab/family.hpp"

using namespace sklab;

namespace {
Eigen::MatrixXi standard_j(int g) {
    Eigen::MatrixXi J = Eigen::MatrixXi::Zero(2 * g, 2 * g);
    J.topRightCorner(g, g) = Eigen::MatrixXi::Identity(g, g);
    J.bottomLeftCorner(g, g) = -Eigen::MatrixXi::Identity(g, g);
    return J;
}
} // namespace

TEST_CASE("vanishing loop geometry") {
    const double e = 0.1;
    const HyperellipticCurve c = HyperellipticCurve::from_roots({e, -e, 1.0, 2.0, 3.0, 4.0});
    const std::vector<int> pair{0, 1};
    const LoopGeom g = vanishing_loop(c, pair);
    CHECK(std::abs(g.center) < 1e-15);
    CHECK(g.radius == doctest::Approx(0.5 * (1.0 - e)).epsilon(1e-14));

    const HyperellipticCurve crowded = HyperellipticCurve::from_roots({e, -e, 2 * e, 2.0, 3.0, 4.0});
    CHECK_THROWS_AS(vanishing_loop(crowded, pair), Error);
    try {
        vanishing_loop(crowded, pair);
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::ClusterCrowded);
    }
}

TEST_CASE("a loop around a double root lifts to two closed loops") {
    const HyperellipticCurve c = HyperellipticCurve::from_roots({0.0, 0.0, 1.0, 2.0, 3.0, 4.0}, 1.0, 1e-6);
    const std::vector<int> pair{0, 1};
    const LoopGeom g = vanishing_loop(c, pair);
    CHECK(g.radius == doctest::Approx(0.5));
    const Path p = Path::circle(g.center, g.radius);
    CHECK(continue_sqrt(c, p, std::sqrt(c.eval_Q(p.start()))).final_sign == 1);
}

TEST_CASE("connecting path: straight and with a detour") {
    const double e = 0.05;
    const HyperellipticCurve c = HyperellipticCurve::from_roots({e, -e, 0.5, 1.0, 3.0, 4.0});
    ContourOptions opt;
    const GapEnd from{0, -1, e}, to{3, -1, 1.0};
    const std::vector<int> skip{0, 3};

    const HyperellipticCurve clear = HyperellipticCurve::from_roots({e, -e, 2.0, 1.0, 3.0, 4.0});
    const CycleComponent s = connecting_path(clear, from, to, skip, opt);
    REQUIRE(s.path.pieces.size() == 1);
    const Segment seg = std::get<Segment>(s.path.pieces[0]);
    CHECK(seg.a == cplx(e));
    CHECK(seg.b == cplx(1.0));
    CHECK(s.two_sheet);

    const CycleComponent d = connecting_path(c, from, to, skip, opt);
    REQUIRE(d.path.pieces.size() == 3);
    const Arc arc = std::get<Arc>(d.path.pieces[1]);
    const double m = opt.margin_factor * c.diameter();
    CHECK(std::abs(arc.center - 0.5) < 1e-15);
    CHECK(arc.radius == doctest::Approx(m));
    CHECK(piece_point(arc, 0.5).imag() > 0.0); // left of the direction of travel
    CHECK(d.path.distance_to(0.5) == doctest::Approx(m));
}

TEST_CASE("F1 basis is symplectic with the expected shape") {
    const Family f = family_f1();
    const CycleBasis B = build_cycle_basis(f.curve(f.at(0.1)), f.plan);
    CHECK(B.genus() == 2);
    CHECK(B.intersection_matrix() == standard_j(2));
    // the gap from +eps runs straight to the root at 1
    const Segment s = std::get<Segment>(B.gaps[0].path.pieces.at(0));
    CHECK(s.a == cplx(0.1));
    CHECK(s.b == cplx(1.0));
}

TEST_CASE("F3 basis: consecutive pairs and gaps") {
    const Family f = family_f3();
    const CycleBasis B = build_cycle_basis(f.curve(f.at(1e-2)), f.plan);
    CHECK(B.genus() == 3);
    CHECK(B.intersection_matrix() == standard_j(3));
    // loops L_k against the gap joining pair k to pair k+1
    const int nl = int(B.loops.size());
    for (int k = 0; k < 3; ++k) {
        CHECK(B.component_intersections(k, nl + k) == 1);
        CHECK(B.component_intersections(k + 1, nl + k) == -1);
    }
}

TEST_CASE("plans that cannot give a symplectic basis are rejected") {
    const HyperellipticCurve c = HyperellipticCurve::from_roots({1.0, 2.0});
    try {
        build_cycle_basis(c, BasisPlan{});
        FAIL("expected PlanInconsistent");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PlanInconsistent);
    }
    const Family f = family_f1();
    BasisPlan bad = f.plan;
    bad.a_cycles = {{1, 0}, {1, 0}};
    CHECK_THROWS_AS(build_cycle_basis(f.curve(f.at(0.1)), bad), Error);
}

TEST_CASE("chain plan on a genus 1 curve") {
    const HyperellipticCurve c = HyperellipticCurve::from_roots({1.0, 2.0, 3.0, 4.0});
    const BasisPlan p = chain_plan(c);
    CHECK(p.loops.size() == 2);
    CHECK(p.gaps.size() == 1);
    const CycleBasis B = build_cycle_basis(c, p);
    CHECK(B.intersection_matrix() == standard_j(1));
}

TEST_CASE("deform_basis") {
    const Family f = family_f1();
    const CycleBasis B = build_cycle_basis(f.curve(f.at(0.1)), f.plan);
    const CycleBasis same = deform_basis(B, B.curve.roots(), B.curve.lead());
    CHECK(same.intersection_matrix() == B.intersection_matrix());
    for (std::size_t k = 0; k < B.loops.size(); ++k) CHECK(same.loop_geom[k].radius == B.loop_geom[k].radius);

    const cplx e1 = 0.1 * std::polar(1.0, M_PI / 8);
    const CycleBasis moved = deform_basis(B, f.roots(f.at(e1)), f.lead);
    CHECK(moved.intersection_matrix() == standard_j(2));
    CHECK(moved.branch_tag != B.branch_tag);

    // the root at 1 moves by more than a quarter of the closest separation
    std::vector<cplx> far = B.curve.roots();
    far[2] = 1.3;
    try {
        deform_basis(B, far, f.lead);
        FAIL("expected StepTooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::StepTooLarge);
    }
}

TEST_CASE("transport around the pair keeps a symplectic basis") {
    const Family f = family_f1();
    const CycleBasis B = build_cycle_basis(f.curve(f.at(0.05)), f.plan);
    CycleBasis cur = B;
    FamilyPoint p = f.at(0.05);
    for (int s = 1; s <= 16; ++s) {
        const FamilyPoint q = f.at(0.05 * std::polar(1.0, 2 * M_PI * s / 16.0));
        cur = transport(cur, f, p, q);
        p = q;
    }
    CHECK(cur.intersection_matrix() == standard_j(2));
    // the pair was exchanged twice: roots are back in place
    for (std::size_t k = 0; k < B.curve.roots().size(); ++k)
        CHECK(std::abs(cur.curve.roots()[k] - B.curve.roots()[k]) < 1e-14);
}
