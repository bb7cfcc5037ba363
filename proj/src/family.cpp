#include "sklab/family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sklab/error.hpp"

namespace sklab {

FamilyKind family_kind_from_string(const std::string& s) {
    if (s == "pair-collision") return FamilyKind::pair_collision;
    if (s == "multi-collision") return FamilyKind::multi_collision;
    if (s == "radial") return FamilyKind::radial;
    if (s == "raw") return FamilyKind::raw;
    throw Error(ErrorKind::ConfigError, "unknown family kind '" + s + "'");
}

std::string to_string(FamilyKind k) {
    switch (k) {
    case FamilyKind::pair_collision: return "pair-collision";
    case FamilyKind::multi_collision: return "multi-collision";
    case FamilyKind::radial: return "radial";
    case FamilyKind::raw: return "raw";
    }
    return "raw";
}

std::vector<cplx> Family::roots(const FamilyPoint& p) const {
    if (p.eps.size() != pairs.size()) throw Error(ErrorKind::ConfigError, "family point has wrong eps count");
    std::vector<cplx> r;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const cplx d = p.eps[k] * pairs[k].direction;
        r.push_back(pairs[k].center + d);
        r.push_back(pairs[k].center - d);
    }
    r.insert(r.end(), fixed_roots.begin(), fixed_roots.end());
    return r;
}

HyperellipticCurve Family::curve(const FamilyPoint& p) const {
    return HyperellipticCurve::from_roots(roots(p), lead * p.l);
}

FamilyPoint Family::at(cplx eps) const { return {std::vector<cplx>(pairs.size(), eps), 1.0}; }

std::vector<int> Family::pair_loops() const {
    std::vector<int> out;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        int found = -1;
        for (std::size_t l = 0; l < plan.loops.size(); ++l) {
            auto r = plan.loops[l].roots;
            std::sort(r.begin(), r.end());
            if (r == std::vector<int>{int(2 * k), int(2 * k + 1)}) found = int(l);
        }
        if (found < 0) throw Error(ErrorKind::ConfigError, "no plan loop surrounds collision pair " + std::to_string(k));
        out.push_back(found);
    }
    return out;
}

namespace {

FamilyPoint lerp(const FamilyPoint& a, const FamilyPoint& b, double t) {
    if (t == 1.0) return b;
    FamilyPoint p;
    for (std::size_t k = 0; k < a.eps.size(); ++k) p.eps.push_back(a.eps[k] + t * (b.eps[k] - a.eps[k]));
    const cplx la = std::log(a.l);
    cplx dl = std::log(b.l) - la;
    dl.imag(wrap_angle(dl.imag()));
    p.l = std::exp(la + t * dl);
    return p;
}

CycleBasis step(const CycleBasis& basis, const Family& f, const FamilyPoint& a, const FamilyPoint& b, int budget) {
    try {
        return deform_basis(basis, f.roots(b), f.lead * b.l);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::StepTooLarge || budget <= 0) throw;
        const FamilyPoint mid = lerp(a, b, 0.5);
        return step(step(basis, f, a, mid, budget - 1), f, mid, b, budget - 1);
    }
}

} // namespace

CycleBasis transport(const CycleBasis& basis, const Family& family, const FamilyPoint& from, const FamilyPoint& to,
                     int max_halvings) {
    const double darg = std::abs(wrap_angle(std::arg(to.l) - std::arg(from.l)));
    const int n = std::max(1, int(std::ceil(darg / (std::numbers::pi / 8))));
    CycleBasis B = basis;
    FamilyPoint prev = from;
    for (int k = 1; k <= n; ++k) {
        const FamilyPoint next = lerp(from, to, double(k) / n);
        B = step(B, family, prev, next, max_halvings);
        prev = next;
    }
    return B;
}

Family family_f1() {
    Family f;
    f.name = "F1";
    f.kind = FamilyKind::pair_collision;
    f.pairs = {{0.0, 1.0}};
    f.fixed_roots = {1.0, 2.0, 3.0, 4.0};
    // roots: 0:+eps 1:-eps 2:1 3:2 4:3 5:4
    f.plan.loops = {{{2, 3}, LoopKind::spectator}, {{0, 1}, LoopKind::vanishing}};
    f.plan.gaps = {{0, 2}, {3, 4}};
    f.plan.a_cycles = {{1, 0}, {0, 1}};
    return f;
}

Family family_f3() {
    Family f;
    f.name = "F3";
    f.kind = FamilyKind::multi_collision;
    for (double c : {2.0, 4.0, 6.0, 8.0}) f.pairs.push_back({c, 1.0});
    for (int k = 0; k < 4; ++k) f.plan.loops.push_back({{2 * k, 2 * k + 1}, LoopKind::vanishing});
    for (int k = 0; k < 3; ++k) {
        f.plan.gaps.push_back({2 * k, 2 * k + 3});
        std::vector<int> a(4, 0);
        for (int j = 0; j <= k; ++j) a[j] = 1;
        f.plan.a_cycles.push_back(a);
    }
    return f;
}

Family family_r1() {
    Family f = family_f1();
    f.name = "R1";
    f.kind = FamilyKind::radial;
    return f;
}

} // namespace sklab
