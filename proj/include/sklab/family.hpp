#pragma once

#include <string>
#include <vector>

#include "sklab/contour.hpp"
#include "sklab/quadrature.hpp"

namespace sklab {

enum class FamilyKind { pair_collision, multi_collision, radial, raw };

FamilyKind family_kind_from_string(const std::string& s);
std::string to_string(FamilyKind k);

// A point of a family: one eps per colliding pair and the overall scale l.
struct FamilyPoint {
    std::vector<cplx> eps;
    cplx l = 1.0;
};

struct CollisionPair {
    cplx center;
    cplx direction = 1.0;
};

// Q = lead * l * prod_k ((z - c_k)^2 - (eps_k d_k)^2) * prod (z - r_j).
// Root order: c_k + eps_k d_k, c_k - eps_k d_k for each pair, then the fixed roots.
struct Family {
    std::string name;
    FamilyKind kind = FamilyKind::pair_collision;
    std::vector<CollisionPair> pairs;
    std::vector<cplx> fixed_roots;
    cplx lead = 1.0;
    BasisPlan plan;
    QuadConfig quad;

    std::vector<cplx> roots(const FamilyPoint& p) const;
    HyperellipticCurve curve(const FamilyPoint& p) const;
    /// Every pair at the same eps, l = 1.
    FamilyPoint at(cplx eps) const;
    /// Indices of loops in the plan that surround a colliding pair, by pair.
    std::vector<int> pair_loops() const;
};

/// Carries a basis from `from` to `to` along the straight line in eps and
/// log l, halving steps on StepTooLarge. Steps in arg l stay below pi/8 so the
/// sheet of y = sqrt(l Q) is followed continuously.
CycleBasis transport(const CycleBasis& basis, const Family& family, const FamilyPoint& from, const FamilyPoint& to,
                     int max_halvings = 16);

/// Reference families: F1 (genus 2, one pair at 0 and roots 1..4), F3 (genus 3,
/// four pairs at 2,4,6,8), R1 (F1's curve scaled by l, eps = 0.1).
Family family_f1();
Family family_f3();
Family family_r1();

} // namespace sklab
