#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sklab/geometry.hpp"
#include "sklab/surface.hpp"

namespace sklab {

enum class LoopKind { automatic, vanishing, spectator };

// A closed loop around a group of roots (indices into curve.roots()).
struct LoopSpec {
    std::vector<int> roots;
    LoopKind kind = LoopKind::automatic;
};

// An open path from root `from` to root `to`, read on the double cover as the
// cycle that runs out on one sheet and back on the other.
struct GapSpec {
    int from = -1;
    int to = -1;
};

// a_cycles[i][l]: coefficient of loop l in a_i. The b-cycles are derived.
struct BasisPlan {
    std::vector<LoopSpec> loops;
    std::vector<GapSpec> gaps;
    std::vector<std::vector<int>> a_cycles;
    // period weight of a gap cycle: 1 counts both sheets, 0.5 a single lift
    double gap_weight = 1.0;
};

/// Loops around consecutive pairs of roots sorted by real part, gaps joining
/// neighbouring pairs, a_k = loop k.
BasisPlan chain_plan(const HyperellipticCurve& curve);

struct LoopGeom {
    cplx center;
    double radius = 0.0;
};

/// Circle around a tight group: centroid, half the distance to the nearest
/// foreign root. Throws ClusterCrowded unless the group is well separated.
LoopGeom vanishing_loop(const HyperellipticCurve& curve, std::span<const int> members);
/// Circle a third of the way from the outermost member to the nearest
/// foreign root, so neighbouring spectator loops stay disjoint.
LoopGeom spectator_loop(const HyperellipticCurve& curve, std::span<const int> members);

struct ContourOptions {
    double margin_factor = 2e-3;
    int max_retries = 3;
    double loop_angle = -1.2707963267948966; // start point of loops, off the real axis
    TrackOptions track;
};

// One end of a gap. Ends at a tight pair leave the representative root
// radially, sweep `span` radians on a circle of radius `inner_radius`, then
// head off in direction `psi`. The accumulated span records winding.
struct GapEnd {
    int root = -1;
    int loop = -1; // tight loop containing the root, or -1
    cplx center;
    double inner_radius = 0.0;
    double phi = 0.0;
    double psi = 0.0;
    double span = 0.0;
};

struct CycleComponent {
    Path path;
    std::size_t anchor_piece = 0;
    double anchor_s = 0.0;
    cplx y_anchor;
    bool two_sheet = false;
};

/// Path for a gap from its two ends, with left-side half-circle detours around
/// roots that come within the margin of the middle segment.
CycleComponent connecting_path(const HyperellipticCurve& curve, const GapEnd& from, const GapEnd& to,
                               std::span<const int> skip_roots, const ContourOptions& opt);

struct CycleBasis {
    HyperellipticCurve curve;
    BasisPlan plan;
    ContourOptions options;
    std::vector<LoopGeom> loop_geom;
    std::vector<CycleComponent> loops, gaps;
    std::vector<std::pair<GapEnd, GapEnd>> gap_ends;

    // rows a_1..a_g, b_1..b_g; columns loops then gaps
    Eigen::MatrixXi coefficients;
    // pairwise intersection numbers of the components
    Eigen::MatrixXi component_intersections;
    // hash of the deformation history since construction
    std::uint64_t branch_tag = 0;

    int genus() const { return static_cast<int>(coefficients.rows()) / 2; }
    std::vector<CycleComponent> components() const;
    Eigen::MatrixXi intersection_matrix() const;
};

LiftedPath lift(const HyperellipticCurve& curve, const CycleComponent& c, const TrackOptions& opt = {});

/// Intersection numbers of lifted components on the double cover.
int intersection_number(const LiftedPath& a, bool a_two_sheet, const LiftedPath& b, bool b_two_sheet);

CycleBasis build_cycle_basis(const HyperellipticCurve& curve, const BasisPlan& plan, const ContourOptions& opt = {});

/// Moves the basis to a nearby curve. `new_roots` is matched against the
/// current roots; every root must move by at most a quarter of the minimal
/// separation (StepTooLarge otherwise).
CycleBasis deform_basis(const CycleBasis& basis, std::span<const cplx> new_roots, cplx new_lead);

} // namespace sklab
