#pragma once

#include <optional>
#include <vector>

#include "sklab/geometry.hpp"
#include "sklab/polyfield.hpp"

namespace sklab {

enum class Parity { odd, even };

struct Cluster {
    cplx center;
    std::vector<cplx> members; // with multiplicity
    Parity parity = Parity::odd;
    int multiplicity() const { return static_cast<int>(members.size()); }
};

struct BranchData {
    std::vector<Cluster> clusters;
    int r_odd = 0;
};

/// Groups roots lying within cluster_tol of each other; parity is that of the
/// total multiplicity of the group.
BranchData classify_branch_points(const RootSet& rs, double cluster_tol);

/// Genus of the normalized planar double cover: r_odd/2 - 1.
int genus(const BranchData& b);

/// y^2 = Q(z) with Q of even degree, held in product form lead * prod(z - r_k).
/// Keeping the roots explicit lets integrands evaluate (z - r_k) without
/// cancellation next to endpoints that sit on roots.
class HyperellipticCurve {
public:
    static HyperellipticCurve from_roots(std::vector<cplx> roots, cplx lead = 1.0,
                                         double cluster_tol = 1e-9);
    static HyperellipticCurve from_poly(const ComplexPoly& q, RootOptions opt = {},
                                        double cluster_tol = 1e-9);

    const ComplexPoly& Q() const { return q_; }
    const std::vector<cplx>& roots() const { return roots_; }
    cplx lead() const { return lead_; }
    const BranchData& branch() const { return branch_; }

    /// Number of anti-invariant a-cycles in the planar model: deg/2 - 1.
    int arithmetic_genus() const { return static_cast<int>(roots_.size()) / 2 - 1; }
    /// Genus of the normalization; throws DegenerateCover when r_odd = 0.
    int genus() const { return sklab::genus(branch_); }

    cplx eval_Q(cplx z) const;
    /// Q(base + offset), forming each factor as (base - r_k) + offset.
    cplx eval_Q(cplx base, cplx offset) const;

    double diameter() const;
    /// Default clearance margin for paths: 1e-3 x diameter of the root set.
    double clearance() const { return 1e-3 * diameter(); }

    /// The curve y^2 = l * Q(z).
    HyperellipticCurve scaled(cplx l) const;

private:
    cplx lead_ = 1.0;
    std::vector<cplx> roots_;
    ComplexPoly q_;
    BranchData branch_;
};

/// Anti-invariant form numerator(z) dz / (2y).
struct MeromorphicForm {
    ComplexPoly numerator;
};

/// Image of the quadratic differential f(z) dz^2 on the cover: f(z) dz/(2y).
MeromorphicForm pullback_quadratic(const ComplexPoly& f);

/// Sign choice for sqrt(q) continuing y_ref: the root with Re(y conj(y_ref)) >= 0.
cplx continue_branch(cplx q_value, cplx y_ref);

struct TrackOptions {
    /// Clearance from roots that are not path endpoints; <= 0 selects the curve default.
    double clearance = -1.0;
    int max_depth = 60;
};

/// One piece of a path on which arg Q varies by less than pi/2, so the branch
/// of y can be selected pointwise against y0/y1.
struct SubPiece {
    std::size_t piece = 0;
    double s0 = 0.0, s1 = 1.0;
    cplx y0, y1;
    /// -1: s0 is a root endpoint, +1: s1 is a root endpoint, 0: neither.
    int root_end = 0;
    cplx root;
    int root_multiplicity = 0;
};

/// A path together with a continuous choice of y along it, fixed by the value
/// of y at an anchor point.
class LiftedPath {
public:
    LiftedPath(const HyperellipticCurve& curve, const Path& path, std::size_t anchor_piece,
               double anchor_s, cplx y_anchor, TrackOptions opt = {});

    const HyperellipticCurve& curve() const { return *curve_; }
    const Path& path() const { return path_; }
    const std::vector<SubPiece>& subpieces() const { return subs_; }

    cplx y_at(std::size_t piece, double s) const;
    cplx y_start() const { return subs_.front().y0; }
    cplx y_end() const { return subs_.back().y1; }

private:
    const HyperellipticCurve* curve_;
    Path path_;
    std::vector<SubPiece> subs_;
};

struct SheetSample {
    cplx z;
    cplx y;
};

struct SheetTrack {
    std::vector<SheetSample> samples;
    /// Closed paths: y_end / y_start. Open paths: sign of y_end against the
    /// principal square root of Q(end).
    int final_sign = 1;
};

/// Continues y from y0 at path.start() along the path.
SheetTrack continue_sqrt(const HyperellipticCurve& curve, const Path& path, cplx y0, TrackOptions opt = {});

struct OrderEstimate {
    int order = 0;
    double slope = 0.0;
    double r_squared = 0.0;
};

/// Order of a form at a branch cluster in the local parameter t, where
/// z - center = t^2 for odd clusters and z - center = t for even ones.
/// `form` empty selects theta = y dz.
OrderEstimate vanishing_order(const HyperellipticCurve& curve, const std::optional<MeromorphicForm>& form,
                              const Cluster& cluster);

} // namespace sklab
