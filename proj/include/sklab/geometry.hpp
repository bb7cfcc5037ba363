#pragma once

#include <variant>
#include <vector>

#include "sklab/polyfield.hpp"

namespace sklab {

struct Segment {
    cplx a, b;
};

/// Circular arc c + r e^{i(theta0 + s*span)}, s in [0,1]. |span| may exceed
/// 2*pi: a transported arc keeps its accumulated winding.
struct Arc {
    cplx center;
    double radius = 0.0;
    double theta0 = 0.0;
    double span = 0.0;
};

using Piece = std::variant<Segment, Arc>;

cplx piece_point(const Piece& p, double s);
/// dz/ds
cplx piece_tangent(const Piece& p, double s);
double piece_length(const Piece& p);

/// Ordered chain of segments and arcs. Endpoints that sit exactly on a root of
/// Q are flagged so integrators can apply the endpoint substitution.
struct Path {
    std::vector<Piece> pieces;
    bool start_at_root = false;
    bool end_at_root = false;

    cplx start() const { return piece_point(pieces.front(), 0.0); }
    cplx end() const { return piece_point(pieces.back(), 1.0); }
    bool closed(double tol = 1e-12) const;
    double length() const;
    /// Minimum distance from `z` to the path.
    double distance_to(cplx z) const;

    static Path circle(cplx center, double radius, double theta0 = 0.0);
    static Path segment(cplx a, cplx b);
};

struct Crossing {
    std::size_t piece_a;
    double s_a;
    std::size_t piece_b;
    double s_b;
    cplx point;
};

/// Transversal crossings between two paths. Tangential contacts throw
/// NoRoute: intersection numbers are undefined there.
std::vector<Crossing> crossings(const Path& a, const Path& b);

/// Wrap an angle into (-pi, pi].
double wrap_angle(double x);

} // namespace sklab
