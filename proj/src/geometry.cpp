#include "sklab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sklab/error.hpp"

namespace sklab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Visitor {
    double s;
    cplx operator()(const Segment& g) const { return g.a + s * (g.b - g.a); }
    cplx operator()(const Arc& a) const { return a.center + std::polar(a.radius, a.theta0 + s * a.span); }
};

double segment_distance(const Segment& g, cplx z) {
    const cplx d = g.b - g.a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(z - g.a);
    const double t = std::clamp(((z - g.a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(z - (g.a + t * d));
}

double arc_distance(const Arc& a, cplx z) {
    const cplx rel = z - a.center;
    double best = std::min(std::abs(z - piece_point(a, 0.0)), std::abs(z - piece_point(a, 1.0)));
    if (std::abs(a.span) >= kTwoPi) return std::abs(std::abs(rel) - a.radius);
    if (std::abs(rel) > 0.0) {
        const double phi = std::arg(rel);
        // Does the ray direction phi fall within the swept angles?
        const double lo = std::min(a.theta0, a.theta0 + a.span);
        double t = phi - lo;
        t -= kTwoPi * std::floor(t / kTwoPi);
        if (t <= std::abs(a.span)) best = std::min(best, std::abs(std::abs(rel) - a.radius));
    }
    return best;
}

// Parameters s in [0,1] where the arc passes through angle phi (mod 2 pi).
std::vector<double> arc_params_at_angle(const Arc& a, double phi) {
    std::vector<double> out;
    if (a.span == 0.0) return out;
    const double base = phi - a.theta0;
    const double lo = std::min(0.0, a.span), hi = std::max(0.0, a.span);
    const double n0 = std::ceil((lo - base) / kTwoPi - 1e-12);
    for (double n = n0; base + n * kTwoPi <= hi + 1e-12; n += 1.0) {
        const double s = (base + n * kTwoPi) / a.span;
        if (s >= -1e-12 && s <= 1.0 + 1e-12) out.push_back(std::clamp(s, 0.0, 1.0));
    }
    return out;
}

// Points of a line segment a + t(b-a), t in [0,1], on circle |z-c| = r.
std::vector<double> segment_circle(const Segment& g, cplx c, double r) {
    const cplx d = g.b - g.a, f = g.a - c;
    const double A = std::norm(d), B = 2.0 * (f * std::conj(d)).real(), C = std::norm(f) - r * r;
    std::vector<double> out;
    if (A == 0.0) return out;
    const double disc = B * B - 4 * A * C;
    if (disc < 0.0) return out;
    if (disc <= 1e-24 * B * B + 1e-300)
        throw Error(ErrorKind::NoRoute, "segment tangent to circle; intersection ill-defined");
    const double sq = std::sqrt(disc);
    for (double t : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)})
        if (t >= 0.0 && t <= 1.0) out.push_back(t);
    return out;
}

void check_transversal(cplx ta, cplx tb) {
    const double cross = std::abs((std::conj(ta) * tb).imag());
    if (cross <= 1e-10 * std::abs(ta) * std::abs(tb))
        throw Error(ErrorKind::NoRoute, "tangential contact between paths");
}

void intersect_pieces(const Piece& pa, std::size_t ia, const Piece& pb, std::size_t ib,
                      std::vector<Crossing>& out) {
    auto push = [&](double sa, double sb) {
        check_transversal(piece_tangent(pa, sa), piece_tangent(pb, sb));
        out.push_back({ia, sa, ib, sb, piece_point(pa, sa)});
    };
    if (const auto* ga = std::get_if<Segment>(&pa)) {
        if (const auto* gb = std::get_if<Segment>(&pb)) {
            const cplx r = ga->b - ga->a, s = gb->b - gb->a, q = gb->a - ga->a;
            const double den = (std::conj(r) * s).imag();
            if (den == 0.0) return; // parallel: disjoint for our constructions
            const double t = (std::conj(q) * s).imag() / den;
            const double u = (std::conj(q) * r).imag() / den;
            if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) push(t, u);
            return;
        }
        const auto& ab = std::get<Arc>(pb);
        for (double t : segment_circle(*ga, ab.center, ab.radius))
            for (double s : arc_params_at_angle(ab, std::arg(piece_point(pa, t) - ab.center))) push(t, s);
        return;
    }
    const auto& aa = std::get<Arc>(pa);
    if (const auto* gb = std::get_if<Segment>(&pb)) {
        for (double t : segment_circle(*gb, aa.center, aa.radius))
            for (double s : arc_params_at_angle(aa, std::arg(piece_point(pb, t) - aa.center))) push(s, t);
        return;
    }
    const auto& ab = std::get<Arc>(pb);
    const cplx dc = ab.center - aa.center;
    const double d = std::abs(dc);
    if (d == 0.0) return; // concentric: disjoint unless identical
    const double r1 = aa.radius, r2 = ab.radius;
    if (d > r1 + r2 || d < std::abs(r1 - r2)) return;
    const double x = (d * d + r1 * r1 - r2 * r2) / (2 * d);
    const double h2 = r1 * r1 - x * x;
    if (h2 <= 1e-24 * r1 * r1) throw Error(ErrorKind::NoRoute, "tangent circles");
    const double h = std::sqrt(h2);
    const cplx ux = dc / d;
    for (double sign : {1.0, -1.0}) {
        const cplx p = aa.center + ux * cplx(x, sign * h);
        for (double sa : arc_params_at_angle(aa, std::arg(p - aa.center)))
            for (double sb : arc_params_at_angle(ab, std::arg(p - ab.center))) push(sa, sb);
    }
}

} // namespace

double wrap_angle(double x) {
    x = std::remainder(x, kTwoPi);
    if (x <= -std::numbers::pi) x += kTwoPi;
    return x;
}

cplx piece_point(const Piece& p, double s) { return std::visit(Visitor{s}, p); }

cplx piece_tangent(const Piece& p, double s) {
    if (const auto* g = std::get_if<Segment>(&p)) return g->b - g->a;
    const auto& a = std::get<Arc>(p);
    return cplx(0.0, a.span) * std::polar(a.radius, a.theta0 + s * a.span);
}

double piece_length(const Piece& p) {
    if (const auto* g = std::get_if<Segment>(&p)) return std::abs(g->b - g->a);
    const auto& a = std::get<Arc>(p);
    return a.radius * std::abs(a.span);
}

bool Path::closed(double tol) const {
    return !pieces.empty() && std::abs(start() - end()) <= tol * std::max(1.0, std::abs(start()));
}

double Path::length() const {
    double L = 0.0;
    for (const auto& p : pieces) L += piece_length(p);
    return L;
}

double Path::distance_to(cplx z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) {
        if (const auto* g = std::get_if<Segment>(&p))
            best = std::min(best, segment_distance(*g, z));
        else
            best = std::min(best, arc_distance(std::get<Arc>(p), z));
    }
    return best;
}

Path Path::circle(cplx center, double radius, double theta0) {
    Path p;
    p.pieces.push_back(Arc{center, radius, theta0, kTwoPi});
    return p;
}

Path Path::segment(cplx a, cplx b) {
    Path p;
    p.pieces.push_back(Segment{a, b});
    return p;
}

std::vector<Crossing> crossings(const Path& a, const Path& b) {
    std::vector<Crossing> out;
    for (std::size_t i = 0; i < a.pieces.size(); ++i)
        for (std::size_t j = 0; j < b.pieces.size(); ++j) intersect_pieces(a.pieces[i], i, b.pieces[j], j, out);
    // A crossing exactly at a shared vertex of consecutive pieces is reported twice.
    std::vector<Crossing> unique;
    for (const auto& c : out) {
        bool dup = false;
        const bool at_vertex = c.s_a == 0.0 || c.s_a == 1.0 || c.s_b == 0.0 || c.s_b == 1.0;
        for (const auto& u : unique)
            if (at_vertex && std::abs(u.point - c.point) <= 1e-12 * std::max(1.0, std::abs(c.point)))
                dup = true;
        if (!dup) unique.push_back(c);
    }
    return unique;
}

} // namespace sklab
