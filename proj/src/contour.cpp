#include "sklab/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <numbers>
#include <numeric>

#include "sklab/error.hpp"

namespace sklab {

namespace {

bool contains(std::span<const int> v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

cplx centroid(const HyperellipticCurve& c, std::span<const int> members) {
    cplx s{};
    for (int m : members) s += c.roots().at(m);
    return s / double(members.size());
}

double member_diameter(const HyperellipticCurve& c, std::span<const int> members) {
    double d = 0.0;
    for (int i : members)
        for (int j : members) d = std::max(d, std::abs(c.roots()[i] - c.roots()[j]));
    return d;
}

double foreign_separation(const HyperellipticCurve& c, std::span<const int> members) {
    double d = std::numeric_limits<double>::infinity();
    for (int i : members)
        for (int f = 0; f < int(c.roots().size()); ++f)
            if (!contains(members, f)) d = std::min(d, std::abs(c.roots()[i] - c.roots()[f]));
    return d;
}

bool is_tight(const HyperellipticCurve& c, std::span<const int> members) {
    return members.size() == 2 && 3.0 * member_diameter(c, members) <= foreign_separation(c, members);
}

LoopGeom loop_geometry(const HyperellipticCurve& c, const LoopSpec& spec) {
    return spec.kind == LoopKind::vanishing ? vanishing_loop(c, spec.roots) : spectator_loop(c, spec.roots);
}

CycleComponent loop_component(const HyperellipticCurve& c, const LoopGeom& g, const ContourOptions& opt) {
    CycleComponent comp;
    comp.path = Path::circle(g.center, g.radius, opt.loop_angle);
    comp.anchor_piece = 0;
    comp.anchor_s = 0.0;
    comp.y_anchor = std::sqrt(c.eval_Q(comp.path.start()));
    return comp;
}

int loop_of_root(const BasisPlan& plan, int root) {
    for (int l = 0; l < int(plan.loops.size()); ++l)
        if (contains(plan.loops[l].roots, root)) return l;
    return -1;
}

// Fills center/inner radius/phi for an end; psi and span are set by the caller.
void place_end(const HyperellipticCurve& c, const BasisPlan& plan, const std::vector<LoopGeom>& geom, GapEnd& e) {
    const int l = loop_of_root(plan, e.root);
    const cplx r = c.roots().at(e.root);
    double cluster = 0.0;
    if (l >= 0) {
        const cplx center = centroid(c, plan.loops[l].roots);
        for (int m : plan.loops[l].roots) cluster = std::max(cluster, std::abs(c.roots()[m] - center));
    }
    // an exact multiple root is a point: the gap runs straight into it
    if (l >= 0 && plan.loops[l].kind == LoopKind::vanishing && cluster > 0.0) {
        e.loop = l;
        e.center = centroid(c, plan.loops[l].roots);
        e.inner_radius = std::sqrt(cluster * geom[l].radius);
        e.phi = std::arg(r - e.center);
    } else {
        e.loop = -1;
        e.center = r;
        e.inner_radius = 0.0;
        e.phi = 0.0;
        e.span = 0.0;
    }
}

std::vector<int> end_roots(const HyperellipticCurve& c, const BasisPlan& plan, const GapEnd& e) {
    if (e.loop >= 0) return plan.loops[e.loop].roots;
    std::vector<int> s;
    for (int j = 0; j < int(c.roots().size()); ++j)
        if (c.roots()[j] == c.roots()[e.root]) s.push_back(j);
    return s;
}

std::vector<int> gap_skip(const HyperellipticCurve& c, const BasisPlan& plan, const GapEnd& a, const GapEnd& b) {
    std::vector<int> s = end_roots(c, plan, a);
    for (int r : end_roots(c, plan, b)) s.push_back(r);
    return s;
}

double min_separation(std::span<const cplx> roots) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j) d = std::min(d, std::abs(roots[i] - roots[j]));
    return d;
}

Eigen::MatrixXi all_intersections(const HyperellipticCurve& curve, const std::vector<CycleComponent>& comps,
                                  const TrackOptions& track) {
    std::vector<LiftedPath> lifted;
    lifted.reserve(comps.size());
    for (const auto& c : comps) lifted.push_back(lift(curve, c, track));
    const int n = int(comps.size());
    Eigen::MatrixXi K = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            K(i, j) = intersection_number(lifted[i], comps[i].two_sheet, lifted[j], comps[j].two_sheet);
            K(j, i) = -K(i, j);
        }
    return K;
}

Eigen::MatrixXi standard_form(int g) {
    Eigen::MatrixXi J = Eigen::MatrixXi::Zero(2 * g, 2 * g);
    J.topRightCorner(g, g) = Eigen::MatrixXi::Identity(g, g);
    J.bottomLeftCorner(g, g) = -Eigen::MatrixXi::Identity(g, g);
    return J;
}

} // namespace

BasisPlan chain_plan(const HyperellipticCurve& curve) {
    const auto& r = curve.roots();
    std::vector<int> order(r.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return r[a].real() != r[b].real() ? r[a].real() < r[b].real() : r[a].imag() < r[b].imag();
    });
    BasisPlan p;
    const int m = int(r.size()) / 2;
    for (int k = 0; k < m; ++k) p.loops.push_back({{order[2 * k], order[2 * k + 1]}, LoopKind::spectator});
    for (int k = 0; k + 1 < m; ++k) {
        p.gaps.push_back({order[2 * k + 1], order[2 * k + 2]});
        std::vector<int> a(m, 0);
        a[k] = 1;
        p.a_cycles.push_back(a);
    }
    return p;
}

LoopGeom vanishing_loop(const HyperellipticCurve& curve, std::span<const int> members) {
    const double diam = member_diameter(curve, members);
    const double sep = foreign_separation(curve, members);
    if (sep < 3.0 * diam) throw Error(ErrorKind::ClusterCrowded, "collision group is not separated from other roots");
    return {centroid(curve, members), 0.5 * sep};
}

LoopGeom spectator_loop(const HyperellipticCurve& curve, std::span<const int> members) {
    const cplx c = centroid(curve, members);
    double rin = 0.0, rout = std::numeric_limits<double>::infinity();
    for (int i = 0; i < int(curve.roots().size()); ++i) {
        const double d = std::abs(curve.roots()[i] - c);
        if (contains(members, i)) rin = std::max(rin, d);
        else rout = std::min(rout, d);
    }
    if (!(rout > rin)) throw Error(ErrorKind::NoRoute, "no circle separates the loop members from the other roots");
    return {c, rin + (rout - rin) / 3.0};
}

CycleComponent connecting_path(const HyperellipticCurve& curve, const GapEnd& from, const GapEnd& to,
                               std::span<const int> skip_roots, const ContourOptions& opt) {
    auto exit_point = [](const GapEnd& e) {
        return e.loop >= 0 ? e.center + std::polar(e.inner_radius, e.phi + e.span) : e.center;
    };
    const cplx p0 = exit_point(from), p1 = exit_point(to);
    const cplx dir = p1 - p0;
    const double L = std::abs(dir);
    if (L == 0.0) throw Error(ErrorKind::NoRoute, "degenerate gap");
    const cplx u = dir / L;

    double m = opt.margin_factor * curve.diameter();
    std::vector<Piece> middle;
    for (int attempt = 0;; ++attempt) {
        struct Detour {
            double t, rho;
        };
        std::vector<Detour> det;
        for (int j = 0; j < int(curve.roots().size()); ++j) {
            if (contains(skip_roots, j)) continue;
            const cplx rel = (curve.roots()[j] - p0) * std::conj(u);
            const double t = rel.real();
            const double d = std::abs(rel.imag());
            if (t > -m && t < L + m && d < m) det.push_back({t, m + d});
        }
        std::sort(det.begin(), det.end(), [](auto& a, auto& b) { return a.t < b.t; });
        bool ok = true;
        for (std::size_t k = 0; k < det.size(); ++k) {
            if (det[k].t - det[k].rho <= 0.0 || det[k].t + det[k].rho >= L) ok = false;
            if (k > 0 && det[k - 1].t + det[k - 1].rho >= det[k].t - det[k].rho) ok = false;
        }
        if (!ok) {
            if (attempt >= opt.max_retries) throw Error(ErrorKind::NoRoute, "detours around roots overlap");
            m *= 0.5;
            continue;
        }
        middle.clear();
        double t = 0.0;
        for (const auto& d : det) {
            middle.push_back(Segment{p0 + (t * u), p0 + ((d.t - d.rho) * u)});
            middle.push_back(Arc{p0 + d.t * u, d.rho, std::arg(-u), -std::numbers::pi});
            t = d.t + d.rho;
        }
        middle.push_back(Segment{p0 + t * u, p1});
        break;
    }

    CycleComponent comp;
    comp.two_sheet = true;
    Path& path = comp.path;
    const cplx r0 = curve.roots().at(from.root), r1 = curve.roots().at(to.root);
    if (from.loop >= 0) {
        const cplx q = from.center + std::polar(from.inner_radius, from.phi);
        if (from.span == 0.0 && std::holds_alternative<Segment>(middle.front())) {
            std::get<Segment>(middle.front()).a = r0;
        } else {
            path.pieces.push_back(Segment{r0, q});
            if (from.span != 0.0) path.pieces.push_back(Arc{from.center, from.inner_radius, from.phi, from.span});
        }
    }
    const bool merge_end = to.loop >= 0 && to.span == 0.0 && std::holds_alternative<Segment>(middle.back());
    if (merge_end) std::get<Segment>(middle.back()).b = r1;
    for (auto& p : middle) path.pieces.push_back(p);
    if (to.loop >= 0 && !merge_end) {
        if (to.span != 0.0)
            path.pieces.push_back(Arc{to.center, to.inner_radius, to.phi + to.span, -to.span});
        path.pieces.push_back(Segment{to.center + std::polar(to.inner_radius, to.phi), r1});
    }
    path.start_at_root = path.end_at_root = true;

    // anchor: the path point closest to the midpoint of the straight middle
    const cplx mid = p0 + 0.5 * dir;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < path.pieces.size(); ++i) {
        const Piece& p = path.pieces[i];
        double s = 0.5;
        if (const auto* g = std::get_if<Segment>(&p)) {
            const cplx d = g->b - g->a;
            s = std::clamp(((mid - g->a) * std::conj(d)).real() / std::norm(d), 0.05, 0.95);
        }
        const double dist = std::abs(piece_point(p, s) - mid);
        if (dist < best) {
            best = dist;
            comp.anchor_piece = i;
            comp.anchor_s = s;
        }
    }
    comp.y_anchor = std::sqrt(curve.eval_Q(piece_point(path.pieces[comp.anchor_piece], comp.anchor_s)));
    return comp;
}

std::vector<CycleComponent> CycleBasis::components() const {
    std::vector<CycleComponent> all = loops;
    all.insert(all.end(), gaps.begin(), gaps.end());
    return all;
}

Eigen::MatrixXi CycleBasis::intersection_matrix() const {
    return coefficients * component_intersections * coefficients.transpose();
}

LiftedPath lift(const HyperellipticCurve& curve, const CycleComponent& c, const TrackOptions& opt) {
    return LiftedPath(curve, c.path, c.anchor_piece, c.anchor_s, c.y_anchor, opt);
}

int intersection_number(const LiftedPath& a, bool a_two_sheet, const LiftedPath& b, bool b_two_sheet) {
    int total = 0;
    for (const Crossing& x : crossings(a.path(), b.path())) {
        const cplx ta = piece_tangent(a.path().pieces[x.piece_a], x.s_a);
        const cplx tb = piece_tangent(b.path().pieces[x.piece_b], x.s_b);
        const int sign = (std::conj(ta) * tb).imag() > 0.0 ? 1 : -1;
        const cplx ya = a.y_at(x.piece_a, x.s_a), yb = b.y_at(x.piece_b, x.s_b);
        if (std::abs(ya) == 0.0 || std::abs(yb) == 0.0)
            throw Error(ErrorKind::NoRoute, "paths cross at a branch point");
        const int sigma = (ya * std::conj(yb)).real() >= 0.0 ? 1 : -1;
        if (a_two_sheet && b_two_sheet) total += 2 * sign * sigma;
        else if (a_two_sheet || b_two_sheet) total += sign * sigma;
        else if (sigma == 1) total += sign;
    }
    return total;
}

CycleBasis build_cycle_basis(const HyperellipticCurve& curve, const BasisPlan& plan_in, const ContourOptions& opt) {
    CycleBasis B{curve, plan_in, opt, {}, {}, {}, {}, {}, {}, 0};
    BasisPlan& plan = B.plan;
    const int nr = int(curve.roots().size());
    const int g = int(plan.a_cycles.size());
    const int nl = int(plan.loops.size()), ng = int(plan.gaps.size());
    if (g == 0) throw Error(ErrorKind::PlanInconsistent, "empty plan: a genus 0 curve has no cycles");
    if (g != ng || g != curve.arithmetic_genus())
        throw Error(ErrorKind::PlanInconsistent, "plan must supply one gap per a-cycle and match the genus");
    std::vector<int> used;
    for (auto& L : plan.loops) {
        for (int r : L.roots)
            if (r < 0 || r >= nr) throw Error(ErrorKind::PlanInconsistent, "loop root index out of range");
        if (L.kind == LoopKind::automatic)
            L.kind = is_tight(curve, L.roots) ? LoopKind::vanishing : LoopKind::spectator;
    }
    for (const auto& G : plan.gaps) {
        if (G.from < 0 || G.from >= nr || G.to < 0 || G.to >= nr || G.from == G.to)
            throw Error(ErrorKind::PlanInconsistent, "gap root index out of range");
        if (contains(used, G.from) || contains(used, G.to))
            throw Error(ErrorKind::PlanInconsistent, "gaps share an endpoint");
        used.push_back(G.from);
        used.push_back(G.to);
    }
    for (const auto& a : plan.a_cycles)
        if (int(a.size()) != nl) throw Error(ErrorKind::PlanInconsistent, "a-cycle coefficient count != loop count");

    for (const auto& L : plan.loops) {
        B.loop_geom.push_back(loop_geometry(curve, L));
        B.loops.push_back(loop_component(curve, B.loop_geom.back(), opt));
    }
    for (const auto& G : plan.gaps) {
        GapEnd a, b;
        a.root = G.from;
        b.root = G.to;
        place_end(curve, plan, B.loop_geom, a);
        place_end(curve, plan, B.loop_geom, b);
        a.psi = std::arg(b.center - a.center);
        b.psi = std::arg(a.center - b.center);
        if (a.loop >= 0) a.span = wrap_angle(a.psi - a.phi);
        if (b.loop >= 0) b.span = wrap_angle(b.psi - b.phi);
        if (a.loop >= 0 && a.loop == b.loop) throw Error(ErrorKind::PlanInconsistent, "gap inside a single loop");
        B.gap_ends.push_back({a, b});
        B.gaps.push_back(connecting_path(curve, a, b, gap_skip(curve, plan, a, b), opt));
    }

    // Sheet normalization: each gap leaves its start loop with +1 and enters
    // its end loop with -1.
    Eigen::MatrixXi K = all_intersections(curve, B.components(), opt.track);
    struct Edge {
        int loop, gap, target;
    };
    std::vector<Edge> edges;
    for (int j = 0; j < ng; ++j) {
        const int lf = loop_of_root(plan, plan.gaps[j].from), lt = loop_of_root(plan, plan.gaps[j].to);
        if (lf >= 0) edges.push_back({lf, j, 1});
        if (lt >= 0) edges.push_back({lt, j, -1});
    }
    std::vector<int> flip(nl + ng, 0);
    for (int start = 0; start < nl + ng; ++start) {
        if (flip[start]) continue;
        flip[start] = 1;
        std::deque<int> q{start};
        while (!q.empty()) {
            const int v = q.front();
            q.pop_front();
            for (const auto& e : edges) {
                const int lv = e.loop, gv = nl + e.gap;
                if (v != lv && v != gv) continue;
                const int k = K(lv, gv);
                if (std::abs(k) != 1)
                    throw Error(ErrorKind::PlanInconsistent, "gap does not cross its end loop exactly once");
                const int other = v == lv ? gv : lv;
                const int need = e.target * k * flip[v];
                if (!flip[other]) {
                    flip[other] = need;
                    q.push_back(other);
                } else if (flip[other] != need) {
                    throw Error(ErrorKind::PlanInconsistent, "sheet orientations cannot be made consistent");
                }
            }
        }
    }
    for (int l = 0; l < nl; ++l) B.loops[l].y_anchor *= double(flip[l]);
    for (int j = 0; j < ng; ++j) B.gaps[j].y_anchor *= double(flip[nl + j]);
    K = all_intersections(curve, B.components(), opt.track);
    B.component_intersections = K;

    Eigen::MatrixXi C(g, nl);
    for (int i = 0; i < g; ++i)
        for (int l = 0; l < nl; ++l) C(i, l) = plan.a_cycles[i][l];
    const Eigen::MatrixXi KLL = K.topLeftCorner(nl, nl), KLG = K.topRightCorner(nl, ng),
                          KGG = K.bottomRightCorner(ng, ng);
    if ((C * KLL * C.transpose()).cwiseAbs().sum() != 0)
        throw Error(ErrorKind::PlanInconsistent, "a-cycles intersect each other");
    const Eigen::MatrixXi Gm = C * KLG;
    const Eigen::MatrixXd Xd = Gm.cast<double>().inverse();
    const Eigen::MatrixXi X = Xd.array().round().cast<int>().matrix();
    if (!Xd.allFinite() || (X.cast<double>() - Xd).cwiseAbs().maxCoeff() > 1e-9 ||
        Gm * X != Eigen::MatrixXi::Identity(g, g))
        throw Error(ErrorKind::PlanInconsistent, "loop/gap pairing is not unimodular");
    Eigen::MatrixXi Bg = X.transpose();
    Eigen::MatrixXi Bl = Eigen::MatrixXi::Zero(g, nl);
    const Eigen::MatrixXi S = Bg * KGG * Bg.transpose() + Bg * KLG.transpose() * Bl.transpose() +
                              Bl * KLG * Bg.transpose() + Bl * KLL * Bl.transpose();
    Eigen::MatrixXi M = S.triangularView<Eigen::StrictlyUpper>();
    Bl += M.transpose() * C;

    B.coefficients = Eigen::MatrixXi::Zero(2 * g, nl + ng);
    B.coefficients.topLeftCorner(g, nl) = C;
    B.coefficients.bottomLeftCorner(g, nl) = Bl;
    B.coefficients.bottomRightCorner(g, ng) = Bg;
    if (B.intersection_matrix() != standard_form(g))
        throw Error(ErrorKind::PlanInconsistent, "assembled basis is not symplectic");
    return B;
}

CycleBasis deform_basis(const CycleBasis& basis, std::span<const cplx> new_roots, cplx new_lead) {
    const auto& old = basis.curve.roots();
    if (new_roots.size() != old.size()) throw Error(ErrorKind::PlanInconsistent, "root count changed");
    const std::vector<int> perm = match_roots(std::span<const cplx>(old), new_roots);
    std::vector<cplx> moved(old.size());
    double disp = 0.0;
    for (std::size_t i = 0; i < old.size(); ++i) {
        moved[i] = new_roots[perm[i]];
        disp = std::max(disp, std::abs(moved[i] - old[i]));
    }
    if (disp > 0.25 * min_separation(old))
        throw Error(ErrorKind::StepTooLarge, "roots moved more than a quarter of their separation");

    CycleBasis B = basis;
    B.curve = HyperellipticCurve::from_roots(moved, new_lead);
    const auto& plan = B.plan;
    const auto& opt = B.options;
    auto carry = [&](CycleComponent& c, cplx y_old) {
        const cplx z = piece_point(c.path.pieces[c.anchor_piece], c.anchor_s);
        c.y_anchor = continue_branch(B.curve.eval_Q(z), y_old);
    };
    for (std::size_t l = 0; l < plan.loops.size(); ++l) {
        B.loop_geom[l] = loop_geometry(B.curve, plan.loops[l]);
        const cplx y_old = B.loops[l].y_anchor;
        B.loops[l] = loop_component(B.curve, B.loop_geom[l], opt);
        carry(B.loops[l], y_old);
    }
    for (std::size_t j = 0; j < plan.gaps.size(); ++j) {
        auto update = [&](GapEnd& e, const GapEnd& other) {
            const double phi0 = e.phi, psi0 = e.psi;
            place_end(B.curve, plan, B.loop_geom, e);
            e.psi = std::arg(other.center - e.center);
            if (e.loop >= 0) e.span += wrap_angle(e.psi - psi0) - wrap_angle(e.phi - phi0);
        };
        // psi needs the other end's new center
        GapEnd a_new = B.gap_ends[j].first, b_new = B.gap_ends[j].second;
        place_end(B.curve, plan, B.loop_geom, a_new);
        place_end(B.curve, plan, B.loop_geom, b_new);
        GapEnd a_upd = B.gap_ends[j].first, b_upd = B.gap_ends[j].second;
        update(a_upd, b_new);
        update(b_upd, a_new);
        B.gap_ends[j] = {a_upd, b_upd};
        const cplx y_old = B.gaps[j].y_anchor;
        B.gaps[j] = connecting_path(B.curve, a_upd, b_upd, gap_skip(B.curve, plan, a_upd, b_upd), opt);
        carry(B.gaps[j], y_old);
    }
    const Eigen::MatrixXi K = all_intersections(B.curve, B.components(), opt.track);
    if (K != basis.component_intersections)
        throw Error(ErrorKind::PlanInconsistent, "intersection numbers changed under deformation");
    // FNV-1a over the new root positions
    std::uint64_t h = basis.branch_tag ? basis.branch_tag : 1469598103934665603ull;
    auto mix = [&](double x) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &x, sizeof x);
        for (unsigned char b : bytes) h = (h ^ b) * 1099511628211ull;
    };
    for (cplx r : moved) {
        mix(r.real());
        mix(r.imag());
    }
    mix(new_lead.real());
    mix(new_lead.imag());
    B.branch_tag = h;
    return B;
}

} // namespace sklab
