#include "sklab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sklab/error.hpp"

namespace sklab {

BranchData classify_branch_points(const RootSet& rs, double cluster_tol) {
    const std::vector<cplx> flat = rs.flat();
    const std::size_t n = flat.size();
    std::vector<int> label(n, -1);
    int next = 0;
    // single linkage
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] >= 0) continue;
        label[i] = next;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j) {
                if (label[j] >= 0) continue;
                const double scale = std::max({1.0, std::abs(flat[k]), std::abs(flat[j])});
                if (std::abs(flat[k] - flat[j]) <= cluster_tol * scale) {
                    label[j] = next;
                    stack.push_back(j);
                }
            }
        }
        ++next;
    }
    BranchData out;
    out.clusters.resize(next);
    for (std::size_t i = 0; i < n; ++i) out.clusters[label[i]].members.push_back(flat[i]);
    for (auto& c : out.clusters) {
        c.center = std::accumulate(c.members.begin(), c.members.end(), cplx{}) / double(c.members.size());
        c.parity = c.members.size() % 2 ? Parity::odd : Parity::even;
        if (c.parity == Parity::odd) ++out.r_odd;
    }
    return out;
}

int genus(const BranchData& b) {
    std::size_t total = 0;
    for (const auto& c : b.clusters) total += c.members.size();
    if (total % 2 || b.r_odd % 2) throw Error(ErrorKind::OddTotalParity, "odd total branch multiplicity");
    if (b.r_odd == 0) throw Error(ErrorKind::DegenerateCover, "no odd branch points; cover splits");
    return b.r_odd / 2 - 1;
}

HyperellipticCurve HyperellipticCurve::from_roots(std::vector<cplx> roots, cplx lead, double cluster_tol) {
    if (roots.size() % 2) throw Error(ErrorKind::OddTotalParity, "Q must have even degree");
    if (roots.empty()) throw Error(ErrorKind::DegenerateCover, "constant Q");
    if (lead == cplx{}) throw Error(ErrorKind::ConfigError, "zero leading coefficient");
    HyperellipticCurve c;
    c.lead_ = lead;
    c.roots_ = std::move(roots);
    c.q_ = ComplexPoly::from_roots(c.roots_, lead);
    RootSet rs;
    for (cplx r : c.roots_) rs.roots.push_back({r, 1});
    c.branch_ = classify_branch_points(rs, cluster_tol);
    return c;
}

HyperellipticCurve HyperellipticCurve::from_poly(const ComplexPoly& q, RootOptions opt, double cluster_tol) {
    if (q.degree() % 2) throw Error(ErrorKind::OddTotalParity, "Q must have even degree");
    const RootSet rs = find_roots(q, opt);
    HyperellipticCurve c = from_roots(rs.flat(), q.leading(), cluster_tol);
    c.q_ = q;
    return c;
}

cplx HyperellipticCurve::eval_Q(cplx z) const {
    cplx v = lead_;
    for (cplx r : roots_) v *= z - r;
    return v;
}

cplx HyperellipticCurve::eval_Q(cplx base, cplx offset) const {
    cplx v = lead_;
    for (cplx r : roots_) v *= (base - r) + offset;
    return v;
}

double HyperellipticCurve::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < roots_.size(); ++i)
        for (std::size_t j = i + 1; j < roots_.size(); ++j) d = std::max(d, std::abs(roots_[i] - roots_[j]));
    return d > 0.0 ? d : 1.0;
}

HyperellipticCurve HyperellipticCurve::scaled(cplx l) const {
    HyperellipticCurve c = *this;
    c.lead_ *= l;
    c.q_ = c.q_ * l;
    return c;
}

MeromorphicForm pullback_quadratic(const ComplexPoly& f) { return {f}; }

cplx continue_branch(cplx q_value, cplx y_ref) {
    const cplx y = std::sqrt(q_value);
    return (y * std::conj(y_ref)).real() >= 0.0 ? y : -y;
}

namespace {

bool near_point(cplx a, cplx b, double scale) { return std::abs(a - b) <= 1e-13 * scale; }

struct Subdivider {
    const std::vector<cplx>& roots;
    int max_depth;
    std::vector<SubPiece>& out;

    void run(const Piece& p, std::size_t idx, double s0, double s1, const std::vector<bool>& excluded,
             double piece_len, int depth) {
        const cplx zm = piece_point(p, 0.5 * (s0 + s1));
        const double L = piece_len * (s1 - s0);
        double bound = 0.0;
        bool split = false;
        for (std::size_t j = 0; j < roots.size() && !split; ++j) {
            if (excluded[j]) continue;
            const double d = std::abs(zm - roots[j]) - 0.5 * L;
            if (d <= 0.0) split = true;
            else bound += L / d;
        }
        if (!split && bound <= 0.5 * std::numbers::pi) {
            SubPiece sp;
            sp.piece = idx;
            sp.s0 = s0;
            sp.s1 = s1;
            out.push_back(sp);
            return;
        }
        if (depth >= max_depth)
            throw Error(ErrorKind::StepLimitExceeded, "sheet tracking subdivision exceeded depth limit");
        const double sm = 0.5 * (s0 + s1);
        run(p, idx, s0, sm, excluded, piece_len, depth + 1);
        run(p, idx, sm, s1, excluded, piece_len, depth + 1);
    }
};

} // namespace

LiftedPath::LiftedPath(const HyperellipticCurve& curve, const Path& path, std::size_t anchor_piece,
                       double anchor_s, cplx y_anchor, TrackOptions opt)
    : curve_(&curve), path_(path) {
    if (path_.pieces.empty()) throw Error(ErrorKind::NoRoute, "empty path");
    const auto& roots = curve.roots();
    const double scale = std::max(1.0, curve.diameter());

    // Endpoints on roots: detect, snap, and collect the coincident roots.
    std::vector<bool> at_start(roots.size(), false), at_end(roots.size(), false);
    cplx start_root{}, end_root{};
    int start_mult = 0, end_mult = 0;
    auto detect = [&](bool is_start) {
        const cplx z = is_start ? path_.start() : path_.end();
        std::vector<bool>& mask = is_start ? at_start : at_end;
        int found = -1;
        for (std::size_t j = 0; j < roots.size(); ++j)
            if (near_point(z, roots[j], scale)) {
                if (found < 0 || std::abs(z - roots[j]) < std::abs(z - roots[found])) found = int(j);
            }
        if (found < 0) return;
        const cplx r = roots[found];
        int mult = 0;
        for (std::size_t j = 0; j < roots.size(); ++j)
            if (roots[j] == r) {
                mask[j] = true;
                ++mult;
            }
        Piece& pc = is_start ? path_.pieces.front() : path_.pieces.back();
        auto* seg = std::get_if<Segment>(&pc);
        if (!seg) throw Error(ErrorKind::PathThroughBranchPoint, "arc piece ends on a branch point");
        (is_start ? seg->a : seg->b) = r;
        (is_start ? path_.start_at_root : path_.end_at_root) = true;
        (is_start ? start_root : end_root) = r;
        (is_start ? start_mult : end_mult) = mult;
    };
    detect(true);
    if (!path_.closed()) detect(false);

    // Clearance from roots away from the endpoints. Roots close to an endpoint
    // root (collision partners) only need to stay a fraction of that gap away.
    const double margin = opt.clearance > 0.0 ? opt.clearance : curve.clearance();
    for (std::size_t j = 0; j < roots.size(); ++j) {
        if (at_start[j] || at_end[j]) continue;
        double need = margin;
        if (start_mult) need = std::min(need, 0.5 * std::abs(roots[j] - start_root));
        if (end_mult) need = std::min(need, 0.5 * std::abs(roots[j] - end_root));
        if (path_.distance_to(roots[j]) < need)
            throw Error(ErrorKind::PathThroughBranchPoint, "path passes too close to a branch point");
    }

    const std::size_t np = path_.pieces.size();
    if (anchor_piece >= np || anchor_s < 0.0 || anchor_s > 1.0)
        throw Error(ErrorKind::NoRoute, "anchor outside path");

    Subdivider sub{roots, opt.max_depth, subs_};
    std::size_t anchor_boundary = 0;
    for (std::size_t i = 0; i < np; ++i) {
        const Piece& p = path_.pieces[i];
        std::vector<bool> excluded(roots.size(), false);
        if (std::holds_alternative<Segment>(p)) {
            for (std::size_t j = 0; j < roots.size(); ++j)
                excluded[j] = (i == 0 && at_start[j]) || (i + 1 == np && at_end[j]);
        }
        const double len = piece_length(p);
        if (i == anchor_piece && anchor_s == 0.0) anchor_boundary = subs_.size();
        if (i == anchor_piece && anchor_s > 0.0 && anchor_s < 1.0) {
            sub.run(p, i, 0.0, anchor_s, excluded, len, 0);
            anchor_boundary = subs_.size();
            sub.run(p, i, anchor_s, 1.0, excluded, len, 0);
        } else {
            sub.run(p, i, 0.0, 1.0, excluded, len, 0);
        }
        if (i == anchor_piece && anchor_s == 1.0) anchor_boundary = subs_.size();
    }
    if (path_.start_at_root) {
        subs_.front().root_end = -1;
        subs_.front().root = start_root;
        subs_.front().root_multiplicity = start_mult;
    }
    if (path_.end_at_root) {
        // a single sub-piece spanning root to root is split so each half has one root end
        if (subs_.size() == 1) {
            SubPiece a = subs_[0], b = subs_[0];
            a.s1 = b.s0 = 0.5 * (a.s0 + a.s1);
            subs_ = {a, b};
            if (anchor_boundary > 0) anchor_boundary = 2;
        }
        subs_.back().root_end = 1;
        subs_.back().root = end_root;
        subs_.back().root_multiplicity = end_mult;
    }
    if ((anchor_boundary == 0 && path_.start_at_root) || (anchor_boundary == subs_.size() && path_.end_at_root))
        throw Error(ErrorKind::PathThroughBranchPoint, "anchor sits on a branch point");

    auto z_at = [&](std::size_t k, bool end) {
        const SubPiece& sp = subs_[k];
        return piece_point(path_.pieces[sp.piece], end ? sp.s1 : sp.s0);
    };
    const cplx za = anchor_boundary < subs_.size() ? z_at(anchor_boundary, false) : z_at(subs_.size() - 1, true);
    cplx prev = continue_branch(curve.eval_Q(za), y_anchor);
    for (std::size_t k = anchor_boundary; k < subs_.size(); ++k) {
        subs_[k].y0 = prev;
        subs_[k].y1 = subs_[k].root_end == 1 ? cplx{} : continue_branch(curve.eval_Q(z_at(k, true)), prev);
        prev = subs_[k].y1;
    }
    prev = continue_branch(curve.eval_Q(za), y_anchor);
    for (std::size_t k = anchor_boundary; k-- > 0;) {
        subs_[k].y1 = prev;
        subs_[k].y0 = subs_[k].root_end == -1 ? cplx{} : continue_branch(curve.eval_Q(z_at(k, false)), prev);
        prev = subs_[k].y0;
    }
}

cplx LiftedPath::y_at(std::size_t piece, double s) const {
    for (const SubPiece& sp : subs_) {
        if (sp.piece != piece || s < sp.s0 || s > sp.s1) continue;
        cplx ref;
        if (sp.root_end == -1) ref = sp.y1;
        else if (sp.root_end == 1) ref = sp.y0;
        else ref = (s - sp.s0 <= sp.s1 - s) ? sp.y0 : sp.y1;
        const cplx z = piece_point(path_.pieces[piece], s);
        return continue_branch(curve_->eval_Q(z), ref);
    }
    throw Error(ErrorKind::NoRoute, "parameter outside lifted path");
}

SheetTrack continue_sqrt(const HyperellipticCurve& curve, const Path& path, cplx y0, TrackOptions opt) {
    LiftedPath lp(curve, path, 0, 0.0, y0, opt);
    SheetTrack t;
    for (const SubPiece& sp : lp.subpieces())
        t.samples.push_back({piece_point(lp.path().pieces[sp.piece], sp.s0), sp.y0});
    const SubPiece& last = lp.subpieces().back();
    t.samples.push_back({piece_point(lp.path().pieces[last.piece], last.s1), last.y1});
    const cplx ye = lp.y_end();
    const cplx ref = path.closed() ? lp.y_start() : std::sqrt(curve.eval_Q(lp.path().end()));
    t.final_sign = (ye * std::conj(ref)).real() >= 0.0 ? 1 : -1;
    return t;
}

OrderEstimate vanishing_order(const HyperellipticCurve& curve, const std::optional<MeromorphicForm>& form,
                              const Cluster& cluster) {
    const bool odd = cluster.parity == Parity::odd;
    const cplx dir = std::polar(1.0, 0.3);
    std::vector<double> xs, ys;
    for (int k = 0; k <= 12; ++k) {
        const double t = std::pow(10.0, -2.0 - 0.25 * k);
        const cplx off = dir * (odd ? t * t : t);
        const double dzdt = odd ? 2.0 * t : 1.0;
        const double absy = std::sqrt(std::abs(curve.eval_Q(cluster.center, off)));
        double g;
        if (!form) g = absy * dzdt;
        else g = std::abs(form->numerator.eval(cluster.center + off)) / (2.0 * absy) * dzdt;
        if (!(g > 0.0) || !std::isfinite(g))
            throw Error(ErrorKind::FitUnstable, "form vanishes identically or blows up along the probe ray");
        xs.push_back(std::log(t));
        ys.push_back(std::log(g));
    }
    const double n = double(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    OrderEstimate e;
    e.slope = sxy / sxx;
    e.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    e.order = int(std::lround(e.slope));
    // order 0 leaves almost nothing to explain: judge by the residual instead
    const double rms = std::sqrt(std::max(0.0, syy - sxy * sxy / sxx) / n);
    if ((e.r_squared < 0.999 && rms > 1e-3) || std::abs(e.slope - e.order) > 0.1)
        throw Error(ErrorKind::FitUnstable, "log-log fit of local order is not clean");
    return e;
}

} // namespace sklab
