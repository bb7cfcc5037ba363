#include "sklab/quadrature.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <queue>

#include "sklab/error.hpp"

namespace sklab {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss 7-point weights at kXgk[1], [3], [5], [7]
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    std::size_t sub;
    double u0, u1;
    int depth;
    std::vector<cplx> val;
    std::vector<double> err, abs;
    double score = 0.0;
};

struct ByScore {
    bool operator()(const Interval* a, const Interval* b) const { return a->score < b->score; }
};

class Evaluator {
public:
    Evaluator(const LiftedPath& lp, std::size_t dim, const LiftedIntegrand& f)
        : lp_(lp), dim_(dim), f_(f), buf_(dim) {}

    void point(std::size_t k, double u, std::vector<cplx>& out) {
        const SubPiece& sp = lp_.subpieces()[k];
        const Piece& p = lp_.path().pieces[sp.piece];
        const HyperellipticCurve& c = lp_.curve();
        cplx z, y, dz;
        if (sp.root_end == 0) {
            const double s = sp.s0 + (sp.s1 - sp.s0) * u;
            z = piece_point(p, s);
            dz = piece_tangent(p, s) * (sp.s1 - sp.s0);
            y = continue_branch(c.eval_Q(z), u < 0.5 ? sp.y0 : sp.y1);
        } else {
            const auto& g = std::get<Segment>(p);
            const double w = (sp.s1 - sp.s0) * u * u;
            const cplx offset = sp.root_end < 0 ? (g.b - g.a) * w : (g.a - g.b) * w;
            z = sp.root + offset;
            dz = (g.b - g.a) * (2.0 * (sp.s1 - sp.s0) * u);
            y = continue_branch(c.eval_Q(sp.root, offset), sp.root_end < 0 ? sp.y1 : sp.y0);
        }
        f_(z, y, buf_);
        for (std::size_t i = 0; i < dim_; ++i) out[i] = buf_[i] * dz;
    }

    void rule(Interval& iv) {
        const double c = 0.5 * (iv.u0 + iv.u1), h = 0.5 * (iv.u1 - iv.u0);
        std::vector<cplx> fv(dim_);
        iv.val.assign(dim_, cplx{});
        iv.err.assign(dim_, 0.0);
        iv.abs.assign(dim_, 0.0);
        std::vector<cplx> gauss(dim_, cplx{});
        auto add = [&](double u, double wk, double wg) {
            point(iv.sub, u, fv);
            for (std::size_t i = 0; i < dim_; ++i) {
                iv.val[i] += wk * fv[i];
                iv.abs[i] += wk * std::abs(fv[i]);
                gauss[i] += wg * fv[i];
            }
        };
        add(c, kWgk[7], kWg[3]);
        for (int j = 0; j < 7; ++j) {
            const double wg = (j % 2 == 1) ? kWg[j / 2] : 0.0;
            add(c - h * kXgk[j], kWgk[j], wg);
            add(c + h * kXgk[j], kWgk[j], wg);
        }
        for (std::size_t i = 0; i < dim_; ++i) {
            iv.val[i] *= h;
            iv.abs[i] *= h;
            iv.err[i] = std::abs(iv.val[i] - h * gauss[i]);
        }
    }

private:
    const LiftedPath& lp_;
    std::size_t dim_;
    const LiftedIntegrand& f_;
    std::vector<cplx> buf_;
};

} // namespace

QuadResult integrate_lifted(const LiftedPath& path, std::size_t dim, const LiftedIntegrand& f, const QuadConfig& cfg) {
    Evaluator ev(path, dim, f);
    std::deque<Interval> store;
    std::vector<double> err(dim, 0.0), l1(dim, 0.0);
    std::vector<cplx> total(dim, cplx{});
    for (std::size_t k = 0; k < path.subpieces().size(); ++k) {
        store.push_back({k, 0.0, 1.0, 0, {}, {}, {}});
        ev.rule(store.back());
    }
    std::vector<bool> live(store.size(), true);
    auto tolerance = [&](std::size_t i) { return std::max(cfg.abs_tol, cfg.rel_tol * l1[i]); };
    auto resum = [&] {
        std::fill(err.begin(), err.end(), 0.0);
        std::fill(l1.begin(), l1.end(), 0.0);
        std::fill(total.begin(), total.end(), cplx{});
        for (std::size_t k = 0; k < store.size(); ++k) {
            if (!live[k]) continue;
            for (std::size_t i = 0; i < dim; ++i) {
                err[i] += store[k].err[i];
                l1[i] += store[k].abs[i];
                total[i] += store[k].val[i];
            }
        }
    };
    auto score = [&](Interval& iv) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) s = std::max(s, iv.err[i] / tolerance(i));
        iv.score = s;
    };
    resum();
    std::priority_queue<std::pair<double, std::size_t>> heap;
    for (std::size_t k = 0; k < store.size(); ++k) {
        score(store[k]);
        heap.push({store[k].score, k});
    }
    for (std::size_t iter = 0;; ++iter) {
        bool done = true;
        for (std::size_t i = 0; i < dim; ++i)
            if (err[i] > tolerance(i)) done = false;
        if (done) break;
        if (heap.empty() || store.size() > cfg.max_intervals)
            throw Error(ErrorKind::ToleranceNotMet, "quadrature interval budget exhausted");
        const std::size_t k = heap.top().second;
        heap.pop();
        Interval& iv = store[k];
        if (iv.depth >= cfg.max_depth)
            throw Error(ErrorKind::ToleranceNotMet, "quadrature bisection depth exceeded");
        const double um = 0.5 * (iv.u0 + iv.u1);
        Interval left{iv.sub, iv.u0, um, iv.depth + 1, {}, {}, {}};
        Interval right{iv.sub, um, iv.u1, iv.depth + 1, {}, {}, {}};
        ev.rule(left);
        ev.rule(right);
        for (std::size_t i = 0; i < dim; ++i) {
            err[i] += left.err[i] + right.err[i] - iv.err[i];
            l1[i] += left.abs[i] + right.abs[i] - iv.abs[i];
            total[i] += left.val[i] + right.val[i] - iv.val[i];
        }
        live[k] = false;
        store.push_back(std::move(left));
        live.push_back(true);
        score(store.back());
        heap.push({store.back().score, store.size() - 1});
        store.push_back(std::move(right));
        live.push_back(true);
        score(store.back());
        heap.push({store.back().score, store.size() - 1});
        if (iter % 256 == 255) resum();
    }
    resum();
    QuadResult r;
    r.value = total;
    r.error = err;
    r.l1 = l1;
    for (bool b : live) r.intervals += b;
    return r;
}

} // namespace sklab
