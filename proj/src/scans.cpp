#include "sklab/scans.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "sklab/error.hpp"

namespace sklab {

std::vector<double> geometric_ladder(double from, double to, double ratio) {
    std::vector<double> out;
    if (!(from > 0.0) || !(to > 0.0) || !(ratio > 1.0)) throw Error(ErrorKind::ConfigError, "bad ladder");
    for (int k = 0;; ++k) {
        const double v = from * std::pow(ratio, -double(k));
        if (v < to * (1.0 - 1e-9)) break;
        out.push_back(v);
    }
    return out;
}

FitResult fit_log_rate(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 6 || y.size() != n) throw Error(ErrorKind::InsufficientRows, "log-rate fit needs at least 6 rows");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    FitResult f;
    f.rows = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        sse += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 0.0;
    const double se = std::sqrt(sse / double(n - 2) / sxx);
    f.t_stat = se > 0.0 ? std::abs(f.slope) / se : (f.slope != 0.0 ? INFINITY : 0.0);
    f.divergent = f.t_stat > 10.0 && f.r_squared >= 0.999;
    return f;
}

double mean_log_regressor(const LadderRow& row, const std::vector<int>& pairs) {
    double s = 0.0;
    int n = 0;
    for (int k = 0; k < int(row.z_van.size()); ++k) {
        if (!pairs.empty() && std::find(pairs.begin(), pairs.end(), k) == pairs.end()) continue;
        s += -std::log(std::abs(row.z_van[k]));
        ++n;
    }
    return s / n;
}

double drift(const std::vector<double>& v, double floor) {
    double lo = INFINITY, hi = -INFINITY, mean = 0.0;
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        mean += x;
    }
    mean /= double(v.size());
    return (hi - lo) / std::max(std::abs(mean), floor);
}

namespace {

template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    const int t = std::max(1, std::min<int>(threads, int(n)));
    if (t == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(m);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void evaluate_row(const CycleBasis& B, const Family& family, const std::vector<bool>& vanishing,
                  const ScanOptions& opt, LadderRow& row) {
    try {
        PeriodOptions po;
        po.quad = opt.quad;
        po.cond_cap = opt.cond_cap;
        row.periods = period_matrices(B, po);
        row.coords = coordinates(row.periods, B.branch_tag);
        row.metric = metric(row.periods.tau, vanishing);
        row.potential = potential(row.coords);
        row.gradient = potential_gradient(row.coords, row.periods.tau);
        const auto comps = B.components();
        for (int l : family.pair_loops()) {
            const auto& L = B.plan.loops[l];
            const auto& r = B.curve.roots();
            row.z_van.push_back(
                vanishing_theta(B.curve, comps[l], r[L.roots[0]], r[L.roots[1]], opt.quad, B.options.track).theta);
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::IllConditioned) throw;
        row.error = e.what();
    }
}

} // namespace

DegenerationReport degeneration_scan(const Family& family, const std::vector<FamilyPoint>& points,
                                     const ScanOptions& opt) {
    if (points.empty()) throw Error(ErrorKind::InsufficientRows, "empty ladder");
    std::vector<CycleBasis> bases;
    bases.push_back(build_cycle_basis(family.curve(points[0]), family.plan));
    for (std::size_t i = 1; i < points.size(); ++i)
        bases.push_back(transport(bases.back(), family, points[i - 1], points[i]));

    DegenerationReport rep;
    rep.vanishing = vanishing_tags(bases[0]);
    rep.rows.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        rep.rows[i].point = points[i];
        double e = 0.0;
        for (cplx x : points[i].eps) e = std::max(e, std::abs(x));
        rep.rows[i].eps_abs = e;
    }
    parallel_for(points.size(), opt.threads,
                 [&](std::size_t i) { evaluate_row(bases[i], family, rep.vanishing, opt, rep.rows[i]); });

    std::vector<double> x, xe;
    std::vector<const LadderRow*> ok;
    for (const auto& r : rep.rows)
        if (r.error.empty()) {
            ok.push_back(&r);
            x.push_back(mean_log_regressor(r));
            xe.push_back(-std::log(r.eps_abs));
        }
    if (ok.size() >= 6) {
        const int g = int(rep.vanishing.size());
        for (int i = 0; i < g; ++i)
            for (int j = i; j < g; ++j) {
                std::vector<double> y;
                for (const auto* r : ok) y.push_back(r->metric.gram(i, j));
                rep.fits.push_back({i, j, fit_log_rate(x, y)});
                rep.eps_fits.push_back({i, j, fit_log_rate(xe, y)});
            }
    }
    return rep;
}

MonodromyResult monodromy(const Family& family, cplx eps0, int steps, int turns, const ScanOptions& opt) {
    if (steps < 1 || turns < 0) throw Error(ErrorKind::ConfigError, "monodromy needs steps >= 1, turns >= 0");
    MonodromyResult res;
    res.eps0 = eps0;
    res.steps = steps;
    res.turns = turns;
    const FamilyPoint p0 = family.at(eps0);
    const CycleBasis B0 = build_cycle_basis(family.curve(p0), family.plan);
    CycleBasis B = B0;
    FamilyPoint prev = p0;
    const int total = steps * turns;
    for (int k = 1; k <= total; ++k) {
        FamilyPoint next = family.at(eps0 * std::polar(1.0, 2.0 * std::numbers::pi * double(k) / steps));
        if (k % steps == 0) next = p0; // close the loop exactly
        B = transport(B, family, prev, next);
        prev = next;
    }
    PeriodOptions po;
    po.quad = opt.quad;
    po.cond_cap = opt.cond_cap;
    const SKCoordinates c0 = coordinates(B0, opt.quad);
    const SKCoordinates c1 = coordinates(B, opt.quad);
    res.z_before = c0.z;
    res.w_before = c0.w;
    res.w_after = c1.w;
    res.a_return = (c1.z - c0.z).cwiseAbs().maxCoeff();
    for (int k = 0; k < c0.z.size(); ++k) {
        const cplx n = (c1.w(k) - c0.w(k)) / c0.z(k);
        res.n.push_back(n);
        res.n_int.push_back(std::lround(n.real()));
        res.defect = std::max(res.defect, std::abs(n - double(res.n_int.back())));
    }
    return res;
}

std::vector<cplx> perturbed_roots(const HyperellipticCurve& curve, int k, cplx t) {
    const auto& r = curve.roots();
    std::vector<cplx> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        cplx z = r[i];
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            cplx f = curve.eval_Q(z) + t * std::pow(z, k);
            cplx df = 0.0;
            for (std::size_t j = 0; j < r.size(); ++j) {
                cplx p = curve.lead();
                for (std::size_t m = 0; m < r.size(); ++m)
                    if (m != j) p *= z - r[m];
                df += p;
            }
            if (k > 0) df += t * double(k) * std::pow(z, k - 1);
            const cplx dz = f / df;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) throw Error(ErrorKind::NonConvergence, "Newton for perturbed root did not converge");
        out[i] = z;
    }
    return out;
}

JacobianResult jacobian_check(const CycleBasis& basis, const ScanOptions& opt) {
    const int g = basis.genus();
    const auto& r = basis.curve.roots();
    PeriodOptions po;
    po.quad = opt.quad;
    po.cond_cap = opt.cond_cap;
    const PeriodData P = period_matrices(basis, po);
    JacobianResult res;
    res.tau = P.tau;
    const SKCoordinates c0 = coordinates(P);
    res.gradient = potential_gradient(c0, P.tau);

    auto at = [&](int k, cplx t) {
        const CycleBasis B = deform_basis(basis, perturbed_roots(basis.curve, k, t), basis.curve.lead());
        return coordinates(B, opt.quad);
    };
    Eigen::MatrixXcd Jz(g, g), Jw(g, g);
    Eigen::VectorXcd dK(g);
    for (int k = 0; k < g; ++k) {
        double h = INFINITY;
        for (std::size_t i = 0; i < r.size(); ++i) {
            double sep = INFINITY;
            for (std::size_t j = 0; j < r.size(); ++j)
                if (j != i) sep = std::min(sep, std::abs(r[i] - r[j]));
            double dq = 0.0;
            {
                cplx p = 0.0;
                for (std::size_t j = 0; j < r.size(); ++j) {
                    cplx q = basis.curve.lead();
                    for (std::size_t m = 0; m < r.size(); ++m)
                        if (m != j) q *= r[i] - r[m];
                    p += q;
                }
                dq = std::abs(p);
            }
            h = std::min(h, 1e-3 * sep * dq / std::max(std::pow(std::abs(r[i]), k), 1e-300));
        }
        res.steps.push_back(h);
        auto central = [&](cplx dir, double s) {
            const SKCoordinates p = at(k, dir * s), m = at(k, -dir * s);
            const Eigen::VectorXcd dz = (p.z - m.z) / (2.0 * s), dw = (p.w - m.w) / (2.0 * s);
            const double dk = (potential(p).K - potential(m).K) / (2.0 * s);
            return std::tuple{dz, dw, dk};
        };
        auto richardson = [&](cplx dir) {
            auto [z1, w1, k1] = central(dir, h);
            auto [z2, w2, k2] = central(dir, 0.5 * h);
            return std::tuple{Eigen::VectorXcd((4.0 * z2 - z1) / 3.0), Eigen::VectorXcd((4.0 * w2 - w1) / 3.0),
                              (4.0 * k2 - k1) / 3.0};
        };
        auto [dz, dw, kx] = richardson(1.0);
        auto [dzi, dwi, ky] = richardson(cplx(0, 1));
        (void)dzi;
        (void)dwi;
        Jz.col(k) = dz;
        Jw.col(k) = dw;
        dK(k) = 0.5 * cplx(kx, -ky);
    }
    res.tau_fd = (Jw * Jz.inverse()).transpose();
    res.deviation = (res.tau_fd - res.tau).cwiseAbs().maxCoeff() / res.tau.cwiseAbs().maxCoeff();
    // dK/dt_k = sum_j dK/dz^j dz^j/dt_k
    const Eigen::VectorXcd predicted = Jz.transpose() * res.gradient;
    res.gradient_fd = Jz.transpose().partialPivLu().solve(dK);
    res.gradient_deviation = (dK - predicted).cwiseAbs().maxCoeff() / std::max(1e-300, predicted.cwiseAbs().maxCoeff());
    return res;
}

Family random_family(int genus, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    Family f;
    f.name = "random-g" + std::to_string(genus);
    f.kind = FamilyKind::raw;
    for (int k = 0; k < 2 * genus + 2; ++k) f.fixed_roots.push_back(cplx(1.5 * k + jitter(rng), jitter(rng)));
    f.plan = chain_plan(HyperellipticCurve::from_roots(f.fixed_roots));
    return f;
}

} // namespace sklab
