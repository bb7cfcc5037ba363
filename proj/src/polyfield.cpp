#include "sklab/polyfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sklab/error.hpp"

namespace sklab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// |p(z)| / sum |c_k| |z|^k
double backward_error(const ComplexPoly& p, cplx z) {
    const auto& c = p.coeffs();
    cplx acc{};
    double scale = 0.0;
    const double az = std::abs(z);
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * z + *it;
        scale = scale * az + std::abs(*it);
    }
    return scale > 0.0 ? std::abs(acc) / scale : 0.0;
}

void eval_with_derivative(const ComplexPoly& p, cplx z, cplx& value, cplx& deriv) {
    const auto& c = p.coeffs();
    value = 0.0;
    deriv = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        deriv = deriv * z + value;
        value = value * z + *it;
    }
}

// Runs Aberth sweeps in place; each root is frozen once its backward error
// reaches rounding level.
void aberth(const ComplexPoly& p, std::vector<cplx>& z, int max_iter) {
    const std::size_t n = z.size();
    std::vector<bool> done(n, false);
    for (int it = 0; it < max_iter; ++it) {
        bool all_done = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            cplx v, d;
            eval_with_derivative(p, z[i], v, d);
            if (backward_error(p, z[i]) <= 4.0 * kEps) {
                done[i] = true;
                continue;
            }
            all_done = false;
            cplx sum{};
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) sum += 1.0 / (z[i] - z[j]);
            const cplx ratio = v / d;
            cplx w = ratio / (1.0 - ratio * sum);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = cplx{1e-8, 1e-8};
            z[i] -= w;
            if (std::abs(w) <= 2.0 * kEps * std::max(1.0, std::abs(z[i]))) done[i] = true;
        }
        if (all_done) break;
    }
}

cplx newton_polish(const ComplexPoly& p, cplx z, int steps) {
    double best = backward_error(p, z);
    for (int k = 0; k < steps; ++k) {
        cplx v, d;
        eval_with_derivative(p, z, v, d);
        if (d == cplx{}) break;
        const cplx cand = z - v / d;
        const double be = backward_error(p, cand);
        if (!(be < best)) break;
        best = be;
        z = cand;
    }
    return z;
}

} // namespace

ComplexPoly::ComplexPoly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

ComplexPoly::ComplexPoly(std::initializer_list<cplx> coeffs) : coeffs_(coeffs) { trim(); }

ComplexPoly ComplexPoly::from_roots(std::span<const cplx> roots, cplx lead) {
    std::vector<cplx> c{lead};
    for (const cplx r : roots) {
        c.push_back(0.0);
        for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
        c[0] = -r * c[0];
    }
    return ComplexPoly(std::move(c));
}

ComplexPoly ComplexPoly::monomial(int k, cplx c) {
    std::vector<cplx> v(static_cast<std::size_t>(k) + 1, 0.0);
    v.back() = c;
    return ComplexPoly(std::move(v));
}

cplx ComplexPoly::coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[static_cast<std::size_t>(k)]
                                                             : cplx{};
}

cplx ComplexPoly::eval(cplx z) const {
    cplx acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

ComplexPoly ComplexPoly::derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<cplx> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return ComplexPoly(std::move(d));
}

ComplexPoly& ComplexPoly::operator+=(const ComplexPoly& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    trim();
    return *this;
}

ComplexPoly& ComplexPoly::operator-=(const ComplexPoly& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
    trim();
    return *this;
}

ComplexPoly& ComplexPoly::operator*=(cplx s) {
    for (auto& c : coeffs_) c *= s;
    trim();
    return *this;
}

ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> c(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return ComplexPoly(std::move(c));
}

void ComplexPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == cplx{}) coeffs_.pop_back();
}

int RootSet::total_multiplicity() const {
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
}

std::vector<cplx> RootSet::flat() const {
    std::vector<cplx> out;
    for (const auto& r : roots)
        for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value);
    return out;
}

std::vector<cplx> refine_roots(const ComplexPoly& p, std::span<const cplx> guesses, RootOptions opt) {
    if (static_cast<int>(guesses.size()) != p.degree())
        throw Error(ErrorKind::NonConvergence, "refine_roots: guess count does not match degree");
    std::vector<cplx> z(guesses.begin(), guesses.end());
    aberth(p, z, opt.max_iter);
    for (auto& r : z) r = newton_polish(p, r, 3);
    return z;
}

RootSet find_roots(const ComplexPoly& p, RootOptions opt) {
    const int n = p.degree();
    if (n < 1) throw Error(ErrorKind::NonConvergence, "find_roots: degree must be at least 1");

    const auto& c = p.coeffs();
    auto finish = [&](RootSet out) {
        std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
            return a.value.real() != b.value.real() ? a.value.real() < b.value.real()
                                                    : a.value.imag() < b.value.imag();
        });
        out.residual = 0.0;
        for (const auto& r : out.roots) out.residual = std::max(out.residual, backward_error(p, r.value));
        if (out.residual > opt.tol)
            throw Error(ErrorKind::NonConvergence,
                        "find_roots: residual " + std::to_string(out.residual) + " above tolerance");
        return out;
    };

    // exact roots at 0 are split off: the normwise backward error degenerates there
    std::size_t zeros = 0;
    while (c[zeros] == cplx{}) ++zeros;
    if (zeros > 0) {
        RootSet out;
        if (static_cast<int>(zeros) < n)
            out = find_roots(ComplexPoly(std::vector<cplx>(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end())), opt);
        out.roots.push_back({0.0, static_cast<int>(zeros)});
        return finish(std::move(out));
    }

    const cplx lead = c.back();
    const cplx center = -c[static_cast<std::size_t>(n - 1)] / (static_cast<double>(n) * lead);
    double radius = 0.0;
    for (int k = 0; k < n; ++k) {
        const double a = std::abs(c[static_cast<std::size_t>(k)] / lead);
        if (a > 0.0) radius = std::max(radius, std::pow(a, 1.0 / (n - k)));
    }
    radius = std::max(radius, 1e-3);

    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        z[static_cast<std::size_t>(k)] =
            center + std::polar(radius, 0.4 + 2.0 * std::numbers::pi * k / n);
    aberth(p, z, opt.max_iter);

    // Cluster: largest multiplicities first. Groups within tol^(1/m) merge
    // outright; wider groups (Aberth resolves an m-fold root only to about
    // eps^(1/m)) merge when the polished centre is itself a root to tol.
    std::vector<bool> used(z.size(), false);
    RootSet out;
    for (int m = n; m >= 2; --m) {
        const double rad = std::pow(opt.tol, 1.0 / m);
        const double wide = std::pow(1e4 * opt.tol, 1.0 / m);
        ComplexPoly dm = p;
        for (int k = 0; k < m - 1; ++k) dm = dm.derivative();
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (used[i]) continue;
            std::vector<std::size_t> near;
            const double scale = std::max(1.0, std::abs(z[i]));
            for (std::size_t j = 0; j < z.size(); ++j)
                if (!used[j] && std::abs(z[j] - z[i]) <= wide * scale) near.push_back(j);
            if (static_cast<int>(near.size()) < m) continue;
            std::sort(near.begin(), near.end(), [&](std::size_t a, std::size_t b) {
                return std::abs(z[a] - z[i]) < std::abs(z[b] - z[i]);
            });
            near.resize(static_cast<std::size_t>(m));
            cplx mean{};
            for (auto j : near) mean += z[j];
            mean /= static_cast<double>(m);
            const cplx best = newton_polish(dm, mean, 3);
            const bool tight = std::abs(z[near.back()] - z[i]) <= rad * scale;
            if (!tight && backward_error(p, best) > opt.tol) continue;
            for (auto j : near) used[j] = true;
            out.roots.push_back({best, m});
        }
    }
    for (std::size_t i = 0; i < z.size(); ++i)
        if (!used[i]) out.roots.push_back({newton_polish(p, z[i], 3), 1});
    return finish(std::move(out));
}

std::vector<int> match_roots(std::span<const cplx> prev, std::span<const cplx> next, double guard_ratio) {
    const std::size_t n = prev.size();
    if (next.size() != n) throw Error(ErrorKind::AmbiguousMatching, "match_roots: cardinality mismatch");

    std::vector<int> perm(n, -1);
    std::vector<bool> taken(n, false);
    for (std::size_t round = 0; round < n; ++round) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (perm[i] >= 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (taken[j]) continue;
                const double d = std::abs(prev[i] - next[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        perm[bi] = static_cast<int>(bj);
        taken[bj] = true;
    }

    // Collision guard: the chosen partner must be clearly nearer than any other.
    for (std::size_t i = 0; i < n; ++i) {
        const double chosen = std::abs(prev[i] - next[static_cast<std::size_t>(perm[i])]);
        if (chosen == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (static_cast<int>(j) == perm[i]) continue;
            if (next[j] == next[static_cast<std::size_t>(perm[i])]) continue; // repeated root
            if (std::abs(prev[i] - next[j]) < guard_ratio * chosen)
                throw Error(ErrorKind::AmbiguousMatching,
                            "match_roots: root " + std::to_string(i) + " has no clear partner; refine the step");
        }
    }
    return perm;
}

std::vector<int> match_roots(const RootSet& prev, const RootSet& next, double guard_ratio) {
    const auto a = prev.flat();
    const auto b = next.flat();
    return match_roots(std::span<const cplx>(a), std::span<const cplx>(b), guard_ratio);
}

} // namespace sklab
