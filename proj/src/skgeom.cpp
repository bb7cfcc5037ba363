#include "sklab/skgeom.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "sklab/error.hpp"

namespace sklab {

SKCoordinates coordinates(const CycleBasis& basis, const QuadConfig& cfg) {
    const int g = basis.genus();
    const CycleIntegrals ci = cycle_integrals(basis, {}, true, cfg);
    return {ci.theta.head(g), ci.theta.tail(g), basis.branch_tag};
}

SKCoordinates coordinates(const PeriodData& P, std::uint64_t tag) { return {P.z, P.w, tag}; }

std::vector<bool> vanishing_tags(const CycleBasis& basis) {
    const int g = basis.genus();
    std::vector<bool> out(g, false);
    for (int i = 0; i < g; ++i) {
        bool any = false, all = true;
        for (std::size_t l = 0; l < basis.loops.size(); ++l) {
            if (!basis.coefficients(i, int(l))) continue;
            any = true;
            if (basis.plan.loops[l].kind != LoopKind::vanishing) all = false;
        }
        out[i] = any && all;
    }
    return out;
}

SKMetricSample metric(const Eigen::MatrixXcd& tau, const std::vector<bool>& vanishing) {
    SKMetricSample s;
    const Eigen::MatrixXd im = tau.imag();
    s.symmetry_defect = (tau - tau.transpose()).cwiseAbs().maxCoeff();
    s.gram = 0.5 * (im + im.transpose());
    for (int i = 0; i < int(vanishing.size()); ++i) (vanishing[i] ? s.transverse : s.tangential).push_back(i);
    auto block = [&](const std::vector<int>& r, const std::vector<int>& c) {
        Eigen::MatrixXd m(r.size(), c.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j) m(i, j) = s.gram(r[i], c[j]);
        return m;
    };
    s.A = block(s.tangential, s.tangential);
    s.B = block(s.tangential, s.transverse);
    s.D = block(s.transverse, s.transverse);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.gram);
    s.min_eig = es.eigenvalues()(0);
    if (s.A.size()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(s.A);
        s.min_eig_A = ea.eigenvalues()(0);
    }
    return s;
}

PotentialSample potential(const SKCoordinates& c) {
    cplx K{};
    for (int i = 0; i < c.z.size(); ++i)
        K += cplx(0, 0.25) * (c.z(i) * std::conj(c.w(i)) - c.w(i) * std::conj(c.z(i)));
    return {K.real(), K.imag(), {}};
}

Eigen::VectorXcd potential_gradient(const SKCoordinates& c, const Eigen::MatrixXcd& tau) {
    const int g = int(c.z.size());
    Eigen::VectorXcd out(g);
    for (int j = 0; j < g; ++j) {
        cplx s = std::conj(c.w(j));
        for (int i = 0; i < g; ++i) s -= tau(i, j) * std::conj(c.z(i));
        out(j) = cplx(0, 0.25) * s;
    }
    return out;
}

ModelRatios compare_model(const SKMetricSample& sample, const SKCoordinates& coords, bool log_weight) {
    const int g = int(sample.gram.rows());
    Eigen::VectorXd weight = Eigen::VectorXd::Ones(g);
    if (log_weight) {
        for (int k : sample.transverse) {
            const double a = std::abs(coords.z(k));
            if (!(a < 1.0)) throw Error(ErrorKind::ModelSingular, "transverse coordinate with |z| >= 1");
            weight(k) = -std::log(a);
        }
    }
    // gram v = lambda diag(weight) v  <=>  W^-1/2 gram W^-1/2 u = lambda u
    const Eigen::VectorXd is = weight.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd M = is.asDiagonal() * sample.gram * is.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    return {es.eigenvalues()(0), es.eigenvalues()(g - 1)};
}

RadialReport radial_scan(const Family& family, const FamilyPoint& base, const std::vector<double>& moduli,
                         const std::vector<double>& args, const QuadConfig& cfg) {
    RadialReport rep;
    FamilyPoint p1 = base;
    p1.l = 1.0;
    const CycleBasis B1 = build_cycle_basis(family.curve(p1), family.plan);
    PeriodOptions po;
    po.quad = cfg;
    auto eval = [&](const CycleBasis& B, cplx l) {
        const PeriodData P = period_matrices(B, po);
        RadialRow r{l, P.tau, P.z, P.w, 0.0};
        const PotentialSample ps = potential(coordinates(P));
        r.K = ps.K;
        rep.potential_imag = std::max(rep.potential_imag, std::abs(ps.imag_residue) / std::max(1e-300, std::abs(ps.K)));
        return r;
    };
    const RadialRow one = eval(B1, 1.0);
    rep.K1 = one.K;
    rep.C0 = 0.5 * one.K;
    for (double a : args) {
        FamilyPoint pa = p1;
        pa.l = std::polar(1.0, a);
        const CycleBasis Ba = transport(B1, family, p1, pa);
        for (double m : moduli) {
            FamilyPoint pm = pa;
            pm.l = std::polar(m, a);
            const CycleBasis Bm = transport(Ba, family, pa, pm);
            rep.rows.push_back(eval(Bm, pm.l));
        }
    }
    // per-entry exponent fit of log|z| against log|l|
    const int g = int(one.z.size());
    double worst = 0.0, worst_exp = 0.5;
    for (int i = 0; i < g; ++i) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = double(rep.rows.size());
        for (const auto& r : rep.rows) {
            const double x = std::log(std::abs(r.l)), y = std::log(std::abs(r.z(i)));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if (std::abs(slope - 0.5) >= worst) {
            worst = std::abs(slope - 0.5);
            worst_exp = slope;
        }
    }
    rep.exponent = worst_exp;
    rep.exponent_defect = worst;
    rep.cone_angle = 2.0 * std::numbers::pi * worst_exp;
    for (const auto& r : rep.rows) {
        rep.tau_residual = std::max(rep.tau_residual, (r.tau - one.tau).cwiseAbs().maxCoeff());
        rep.k_scaling_residual =
            std::max(rep.k_scaling_residual, std::abs(r.K / std::abs(r.l) - one.K) / std::abs(one.K));
    }
    return rep;
}

} // namespace sklab
