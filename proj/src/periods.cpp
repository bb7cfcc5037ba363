#include "sklab/periods.hpp"

#include <cmath>
#include <numbers>

#include "sklab/error.hpp"

namespace sklab {

namespace {

FormIntegrals integrate_lifted_forms(const LiftedPath& lp, std::span<const ComplexPoly> numerators, bool with_theta,
                                     const QuadConfig& cfg) {
    for (const SubPiece& sp : lp.subpieces()) {
        if (sp.root_end == 0 || sp.root_multiplicity < 2) continue;
        for (const auto& p : numerators)
            if (std::abs(p.eval(sp.root)) > 0.0)
                throw Error(ErrorKind::PoleOnPath, "path ends on a multiple root where the form has a pole");
    }
    const std::size_t nf = numerators.size();
    const std::size_t dim = nf + (with_theta ? 1 : 0);
    const QuadResult q = integrate_lifted(
        lp, dim,
        [&](cplx z, cplx y, std::span<cplx> out) {
            const cplx inv = 0.5 / y;
            for (std::size_t k = 0; k < nf; ++k) out[k] = numerators[k].eval(z) * inv;
            if (with_theta) out[nf] = y;
        },
        cfg);
    FormIntegrals r;
    r.forms.assign(q.value.begin(), q.value.begin() + nf);
    if (with_theta) r.theta = q.value[nf];
    for (double e : q.error) r.error = std::max(r.error, e);
    return r;
}

} // namespace

FormIntegrals integrate_forms(const HyperellipticCurve& curve, const CycleComponent& comp,
                              std::span<const ComplexPoly> numerators, bool with_theta, const QuadConfig& cfg,
                              const TrackOptions& track, double two_sheet_weight) {
    const LiftedPath lp = lift(curve, comp, track);
    FormIntegrals r = integrate_lifted_forms(lp, numerators, with_theta, cfg);
    if (comp.two_sheet) {
        const double w = 2.0 * two_sheet_weight;
        for (auto& v : r.forms) v *= w;
        r.theta *= w;
        r.error *= w;
    }
    return r;
}

Eigen::MatrixXcd dual_basis(const Eigen::MatrixXcd& A, double cond_cap) {
    if (A.rows() != A.cols() || A.rows() == 0) throw Error(ErrorKind::IllConditioned, "a-period matrix not square");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& s = svd.singularValues();
    const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
    if (!(cond <= cond_cap)) throw Error(ErrorKind::IllConditioned, "a-period matrix condition number too large");
    return A.partialPivLu().solve(Eigen::MatrixXcd::Identity(A.rows(), A.cols()));
}

FormIntegrals vanishing_theta(const HyperellipticCurve& curve, const CycleComponent& loop, cplx r1, cplx r2,
                              const QuadConfig& cfg, const TrackOptions& track) {
    const cplx c = 0.5 * (r1 + r2), d = 0.5 * (r1 - r2);
    const LiftedPath lp = lift(curve, loop, track);
    // y = +-(z-c) sqrt(R) sqrt(1-t), t = d^2/(z-c)^2; (z-c) sqrt(R) dz integrates
    // to zero around the pair, so only y - y/sqrt(1-t) is integrated.
    const QuadResult q = integrate_lifted(
        lp, 1,
        [&](cplx z, cplx y, std::span<cplx> out) {
            const cplx u = z - c;
            const cplx t = d * d / (u * u);
            const cplx s = std::sqrt(1.0 - t);
            out[0] = -y * t / ((1.0 + s) * s);
        },
        cfg);
    FormIntegrals r;
    r.theta = q.value[0];
    r.error = q.error[0];
    return r;
}

CycleIntegrals cycle_integrals(const CycleBasis& basis, std::span<const ComplexPoly> numerators, bool with_theta,
                               const QuadConfig& cfg, bool a_only) {
    const int g = basis.genus();
    const Eigen::MatrixXi& coef = basis.coefficients;
    const auto comps = basis.components();
    const int rows = a_only ? g : 2 * g;
    CycleIntegrals out;
    out.forms = Eigen::MatrixXcd::Zero(2 * g, numerators.size());
    out.theta = Eigen::VectorXcd::Zero(2 * g);
    for (int c = 0; c < int(comps.size()); ++c) {
        if (coef.col(c).head(rows).cwiseAbs().sum() == 0) continue;
        FormIntegrals f = integrate_forms(basis.curve, comps[c], numerators, with_theta, cfg,
                                          basis.options.track, basis.plan.gap_weight);
        if (with_theta && c < int(basis.loops.size())) {
            const LoopSpec& L = basis.plan.loops[c];
            if (L.kind == LoopKind::vanishing && L.roots.size() == 2) {
                const auto& r = basis.curve.roots();
                const FormIntegrals v =
                    vanishing_theta(basis.curve, comps[c], r[L.roots[0]], r[L.roots[1]], cfg, basis.options.track);
                f.theta = v.theta;
                f.error = std::max(f.error, v.error);
            }
        }
        for (int r = 0; r < rows; ++r) {
            const int k = coef(r, c);
            if (!k) continue;
            for (std::size_t j = 0; j < numerators.size(); ++j) out.forms(r, j) += double(k) * f.forms[j];
            out.theta(r) += double(k) * f.theta;
            out.error = std::max(out.error, std::abs(k) * f.error);
        }
    }
    return out;
}

Eigen::MatrixXcd a_periods(const CycleBasis& basis, const QuadConfig& cfg) {
    const int g = basis.genus();
    std::vector<ComplexPoly> mono;
    for (int j = 0; j < g; ++j) mono.push_back(ComplexPoly::monomial(j));
    return cycle_integrals(basis, mono, false, cfg, true).forms.topRows(g);
}

std::vector<ComplexPoly> dual_numerators(const Eigen::MatrixXcd& X) {
    std::vector<ComplexPoly> out;
    for (int i = 0; i < X.cols(); ++i) {
        std::vector<cplx> c(X.rows());
        for (int j = 0; j < X.rows(); ++j) c[j] = X(j, i);
        out.emplace_back(c);
    }
    return out;
}

PeriodData period_matrices(const CycleBasis& basis, const PeriodOptions& opt) {
    const int g = basis.genus();
    std::vector<ComplexPoly> mono;
    for (int j = 0; j < g; ++j) mono.push_back(ComplexPoly::monomial(j));

    PeriodData P;
    const CycleIntegrals first = cycle_integrals(basis, mono, true, opt.quad);
    P.A = first.forms.topRows(g);
    P.B = first.forms.bottomRows(g);
    P.z = first.theta.head(g);
    P.w = first.theta.tail(g);
    P.err_est = first.error;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P.A);
    P.condition = svd.singularValues()(0) / svd.singularValues()(g - 1);
    P.X = dual_basis(P.A, opt.cond_cap);

    // second pass with the dual forms themselves
    const CycleIntegrals second = cycle_integrals(basis, dual_numerators(P.X), false, opt.quad);
    P.normalization_residual = (second.forms.topRows(g) - Eigen::MatrixXcd::Identity(g, g)).cwiseAbs().maxCoeff();
    P.tau = second.forms.bottomRows(g).transpose();
    P.err_est = std::max(P.err_est, second.error);
    return P;
}

cplx residue(const HyperellipticCurve& curve, const ComplexPoly& numerator, cplx point, double radius, cplx y_ref,
             const QuadConfig& cfg) {
    auto around = [&](double r) {
        CycleComponent c;
        c.path = Path::circle(point, r);
        c.y_anchor = continue_branch(curve.eval_Q(c.path.start()), y_ref);
        TrackOptions t;
        t.clearance = 0.25 * r;
        const std::vector<ComplexPoly> nums{numerator};
        return integrate_forms(curve, c, nums, false, cfg, t).forms[0] / (2.0 * std::numbers::pi * cplx(0, 1));
    };
    const cplx r1 = around(radius), r2 = around(0.5 * radius);
    return 2.0 * r2 - r1;
}

} // namespace sklab
