#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "sklab/error.hpp"

namespace sklab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string out_path(const Options& o, const std::string& name) { return (fs::path(o.out) / name).string(); }

Verdict verdict(std::string name, bool ok, std::string detail, bool asserted = true) {
    return {std::move(name), ok, std::move(detail), asserted};
}

std::string entry_name(int i, int j) { return "imtau_" + std::to_string(i + 1) + std::to_string(j + 1); }

json row_json(const LadderRow& r) {
    json j = {{"eps", json::array()}, {"eps_abs", r.eps_abs}, {"z_van", json::array()}};
    for (cplx e : r.point.eps) j["eps"].push_back(to_json(e));
    for (cplx z : r.z_van) j["z_van"].push_back(to_json(z));
    if (!r.error.empty()) {
        j["error"] = r.error;
        return j;
    }
    j["tau"] = to_json(r.periods.tau);
    j["gram"] = to_json(r.metric.gram);
    j["z"] = to_json(r.coords.z);
    j["w"] = to_json(r.coords.w);
    j["K"] = r.potential.K;
    j["gradient"] = to_json(r.gradient);
    j["err_est"] = r.periods.err_est;
    j["condition"] = r.periods.condition;
    j["dual_residual"] = r.periods.normalization_residual;
    j["symmetry_defect"] = r.metric.symmetry_defect;
    j["min_eig_imtau"] = r.metric.min_eig;
    return j;
}

json fits_json(const std::vector<EntryFit>& fits) {
    json a = json::array();
    for (const auto& e : fits) {
        json f = to_json(e.fit);
        f["entry"] = entry_name(e.i, e.j);
        a.push_back(f);
    }
    return a;
}

json scan_json(const DegenerationReport& r) {
    json j = {{"rows", json::array()}, {"vanishing", r.vanishing}};
    for (const auto& row : r.rows) j["rows"].push_back(row_json(row));
    j["fits"] = fits_json(r.fits);
    j["eps_fits"] = fits_json(r.eps_fits);
    return j;
}

std::vector<double> column(const DegenerationReport& r, int i, int j) {
    std::vector<double> v;
    for (const auto& row : r.rows)
        if (row.error.empty()) v.push_back(row.metric.gram(i, j));
    return v;
}

const FitResult* find_fit(const std::vector<EntryFit>& fits, int i, int j) {
    for (const auto& e : fits)
        if (e.i == i && e.j == j) return &e.fit;
    return nullptr;
}

bool any_aborted(const DegenerationReport& r) {
    return std::any_of(r.rows.begin(), r.rows.end(), [](const LadderRow& x) { return !x.error.empty(); });
}

Verdict period_invariants(const PeriodData& P, const SKMetricSample& m, const std::string& label) {
    const bool ok = m.symmetry_defect <= 1e-6 && m.min_eig > 0.0 && P.normalization_residual <= 1e-8;
    return verdict(label + ": riemann relations", ok,
                   "symmetry_defect=" + fmt17(m.symmetry_defect) + " min_eig_imtau=" + fmt17(m.min_eig) +
                       " dual_residual=" + fmt17(P.normalization_residual));
}

// The declared degeneration pattern: vanishing diagonals diverge, the
// non-vanishing block is continuous, and with several pairs the first
// off-diagonals diverge negatively while distant entries stay bounded.
std::vector<Verdict> pattern_verdicts(const DegenerationReport& r, bool multi) {
    std::vector<Verdict> out;
    const int g = int(r.vanishing.size());
    for (int i = 0; i < g; ++i) {
        for (int j = i; j < g; ++j) {
            const FitResult* f = find_fit(r.fits, i, j);
            const std::string name = entry_name(i, j);
            const bool vi = r.vanishing[i], vj = r.vanishing[j];
            if (i == j && vi) {
                out.push_back(verdict(name + " divergent", f && f->divergent && f->slope > 0.0,
                                      f ? "slope=" + fmt17(f->slope) + " r2=" + fmt17(f->r_squared) : "no fit"));
            } else if (!vi && !vj) {
                const double d = drift(column(r, i, j), 1e-3);
                out.push_back(verdict(name + " continuous", d < 0.02, "drift=" + fmt17(d)));
            } else if (multi && vi && vj && j == i + 1) {
                out.push_back(verdict(name + " divergent negative", f && f->divergent && f->slope < 0.0,
                                      f ? "slope=" + fmt17(f->slope) + " r2=" + fmt17(f->r_squared) : "no fit"));
            } else if (multi && vi && vj && j >= i + 2) {
                const double d = drift(column(r, i, j), 1e-3);
                out.push_back(verdict(name + " bounded", d < 0.05, "drift=" + fmt17(d)));
            }
        }
    }
    return out;
}

CsvTable tau_table(const Eigen::MatrixXcd& tau) {
    CsvTable t({"i", "j", "re_tau", "im_tau"});
    for (Eigen::Index i = 0; i < tau.rows(); ++i)
        for (Eigen::Index j = 0; j < tau.cols(); ++j)
            t.add_row({std::to_string(i + 1), std::to_string(j + 1), fmt17(tau(i, j).real()), fmt17(tau(i, j).imag())});
    return t;
}

} // namespace

RunConfig load(const Options& o) {
    if (o.config.empty()) throw Error(ErrorKind::ConfigError, "--config is required");
    RunConfig rc = load_run_config(o.config);
    if (o.tol) {
        if (!(*o.tol >= 1e-13 && *o.tol < 1.0)) throw Error(ErrorKind::ConfigError, "--tol must be in [1e-13, 1)");
        rc.family.quad.rel_tol = *o.tol;
    }
    return rc;
}

ScanOptions scan_options(const RunConfig& rc, const Options& o) {
    ScanOptions s;
    s.quad = rc.family.quad;
    s.threads = std::max(1, o.threads);
    return s;
}

Outcome run_periods(const RunConfig& rc, const Options& o) {
    const Family& f = rc.family;
    const CycleBasis B = build_cycle_basis(f.curve(rc.point), f.plan);
    PeriodOptions po;
    po.quad = f.quad;
    const PeriodData P = period_matrices(B, po);
    const SKMetricSample m = metric(P.tau, vanishing_tags(B));
    tau_table(P.tau).write(out_path(o, "tau.csv"));
    CsvTable c({"k", "re_z", "im_z", "re_w", "im_w"});
    for (Eigen::Index k = 0; k < P.z.size(); ++k)
        c.add_row({std::to_string(k + 1), fmt17(P.z(k).real()), fmt17(P.z(k).imag()), fmt17(P.w(k).real()),
                   fmt17(P.w(k).imag())});
    c.write(out_path(o, "coords.csv"));
    Outcome out;
    out.verdicts.push_back(period_invariants(P, m, "periods"));
    out.report = {{"genus", B.genus()},       {"A", to_json(P.A)},          {"B", to_json(P.B)},
                  {"X", to_json(P.X)},        {"tau", to_json(P.tau)},      {"z", to_json(P.z)},
                  {"w", to_json(P.w)},        {"gram", to_json(m.gram)},    {"condition", P.condition},
                  {"err_est", P.err_est},     {"dual_residual", P.normalization_residual},
                  {"symmetry_defect", m.symmetry_defect}, {"branch_tag", B.branch_tag}};
    return out;
}

Outcome run_degenerate(const RunConfig& rc, const Options& o) {
    if (!rc.ladder) throw Error(ErrorKind::ConfigError, "field 'ladder': required by degenerate");
    const Family& f = rc.family;
    const LadderSpec& L = *rc.ladder;
    const ScanOptions so = scan_options(rc, o);
    const bool multi = f.kind == FamilyKind::multi_collision;
    std::vector<FamilyPoint> pts;
    for (double e : geometric_ladder(L.from, L.to, L.ratio)) pts.push_back(f.at(e));
    const DegenerationReport rep = degeneration_scan(f, pts, so);
    ladder_table(rep).write(out_path(o, "rows.csv"));
    fit_table(rep).write(out_path(o, "fits.csv"));

    Outcome out;
    out.numeric_abort = any_aborted(rep);
    out.report = scan_json(rep);
    out.verdicts.push_back(riemann_verdict(rep.rows, "ladder"));
    for (auto& v : pattern_verdicts(rep, multi)) out.verdicts.push_back(v);

    if (multi && L.single_pair) {
        // one ladder per pair with the others held at the ladder start
        const int g = int(rep.vanishing.size());
        std::vector<double> sum(g, 0.0);
        json singles = json::array();
        for (std::size_t k = 0; k < f.pairs.size(); ++k) {
            std::vector<FamilyPoint> sp;
            for (double e : geometric_ladder(L.from, L.to, L.ratio)) {
                FamilyPoint p = f.at(L.from);
                p.eps[k] = e;
                sp.push_back(p);
            }
            const DegenerationReport sr = degeneration_scan(f, sp, so);
            out.numeric_abort = out.numeric_abort || any_aborted(sr);
            ladder_table(sr).write(out_path(o, "single_pair_" + std::to_string(k + 1) + ".csv"));
            out.verdicts.push_back(riemann_verdict(sr.rows, "single pair " + std::to_string(k + 1)));
            std::vector<double> x;
            for (const auto& row : sr.rows)
                if (row.error.empty()) x.push_back(-std::log(std::abs(row.z_van[k])));
            json sj = {{"pair", k + 1}, {"fits", json::array()}};
            for (int i = 0; i < g; ++i) {
                const FitResult fr = fit_log_rate(x, column(sr, i, i));
                sum[i] += fr.slope;
                json fj = to_json(fr);
                fj["entry"] = entry_name(i, i);
                sj["fits"].push_back(fj);
            }
            singles.push_back(sj);
        }
        out.report["single_pair"] = singles;
        for (int i = 0; i < g; ++i) {
            const FitResult* jf = find_fit(rep.fits, i, i);
            if (!jf || !rep.vanishing[i]) continue;
            const double rel = std::abs(jf->slope - sum[i]) / std::abs(sum[i]);
            out.verdicts.push_back(verdict(entry_name(i, i) + " slope additivity", rel < 0.10,
                                           "joint=" + fmt17(jf->slope) + " sum_single=" + fmt17(sum[i]) +
                                               " rel=" + fmt17(rel)));
        }
    }
    return out;
}

Outcome run_monodromy(const RunConfig& rc, const Options& o) {
    const MonodromySpec spec = rc.monodromy.value_or(MonodromySpec{});
    const ScanOptions so = scan_options(rc, o);
    CsvTable t({"turns", "k", "re_n", "im_n", "n_int", "defect", "a_return"});
    Outcome out;
    json runs = json::array();
    std::vector<MonodromyResult> res;
    for (int turns : spec.turns) {
        const MonodromyResult m = monodromy(rc.family, spec.eps0, spec.steps, turns, so);
        for (std::size_t k = 0; k < m.n.size(); ++k)
            t.add_row({std::to_string(turns), std::to_string(k + 1), fmt17(m.n[k].real()), fmt17(m.n[k].imag()),
                       std::to_string(m.n_int[k]), fmt17(m.defect), fmt17(m.a_return)});
        json n = json::array();
        for (cplx c : m.n) n.push_back(to_json(c));
        runs.push_back({{"turns", turns},
                        {"steps", m.steps},
                        {"n", n},
                        {"n_int", m.n_int},
                        {"defect", m.defect},
                        {"a_return", m.a_return},
                        {"z_before", to_json(m.z_before)},
                        {"w_before", to_json(m.w_before)},
                        {"w_after", to_json(m.w_after)}});
        const std::string label = "loop x" + std::to_string(turns);
        out.verdicts.push_back(verdict(label + ": integer shift", m.defect <= 1e-6, "defect=" + fmt17(m.defect)));
        out.verdicts.push_back(
            verdict(label + ": a-periods return", m.a_return <= 1e-8, "a_return=" + fmt17(m.a_return)));
        if (turns == 0) {
            const bool zero = std::all_of(m.n_int.begin(), m.n_int.end(), [](long v) { return v == 0; });
            out.verdicts.push_back(verdict("trivial loop: n = 0", zero, ""));
        }
        res.push_back(m);
    }
    t.write(out_path(o, "monodromy.csv"));
    const auto one = std::find(spec.turns.begin(), spec.turns.end(), 1);
    if (one != spec.turns.end()) {
        const MonodromyResult& m1 = res[one - spec.turns.begin()];
        for (std::size_t r = 0; r < res.size(); ++r) {
            if (spec.turns[r] < 2) continue;
            bool ok = true;
            for (std::size_t k = 0; k < m1.n_int.size(); ++k) ok = ok && res[r].n_int[k] == spec.turns[r] * m1.n_int[k];
            out.verdicts.push_back(verdict("loop x" + std::to_string(spec.turns[r]) + ": additivity", ok, ""));
        }
    }
    out.report = {{"eps0", to_json(spec.eps0)}, {"runs", runs}};
    return out;
}

Outcome run_radial(const RunConfig& rc, const Options& o) {
    if (!rc.radial) throw Error(ErrorKind::ConfigError, "field 'radial': required by radial");
    const RadialSpec& s = *rc.radial;
    const Family& f = rc.family;
    const RadialReport r = radial_scan(f, f.at(s.eps), s.moduli, s.args, f.quad);
    const int g = r.rows.empty() ? 0 : int(r.rows.front().z.size());
    std::vector<std::string> h{"re_l", "im_l", "K"};
    for (int i = 0; i < g; ++i)
        for (int j = i; j < g; ++j) {
            h.push_back("re_tau_" + std::to_string(i + 1) + std::to_string(j + 1));
            h.push_back("im_tau_" + std::to_string(i + 1) + std::to_string(j + 1));
        }
    for (int k = 0; k < g; ++k) {
        h.push_back("re_z_" + std::to_string(k + 1));
        h.push_back("im_z_" + std::to_string(k + 1));
    }
    CsvTable t(h);
    json rows = json::array();
    for (const auto& row : r.rows) {
        std::vector<double> c{row.l.real(), row.l.imag(), row.K};
        for (int i = 0; i < g; ++i)
            for (int j = i; j < g; ++j) {
                c.push_back(row.tau(i, j).real());
                c.push_back(row.tau(i, j).imag());
            }
        for (int k = 0; k < g; ++k) {
            c.push_back(row.z(k).real());
            c.push_back(row.z(k).imag());
        }
        t.add_row(c);
        rows.push_back({{"l", to_json(row.l)}, {"K", row.K}, {"tau", to_json(row.tau)}, {"z", to_json(row.z)},
                        {"w", to_json(row.w)}});
    }
    t.write(out_path(o, "radial.csv"));
    Outcome out;
    out.verdicts.push_back(verdict("tau constant in l", r.tau_residual <= 1e-6, "residual=" + fmt17(r.tau_residual)));
    out.verdicts.push_back(verdict("|z| exponent 1/2", r.exponent_defect <= 1e-3,
                                   "exponent=" + fmt17(r.exponent) + " defect=" + fmt17(r.exponent_defect)));
    out.verdicts.push_back(verdict("K(l)/|l| constant", r.k_scaling_residual <= 1e-6,
                                   "residual=" + fmt17(r.k_scaling_residual)));
    out.verdicts.push_back(verdict("C0 positive", r.C0 > 0.0, "C0=" + fmt17(r.C0), false));
    out.report = {{"rows", rows},
                  {"C0", r.C0},
                  {"K1", r.K1},
                  {"tau_residual", r.tau_residual},
                  {"exponent", r.exponent},
                  {"exponent_defect", r.exponent_defect},
                  {"k_scaling_residual", r.k_scaling_residual},
                  {"potential_imag", r.potential_imag},
                  {"cone_angle", r.cone_angle}};
    return out;
}

Outcome run_potential(const RunConfig& rc, const Options& o) {
    const Family& f = rc.family;
    const ScanOptions so = scan_options(rc, o);
    const CycleBasis B = build_cycle_basis(f.curve(rc.point), f.plan);
    PeriodOptions po;
    po.quad = f.quad;
    const PeriodData P = period_matrices(B, po);
    const SKCoordinates c = coordinates(P, B.branch_tag);
    const PotentialSample K = potential(c);
    const Eigen::VectorXcd grad = potential_gradient(c, P.tau);
    CsvTable t({"k", "re_z", "im_z", "re_w", "im_w", "re_grad", "im_grad"});
    for (Eigen::Index k = 0; k < c.z.size(); ++k)
        t.add_row({std::to_string(k + 1), fmt17(c.z(k).real()), fmt17(c.z(k).imag()), fmt17(c.w(k).real()),
                   fmt17(c.w(k).imag()), fmt17(grad(k).real()), fmt17(grad(k).imag())});
    t.write(out_path(o, "potential.csv"));

    const CycleBasis Bf = build_cycle_basis(f.curve(f.at(rc.fd_eps)), f.plan);
    const JacobianResult J = jacobian_check(Bf, so);
    CsvTable jt({"i", "j", "re_tau", "im_tau", "re_tau_fd", "im_tau_fd"});
    for (Eigen::Index i = 0; i < J.tau.rows(); ++i)
        for (Eigen::Index j = 0; j < J.tau.cols(); ++j)
            jt.add_row({std::to_string(i + 1), std::to_string(j + 1), fmt17(J.tau(i, j).real()),
                        fmt17(J.tau(i, j).imag()), fmt17(J.tau_fd(i, j).real()), fmt17(J.tau_fd(i, j).imag())});
    jt.write(out_path(o, "jacobian.csv"));

    Outcome out;
    const double scale = std::max(1.0, std::abs(K.K));
    out.verdicts.push_back(verdict("K real", K.imag_residue <= 1e-12 * scale, "imag=" + fmt17(K.imag_residue)));
    out.verdicts.push_back(verdict("dw/dz = tau", J.deviation <= 1e-4, "deviation=" + fmt17(J.deviation)));
    out.verdicts.push_back(
        verdict("gradient of K", J.gradient_deviation <= 1e-4, "deviation=" + fmt17(J.gradient_deviation)));
    out.report = {{"K", K.K},
                  {"imag_residue", K.imag_residue},
                  {"z", to_json(c.z)},
                  {"w", to_json(c.w)},
                  {"gradient", to_json(grad)},
                  {"jacobian",
                   {{"tau", to_json(J.tau)},
                    {"tau_fd", to_json(J.tau_fd)},
                    {"deviation", J.deviation},
                    {"gradient", to_json(J.gradient)},
                    {"gradient_fd", to_json(J.gradient_fd)},
                    {"gradient_deviation", J.gradient_deviation},
                    {"steps", J.steps}}}};
    return out;
}

Outcome run_check(const Options& o) {
    Outcome out;
    ScanOptions so;
    so.threads = std::max(1, o.threads);
    if (o.tol) so.quad.rel_tol = *o.tol;
    PeriodOptions po;
    po.quad = so.quad;
    auto add = [&](Verdict v) {
        std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << (v.detail.empty() ? "" : "  " + v.detail) << "\n";
        out.verdicts.push_back(std::move(v));
    };

    const Family f1 = family_f1();
    {
        const CycleBasis B = build_cycle_basis(f1.curve(f1.at(0.1)), f1.plan);
        const PeriodData P = period_matrices(B, po);
        add(period_invariants(P, metric(P.tau, vanishing_tags(B)), "F1 eps=0.1"));
        const JacobianResult J = jacobian_check(B, so);
        add(verdict("F1 eps=0.1: dw/dz = tau", J.deviation <= 1e-4, "deviation=" + fmt17(J.deviation)));
    }
    {
        const Family f3 = family_f3();
        const CycleBasis B = build_cycle_basis(f3.curve(f3.at(1e-2)), f3.plan);
        const PeriodData P = period_matrices(B, po);
        add(period_invariants(P, metric(P.tau, vanishing_tags(B)), "F3 eps=1e-2"));
    }
    {
        std::vector<FamilyPoint> pts;
        for (double e : geometric_ladder(1e-2, 1e-4)) pts.push_back(f1.at(e));
        const DegenerationReport r = degeneration_scan(f1, pts, so);
        add(riemann_verdict(r.rows, "F1 ladder"));
        for (auto& v : pattern_verdicts(r, false)) add(verdict("F1 ladder: " + v.name, v.passed, v.detail));
    }
    {
        const MonodromyResult m0 = monodromy(f1, 0.05, 64, 0, so);
        const MonodromyResult m1 = monodromy(f1, 0.05, 64, 1, so);
        const bool zero = std::all_of(m0.n_int.begin(), m0.n_int.end(), [](long v) { return v == 0; });
        add(verdict("F1 monodromy: trivial loop", zero && m0.defect <= 1e-6, "defect=" + fmt17(m0.defect)));
        add(verdict("F1 monodromy: integer shift", m1.defect <= 1e-6 && m1.a_return <= 1e-8,
                    "defect=" + fmt17(m1.defect) + " a_return=" + fmt17(m1.a_return)));
    }
    {
        const Family r1 = family_r1();
        const RadialReport r = radial_scan(r1, r1.at(0.1), {0.5, 1.0, 2.0}, {0.0, 0.5}, so.quad);
        add(verdict("R1: tau constant in l", r.tau_residual <= 1e-6, "residual=" + fmt17(r.tau_residual)));
        add(verdict("R1: |z| exponent 1/2", r.exponent_defect <= 1e-3, "exponent=" + fmt17(r.exponent)));
    }

    // randomized property suite
    std::mt19937_64 rng(o.seed);
    double worst_sym = 0.0, worst_res = 0.0, worst_eig = 1e300, worst_jac = 0.0, worst_honesty = 0.0;
    const int samples = 6;
    for (int s = 0; s < samples; ++s) {
        const int g = 1 + s % 3;
        const Family rf = random_family(g, rng());
        const CycleBasis B = build_cycle_basis(rf.curve(FamilyPoint{{}, 1.0}), rf.plan);
        const PeriodData P = period_matrices(B, po);
        const SKMetricSample m = metric(P.tau, vanishing_tags(B));
        worst_sym = std::max(worst_sym, m.symmetry_defect);
        worst_res = std::max(worst_res, P.normalization_residual);
        worst_eig = std::min(worst_eig, m.min_eig);
        PeriodOptions fine = po;
        fine.quad.rel_tol = po.quad.rel_tol / 2;
        const PeriodData Pf = period_matrices(B, fine);
        const double change = std::max((Pf.z - P.z).cwiseAbs().maxCoeff(), (Pf.w - P.w).cwiseAbs().maxCoeff());
        worst_honesty = std::max(worst_honesty, change / std::max(P.err_est, 1e-300));
        if (g <= 2) worst_jac = std::max(worst_jac, jacobian_check(B, so).deviation);
    }
    add(verdict("random curves: riemann relations", worst_sym <= 1e-6 && worst_res <= 1e-8 && worst_eig > 0.0,
                "seed=" + std::to_string(o.seed) + " symmetry=" + fmt17(worst_sym) + " residual=" + fmt17(worst_res)));
    add(verdict("random curves: dw/dz = tau", worst_jac <= 1e-4, "deviation=" + fmt17(worst_jac)));
    add(verdict("random curves: error estimate bounds refinement", worst_honesty < 1.0,
                "max change/err_est=" + fmt17(worst_honesty)));
    out.report = {{"seed", o.seed}};
    return out;
}

} // namespace sklab::cli
