#pragma once

#include <string>
#include <vector>

#include "sklab/family.hpp"
#include "sklab/skgeom.hpp"

namespace sklab {

struct ScanOptions {
    QuadConfig quad;
    double cond_cap = 1e10;
    int threads = 1;
};

/// from, from/ratio, from/ratio^2, ... down to `to` (inclusive up to rounding).
std::vector<double> geometric_ladder(double from, double to, double ratio = 1.7782794100389228);

struct LadderRow {
    FamilyPoint point;
    double eps_abs = 0.0;
    std::vector<cplx> z_van; // theta around each colliding pair
    PeriodData periods;
    SKCoordinates coords;
    SKMetricSample metric;
    PotentialSample potential;
    Eigen::VectorXcd gradient;
    std::string error; // non-empty when the row was aborted
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_stat = 0.0;
    bool divergent = false;
    std::size_t rows = 0;
};

/// Ordinary least squares y ~ slope * x + intercept. Divergent means
/// t-statistic of the slope > 10 and R^2 >= 0.999.
FitResult fit_log_rate(const std::vector<double>& x, const std::vector<double>& y);

struct EntryFit {
    int i = 0, j = 0;
    FitResult fit;
};

struct DegenerationReport {
    std::vector<LadderRow> rows;
    std::vector<bool> vanishing;
    std::vector<EntryFit> fits;      // gram entries vs mean -log|z_van|
    std::vector<EntryFit> eps_fits;  // gram entries vs -log|eps|
};

/// Builds the basis at points[0], carries it sequentially through the ladder
/// and evaluates rows concurrently. Rows failing with IllConditioned keep their
/// diagnostics in `error`.
DegenerationReport degeneration_scan(const Family& family, const std::vector<FamilyPoint>& points,
                                     const ScanOptions& opt = {});

/// Mean of -log|z_van| over the pairs in `pairs` (all pairs if empty).
double mean_log_regressor(const LadderRow& row, const std::vector<int>& pairs = {});

/// (max - min) / max(|mean|, floor) of a column.
double drift(const std::vector<double>& v, double floor = 0.0);

struct MonodromyResult {
    cplx eps0;
    int steps = 0;
    int turns = 0;
    std::vector<cplx> n;          // (w_after - w_before)_k / z^k
    std::vector<long> n_int;
    double defect = 0.0;          // max |n - round(n)|
    double a_return = 0.0;        // max |z_after - z_before|
    Eigen::VectorXcd z_before, w_before, w_after;
};

/// Carries the basis around eps(t) = eps0 e^{2 pi i t} (all pairs together),
/// t in [0, turns], in steps * turns deformation steps. turns = 0 is the
/// trivial loop.
MonodromyResult monodromy(const Family& family, cplx eps0, int steps, int turns, const ScanOptions& opt = {});

/// Roots of Q + t z^k obtained by Newton from the current roots on the product form.
std::vector<cplx> perturbed_roots(const HyperellipticCurve& curve, int k, cplx t);

struct JacobianResult {
    Eigen::MatrixXcd tau, tau_fd;
    double deviation = 0.0; // max |tau_fd - tau| / max |tau|
    Eigen::VectorXcd gradient, gradient_fd;
    double gradient_deviation = 0.0;
    std::vector<double> steps;
};

/// Central differences with one Richardson step along Q -> Q + t z^k,
/// k = 0..g-1. Solves dw/dz from the two Jacobians and compares with tau; the
/// Wirtinger derivative of K along the same directions checks the gradient.
JacobianResult jacobian_check(const CycleBasis& basis, const ScanOptions& opt = {});

/// A raw genus-g family with roots jittered around 1.5 k and a chain plan.
Family random_family(int genus, std::uint64_t seed);

} // namespace sklab
