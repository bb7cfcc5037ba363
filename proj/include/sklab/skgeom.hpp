#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sklab/family.hpp"
#include "sklab/periods.hpp"

namespace sklab {

// z^i = int_{a_i} y dz, w_i = int_{b_i} y dz. The tag identifies the
// continuation history of the basis the periods were taken on.
struct SKCoordinates {
    Eigen::VectorXcd z, w;
    std::uint64_t branch_tag = 0;
};

SKCoordinates coordinates(const CycleBasis& basis, const QuadConfig& cfg = {});
SKCoordinates coordinates(const PeriodData& P, std::uint64_t tag = 0);

/// a-cycles built only from loops around colliding pairs.
std::vector<bool> vanishing_tags(const CycleBasis& basis);

struct SKMetricSample {
    Eigen::MatrixXd gram; // Im tau
    std::vector<int> tangential, transverse;
    Eigen::MatrixXd A, B, D;
    double min_eig_A = 0.0;
    double min_eig = 0.0;
    double symmetry_defect = 0.0;
};

SKMetricSample metric(const Eigen::MatrixXcd& tau, const std::vector<bool>& vanishing);

struct PotentialSample {
    double K = 0.0;
    double imag_residue = 0.0;
    Eigen::VectorXcd gradient;
};

/// K = (i/4) sum (z^i conj(w_i) - w_i conj(z^i)).
PotentialSample potential(const SKCoordinates& c);
/// dK/dz^j = (i/4) (conj(w_j) - sum_i tau_ij conj(z^i)).
Eigen::VectorXcd potential_gradient(const SKCoordinates& c, const Eigen::MatrixXcd& tau);

struct ModelRatios {
    double min = 0.0, max = 0.0;
};

/// Generalized eigenvalue range of gram against diag(1 on tangential,
/// -log|z^k| on transverse). With log_weight = false the transverse weight is 1.
ModelRatios compare_model(const SKMetricSample& sample, const SKCoordinates& coords, bool log_weight = true);

struct RadialRow {
    cplx l;
    Eigen::MatrixXcd tau;
    Eigen::VectorXcd z, w;
    double K = 0.0;
};

struct RadialReport {
    std::vector<RadialRow> rows;
    double C0 = 0.0;
    double K1 = 0.0;
    double tau_residual = 0.0;     // max |tau(l) - tau(1)|
    double exponent = 0.0;         // fitted exponent of |z| in |l| (worst entry)
    double exponent_defect = 0.0;  // max |exponent - 1/2| over entries
    double k_scaling_residual = 0.0; // max |K(l)/|l| - K(1)| / |K(1)|
    double potential_imag = 0.0;
    double cone_angle = 0.0;
};

/// Scans Q = l Q0 over |l| in `moduli` and arg l in `args`. The basis is carried
/// from l = 1 along arg first, then modulus, so sqrt(l) follows one branch.
RadialReport radial_scan(const Family& family, const FamilyPoint& base, const std::vector<double>& moduli,
                         const std::vector<double>& args, const QuadConfig& cfg = {});

} // namespace sklab
