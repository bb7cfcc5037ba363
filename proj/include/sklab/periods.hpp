#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sklab/contour.hpp"
#include "sklab/quadrature.hpp"

namespace sklab {

struct FormIntegrals {
    std::vector<cplx> forms; // one per numerator
    cplx theta;              // integral of y dz (zero if not requested)
    double error = 0.0;      // largest absolute quadrature error estimate
};

/// Integrals of numerator_k(z) dz/(2y) (and optionally y dz) over one cycle
/// component. Two-sheet components are weighted by 2 x two_sheet_weight.
FormIntegrals integrate_forms(const HyperellipticCurve& curve, const CycleComponent& comp,
                              std::span<const ComplexPoly> numerators, bool with_theta,
                              const QuadConfig& cfg = {}, const TrackOptions& track = {},
                              double two_sheet_weight = 1.0);

/// Theta around a loop enclosing exactly the two roots r1, r2, integrating
/// y dz minus its analytic part so that the O(|r1-r2|^2) result keeps full
/// relative precision.
FormIntegrals vanishing_theta(const HyperellipticCurve& curve, const CycleComponent& loop, cplx r1, cplx r2,
                              const QuadConfig& cfg = {}, const TrackOptions& track = {});

/// Numerators (columns) of the basis dual to the a-periods A: A X = I.
/// Throws IllConditioned when cond(A) exceeds `cond_cap`.
Eigen::MatrixXcd dual_basis(const Eigen::MatrixXcd& A, double cond_cap = 1e10);

struct CycleIntegrals {
    Eigen::MatrixXcd forms; // rows a_1..a_g, b_1..b_g; one column per numerator
    Eigen::VectorXcd theta;
    double error = 0.0;
};

/// Form and theta integrals over every basis cycle. With a_only the b rows are
/// left at zero and components used only by b-cycles are never integrated.
CycleIntegrals cycle_integrals(const CycleBasis& basis, std::span<const ComplexPoly> numerators, bool with_theta,
                               const QuadConfig& cfg = {}, bool a_only = false);

/// A(i,j) = int_{a_i} z^j dz/(2y) alone; usable where b-cycles run into a node.
Eigen::MatrixXcd a_periods(const CycleBasis& basis, const QuadConfig& cfg = {});

/// Polynomials whose coefficient vectors are the columns of X.
std::vector<ComplexPoly> dual_numerators(const Eigen::MatrixXcd& X);

struct PeriodData {
    Eigen::MatrixXcd A, B;   // A(i,j) = int_{a_i} z^j dz/(2y); B likewise on b_i
    Eigen::MatrixXcd X;      // dual numerators, column i = coefficients of omega_i
    Eigen::MatrixXcd tau;    // tau(i,j) = int_{b_j} omega_i
    Eigen::VectorXcd z, w;   // int_{a_i} y dz, int_{b_i} y dz
    double normalization_residual = 0.0;
    double condition = 0.0;
    double err_est = 0.0;
};

struct PeriodOptions {
    QuadConfig quad;
    double cond_cap = 1e10;
};

PeriodData period_matrices(const CycleBasis& basis, const PeriodOptions& opt = {});

/// (1/2 pi i) times the integral of numerator dz/(2y) around a circle at
/// `point` on the sheet where y ~ y_ref at point + radius. Evaluated at radius
/// and radius/2 and Richardson-extrapolated.
cplx residue(const HyperellipticCurve& curve, const ComplexPoly& numerator, cplx point, double radius, cplx y_ref,
             const QuadConfig& cfg = {});

} // namespace sklab
