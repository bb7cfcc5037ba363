#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sklab/surface.hpp"

namespace sklab {

struct QuadConfig {
    double rel_tol = 1e-11;
    double abs_tol = 1e-14;
    int max_depth = 40;
    std::size_t max_intervals = 400000;
};

struct QuadResult {
    std::vector<cplx> value;
    std::vector<double> error;
    std::vector<double> l1; // integral of |f dz|, per component
    std::size_t intervals = 0;
};

// Fills out[k] = f_k(z, y); the integrator multiplies by dz.
using LiftedIntegrand = std::function<void(cplx z, cplx y, std::span<cplx> out)>;

/// Adaptive Gauss-Kronrod (7/15) over every sub-piece of a lifted path, all
/// components at once. Sub-pieces ending on a simple root use s = u^2 so the
/// 1/y singularity of dz/y is removed.
QuadResult integrate_lifted(const LiftedPath& path, std::size_t dim, const LiftedIntegrand& f,
                            const QuadConfig& cfg = {});

} // namespace sklab
