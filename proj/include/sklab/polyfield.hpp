#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace sklab {

using cplx = std::complex<double>;

/// Dense univariate polynomial over C, coefficients stored in ascending degree.
/// The zero polynomial has an empty coefficient list and degree -1.
class ComplexPoly {
public:
    ComplexPoly() = default;
    explicit ComplexPoly(std::vector<cplx> coeffs);
    ComplexPoly(std::initializer_list<cplx> coeffs);

    /// lead * prod (z - r) over the given roots (repeated entries = multiplicity).
    static ComplexPoly from_roots(std::span<const cplx> roots, cplx lead = 1.0);
    static ComplexPoly monomial(int k, cplx c = 1.0);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    cplx coeff(int k) const;
    cplx leading() const { return coeffs_.empty() ? cplx{} : coeffs_.back(); }

    cplx operator()(cplx z) const { return eval(z); }
    cplx eval(cplx z) const;
    ComplexPoly derivative() const;

    ComplexPoly& operator+=(const ComplexPoly& rhs);
    ComplexPoly& operator-=(const ComplexPoly& rhs);
    ComplexPoly& operator*=(cplx s);

    friend ComplexPoly operator+(ComplexPoly a, const ComplexPoly& b) { return a += b; }
    friend ComplexPoly operator-(ComplexPoly a, const ComplexPoly& b) { return a -= b; }
    friend ComplexPoly operator*(ComplexPoly a, cplx s) { return a *= s; }
    friend ComplexPoly operator*(cplx s, ComplexPoly a) { return a *= s; }
    friend ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b);
    friend bool operator==(const ComplexPoly&, const ComplexPoly&) = default;

private:
    void trim();
    std::vector<cplx> coeffs_;
};

struct Root {
    cplx value;
    int multiplicity = 1;
};

struct RootSet {
    std::vector<Root> roots;
    /// max over roots of |p(r)| / sum_k |c_k||r|^k (normwise backward error).
    double residual = 0.0;

    int total_multiplicity() const;
    /// Roots repeated according to multiplicity.
    std::vector<cplx> flat() const;
};

struct RootOptions {
    double tol = 1e-12;
    int max_iter = 500;
};

/// Aberth-Ehrlich simultaneous iteration followed by Newton polish. Roots
/// lying within tol^(1/m) (scaled by max(1,|center|)) of a common center are
/// merged into a single root of multiplicity m.
RootSet find_roots(const ComplexPoly& p, RootOptions opt = {});

/// Aberth iteration seeded with `guesses` (one per root with multiplicity).
/// Used when tracking roots of a slowly varying family; no clustering.
std::vector<cplx> refine_roots(const ComplexPoly& p, std::span<const cplx> guesses,
                               RootOptions opt = {});

/// Greedy nearest-neighbour bijection prev[i] -> next[perm[i]]. Throws
/// AmbiguousMatching when some root's runner-up candidate is closer than
/// guard_ratio times its chosen one.
std::vector<int> match_roots(std::span<const cplx> prev, std::span<const cplx> next,
                             double guard_ratio = 2.0);
std::vector<int> match_roots(const RootSet& prev, const RootSet& next, double guard_ratio = 2.0);

} // namespace sklab
