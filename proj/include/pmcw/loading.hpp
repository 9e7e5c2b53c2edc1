#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "pmcw/hermitian_form.hpp"
#include "pmcw/quadratic_form.hpp"
#include "pmcw/rng.hpp"
#include "pmcw/types.hpp"

namespace pmcw {

struct PowerIterationResult {
    double lambda = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Rayleigh-quotient power iteration with a fixed deterministic start vector,
// so identical inputs give bit-identical results everywhere. Op needs
// .dim() and .apply(cvec) -> cvec.
template <typename Op>
PowerIterationResult power_iteration(const Op& op, double tol = 1e-8, int cap = 1000) {
    const std::size_t k = op.dim();
    CounterRng rng(0x706d6377); // arbitrary fixed key; not user-visible randomness
    cvec v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = rng.complex_gaussian(i);
    double nv = std::sqrt(norm2(v));
    for (auto& e : v) e /= nv;

    PowerIterationResult res;
    double prev = 0.0;
    for (int t = 1; t <= cap; ++t) {
        const cvec w = op.apply(v);
        cdouble ray = 0.0;
        for (std::size_t i = 0; i < k; ++i) ray += std::conj(v[i]) * w[i];
        res.lambda = ray.real();
        res.iterations = t;
        const double nw = std::sqrt(norm2(w));
        if (nw == 0.0) { // operator annihilates the iterate: top eigenvalue 0 for PSD input
            res.lambda = 0.0;
            res.converged = true;
            return res;
        }
        if (t > 1 && std::abs(res.lambda - prev) <= tol * std::max(1.0, std::abs(res.lambda))) {
            res.converged = true;
            return res;
        }
        prev = res.lambda;
        for (std::size_t i = 0; i < k; ++i) v[i] = w[i] / nw;
    }
    return res;
}

namespace detail {
struct FormOp {
    const HermitianForm* b;
    std::size_t dim() const { return b->dim(); }
    cvec apply(const cvec& z) const { return b->apply(z); }
};
} // namespace detail

// Upper estimate of the largest eigenvalue of a PSD form, inflated by the
// loading margin so the loaded matrix stays strictly positive definite. If
// the power iteration stalls, the max absolute row sum is a guaranteed bound
// and is returned instead (never fails).
inline double dominant_eigenvalue(const HermitianForm& b, double loading_margin = 1e-2,
                                  double tol = 1e-8, int cap = 1000) {
    const PowerIterationResult res = power_iteration(detail::FormOp{&b}, tol, cap);
    if (!res.converged) return b.max_abs_row_sum();
    return (1.0 + loading_margin) * std::max(res.lambda, 0.0);
}

// Same contract for the matrix-free path; the fallback bound is trace(B) =
// (2L+1)(2P+1)K, exact for these rank-one sums without materializing rows.
inline double dominant_eigenvalue_matrix_free(const PhaseCode& fixed, const DesignGrid& grid,
                                              FormSide side, double loading_margin = 1e-2,
                                              double tol = 1e-8, int cap = 1000) {
    struct UnloadedOp {
        const PhaseCode* fixed;
        const DesignGrid* grid;
        FormSide side;
        std::size_t dim() const { return fixed->size(); }
        cvec apply(const cvec& z) const { return apply_quadratic_form(*fixed, *grid, side, z); }
    };
    const PowerIterationResult res = power_iteration(UnloadedOp{&fixed, &grid, side}, tol, cap);
    if (!res.converged)
        return static_cast<double>(grid.term_count()) * static_cast<double>(fixed.size());
    return (1.0 + loading_margin) * std::max(res.lambda, 0.0);
}

// B~ = lambda_m I - B. With lambda_m at or above the top eigenvalue the
// result is PSD, and z^H B~ z = lambda_m K - z^H B z for unimodular z, so
// maximizing the loaded form minimizes the original one.
inline HermitianForm diagonal_load(const HermitianForm& b, double lambda_m) {
    Matrix m(b.dim(), b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j)
            m(i, j) = (i == j ? cdouble(lambda_m, 0.0) : cdouble(0.0, 0.0)) - b(i, j);
    return HermitianForm(std::move(m));
}

} // namespace pmcw
