#pragma once

#include <cstddef>
#include <vector>

#include "pmcw/correlation.hpp"
#include "pmcw/design_grid.hpp"
#include "pmcw/hermitian_form.hpp"
#include "pmcw/phase_code.hpp"
#include "pmcw/types.hpp"

namespace pmcw {

// Which slot of the objective the quadratic argument z occupies. The two
// subproblems of the alternation need different matrices because Diag(f_p)
// and the circular shift do not commute (the wrap-around rows pick up an
// extra phase e^{j*2*pi*K*f_p}), so one construction cannot serve both sides.
//
//   fixed_is_y: z^H B z = interference_objective(z, fixed, grid)
//               rank-one family v = Diag(f_p) C_l fixed
//   fixed_is_x: z^H B z = interference_objective(fixed, z, grid)
//               rank-one family w = C_l Diag(f_p) fixed
//               (the adjoint family C_l^H Diag(f_p)^H fixed, reindexed over
//                the symmetric grid)
enum class FormSide { fixed_is_y, fixed_is_x };

namespace detail {

// g(d) = sum_{p=-P..P} e^{j*2*pi*f_p*d} = 1 + 2*sum_{p>=1} cos(2*pi*p*spacing*d),
// real by symmetry of the grid. Tabulated for d in (-K, K); index with d + K - 1.
inline std::vector<double> doppler_phase_sums(const DesignGrid& grid, std::size_t k) {
    std::vector<double> g(2 * k - 1);
    for (long d = -(static_cast<long>(k) - 1); d <= static_cast<long>(k) - 1; ++d) {
        double s = 1.0;
        for (int p = 1; p <= grid.P; ++p)
            s += 2.0 * std::cos(two_pi * grid.frequency(p) * static_cast<double>(d));
        g[static_cast<std::size_t>(d + static_cast<long>(k) - 1)] = s;
    }
    return g;
}

} // namespace detail

// Assemble the K x K interference quadratic form for one side of the
// alternation. Exact regrouping of the (2L+1)(2P+1) rank-one terms:
// the Doppler sum collapses to the real weight g(.) and the shift sum walks
// wrapped diagonals, so assembly is O((2L+1) K^2) instead of
// O((2L+1)(2P+1) K^2). The upper triangle is computed and mirrored, making
// the result exactly Hermitian.
inline HermitianForm build_quadratic_form(const PhaseCode& fixed, const DesignGrid& grid,
                                          FormSide side = FormSide::fixed_is_y) {
    const std::size_t k = fixed.size();
    grid.check_against(k);
    const cvec& c = fixed.entries();
    const std::vector<double> g = detail::doppler_phase_sums(grid, k);
    const auto gat = [&](long a, long b) { return g[static_cast<std::size_t>(a - b + static_cast<long>(k) - 1)]; };

    Matrix m(k, k);
    const long kk = static_cast<long>(k);
    for (long i = 0; i < kk; ++i) {
        for (long j = i; j < kk; ++j) {
            cdouble acc = 0.0;
            if (side == FormSide::fixed_is_y) {
                // B_ij = g(i-j) * sum_l y_{(i+l) mod K} conj(y_{(j+l) mod K})
                cdouble s = 0.0;
                for (int l = -grid.L; l <= grid.L; ++l) {
                    const long sh = ((l % kk) + kk) % kk;
                    s += c[(i + sh) % kk] * std::conj(c[(j + sh) % kk]);
                }
                acc = s * gat(i, j);
            } else {
                // B_ij = sum_l x_{(i+l) mod K} conj(x_{(j+l) mod K}) * g((i+l) mod K - (j+l) mod K)
                // The weight depends on the wrapped index difference, which is
                // what distinguishes this side.
                for (int l = -grid.L; l <= grid.L; ++l) {
                    const long sh = ((l % kk) + kk) % kk;
                    const long iw = (i + sh) % kk;
                    const long jw = (j + sh) % kk;
                    acc += c[iw] * std::conj(c[jw]) * gat(iw, jw);
                }
            }
            m(i, j) = acc;
            if (i != j) m(j, i) = std::conj(acc);
        }
    }
    return HermitianForm(std::move(m));
}

// Matrix-free product B z accumulated term by term over the grid,
// sum_{l,p} v (v^H z), never forming B. Deliberately follows the raw
// rank-one definition rather than the factorized assembly above, so the two
// paths check each other.
inline cvec apply_quadratic_form(const PhaseCode& fixed, const DesignGrid& grid, FormSide side,
                                 const cvec& z) {
    const std::size_t k = fixed.size();
    grid.check_against(k);
    if (z.size() != k)
        throw std::invalid_argument("apply_quadratic_form: z length mismatch");
    const cvec& c = fixed.entries();
    cvec out(k, 0.0);
    cvec v(k);
    for (int p = -grid.P; p <= grid.P; ++p) {
        const cvec steer = steering_vector(grid.frequency(p), k);
        for (int l = -grid.L; l <= grid.L; ++l) {
            const long kk = static_cast<long>(k);
            const long sh = ((l % kk) + kk) % kk;
            if (side == FormSide::fixed_is_y) {
                for (std::size_t i = 0; i < k; ++i) v[i] = steer[i] * c[(i + sh) % k];
            } else {
                for (std::size_t i = 0; i < k; ++i) {
                    const std::size_t iw = (i + sh) % k;
                    v[i] = steer[iw] * c[iw];
                }
            }
            cdouble dot = 0.0;
            for (std::size_t i = 0; i < k; ++i) dot += std::conj(v[i]) * z[i];
            for (std::size_t i = 0; i < k; ++i) out[i] += v[i] * dot;
        }
    }
    return out;
}

// Operator view of (lambda I - B) for the matrix-free solver path.
struct LoadedFormOperator {
    const PhaseCode* fixed;
    const DesignGrid* grid;
    FormSide side;
    double lambda = 0.0;

    std::size_t dim() const { return fixed->size(); }

    cvec apply(const cvec& z) const {
        cvec bz = apply_quadratic_form(*fixed, *grid, side, z);
        for (std::size_t i = 0; i < bz.size(); ++i) bz[i] = lambda * z[i] - bz[i];
        return bz;
    }

    // Underlying form applied without loading (for the eigenvalue stage).
    cvec apply_unloaded(const cvec& z) const {
        return apply_quadratic_form(*fixed, *grid, side, z);
    }

    // trace(B) = (2L+1)(2P+1) K bounds the top eigenvalue of a PSD form;
    // used as the non-convergence fallback where no rows are materialized.
    double trace_bound() const {
        return static_cast<double>(grid->term_count()) * static_cast<double>(dim());
    }
};

} // namespace pmcw
