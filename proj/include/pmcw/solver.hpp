#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pmcw/correlation.hpp"
#include "pmcw/design_grid.hpp"
#include "pmcw/hermitian_form.hpp"
#include "pmcw/loading.hpp"
#include "pmcw/phase_code.hpp"
#include "pmcw/quadratic_form.hpp"
#include "pmcw/rng.hpp"
#include "pmcw/types.hpp"

namespace pmcw {

// Which code the second half of an outer iteration sees: the freshly updated
// x (the algorithm listing's order) or the previous outer iterate (the prose
// variant). Only the first is a descent scheme on the shared objective.
enum class UpdateOrder { gauss_seidel, jacobi };

struct SolverConfig {
    double epsilon = 1e-5;       // outer stop: |J_(s+1) - J_s| / J_s below this
    double inner_tol = 1e-6;     // inner stop: relative surrogate change
    int max_outer = 200;
    int max_inner = 500;
    double loading_margin = 1e-2;
    std::uint64_t seed = 0;      // initialization seed (codes drawn by the caller/runner)
    UpdateOrder update_order = UpdateOrder::gauss_seidel;
    bool matrix_free = false;    // accumulate rank-one products instead of assembling B

    void validate() const {
        if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
        if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be > 0");
        if (!(loading_margin > 0.0)) throw std::invalid_argument("loading_margin must be > 0");
        if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
        if (max_inner < 1) throw std::invalid_argument("max_inner must be >= 1");
    }
};

struct DesignTrace {
    std::vector<double> objective_per_outer;               // J_(0), J_(1), ...
    std::vector<std::pair<int, int>> inner_iteration_counts; // (x steps, y steps) per outer
    double initial_objective = 0.0;
    double final_objective = 0.0;
    bool converged = false;
};

// One power-method-like step z <- e^{j arg(B~ z)} on the entry vector. A zero
// coefficient keeps the previous entry: any phase is optimal there and
// retention keeps runs deterministic.
template <typename Op>
cvec pmli_step_entries(const Op& loaded, const cvec& z) {
    const cvec w = loaded.apply(z);
    cvec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        out[i] = (w[i] == cdouble(0.0, 0.0)) ? z[i] : w[i] / std::abs(w[i]);
    return out;
}

inline PhaseCode pmli_step(const HermitianForm& loaded, const PhaseCode& z) {
    if (loaded.dim() != z.size())
        throw std::invalid_argument("pmli_step: dimension mismatch");
    return PhaseCode::from_entries(pmli_step_entries(detail::FormOp{&loaded}, z.entries()));
}

struct SubproblemResult {
    PhaseCode code;
    int iterations = 0;
    double surrogate = 0.0; // final z^H B~ z
};

// Iterate pmli steps until the surrogate's relative change drops below
// inner_tol or max_inner is hit. On a PSD operator the surrogate never
// decreases, so the final value is >= the initial one.
template <typename Op>
SubproblemResult solve_subproblem_op(const Op& loaded, const PhaseCode& init,
                                     const SolverConfig& cfg) {
    cfg.validate();
    if (loaded.dim() != init.size())
        throw std::invalid_argument("solve_subproblem: dimension mismatch");
    cvec z = init.entries();
    cvec w = loaded.apply(z);
    double q = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) q += (std::conj(z[i]) * w[i]).real();
    int t = 0;
    while (t < cfg.max_inner) {
        ++t;
        cvec zn(z.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            zn[i] = (w[i] == cdouble(0.0, 0.0)) ? z[i] : w[i] / std::abs(w[i]);
        z = std::move(zn);
        w = loaded.apply(z);
        double qn = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) qn += (std::conj(z[i]) * w[i]).real();
        if (q == 0.0) {
            if (qn == 0.0) { q = qn; break; }
        } else if (std::abs(qn - q) < cfg.inner_tol * std::abs(q)) {
            q = qn;
            break;
        }
        q = qn;
    }
    return {PhaseCode::from_entries(z), t, q};
}

inline SubproblemResult solve_subproblem(const HermitianForm& loaded, const PhaseCode& init,
                                         const SolverConfig& cfg) {
    return solve_subproblem_op(detail::FormOp{&loaded}, init, cfg);
}

struct CodesignResult {
    PhaseCode x;
    PhaseCode y;
    DesignTrace trace;
};

// Cyclic alternation: loaded form from the fixed code, inner iterations for
// the free one, in both directions, until the outer objective settles. The
// trace logs the objective after every full outer iteration, evaluated
// directly from the definition (recovering it from the surrogate would
// cancel ~12 digits at realistic sizes).
inline CodesignResult codesign(const PhaseCode& x0, const PhaseCode& y0, const DesignGrid& grid,
                               const SolverConfig& cfg) {
    cfg.validate();
    if (x0.size() != y0.size())
        throw std::invalid_argument("codesign: codes must have equal length");
    grid.check_against(x0.size());

    PhaseCode x = x0;
    PhaseCode y = y0;
    DesignTrace trace;
    trace.objective_per_outer.push_back(interference_objective(x, y, grid));
    trace.initial_objective = trace.objective_per_outer.front();

    // An exactly zero objective leaves the relative stop undefined and
    // nothing to improve; report it as converged on the spot.
    if (trace.initial_objective == 0.0) {
        trace.final_objective = 0.0;
        trace.converged = true;
        return {std::move(x), std::move(y), std::move(trace)};
    }

    for (int s = 1; s <= cfg.max_outer; ++s) {
        int tx = 0;
        int ty = 0;
        if (!cfg.matrix_free) {
            const HermitianForm by = build_quadratic_form(y, grid, FormSide::fixed_is_y);
            const double lam_y = dominant_eigenvalue(by, cfg.loading_margin);
            const HermitianForm by_loaded = diagonal_load(by, lam_y);
            SubproblemResult rx = solve_subproblem(by_loaded, x, cfg);
            tx = rx.iterations;
            PhaseCode x_new = std::move(rx.code);

            const PhaseCode& x_for_y =
                (cfg.update_order == UpdateOrder::gauss_seidel) ? x_new : x;
            const HermitianForm bx = build_quadratic_form(x_for_y, grid, FormSide::fixed_is_x);
            const double lam_x = dominant_eigenvalue(bx, cfg.loading_margin);
            const HermitianForm bx_loaded = diagonal_load(bx, lam_x);
            SubproblemResult ry = solve_subproblem(bx_loaded, y, cfg);
            ty = ry.iterations;
            x = std::move(x_new);
            y = std::move(ry.code);
        } else {
            const double lam_y = dominant_eigenvalue_matrix_free(y, grid, FormSide::fixed_is_y,
                                                                 cfg.loading_margin);
            LoadedFormOperator op_y{&y, &grid, FormSide::fixed_is_y, lam_y};
            SubproblemResult rx = solve_subproblem_op(op_y, x, cfg);
            tx = rx.iterations;
            PhaseCode x_new = std::move(rx.code);

            const PhaseCode& x_for_y =
                (cfg.update_order == UpdateOrder::gauss_seidel) ? x_new : x;
            const double lam_x = dominant_eigenvalue_matrix_free(
                x_for_y, grid, FormSide::fixed_is_x, cfg.loading_margin);
            LoadedFormOperator op_x{&x_for_y, &grid, FormSide::fixed_is_x, lam_x};
            SubproblemResult ry = solve_subproblem_op(op_x, y, cfg);
            ty = ry.iterations;
            x = std::move(x_new);
            y = std::move(ry.code);
        }

        const double j_prev = trace.objective_per_outer.back();
        const double j_now = interference_objective(x, y, grid);
        trace.objective_per_outer.push_back(j_now);
        trace.inner_iteration_counts.emplace_back(tx, ty);
        if (j_now == 0.0) {
            trace.converged = true;
            break;
        }
        if (std::abs(j_now - j_prev) / j_prev < cfg.epsilon) {
            trace.converged = true;
            break;
        }
    }

    trace.final_objective = trace.objective_per_outer.back();
    return {std::move(x), std::move(y), std::move(trace)};
}

// Stock random initialization: i.i.d. phases uniform on [0, 2*pi). Streams
// keep x and y draws independent under one seed.
inline PhaseCode random_code(std::size_t k, std::uint64_t seed, std::uint64_t stream = 0) {
    return PhaseCode(random_phases(k, seed, stream));
}

} // namespace pmcw
