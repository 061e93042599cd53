#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wealthpde/model.hpp"
#include "wealthpde/postprocess.hpp"
#include "wealthpde/tridiagonal.hpp"

namespace wealthpde {

/// Discrete generator A of the controlled wealth process on the grid,
/// stored by diagonals, plus the per-node upwind choice:
/// +1 forward difference, -1 backward, 0 no first-order term.
struct UpwindOperator {
    Tridiagonal a;
    std::vector<int> drift_sign;
};

/// Outcome of the B = rho I - A structure check.
struct MMatrixReport {
    bool ok = true;
    int bad_row = -1;
    std::string reason;
};

struct SolverSettings {
    double tol_foc = 5e-6;      // sup-norm policy-update tolerance
    double tol_hjb = 5e-5;      // sup-norm HJB residual tolerance
    int max_iter = 2000;
    double relaxation = 1.0;    // in (0, 1]
    double init_fraction = 0.9; // c0 = init_fraction * (r a + y)
    // With sigma == 0, cap consumption at r a + y so wealth never drifts
    // negative; inert when sigma > 0.
    bool enforce_mu_nonneg_sigma0 = true;

    void validate() const;

    bool operator==(const SolverSettings&) const = default;
};

/// One Howard iteration, mirroring the emitted trace columns plus the raw
/// first-order-condition gap ||u'(c_n) - V'_n||_inf kept for logging.
struct TraceRecord {
    int iteration = 0;
    double hjb_residual = 0.0;
    double foc_error = 0.0;
    bool m_matrix_ok = false;
    double foc_gap = 0.0;
};

struct PolicySolution {
    GridFunction v;
    GridFunction c;
    GridFunction mu;
    std::vector<TraceRecord> trace;
    bool converged = false;
    int iterations = 0;
};

/// Monotone upwind discretization of
///   (A V)(a) ~ mu(a) V'(a) + sigma^2/2 V''(a)
/// with reflecting boundaries. First-order term: forward difference when
/// mu_i > 0, backward when mu_i < 0, none at mu_i = 0; a one-sided
/// difference that would point out of the domain at a boundary is dropped
/// (no flow leaves [0, a_max]). Off-diagonals are >= 0 and every row sums
/// to 0 by construction.
UpwindOperator build_upwind_operator(const GridFunction& c, const Grid& grid,
                                     const ModelParams& params);

/// B = rho I - A must have a strictly positive diagonal, non-positive
/// off-diagonals, and row sums >= rho - 1e-12.
MMatrixReport check_m_matrix(const UpwindOperator& op, double rho);

/// Solve (rho I - A(c)) V = u(c) for the value of following policy c
/// forever. Throws SolverError if the operator fails check_m_matrix or the
/// solve is inaccurate.
GridFunction policy_evaluation(const GridFunction& c, const Grid& grid,
                               const ModelParams& params);

/// Upwind-consistent first-order condition: at each node try the forward
/// difference (kept if its implied drift is positive), then the backward
/// difference (kept if its implied drift is negative), else c = r a + y.
/// Derivative estimates are floored at u'(100 (r a_max + y)) before
/// inversion. Boundaries only consider the inward one-sided difference.
GridFunction policy_improvement(const GridFunction& v, const Grid& grid,
                                const ModelParams& params);

/// Howard policy iteration with per-iteration policy postprocessing.
/// postprocessor maps a raw improved policy to the policy actually used.
PolicySolution solve_hjb(const Grid& grid, const ModelParams& params,
                         const SolverSettings& settings,
                         const std::function<GridFunction(const GridFunction&)>& postprocessor);

/// Convenience overload wiring in postprocess() with the given settings.
PolicySolution solve_hjb(const Grid& grid, const ModelParams& params,
                         const SolverSettings& settings,
                         const PostprocessSettings& post);

} // namespace wealthpde
